import numpy as np
import pytest

from quatcalc.quaternion import Quaternion, UNIT_I
from quatcalc.qmatrix import (
    QMatrix,
    cartesian,
    chi,
    chi_inv,
    chi_vec,
    extend,
    modulus,
    normal_eigensystem,
    op_norm,
    plus_eigenbasis,
    polar,
    positive_sqrt,
    restrict,
    slice_split,
)


def rand_q(rng, shape):
    return QMatrix(rng.standard_normal(shape + (4,)))


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def test_chi_is_a_star_homomorphism(rng):
    A = rand_q(rng, (4, 3))
    B = rand_q(rng, (3, 5))
    assert np.allclose(chi(A @ B), chi(A) @ chi(B), atol=1e-12)
    assert np.allclose(chi(A.adjoint()), chi(A).conj().T, atol=1e-12)
    assert op_norm(chi_inv(chi(A)) - A) <= 1e-12


def test_chi_vec_intertwines_action(rng):
    A = rand_q(rng, (4, 4))
    v = rng.standard_normal((4, 4))
    lhs = chi(A) @ chi_vec(v)
    rhs = chi_vec(A.apply(v))
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_chi_inv_rejects_incompatible_matrix():
    M = np.arange(16, dtype=complex).reshape(4, 4)
    with pytest.raises(ValueError):
        chi_inv(M)


def test_matmul_associativity_and_scaling(rng):
    A = rand_q(rng, (3, 3))
    B = rand_q(rng, (3, 3))
    C = rand_q(rng, (3, 3))
    assert op_norm((A @ B) @ C - A @ (B @ C)) <= 1e-12
    q = Quaternion(0.3, -1.0, 0.5, 2.0)
    # left scaling is matrix multiplication by q*I on the left
    lhs = (A @ B).scale_left(q)
    rhs = A.scale_left(q) @ B
    assert op_norm(lhs - rhs) <= 1e-12


def test_positive_sqrt_and_modulus(rng):
    A = rand_q(rng, (5, 5))
    P = A.adjoint() @ A
    R = positive_sqrt(P)
    assert op_norm(R @ R - P) <= 1e-10 * max(op_norm(P), 1.0)
    assert op_norm(R - R.adjoint()) <= 1e-10
    assert op_norm(modulus(A) - R) <= 1e-9 * max(op_norm(P), 1.0)


def test_positive_sqrt_rejects_non_positive(rng):
    A = rand_q(rng, (4, 4))
    with pytest.raises(ValueError):
        positive_sqrt(A - A.adjoint() + QMatrix.real_scalar(4, 1e-3))
    with pytest.raises(ValueError):
        positive_sqrt(QMatrix.real_scalar(3, -1.0))


def test_polar_decomposition_full_rank(rng):
    T = rand_q(rng, (5, 5))
    W, absT = polar(T)
    assert op_norm(T - W @ absT) <= 1e-10 * op_norm(T)
    # partial isometry: W*W is the identity on the full-rank case
    assert op_norm(W.adjoint() @ W - QMatrix.eye(5)) <= 1e-10


def test_polar_rank_deficient(rng):
    A = rand_q(rng, (5, 2))
    B = rand_q(rng, (2, 5))
    T = A @ B
    W, absT = polar(T)
    assert op_norm(T - W @ absT) <= 1e-10 * op_norm(T)
    sv_w = np.linalg.svd(chi(W), compute_uv=False)
    assert np.count_nonzero(sv_w > 0.5) == 4  # chi rank = 2 * quaternionic


def _random_normal(rng, lams):
    n = len(lams)
    W, _ = polar(rand_q(rng, (n, n)) + QMatrix.real_scalar(n, 3.0))
    return W @ QMatrix.diag(lams) @ W.adjoint()


def test_normal_eigensystem_reconstructs(rng):
    lams = [Quaternion(0, 1, 0, 0), Quaternion(0, 0, 2, 0),
            Quaternion(3, 0, 0, 0), Quaternion(-1, 0.5, 0.5, 0)]
    T = _random_normal(rng, lams)
    lam, U = normal_eigensystem(T)
    assert np.all(lam.imag >= -1e-12)
    D = QMatrix.diag([Quaternion(z.real, z.imag, 0, 0) for z in lam])
    assert op_norm(U @ D @ U.adjoint() - T) <= 1e-9 * op_norm(T)
    assert op_norm(U @ U.adjoint() - QMatrix.eye(4)) <= 1e-10


def test_cartesian_decomposition(rng):
    lams = [Quaternion(1, 2, 0, 0), Quaternion(0, 0, 1, 0),
            Quaternion(2, 0, 0, 0)]
    T = _random_normal(rng, lams)
    parts = cartesian(T)
    recon = parts.A + 0.5 * (parts.J @ parts.B)
    assert op_norm(T - recon) <= 1e-9 * op_norm(T)
    assert op_norm(parts.J + parts.J.adjoint()) <= 1e-10
    assert op_norm(parts.J @ parts.J.adjoint() - QMatrix.eye(3)) <= 1e-10


def test_cartesian_rejects_nonnormal(rng):
    ent = QMatrix.zeros(2, 2).entries.copy()
    ent[0, 1] = np.array([1.0, 0, 0, 0])
    with pytest.raises(ValueError):
        cartesian(QMatrix(ent))


def _random_J(rng, n):
    W, _ = polar(rand_q(rng, (n, n)) + QMatrix.real_scalar(n, 3.0))
    return W @ QMatrix.diag([Quaternion(0, 1, 0, 0)] * n) @ W.adjoint()


def test_slice_split(rng):
    J = _random_J(rng, 4)
    x = rng.standard_normal((4, 4))
    xp, xm = slice_split(x, J)
    assert np.allclose(xp + xm, x, atol=1e-12)
    # J x_+ = x_+ * i and J x_- = -x_- * i
    from quatcalc.quaternion import qmul
    i_arr = np.array([0.0, 1.0, 0.0, 0.0])
    assert np.allclose(J.apply(xp), qmul(xp, i_arr), atol=1e-10)
    assert np.allclose(J.apply(xm), -qmul(xm, i_arr), atol=1e-10)


def test_extend_restrict_roundtrip_and_norm(rng):
    n = 4
    J = _random_J(rng, n)
    basis = plus_eigenbasis(J)
    Sp = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Tq = extend(Sp, J, basis=basis)
    assert abs(op_norm(Tq) - np.linalg.norm(Sp, 2)) <= 1e-12 * \
        max(1.0, np.linalg.norm(Sp, 2))
    assert op_norm(J @ Tq - Tq @ J) <= 1e-10 * max(1.0, op_norm(Tq))
    back = restrict(Tq, J, basis=basis)
    assert np.linalg.norm(back - Sp, 2) <= 1e-10 * \
        max(1.0, np.linalg.norm(Sp, 2))


def test_restrict_rejects_non_commuting(rng):
    J = _random_J(rng, 3)
    V = rand_q(rng, (3, 3))
    with pytest.raises(ValueError):
        restrict(V, J)


def test_json_round_trip(rng):
    A = rand_q(rng, (2, 3))
    obj = A.to_json()
    assert obj["rows"] == 2 and obj["cols"] == 3
    B = QMatrix.from_json(obj)
    assert op_norm(A - B) == 0.0
