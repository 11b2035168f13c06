import numpy as np
import pytest

from quatcalc.qmatrix import QMatrix, chi, chi_inv, op_norm, polar
from quatcalc.quaternion import Quaternion
from quatcalc.irreducibility import (
    commutant,
    complex_strongly_irreducible,
    extension_irreducibility_check,
    find_idempotent,
    is_reducible,
    is_strongly_irreducible,
)

Q_I = Quaternion(0, 0, 1, 0)
Q_J = Quaternion(0, 0, 0, 1)


def _jordan(eig: complex, n: int) -> QMatrix:
    M = np.eye(n, dtype=complex) * eig + np.eye(n, k=1, dtype=complex)
    full = np.zeros((2 * n, 2 * n), dtype=complex)
    full[:n, :n] = M
    full[n:, n:] = M.conj()
    return chi_inv(full)


def test_commutant_dimensions():
    # diag(i, 3): commutant is {diag(a, b) : a i = i a} -> a in span{1,i},
    # b arbitrary quaternion: real dimension 2 + 4 = 6
    T = QMatrix.diag([Q_I, Quaternion(3, 0, 0, 0)])
    basis = commutant(T)
    assert len(basis) == 6
    # Jordan block J2(i): commutant = {aI + bN : a,b in span{1,i}} -> dim 4
    J = _jordan(1j, 2)
    assert len(commutant(J)) == 4
    # identity commutes with everything: dim = 4 n^2
    assert len(commutant(QMatrix.eye(2))) == 16


def test_commutant_elements_commute():
    rng = np.random.default_rng(3)
    T = QMatrix(rng.standard_normal((3, 3, 4)))
    for M in commutant(T):
        assert op_norm(M @ T - T @ M) <= 1e-8 * max(op_norm(T), 1.0)


def test_is_reducible_diagonal():
    T = QMatrix.diag([Q_I, Quaternion(3, 0, 0, 0)])
    rep = is_reducible(T)
    assert rep.reducible
    P = rep.witness
    assert op_norm(P @ P - P) <= 1e-8
    assert op_norm(P @ T - T @ P) <= 1e-8
    assert max(rep.residuals.values()) <= 1e-6


def test_is_reducible_false_for_jordan_block():
    # a single Jordan block admits no nontrivial reducing (orthogonal,
    # commuting with T and T*) projection
    rep = is_reducible(_jordan(1j, 2))
    assert not rep.reducible
    assert rep.witness is None


def test_strong_irreducibility_catalog():
    cases = [
        (_jordan(1j, 2), "irreducible"),
        (_jordan(1j, 3), "irreducible"),
        (_jordan(0.5, 2), "irreducible"),
        (QMatrix.diag([Q_I, Quaternion(3, 0, 0, 0)]), "decomposable"),
        (QMatrix.diag([Q_I, Q_I]), "decomposable"),
        (QMatrix.eye(2), "decomposable"),
        (QMatrix.diag([Q_I]), "irreducible"),
        (QMatrix.diag([Quaternion(2, 0, 0, 0)]), "irreducible"),
    ]
    for T, expected in cases:
        rep = is_strongly_irreducible(T)
        assert rep.verdict == expected, rep.detail
        if expected == "decomposable":
            P = rep.witness
            scale = max(op_norm(T), 1.0)
            assert op_norm(P @ P - P) <= 1e-6
            assert op_norm(P @ T - T @ P) <= 1e-6 * scale
            # nontrivial: neither 0 nor the identity
            assert op_norm(P) > 1e-3
            assert op_norm(P - QMatrix.eye(T.rows)) > 1e-3


def test_strong_irreducibility_similarity_invariant():
    rng = np.random.default_rng(5)
    J = _jordan(1j, 2)
    D = QMatrix.diag([Q_I, Quaternion(3, 0, 0, 0)])
    for _ in range(10):
        while True:
            X = QMatrix(rng.standard_normal((2, 2, 4)))
            Xc = chi(X)
            if np.linalg.cond(Xc) < 20:
                break
        Xinv = chi_inv(np.linalg.inv(Xc))
        assert is_strongly_irreducible(X @ J @ Xinv).verdict == "irreducible"
        assert is_strongly_irreducible(X @ D @ Xinv).verdict == "decomposable"


def test_find_idempotent_oracle():
    D = QMatrix.diag([Q_I, Quaternion(3, 0, 0, 0)])
    P = find_idempotent(D, seed=7)
    assert P is not None
    assert op_norm(P @ P - P) <= 1e-8
    assert op_norm(P @ D - D @ P) <= 1e-8 * op_norm(D)
    assert op_norm(P) > 1e-3 and op_norm(P - QMatrix.eye(2)) > 1e-3
    # single Jordan block has only trivial commuting idempotents
    assert find_idempotent(_jordan(1j, 2), seed=7) is None


def test_complex_strong_irreducibility():
    J2 = np.array([[1j, 1], [0, 1j]])
    assert complex_strongly_irreducible(J2)
    D = np.diag([1j, 3.0 + 0j])
    assert not complex_strongly_irreducible(D)
    # two Jordan blocks for the same eigenvalue: geometric multiplicity 2
    J22 = np.zeros((4, 4), dtype=complex)
    J22[:2, :2] = J2
    J22[2:, 2:] = J2
    assert not complex_strongly_irreducible(J22)


def test_extension_preserves_irreducibility_verdict():
    rng = np.random.default_rng(9)
    n = 3
    cases = [
        np.eye(n, dtype=complex) * 1j + np.eye(n, k=1, dtype=complex),
        np.diag([1j, 3.0 + 0j, -1.0 + 2j]),
        np.diag([1j, 1j, 0.5 + 0j]),
    ]
    A = QMatrix(rng.standard_normal((n, n, 4))) + QMatrix.eye(n) * 3.0
    U, _ = polar(A)
    J = U @ QMatrix.diag([Q_I] * n) @ U.adjoint()
    for Sp in cases:
        out = extension_irreducibility_check(Sp, J)
        assert out["agree"], out
        assert out["quaternionic_verdict"] in ("irreducible", "decomposable")
        assert out["complex_strongly_irreducible"] == (
            out["quaternionic_verdict"] == "irreducible")
