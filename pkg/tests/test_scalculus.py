import numpy as np
import pytest

from quatcalc.quaternion import (
    UNIT_I,
    ImaginaryUnit,
    Quaternion,
    Sphere,
)
from quatcalc.qmatrix import QMatrix, op_norm
from quatcalc.scalculus import (
    Circle,
    PartitionError,
    SeparationError,
    build_contour,
    calc_adjoint_check,
    func_calc,
    range_basis,
    riesz_decompose,
    riesz_projection,
)
from quatcalc.spectrum import spherical_spectrum


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def _random_unitary(rng, n):
    from quatcalc.qmatrix import polar
    A = QMatrix(rng.standard_normal((n, n, 4))) + QMatrix.eye(n) * 3.0
    U, _ = polar(A)
    return U


def test_contour_winding_and_json():
    c = build_contour([Sphere(0.0, 1.0)], [Sphere(3.0, 0.0)])
    assert c.winding(Sphere(0.0, 1.0)) == 1
    assert c.winding(Sphere(3.0, 0.0)) == 0
    blob = c.to_json()
    assert set(blob) == {"m", "circles", "nodes"}
    assert all(set(circ) == {"center", "radius", "height"}
               for circ in blob["circles"])


def test_contour_nodes_close_up():
    """Quadrature nodes integrate dq to zero around each closed circle."""
    c = build_contour([Sphere(0.5, 0.25)], [])
    total = sum(w for _, w in c.nodes())
    assert abs(total) <= 1e-13


def test_circle_validation():
    with pytest.raises(ValueError):
        Circle(0.0, -1.0)
    with pytest.raises(ValueError):
        Circle(0.0, 1.0, height=-0.5)


def test_separation_error_on_overlap():
    # requested sphere and excluded sphere coincide: no contour can separate
    with pytest.raises(SeparationError):
        build_contour([Sphere(0.0, 1.0)], [Sphere(0.0, 1.0)])


def test_projection_on_diagonal_matches_indicator(rng):
    # T = diag(i, 3): projection onto the sphere of i is diag(1, 0)
    T = QMatrix.diag([Quaternion(0, 0, 1, 0), Quaternion(3, 0, 0, 0)])
    spec = spherical_spectrum(T)
    c = build_contour([Sphere(0.0, 1.0)], [Sphere(3.0, 0.0)])
    P = riesz_projection(T, c, spec)
    expected = QMatrix.diag([Quaternion(1, 0, 0, 0), Quaternion(0, 0, 0, 0)])
    assert op_norm(P - expected) <= 1e-10


def test_projection_similarity_covariance(rng):
    """Oracle: Riesz projection commutes with unitary change of basis."""
    D = QMatrix.diag([Quaternion(0, 0, 1, 0), Quaternion(3, 0, 0, 0),
                      Quaternion(-1, 0.5, 0, 0)])
    U = _random_unitary(rng, 3)
    T = U @ D @ U.adjoint()
    sig = [Sphere(0.0, 1.0), Sphere(-1.0, 0.5)]
    pair = riesz_decompose(T, sig, nodes=128)
    P_direct = riesz_decompose(D, sig, nodes=128).P_sigma
    assert op_norm(pair.P_sigma - U @ P_direct @ U.adjoint()) <= 1e-10
    for key in ("idempotent_sigma", "sum_identity", "product_zero",
                "commute_sigma", "spectrum_sigma_hausdorff"):
        assert pair.residuals[key] <= 1e-8


def test_riesz_partition_errors():
    T = QMatrix.diag([Quaternion(0, 0, 1, 0), Quaternion(3, 0, 0, 0)])
    with pytest.raises(PartitionError):
        riesz_decompose(T, [Sphere(0, 1), Sphere(3, 0)])  # tau empty
    with pytest.raises(PartitionError):
        riesz_decompose(T, [Sphere(9.0, 0.0)])  # no such sphere
    with pytest.raises(PartitionError):
        riesz_decompose(T, [Sphere(0, 1)], tau=[Sphere(0, 1), Sphere(3, 0)])


def test_func_calc_polynomial(rng):
    """f(q) = q^2 + 2q + 1 through the calculus vs direct evaluation."""
    T = QMatrix.diag([Quaternion(0, 0, 1, 0), Quaternion(0.5, 0.25, 0, 0)])
    spec = spherical_spectrum(T)
    c = build_contour(spec.spheres, [])
    direct = T @ T + T * 2.0 + QMatrix.eye(2)

    def f(q):
        return q * q + 2.0 * q + Quaternion(1, 0, 0, 0)

    for side in ("left", "right"):
        got = func_calc(f, side, T, c, spec)
        assert op_norm(got - direct) <= 1e-10


def test_func_calc_constant_is_identity_scale():
    T = QMatrix.diag([Quaternion(0, 0, 1, 0)])
    c = build_contour(spherical_spectrum(T).spheres, [])
    got = func_calc(lambda q: Quaternion(1, 0, 0, 0), "left", T, c)
    assert op_norm(got - QMatrix.eye(1)) <= 1e-12


def test_calc_adjoint_rule(rng):
    T = QMatrix.diag([Quaternion(0, 0, 1, 0), Quaternion(2, 1, 0, 0)])
    c = build_contour(spherical_spectrum(T).spheres, [])

    def f(q):
        return q * q + 3.0 * q

    assert calc_adjoint_check(f, T, c) <= 1e-8


def test_slice_independence(rng):
    """The projection must not depend on the slice unit m used for the contour."""
    T = QMatrix.diag([Quaternion(0, 0, 1, 0), Quaternion(3, 0, 0, 0)])
    spec = spherical_spectrum(T)
    tilted = ImaginaryUnit.normalized(1.0, 1.0, 0.0)
    c1 = build_contour([Sphere(0.0, 1.0)], [Sphere(3.0, 0.0)], m=UNIT_I)
    c2 = build_contour([Sphere(0.0, 1.0)], [Sphere(3.0, 0.0)], m=tilted)
    P1 = riesz_projection(T, c1, spec)
    P2 = riesz_projection(T, c2, spec)
    assert op_norm(P1 - P2) <= 1e-8


def test_range_basis_is_orthonormal(rng):
    T = QMatrix.diag([Quaternion(0, 0, 1, 0), Quaternion(3, 0, 0, 0),
                      Quaternion(3, 0, 0, 0)])
    pair = riesz_decompose(T, [Sphere(3.0, 0.0)])
    B = pair.basis_sigma
    assert B.cols == 2
    gram = B.adjoint() @ B
    assert op_norm(gram - QMatrix.eye(2)) <= 1e-10


def test_restricted_spectra_partition(rng):
    T = QMatrix.diag([Quaternion(0, 0, 1, 0), Quaternion(3, 0, 0, 0),
                      Quaternion(-1, 0.5, 0, 0)])
    pair = riesz_decompose(T, [Sphere(0.0, 1.0)])
    assert pair.spectrum_sigma.distance_to(Sphere(0.0, 1.0)) <= 1e-8
    assert pair.spectrum_tau.distance_to(Sphere(3.0, 0.0)) <= 1e-8
    assert pair.spectrum_tau.distance_to(Sphere(-1.0, 0.5)) <= 1e-8
    assert pair.residuals["spectrum_tau_hausdorff"] <= 1e-8


def test_hard_geometry_real_point_between_traces():
    """A real excluded sphere lying between the conjugate traces of sigma."""
    T = QMatrix.diag([Quaternion(-0.626, 0.574, 0, 0),
                      Quaternion(-0.7, 0, 0, 0)])
    pair = riesz_decompose(T, [Sphere(-0.626, 0.574)])
    assert pair.residuals["idempotent_sigma"] <= 1e-10
    assert pair.residuals["product_zero"] <= 1e-10
