"""Quaternionic matrices acting on right-module column vectors.

A ``QMatrix`` stores an (n, m, 4) float array of quaternion entries.  All
eigen/SVD work is routed through the complex adjoint representation

    chi(T) = [[A, B], [-conj(B), conj(A)]],   T = A + B*j,

a real-algebra *-isomorphism onto the 2n x 2m complex matrices satisfying
J0 M = conj(M) J0 with J0 = [[0, I], [-I, 0]].  Vectors v = a + b*j embed
as psi(v) = [a; -conj(b)], so chi(T) psi(v) = psi(T v) and psi is isometric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .quaternion import (
    ImaginaryUnit,
    Quaternion,
    UNIT_I,
    UNIT_J,
    qconj,
    qmul,
)

__all__ = [
    "QMatrix",
    "chi",
    "chi_inv",
    "chi_vec",
    "chi_vec_inv",
    "op_norm",
    "positive_sqrt",
    "modulus",
    "polar",
    "cartesian",
    "slice_split",
    "extend",
    "restrict",
    "plus_eigenbasis",
    "normal_eigensystem",
]


class QMatrix:
    """Immutable quaternion matrix; entries array has shape (rows, cols, 4)."""

    __slots__ = ("entries",)

    def __init__(self, entries: np.ndarray):
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 3 or entries.shape[2] != 4:
            raise ValueError("entries must have shape (rows, cols, 4)")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("QMatrix is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int | None = None) -> "QMatrix":
        cols = rows if cols is None else cols
        return QMatrix(np.zeros((rows, cols, 4)))

    @staticmethod
    def eye(n: int) -> "QMatrix":
        e = np.zeros((n, n, 4))
        e[np.arange(n), np.arange(n), 0] = 1.0
        return QMatrix(e)

    @staticmethod
    def diag(values) -> "QMatrix":
        vals = [v if isinstance(v, Quaternion) else _as_quat(v) for v in values]
        n = len(vals)
        e = np.zeros((n, n, 4))
        for r, v in enumerate(vals):
            e[r, r] = v.to_array()
        return QMatrix(e)

    @staticmethod
    def from_quaternions(rows) -> "QMatrix":
        data = [[_as_quat(v).to_array() for v in row] for row in rows]
        return QMatrix(np.array(data, dtype=float))

    @staticmethod
    def from_complex(M: np.ndarray) -> "QMatrix":
        """Entrywise embedding of a complex matrix into the slice C_i."""
        M = np.asarray(M, dtype=complex)
        e = np.zeros((*M.shape, 4))
        e[..., 0] = M.real
        e[..., 1] = M.imag
        return QMatrix(e)

    @staticmethod
    def real_scalar(n: int, value: float) -> "QMatrix":
        e = np.zeros((n, n, 4))
        e[np.arange(n), np.arange(n), 0] = value
        return QMatrix(e)

    # -- shape / access ------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, rc) -> Quaternion:
        r, c = rc
        return Quaternion.from_array(self.entries[r, c])

    def column(self, c: int) -> np.ndarray:
        """Column as an (n, 4) quaternion-component array."""
        return self.entries[:, c, :].copy()

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.entries + other.entries)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.entries - other.entries)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.entries)

    def __mul__(self, scalar: float) -> "QMatrix":
        return QMatrix(self.entries * float(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in quaternion matmul")
        # contract over the shared index with the Hamilton product
        p = self.entries[:, :, None, :]      # (r, k, 1, 4)
        q = other.entries[None, :, :, :]     # (1, k, c, 4)
        prod = qmul(p, q)                    # (r, k, c, 4)
        return QMatrix(prod.sum(axis=1))

    def adjoint(self) -> "QMatrix":
        return QMatrix(np.transpose(qconj(self.entries), (1, 0, 2)))

    def scale_left(self, q: Quaternion) -> "QMatrix":
        """q . T  (left module action: entrywise left multiplication by q)."""
        return QMatrix(qmul(q.to_array(), self.entries))

    def scale_right(self, q: Quaternion) -> "QMatrix":
        """T . q  (right module action: entrywise right multiplication by q)."""
        return QMatrix(qmul(self.entries, q.to_array()))

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Left action on an (n, 4) quaternionic column vector."""
        vec = np.asarray(vec, dtype=float)
        prod = qmul(self.entries, vec[None, :, :])
        return prod.sum(axis=1)

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.entries ** 2)))

    def is_close(self, other: "QMatrix", tol: float = 1e-12) -> bool:
        return op_norm(self - other) <= tol

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "data": self.entries.tolist(),
        }

    @staticmethod
    def from_json(obj: dict) -> "QMatrix":
        data = np.asarray(obj["data"], dtype=float)
        if data.shape != (obj["rows"], obj["cols"], 4):
            raise ValueError("matrix data does not match declared shape")
        return QMatrix(data)

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols})"


def _as_quat(v) -> Quaternion:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, ImaginaryUnit):
        return v.to_quaternion()
    if isinstance(v, complex):
        return Quaternion.from_complex(v)
    return Quaternion(float(v))


# ---------------------------------------------------------------------------
# complex adjoint representation
# ---------------------------------------------------------------------------

def chi(T: QMatrix) -> np.ndarray:
    """Complex 2n x 2m adjoint representation of T."""
    e = T.entries
    A = e[..., 0] + 1j * e[..., 1]
    B = e[..., 2] + 1j * e[..., 3]
    return np.block([[A, B], [-B.conj(), A.conj()]])


def _chi_defect(M: np.ndarray) -> float:
    n2, m2 = M.shape
    n, m = n2 // 2, m2 // 2
    P, Q = M[:n, :m], M[:n, m:]
    R, S = M[n:, :m], M[n:, m:]
    return max(np.abs(S - P.conj()).max(initial=0.0),
               np.abs(R + Q.conj()).max(initial=0.0))


def chi_inv(M: np.ndarray, tol: float = 1e-12) -> QMatrix:
    """Inverse of ``chi``; validates the symplectic compatibility J0 M = conj(M) J0.

    ``tol`` is relative to the largest entry of M.
    """
    M = np.asarray(M, dtype=complex)
    n2, m2 = M.shape
    if n2 % 2 or m2 % 2:
        raise ValueError("chi image must have even dimensions")
    n, m = n2 // 2, m2 // 2
    scale = max(np.abs(M).max(initial=0.0), 1.0)
    if _chi_defect(M) > tol * scale:
        raise ValueError("matrix is not in the image of chi "
                         f"(defect {_chi_defect(M):.3e}, scale {scale:.3e})")
    A = 0.5 * (M[:n, :m] + M[n:, m:].conj())
    B = 0.5 * (M[:n, m:] - M[n:, :m].conj())
    e = np.empty((n, m, 4))
    e[..., 0], e[..., 1] = A.real, A.imag
    e[..., 2], e[..., 3] = B.real, B.imag
    return QMatrix(e)


def _chi_symmetrize(M: np.ndarray) -> np.ndarray:
    """Project onto the image of chi (average with its J0-conjugate)."""
    n = M.shape[0] // 2
    m = M.shape[1] // 2
    P, Q = M[:n, :m], M[:n, m:]
    R, S = M[n:, :m], M[n:, m:]
    A = 0.5 * (P + S.conj())
    B = 0.5 * (Q - R.conj())
    return np.block([[A, B], [-B.conj(), A.conj()]])


def chi_vec(v: np.ndarray) -> np.ndarray:
    """psi: (n, 4) quaternionic vector -> 2n complex vector [a; -conj(b)]."""
    v = np.asarray(v, dtype=float)
    a = v[:, 0] + 1j * v[:, 1]
    b = v[:, 2] + 1j * v[:, 3]
    return np.concatenate([a, -b.conj()])


def chi_vec_inv(z: np.ndarray) -> np.ndarray:
    """Inverse of ``chi_vec``."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[0] // 2
    a = z[:n]
    b = -z[n:].conj()
    out = np.empty((n, 4))
    out[:, 0], out[:, 1] = a.real, a.imag
    out[:, 2], out[:, 3] = b.real, b.imag
    return out


# ---------------------------------------------------------------------------
# norms, square roots, polar decomposition
# ---------------------------------------------------------------------------

def op_norm(T: QMatrix) -> float:
    """Operator norm sup{|Tx| : |x| <= 1} = largest singular value of chi(T)."""
    if T.rows == 0 or T.cols == 0:
        return 0.0
    s = scipy.linalg.svdvals(chi(T))
    return float(s[0]) if s.size else 0.0


def positive_sqrt(T: QMatrix, tol: float = 1e-10) -> QMatrix:
    """Unique positive square root of a positive operator.

    Eigenvalues of chi(T) may dip slightly negative; they are clipped at
    -1e-12 * ||T|| and anything below that is a domain error.
    """
    if not T.is_square:
        raise ValueError("square root requires a square matrix")
    M = chi(T)
    scale = max(np.abs(M).max(initial=0.0), 1.0)
    if np.abs(M - M.conj().T).max(initial=0.0) > tol * scale:
        raise ValueError("square root requires a self-adjoint operator")
    lam, V = np.linalg.eigh(0.5 * (M + M.conj().T))
    floor = -1e-12 * scale
    if lam.min(initial=0.0) < floor:
        raise ValueError(f"operator is indefinite (min eigenvalue {lam.min():.3e})")
    root = V @ np.diag(np.sqrt(np.clip(lam, 0.0, None))) @ V.conj().T
    return chi_inv(_chi_symmetrize(root))


def modulus(T: QMatrix) -> QMatrix:
    """|T| = (T* T)^(1/2)."""
    return positive_sqrt(T.adjoint() @ T)


def polar(T: QMatrix, rank_tol: float = 1e-10) -> tuple[QMatrix, QMatrix]:
    """Polar decomposition T = W0 |T| with N(T) = N(W0).

    W0 is the partial isometry T |T|^+ ; zero singular values map to zero so
    that the null spaces of T and W0 coincide.
    """
    if not T.is_square:
        raise ValueError("polar decomposition requires a square matrix")
    M = chi(T)
    H = M.conj().T @ M
    lam, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    lam = np.clip(lam, 0.0, None)
    sv = np.sqrt(lam)
    cutoff = rank_tol * max(sv.max(initial=0.0), 1e-300)
    inv_sv = np.where(sv > cutoff, 1.0 / np.where(sv > cutoff, sv, 1.0), 0.0)
    absT = V @ np.diag(sv) @ V.conj().T
    W = M @ V @ np.diag(inv_sv) @ V.conj().T
    return (chi_inv(_chi_symmetrize(W)), chi_inv(_chi_symmetrize(absT)))


# ---------------------------------------------------------------------------
# normal eigensystem (quaternionic spectral decomposition)
# ---------------------------------------------------------------------------

def _quat_dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """<u, v> = sum conj(u_r) v_r for (n, 4) vectors; returns a 4-array."""
    return qmul(qconj(u), v).sum(axis=0)


def _vec_norm(u: np.ndarray) -> float:
    return float(np.sqrt(np.sum(u * u)))


def _right_scale(u: np.ndarray, q: np.ndarray) -> np.ndarray:
    return qmul(u, q)


_J_ARR = np.array([0.0, 0.0, 1.0, 0.0])


def normal_eigensystem(T: QMatrix, tol: float = 1e-9) -> tuple[np.ndarray, QMatrix]:
    """Spectral decomposition of a normal T: T = U diag(lam) U*.

    Returns ``(lam, U)`` where ``lam`` is a complex array of eigenvalues in
    the closed upper half plane of C_i and the columns of the unitary U are
    quaternionic eigenvectors: T u_l = u_l * lam_l.
    """
    if not T.is_square:
        raise ValueError("eigensystem requires a square matrix")
    n = T.rows
    N = chi(T)
    scale = max(op_norm(T), 1.0)
    defect = np.abs(N @ N.conj().T - N.conj().T @ N).max(initial=0.0)
    if defect > tol * scale ** 2 * 10:
        raise ValueError(f"matrix is not normal (defect {defect:.3e})")
    Tsch, Q = scipy.linalg.schur(N, output="complex")
    lam_all = np.diag(Tsch)
    cols: list[np.ndarray] = []
    vals: list[complex] = []
    order = np.lexsort((np.abs(lam_all.imag), lam_all.real))
    for idx in order:
        if len(cols) == n:
            break
        lam = lam_all[idx]
        u = chi_vec_inv(Q[:, idx])
        if lam.imag < 0:
            # canonicalize to the upper half plane: u*j is an eigenvector
            # for conj(lam)
            u = _right_scale(u, _J_ARR)
            lam = lam.conjugate()
        # quaternionic Gram-Schmidt against accepted vectors
        for v in cols:
            u = u - _right_scale(v, _quat_dot(v, u))
        nu = _vec_norm(u)
        if nu > 0.1:
            cols.append(u / nu)
            vals.append(complex(lam))
    if len(cols) < n:
        raise RuntimeError("failed to assemble a quaternionic eigenbasis")
    U = QMatrix(np.stack(cols, axis=1))
    return np.array(vals, dtype=complex), U


# ---------------------------------------------------------------------------
# Cartesian decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CartesianParts:
    """T = A + (1/2) J B with A = (T+T*)/2 and B = |T - T*|."""

    A: QMatrix
    B: QMatrix
    J: QMatrix


def cartesian(T: QMatrix, tol: float = 1e-10) -> CartesianParts:
    """Cartesian decomposition of a normal operator.

    J is the phase of T - T* on the complement of its kernel; on the kernel
    it acts as right multiplication by i in the Schur-adapted eigenbasis
    (a deterministic but non-unique completion).
    """
    if not T.is_square:
        raise ValueError("cartesian decomposition requires a square matrix")
    scale = max(op_norm(T), 1e-300)
    defect = op_norm(T.adjoint() @ T - T @ T.adjoint())
    if defect > tol * scale ** 2 * 10:
        raise ValueError(f"cartesian decomposition requires a normal operator "
                         f"(defect {defect:.3e})")
    lam, U = normal_eigensystem(T)
    A = 0.5 * (T + T.adjoint())
    Uc = chi(U)
    d = 2.0 * np.abs(lam.imag)
    B = chi_inv(_chi_symmetrize(Uc @ np.diag(np.concatenate([d, d])) @ Uc.conj().T))
    i_diag = np.diag(np.concatenate([1j * np.ones(T.rows), -1j * np.ones(T.rows)]))
    J = chi_inv(_chi_symmetrize(Uc @ i_diag @ Uc.conj().T))
    return CartesianParts(A=A, B=B, J=J)


# ---------------------------------------------------------------------------
# slice splitting and the extension map
# ---------------------------------------------------------------------------

def slice_split(x: np.ndarray, J: QMatrix, m: ImaginaryUnit = UNIT_I
                ) -> tuple[np.ndarray, np.ndarray]:
    """Split x = x_+ + x_- with J x_pm = +- x_pm * m; x as (n, 4) array."""
    x = np.asarray(x, dtype=float)
    Jxm = qmul(J.apply(x), m.to_array())
    x_plus = 0.5 * (x - Jxm)
    x_minus = 0.5 * (x + Jxm)
    return x_plus, x_minus


def plus_eigenbasis(J: QMatrix, tol: float = 1e-10) -> QMatrix:
    """Quaternionic-orthonormal basis of H_+^{Ji} = {x : Jx = x*i}.

    Returned as the n x n QMatrix whose columns u_l satisfy J u_l = u_l * i;
    they form a Hilbert basis of the whole space over the quaternions.
    """
    if not J.is_square:
        raise ValueError("J must be square")
    n = J.rows
    M = chi(J)
    scale = max(np.abs(M).max(initial=0.0), 1.0)
    if (np.abs(M + M.conj().T).max(initial=0.0) > tol * scale
            or np.abs(M @ M.conj().T - np.eye(2 * n)).max(initial=0.0) > tol * 10):
        raise ValueError("J must be anti-self-adjoint and unitary")
    H = -1j * M  # Hermitian with eigenvalues +-1
    lam, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    plus = V[:, lam > 0.0]
    if plus.shape[1] != n:
        raise ValueError("+i eigenspace of J has wrong dimension")
    cols = [chi_vec_inv(plus[:, l]) for l in range(n)]
    return QMatrix(np.stack(cols, axis=1))


def extend(Tp: np.ndarray, J: QMatrix, basis: QMatrix | None = None) -> QMatrix:
    """Quaternionic extension of a C_i-linear operator on H_+^{Ji}.

    ``Tp`` is the complex matrix of the operator in an orthonormal basis of
    the +i eigenspace of J (computed from J when not supplied).  The
    anticommuting unit completing the basis is fixed to j.
    """
    Tp = np.asarray(Tp, dtype=complex)
    n = J.rows
    if Tp.shape != (n, n):
        raise ValueError("operator matrix must be n x n for J on H^n")
    U = plus_eigenbasis(J) if basis is None else basis
    Tq = QMatrix.from_complex(Tp)
    return U @ Tq @ U.adjoint()


def restrict(V: QMatrix, J: QMatrix, tol: float = 1e-10,
             basis: QMatrix | None = None) -> np.ndarray:
    """Complex matrix of a J-commuting operator restricted to H_+^{Ji}."""
    scale = max(op_norm(V), 1.0)
    if op_norm(J @ V - V @ J) > tol * scale * 10:
        raise ValueError("operator does not commute with J; no restriction exists")
    U = plus_eigenbasis(J) if basis is None else basis
    R = U.adjoint() @ V @ U
    e = R.entries
    if np.abs(e[..., 2:]).max(initial=0.0) > tol * scale * 10:
        raise ValueError("restriction is not C_i-valued")
    return e[..., 0] + 1j * e[..., 1]
