"""Dense complex linear algebra with canonical output conventions.

The eigensolvers here wrap LAPACK (through numpy/scipy) and post-process the
result so that it is a deterministic function of the input:

* Hermitian spectra are sorted strictly descending.
* Unitary spectra are sorted by descending angle inside a branch
  ``(cut - 2*pi, cut]`` (``cut = pi`` by default).
* Every eigenvector column is rescaled so that its largest-modulus entry is
  real and positive; ties go to the lowest row index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotHermitian, NotUnitary

STRUCT_TOL = 1e-10
DEGENERACY_TOL = 1e-8

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues, unitary matrix of column eigenvectors and the spectral gap.

    ``min_gap`` is the smallest pairwise separation of the eigenvalues (for
    unitary input: the smallest angular separation on the circle).
    ``degenerate`` is a flag, not an error.
    """

    values: np.ndarray
    vectors: np.ndarray
    min_gap: float
    degenerate: bool

    @property
    def angles(self) -> np.ndarray:
        """Principal-branch angles of unitary eigenvalues (undefined for Hermitian)."""
        return np.angle(self.values)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def fro(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def hermitian_residual(a) -> float:
    a = as_matrix(a)
    return fro(a - dagger(a))


def antihermitian_residual(a) -> float:
    a = as_matrix(a)
    return fro(a + dagger(a))


def unitary_residual(a) -> float:
    a = as_matrix(a)
    return fro(dagger(a) @ a - np.eye(a.shape[0]))


def _scale(a: np.ndarray) -> float:
    return max(1.0, fro(a))


def is_hermitian(a, tol: float = STRUCT_TOL) -> bool:
    a = as_matrix(a)
    return hermitian_residual(a) < tol * _scale(a)


def is_antihermitian(a, tol: float = STRUCT_TOL) -> bool:
    a = as_matrix(a)
    return antihermitian_residual(a) < tol * _scale(a)


def is_unitary(a, tol: float = STRUCT_TOL) -> bool:
    return unitary_residual(a) < tol


def is_diagonal(a, tol: float = STRUCT_TOL) -> bool:
    a = as_matrix(a)
    return fro(a - np.diag(np.diag(a))) < tol * _scale(a)


def fix_column_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so that its largest-modulus entry is real positive."""
    v = np.array(vectors, dtype=complex)
    mod = np.abs(v)
    top = mod.max(axis=0)
    for col in range(v.shape[1]):
        # lowest row index among (numerical) ties
        row = int(np.flatnonzero(mod[:, col] >= top[col] * (1.0 - 1e-12))[0])
        entry = v[row, col]
        v[:, col] *= np.conj(entry) / abs(entry)
    return v


def eig_hermitian(a, tol: float = STRUCT_TOL, degeneracy_tol: float = DEGENERACY_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises
    ------
    NotHermitian
        If ``||A - A^dagger||_F`` exceeds ``tol`` (relative to ``max(1, ||A||_F)``).
    """
    a = as_matrix(a)
    if not is_hermitian(a, tol):
        raise NotHermitian(f"hermitian residual {hermitian_residual(a):.3e} exceeds tolerance")
    h = 0.5 * (a + dagger(a))
    w, u = np.linalg.eigh(h)
    # stable, so tied eigenvalues keep the solver's column order
    order = np.argsort(-w, kind="stable")
    w = w[order]
    u = fix_column_phases(u[:, order])
    gap = float(np.min(w[:-1] - w[1:])) if len(w) > 1 else np.inf
    return EigenSystem(w, u, gap, gap < degeneracy_tol)


def wrap_angle(theta, cut: float = np.pi):
    """Map angles into the half-open window ``(cut - 2*pi, cut]``."""
    theta = np.asarray(theta, dtype=float)
    inside = (theta > cut - TWO_PI) & (theta <= cut)
    # values already in the window are returned bit-for-bit
    out = np.where(inside, theta, cut - np.mod(cut - theta, TWO_PI))
    return out if out.ndim else float(out)


def eig_unitary(
    u,
    tol: float = STRUCT_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
    cut: float = np.pi,
) -> EigenSystem:
    """Eigendecomposition of a unitary matrix.

    A complex Schur factorisation is used so that the eigenvectors come out
    orthonormal even for clustered spectra. Eigenvalues are ordered by
    descending angle in ``(cut - 2*pi, cut]``.
    """
    u = as_matrix(u)
    if not is_unitary(u, tol):
        raise NotUnitary(f"unitarity residual {unitary_residual(u):.3e} exceeds tolerance")
    t, z = scipy.linalg.schur(u, output="complex")
    lam = np.diag(t).copy()
    lam /= np.abs(lam)
    ang = wrap_angle(np.angle(lam), cut)
    order = np.argsort(-ang, kind="stable")
    lam = lam[order]
    z = fix_column_phases(z[:, order])
    n = len(lam)
    if n > 1:
        a = ang[order]
        gaps = np.concatenate([a[:-1] - a[1:], [TWO_PI - (a[0] - a[-1])]])
        gap = float(np.min(gaps))
    else:
        gap = np.inf
    return EigenSystem(lam, z, gap, gap < degeneracy_tol)


def expm_i_hermitian(h, t: float = 1.0) -> np.ndarray:
    """``exp(i t H)`` for Hermitian ``H`` via its eigendecomposition."""
    es = eig_hermitian(h)
    return (es.vectors * np.exp(1j * t * es.values)) @ dagger(es.vectors)


def diag_exp(phases) -> np.ndarray:
    """``diag(exp(i * phases))``."""
    return np.diag(np.exp(1j * np.asarray(phases, dtype=float)))


def matrix_power(a, k: int) -> np.ndarray:
    """Integer matrix power by repeated multiplication (negative k uses the inverse)."""
    a = as_matrix(a)
    if k < 0:
        a = np.linalg.inv(a)
        k = -k
    out = np.eye(a.shape[0], dtype=complex)
    for _ in range(k):
        out = out @ a
    return out


def unitary_power(g, k: int) -> np.ndarray:
    """Power of a unitary matrix; negative ``k`` uses the adjoint as inverse."""
    g = as_matrix(g)
    return matrix_power(dagger(g) if k < 0 else g, abs(k))


def det(a) -> complex:
    return complex(np.linalg.det(as_matrix(a)))


def reconstruction_residual(a, es: EigenSystem) -> float:
    a = as_matrix(a)
    return fro(a @ es.vectors - es.vectors * es.values)
