"""The unreduced phase space, its moment map, and cross-sections of the constraint surface.

A point of ``M = T*U(n) x O`` is stored as a triple ``(g, J, v)`` where the
orbit element is ``xi(x, v) = i x (1 - v v^dagger)`` with ``|v|^2 = n``.
The moment map is ``Phi = J - g^{-1} J g + xi(x, v)``.

Two families of slices are provided: the Sutherland slice, on which ``g`` is
diagonal, and the dual slices, on which ``J`` is diagonal.  The completed dual
slice is given by closed formulas for ``x > 0``; for ``x < 0`` it is obtained
from the ``x > 0`` slice through :func:`parity`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentAngles, NotInChamber, NotInteriorChamber, NotUnitary
from .linalg import as_matrix, dagger, diag_exp, fro, is_antihermitian, is_unitary
from .spaces import (
    CenterMassPointI,
    CenterMassPointII,
    Coupling,
    DualCompletedPoint,
    DualInteriorPoint,
    SutherlandPoint,
    alcove_embed,
    chamber_gaps,
)

LEVEL_TOL = 1e-9
CHAMBER_DUST = 1e-12


@dataclass(frozen=True, eq=False)
class LevelPoint:
    """Unreduced triple ``(g, J, v)`` with ``g`` unitary, ``J`` anti-hermitian, ``|v|^2 = n``."""

    g: np.ndarray
    J: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        g = as_matrix(self.g)
        J = as_matrix(self.J)
        v = np.array(self.v, dtype=complex).reshape(-1)
        n = g.shape[0]
        if J.shape != (n, n) or v.size != n:
            raise ValueError("inconsistent dimensions in (g, J, v)")
        if not is_unitary(g, LEVEL_TOL * n):
            raise NotUnitary("g is not unitary")
        if not is_antihermitian(J, LEVEL_TOL):
            raise ValueError("J is not anti-hermitian")
        if abs(np.vdot(v, v).real - n) > LEVEL_TOL * n:
            raise ValueError(f"|v|^2 must equal n = {n}, got {np.vdot(v, v).real}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.v.size


@dataclass(frozen=True, eq=False)
class SULevelPoint(LevelPoint):
    """Triple with ``det g = 1`` and ``tr J = 0``; the same moment map applies."""

    def __post_init__(self):
        super().__post_init__()
        if abs(np.linalg.det(self.g) - 1) > 1e-8:
            raise ValueError("Gamma must have unit determinant")
        if abs(np.trace(self.J)) > 1e-8 * max(1.0, fro(self.J)):
            raise ValueError("Jsu must be traceless")

    @property
    def Gamma(self) -> np.ndarray:
        return self.g

    @property
    def Jsu(self) -> np.ndarray:
        return self.J


def xi(x: float, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return 1j * x * (np.eye(v.size) - np.outer(v, v.conj()))


def moment_map(pt: LevelPoint, c: Coupling) -> np.ndarray:
    return pt.J - dagger(pt.g) @ pt.J @ pt.g + xi(c.x, pt.v)


def moment_residual(pt: LevelPoint, c: Coupling) -> float:
    """Frobenius norm of the moment map (always traceless up to rounding)."""
    return fro(moment_map(pt, c))


def moment_trace(pt: LevelPoint, c: Coupling) -> float:
    return float(abs(np.trace(moment_map(pt, c))))


def gauge_act(y, pt: LevelPoint) -> LevelPoint:
    """``(y g y^-1, y J y^-1, y v)``."""
    y = as_matrix(y)
    if not is_unitary(y, LEVEL_TOL):
        raise NotUnitary("gauge element is not unitary")
    yi = dagger(y)
    return type(pt)(y @ pt.g @ yi, y @ pt.J @ yi, y @ pt.v)


def parity(pt: LevelPoint) -> LevelPoint:
    """Index reversal composed with complex conjugation.

    Maps the constraint surface at coupling ``x`` onto the one at ``-x`` and
    preserves the symplectic form.  It is an involution.
    """
    return type(pt)(pt.g.conj()[::-1, ::-1], pt.J.conj()[::-1, ::-1], pt.v.conj()[::-1])


# ---------------------------------------------------------------------------
# Sutherland slice
# ---------------------------------------------------------------------------


def _check_distinct(tau: np.ndarray, tol: float = 1e-12):
    d = np.abs(tau[:, None] - tau[None, :]) + np.eye(tau.size)
    if np.min(d) <= tol:
        raise CoincidentAngles("torus entries must be distinct")


def sutherland_J(q, p, x: float) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    tau = np.exp(1j * q)
    _check_distinct(tau)
    ratio = tau[None, :] / tau[:, None]  # tau_b / tau_a
    np.fill_diagonal(ratio, 0.0)
    off = 1j * x / (1.0 - ratio)
    np.fill_diagonal(off, 0.0)
    return off + 1j * np.diag(np.asarray(p, dtype=float))


def sutherland_slice(pt: SutherlandPoint, c: Coupling) -> LevelPoint:
    """``(diag(e^{iq}), J(q, p), (1, ..., 1))``."""
    return LevelPoint(diag_exp(pt.q), sutherland_J(pt.q, pt.p, c.x), np.ones(pt.n, dtype=complex))


def sutherland_lax(pt: SutherlandPoint, c: Coupling) -> np.ndarray:
    """Hermitian Lax matrix with diagonal ``p`` and entries ``-i x / (2 sin((q_a - q_b)/2))``."""
    q = np.asarray(pt.q, dtype=float)
    s = np.sin(0.5 * (q[:, None] - q[None, :]))
    np.fill_diagonal(s, 1.0)
    if np.min(np.abs(s)) <= 1e-12:
        raise CoincidentAngles("angles coincide mod 2pi")
    L = -1j * c.x / (2.0 * s)
    np.fill_diagonal(L, pt.p)
    return L


def sutherland_hamiltonian(q, p, x: float) -> float:
    q = np.asarray(q, dtype=float)
    i, j = np.triu_indices(q.size, 1)
    return float(0.5 * np.sum(np.square(p)) + 0.25 * x**2 * np.sum(1.0 / np.sin(0.5 * (q[i] - q[j])) ** 2))


# ---------------------------------------------------------------------------
# V, eta, aleph
# ---------------------------------------------------------------------------


def _ratio_factors(phat, x: float, tol: float = CHAMBER_DUST) -> np.ndarray:
    """``F[..., a, j] = (p_a - p_j - x) / (p_a - p_j)`` with unit diagonal, validated and clamped."""
    phat = np.asarray(phat, dtype=float)
    gaps = phat[..., :-1] - phat[..., 1:]
    scale = max(1.0, float(np.max(np.abs(phat)))) if phat.size else 1.0
    if np.any(gaps < abs(x) - tol * scale):
        raise NotInChamber(f"chamber gaps must be at least |x| = {abs(x)}; min gap {np.min(gaps)}")
    d = phat[..., :, None] - phat[..., None, :]
    n = phat.shape[-1]
    eye = np.eye(n, dtype=bool)
    d = np.where(eye, 1.0, d)
    f = np.where(eye, 1.0, (d - x) / d)
    return np.maximum(f, 0.0)


def eval_V(phat, c: Coupling) -> np.ndarray:
    """``V_b = prod_{k != b} sqrt((p_b - p_k - x)/(p_b - p_k))``; accepts batches ``(..., n)``."""
    return np.prod(np.sqrt(_ratio_factors(phat, c.x)), axis=-1)


def _excluded_products(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``P[..., a, b] = prod_{j not in {a, b}} A[..., a, j] * B[..., j, b]``."""
    n = A.shape[-1]
    T = A[..., :, :, None] * B[..., None, :, :]  # (..., a, j, b)
    a = np.arange(n)
    mask = (a[:, None, None] == a[None, :, None]) | (a[None, :, None] == a[None, None, :])
    return np.prod(np.where(mask, 1.0, T), axis=-2)


def _pair_prefactor(phat, x: float) -> np.ndarray:
    """``x / (p_b - p_a)`` off the diagonal and 1 on it."""
    phat = np.asarray(phat, dtype=float)
    d = phat[..., None, :] - phat[..., :, None]
    eye = np.eye(phat.shape[-1], dtype=bool)
    return np.where(eye, 1.0, x / np.where(eye, 1.0, d))


def eval_eta(phat, c: Coupling) -> np.ndarray:
    """Real orthogonal matrix ``eta(x, phat)``; accepts batches ``(..., n)``."""
    S = np.sqrt(_ratio_factors(phat, c.x))
    return _pair_prefactor(phat, c.x) * _excluded_products(S, S)


def eval_eta_factorized(phat, c: Coupling) -> np.ndarray:
    """``x V(x)_a V(-x)_b / (p_b - p_a + x)``; valid in the open chamber only."""
    phat = np.asarray(phat, dtype=float)
    Vp = eval_V(phat, c)
    Vm = eval_V(phat, c.mirrored())
    den = phat[..., None, :] - phat[..., :, None] + c.x
    return c.x * Vp[..., :, None] * Vm[..., None, :] / den


def sum_rule_residual(phat, c: Coupling) -> np.ndarray:
    """Max over ``b`` of ``|sum_a x V_a^2 / (p_b - p_a + x) - 1|`` per sample.

    Uses the cancelled form of each term so the closed chamber is allowed.
    """
    phat = np.asarray(phat, dtype=float)
    F = _ratio_factors(phat, c.x)
    n = phat.shape[-1]
    a = np.arange(n)
    # off-diagonal term (a, b): -x/(p_a - p_b) * prod_{k != a, b} F[a, k]
    excl = (a[None, None, :] == a[:, None, None]) | (a[None, None, :] == a[None, :, None])  # (a, b, k)
    prodF = np.prod(np.where(excl, 1.0, F[..., :, None, :]), axis=-1)  # (..., a, b)
    d = phat[..., :, None] - phat[..., None, :]
    eye = np.eye(n, dtype=bool)
    off = -c.x / np.where(eye, 1.0, d) * prodF
    V2 = np.prod(F, axis=-1)
    terms = np.where(eye, V2[..., :, None], off)
    return np.max(np.abs(terms.sum(axis=-2) - 1.0), axis=-1)


def eval_aleph(tau, c: Coupling) -> tuple[np.ndarray, np.ndarray]:
    """Torus relabelling ``aleph(x, tau)`` and its shifted version ``aleph_(x)``."""
    tau = np.asarray(tau, dtype=complex)
    inv = 1.0 / tau
    if c.x > 0:
        aleph = np.cumprod(inv[::-1])[::-1]
        shifted = np.concatenate([aleph[1:], [1.0]])
    else:
        aleph = np.cumprod(inv)
        shifted = np.concatenate([[1.0], aleph[:-1]])
    return aleph, shifted


# ---------------------------------------------------------------------------
# Dual slices
# ---------------------------------------------------------------------------


def dual_slice_interior(pt: DualInteriorPoint, c: Coupling) -> LevelPoint:
    """Gauge transform by ``aleph_(x)(e^{i qhat})`` of ``((eta D)^{-1}, -i phat, V)``."""
    if np.any(chamber_gaps(pt.phat) <= abs(c.x)):
        raise NotInteriorChamber("dual_slice_interior needs gaps strictly above |x|")
    return dual_slice_closed(pt.qhat, pt.phat, c)


def dual_slice_closed(qhat, phat, c: Coupling) -> LevelPoint:
    """The same formula on the closed chamber (the orbit map before completion)."""
    phat = np.asarray(phat, dtype=float)
    D = np.exp(1j * np.asarray(qhat, dtype=float))
    eta = eval_eta(phat, c)
    _, y = eval_aleph(D, c)
    g0 = dagger(eta * D[None, :])  # (eta D)^{-1}
    yc = y.conj()
    g = y[:, None] * g0 * yc[None, :]
    return LevelPoint(g, -1j * np.diag(phat).astype(complex), y * eval_V(phat, c))


def boundary_solution(phat, c: Coupling) -> LevelPoint:
    """The explicit permutation-matrix solution for equally spaced ``phat`` (gaps ``|x|``)."""
    phat = np.asarray(phat, dtype=float)
    n = phat.size
    g = np.zeros((n, n), dtype=complex)
    v = np.zeros(n, dtype=complex)
    if c.x > 0:
        g[0, n - 1] = 1
        for j in range(1, n):
            g[j, j - 1] = 1
        v[n - 1] = np.sqrt(n)
    else:
        g[n - 1, 0] = 1
        for j in range(n - 1):
            g[j, j + 1] = 1
        v[0] = np.sqrt(n)
    return LevelPoint(g, -1j * np.diag(phat).astype(complex), v)


def spectrum_from_moduli(z_abs2, log_abs_Z: float, x: float) -> np.ndarray:
    """Descending spectrum with ``pi_1 = -log|Z|`` and gaps ``x + |z_k|^2`` (``x > 0``)."""
    steps = np.concatenate([[0.0], np.cumsum(x + np.asarray(z_abs2, dtype=float))])
    return -log_abs_Z - steps


def completed_pieces(z, Zphase: complex, pi: np.ndarray, x: float) -> tuple[np.ndarray, np.ndarray]:
    """``(theta, calV)`` of the completed slice for ``x > 0`` given the spectrum ``pi``.

    All entries come from one product rule: with ``c_j = z_j / sqrt(|z_j|^2 + x)``,
    the ratio factors ``Q`` are used except that ``Q[a, a+1]`` is replaced by
    ``c_a`` on the left and ``Q[b-1, b]`` by ``conj(c_{b-1})`` on the right.
    """
    z = np.asarray(z, dtype=complex)
    Q = np.sqrt(_ratio_factors(pi, x))
    cz = z / np.sqrt(np.abs(z) ** 2 + x)
    n = pi.size
    A = Q.astype(complex)
    B = Q.astype(complex)
    idx = np.arange(n - 1)
    A[idx, idx + 1] = cz
    B[idx, idx + 1] = cz.conj()
    theta = _pair_prefactor(pi, x) * _excluded_products(A, B)
    theta[:, 0] *= np.conj(Zphase)
    calV = np.prod(A, axis=-1)
    calV[-1] = np.prod(Q[-1]).real
    return theta, calV


def _completed_positive(pt: DualCompletedPoint, c: Coupling) -> LevelPoint:
    x = c.x
    pi = spectrum_from_moduli(np.abs(pt.z) ** 2, np.log(abs(pt.Z)), x)
    theta, calV = completed_pieces(pt.z, pt.Z / abs(pt.Z), pi, x)
    return LevelPoint(dagger(theta), -1j * np.diag(pi).astype(complex), calV)


def completed_slice(pt: DualCompletedPoint, c: Coupling) -> LevelPoint:
    """Global cross-section over ``C^(n-1) x C^*``: ``(theta^{-1}, -i pi, calV)``."""
    if pt.n != c.n:
        raise ValueError("dimension mismatch")
    if c.x > 0:
        return _completed_positive(pt, c)
    return parity(_completed_positive(pt, c.abs))


def dual_spectrum(pt: DualCompletedPoint, c: Coupling) -> np.ndarray:
    """The descending vector ``pi(z, Z)`` (so that ``J = -i diag(pi)`` on the slice)."""
    pi = spectrum_from_moduli(np.abs(pt.z) ** 2, np.log(abs(pt.Z)), abs(c.x))
    return pi if c.x > 0 else -pi[::-1]


def completed_theta(pt: DualCompletedPoint, c: Coupling) -> np.ndarray:
    return dagger(completed_slice(pt, c).g)


# ---------------------------------------------------------------------------
# Centre-of-mass slices
# ---------------------------------------------------------------------------


def su_slice_I(pt: CenterMassPointI, c: Coupling) -> SULevelPoint:
    """``(e^{i beta(delta)}, calJ(delta, gamma), (1, ..., 1))``."""
    beta = alcove_embed(pt.delta)
    g = np.concatenate([[0.0], pt.gamma, [0.0]])
    diag = g[1:] - g[:-1]
    # centre-of-mass Lax data is the Sutherland slice at zero total momentum
    J = sutherland_J(beta, diag, c.x)
    Gamma = diag_exp(beta)
    return SULevelPoint(Gamma, J, np.ones(pt.n, dtype=complex))


def su_spectrum(zeta, x: float) -> np.ndarray:
    """Traceless descending spectrum ``pi0(zeta)`` for ``x > 0``."""
    a2 = np.abs(np.asarray(zeta, dtype=complex)) ** 2
    n = a2.size + 1
    j = np.arange(1, n)
    k = np.arange(1, n + 1)
    lower = np.array([np.sum(j[: kk - 1] / n * a2[: kk - 1]) for kk in k])
    upper = np.array([np.sum((n - j[kk - 1 :]) / n * a2[kk - 1 :]) for kk in k])
    return x * (n + 1 - 2 * k) / 2.0 - lower + upper


def _su_slice_II_positive(zeta, x: float) -> SULevelPoint:
    pi0 = su_spectrum(zeta, x)
    theta, calV = completed_pieces(zeta, 1.0, pi0, x)
    return SULevelPoint(dagger(theta), -1j * np.diag(pi0).astype(complex), calV)


def su_slice_II(pt: CenterMassPointII, c: Coupling) -> SULevelPoint:
    """``(theta0^{-1}, -i pi0, calV0)``; the completed-slice formulas with ``Z`` of unit phase."""
    if pt.n != c.n:
        raise ValueError("dimension mismatch")
    if c.x > 0:
        return _su_slice_II_positive(pt.zeta, c.x)
    return parity(_su_slice_II_positive(pt.zeta, abs(c.x)))


def su_dual_spectrum(pt: CenterMassPointII, c: Coupling) -> np.ndarray:
    pi0 = su_spectrum(pt.zeta, abs(c.x))
    return pi0 if c.x > 0 else -pi0[::-1]


def lax_dual(qhat, phat, c: Coupling) -> np.ndarray:
    """``eta(x, phat) e^{i qhat}``, whose spectral invariants are the dual Hamiltonians."""
    return eval_eta(phat, c) * np.exp(1j * np.asarray(qhat, dtype=float))[None, :]
