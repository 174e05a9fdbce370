"""Duality maps between the Sutherland and the completed dual models.

Every map works the same way: lift a point to the constraint surface with one
cross-section, then gauge-transform it into the other cross-section and read
off the coordinates.  Negative coupling is reduced to positive coupling through
:func:`dualpair.slices.parity`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTorusSpectrum, GaugeFixFailure, OffShell, OnBoundary, PatternMismatch
from .linalg import TWO_PI, dagger, eig_hermitian, eig_unitary, fro, wrap_angle
from .slices import (
    LevelPoint,
    completed_pieces,
    completed_slice,
    eval_eta,
    moment_residual,
    parity,
    spectrum_from_moduli,
    su_slice_I,
    su_slice_II,
    su_spectrum,
    sutherland_slice,
    _ratio_factors,
)
from .spaces import (
    CenterMassPointI,
    CenterMassPointII,
    Coupling,
    DualCompletedPoint,
    DualInteriorPoint,
    SutherlandPoint,
    alcove_to_simplex,
    canonicalize_sutherland,
    chamber_gaps,
)

DIAGONALITY_TOL = 1e-6
PATTERN_TOL = 1e-8
ONSHELL_TOL = 1e-8
CONDITIONING_SWITCH = 1e-6
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GaugeFixReport:
    """Diagnostics of one gauge fixing: the torus phases used, the residual, the smallest ``|V_b|``."""

    torus_phases: np.ndarray
    diagonality_residual: float
    conditioning: float
    route: str


# ---------------------------------------------------------------------------
# Interior chart map
# ---------------------------------------------------------------------------


def _zx_positive(qhat, phat, x: float) -> DualCompletedPoint:
    gaps = chamber_gaps(phat)
    mag = np.sqrt(np.maximum(gaps - x, 0.0))
    tail = np.cumsum(qhat[::-1])[::-1]  # tail[j] = sum_{k >= j} qhat_k
    z = mag * np.exp(-1j * tail[1:])
    Z = np.exp(-phat[0]) * np.exp(-1j * tail[0])
    return DualCompletedPoint(z, Z)


def zx_map(pt: DualInteriorPoint, c: Coupling) -> DualCompletedPoint:
    """Chart map from torus times chamber into ``C^(n-1) x C^*``.

    Closed-chamber input is accepted and lands on ``z_j = 0`` at saturated gaps.
    """
    qhat, phat = np.asarray(pt.qhat, dtype=float), np.asarray(pt.phat, dtype=float)
    DualInteriorPoint.make(qhat, phat, c, interior=False)
    if c.x > 0:
        return _zx_positive(qhat, phat, c.x)
    return _zx_positive(-qhat[::-1], -phat[::-1], -c.x)


def _zx_invert_positive(z, Z, x: float, tol: float):
    if np.any(np.abs(z) <= tol):
        raise OnBoundary("some z_j vanishes; the angle coordinates are not determined there")
    phat = spectrum_from_moduli(np.abs(z) ** 2, np.log(abs(Z)), x)
    az = np.angle(z)
    n = z.size + 1
    qhat = np.empty(n)
    qhat[0] = az[0] - np.angle(Z)
    qhat[1 : n - 1] = az[1:] - az[:-1]
    qhat[n - 1] = -az[-1]
    return wrap_angle(qhat), phat


def zx_invert(pt: DualCompletedPoint, c: Coupling, tol: float = BOUNDARY_TOL) -> DualInteriorPoint:
    """Inverse of :func:`zx_map` on the dense set where every ``z_j`` is nonzero."""
    qhat, phat = _zx_invert_positive(pt.z, pt.Z, abs(c.x), tol)
    if c.x < 0:
        qhat, phat = wrap_angle(-qhat[::-1]), -phat[::-1]
    return DualInteriorPoint(np.atleast_1d(qhat), phat)


# ---------------------------------------------------------------------------
# Projection onto the completed dual slice
# ---------------------------------------------------------------------------


def _check_onshell(pt: LevelPoint, c: Coupling, tol: float = ONSHELL_TOL):
    r = moment_residual(pt, c)
    scale = max(1.0, fro(pt.J))
    if r > tol * scale:
        raise OffShell(f"moment residual {r:.3e} exceeds {tol:.1e}")


def _diagonalize_J(pt: LevelPoint):
    es = eig_hermitian(1j * pt.J)
    return es.values, es.vectors


def _read_off(theta: np.ndarray, calV: np.ndarray, pi: np.ndarray, x: float):
    """``(z, Z)`` from a point already gauge-fixed into the completed-slice shape."""
    Q = np.sqrt(_ratio_factors(pi, x))
    n = pi.size
    gaps = pi[:-1] - pi[1:]
    z = np.empty(n - 1, dtype=complex)
    for j in range(n - 1):
        others = np.prod([Q[j, k] for k in range(n) if k not in (j, j + 1)])
        z[j] = calV[j] * np.sqrt(gaps[j]) / others
    t = theta[n - 1, 0]
    Z = np.exp(-pi[0]) * np.conj(t) / abs(t)
    return z, Z


def _robust_positive(pt: LevelPoint, x: float):
    pi, u = _diagonalize_J(pt)
    theta0 = dagger(u) @ dagger(pt.g) @ u
    w = dagger(u) @ pt.v
    n = pi.size
    h = np.ones(n, dtype=complex)
    for i in range(n - 1):
        s = theta0[i, i + 1]
        if abs(s) < 1e-14:
            raise GaugeFixFailure("superdiagonal entry vanishes; input is not on the constraint surface")
        h[i + 1] = -h[i] * s / abs(s)
    vn = h[-1] * w[-1]
    if abs(vn) < 1e-14:
        raise GaugeFixFailure("last orbit component vanishes; input is not on the constraint surface")
    phase = np.conj(vn) / abs(vn)
    h = phase * h
    theta = h[:, None] * theta0 * h.conj()[None, :]
    calV = h * w
    z, Z = _read_off(theta, calV, pi, x)
    theta_ref, calV_ref = completed_pieces(z, Z / abs(Z), pi, x)
    res = max(fro(theta - theta_ref), float(np.max(np.abs(calV - calV_ref))))
    return z, Z, pi, GaugeFixReport(h, res, float(np.min(np.abs(w))), "robust")


def _interior_positive(pt: LevelPoint, x: float):
    pi, u = _diagonalize_J(pt)
    w = dagger(u) @ pt.v
    T = w / np.abs(w)
    G = T.conj()[:, None] * (dagger(u) @ pt.g @ u) * T[None, :]
    D = eval_eta(pi, Coupling(pi.size, x)).T @ dagger(G)
    off = D - np.diag(np.diag(D))
    res = fro(off) / max(1.0, fro(D))
    qhat = wrap_angle(np.angle(np.diag(D)))
    out = _zx_positive(qhat, pi, x)
    return out.z, out.Z, pi, GaugeFixReport(T, res, float(np.min(np.abs(w))), "interior")


def gauge_fix_dual(pt: LevelPoint, c: Coupling, route: str = "auto", check: bool = True):
    """Project an on-shell triple to ``(z, Z)`` and return it with a :class:`GaugeFixReport`.

    ``route='interior'`` follows the torus-extraction algorithm, which needs all
    ``|V_b| > 0``; ``route='robust'`` fixes the residual torus gauge by making
    the superdiagonal of ``theta`` negative, valid on the whole completed space.
    ``'auto'`` picks the interior route unless ``min |V_b| < 1e-6``.
    """
    if check:
        _check_onshell(pt, c)
    work = pt if c.x > 0 else parity(pt)
    x = abs(c.x)
    if route == "auto":
        _, u = _diagonalize_J(work)
        cond = float(np.min(np.abs(dagger(u) @ work.v)))
        route = "interior" if cond >= CONDITIONING_SWITCH else "robust"
    if route == "interior":
        z, Z, pi, rep = _interior_positive(work, x)
    elif route == "robust":
        z, Z, pi, rep = _robust_positive(work, x)
    else:
        raise ValueError(f"unknown route {route!r}")
    if rep.diagonality_residual > DIAGONALITY_TOL:
        raise GaugeFixFailure(f"gauge fixing residual {rep.diagonality_residual:.3e} ({rep.route} route)")
    return DualCompletedPoint(z, Z), rep


def project_to_dual(pt: LevelPoint, c: Coupling, route: str = "auto") -> DualCompletedPoint:
    return gauge_fix_dual(pt, c, route)[0]


def dual_transform(pt: SutherlandPoint, c: Coupling, route: str = "auto") -> DualCompletedPoint:
    """The duality map from ``T*Q(n)`` onto ``C^(n-1) x C^*``."""
    return project_to_dual(sutherland_slice(pt, c), c, route)


# ---------------------------------------------------------------------------
# Projection onto the Sutherland slice
# ---------------------------------------------------------------------------


def _sutherland_gauge(pt: LevelPoint, c: Coupling, es):
    """Phase-fix the torus eigenbasis so ``v`` becomes ``(1, ..., 1)`` and return momenta."""
    if es.min_gap < 1e-10:
        raise DegenerateTorusSpectrum(f"torus spectrum degenerate (gap {es.min_gap:.3e})")
    y = es.vectors
    w = dagger(y) @ pt.v
    if np.max(np.abs(np.abs(w) - 1.0)) > 1e-6:
        raise PatternMismatch("orbit vector components do not have unit modulus in the torus basis")
    y = y * (w / np.abs(w))[None, :]
    Jt = dagger(y) @ pt.J @ y
    tau = es.values
    ratio = tau[None, :] / tau[:, None]
    pattern = Jt * (1.0 - ratio)
    np.fill_diagonal(pattern, 1j * c.x)
    res = float(np.max(np.abs(pattern - 1j * c.x)))
    if res > PATTERN_TOL * max(1.0, fro(pt.J)):
        raise PatternMismatch(f"off-diagonal pattern residual {res:.3e}")
    return Jt.diagonal().imag.copy()


def project_to_sutherland(pt: LevelPoint, c: Coupling) -> SutherlandPoint:
    """Diagonalise ``g``, rotate ``v`` to all ones and read ``p`` from the diagonal of ``J``."""
    _check_onshell(pt, c)
    es = eig_unitary(pt.g)
    p = _sutherland_gauge(pt, c, es)
    return canonicalize_sutherland(np.angle(es.values), p)


def dual_invert(pt: DualCompletedPoint, c: Coupling) -> SutherlandPoint:
    """Inverse duality map ``C^(n-1) x C^* -> T*Q(n)``."""
    return project_to_sutherland(completed_slice(pt, c), c)


# ---------------------------------------------------------------------------
# Centre-of-mass duality
# ---------------------------------------------------------------------------


def su_dual_transform(pt: CenterMassPointI, c: Coupling) -> CenterMassPointII:
    """Duality in the centre-of-mass frame: ``(delta, gamma) -> zeta``."""
    lp = su_slice_I(pt, c)
    _check_onshell(lp, c)
    work = lp if c.x > 0 else parity(lp)
    x = abs(c.x)
    z, Z, pi, rep = _robust_positive(work, x)
    if rep.diagonality_residual > PATTERN_TOL * max(1.0, fro(lp.J)):
        raise GaugeFixFailure(f"centre-of-mass gauge fixing residual {rep.diagonality_residual:.3e}")
    if abs(Z / abs(Z) - 1.0) > 1e-8:
        raise GaugeFixFailure("determinant phase is not trivial in the centre-of-mass frame")
    if np.max(np.abs(pi - su_spectrum(z, x))) > 1e-8 * max(1.0, float(np.max(np.abs(pi)))):
        raise GaugeFixFailure("spectrum does not match the centre-of-mass gap law")
    return CenterMassPointII(z)


def _alcove_angles(values: np.ndarray):
    """Angles of an ``SU(n)`` spectrum placed in the alcove, with the permutation applied."""
    ang = np.angle(values)
    order = np.argsort(-ang, kind="stable")
    ang = ang[order]
    m = int(np.rint(ang.sum() / TWO_PI))
    if m > 0:
        ang = np.concatenate([ang[m:], ang[:m] - TWO_PI])
        order = np.concatenate([order[m:], order[:m]])
    elif m < 0:
        k = -m
        ang = np.concatenate([ang[-k:] + TWO_PI, ang[:-k]])
        order = np.concatenate([order[-k:], order[:-k]])
    return ang, order


def su_dual_invert(pt: CenterMassPointII, c: Coupling) -> CenterMassPointI:
    """Inverse of :func:`su_dual_transform`."""
    lp = su_slice_II(pt, c)
    _check_onshell(lp, c)
    es = eig_unitary(lp.g)
    beta, order = _alcove_angles(es.values)
    es_sorted = type(es)(es.values[order], es.vectors[:, order], es.min_gap, es.degenerate)
    diag = _sutherland_gauge(lp, c, es_sorted)
    gamma = np.cumsum(diag)[:-1]
    return CenterMassPointI(alcove_to_simplex(beta), gamma)
