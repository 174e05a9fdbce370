"""Point types of the phase spaces and the coordinate systems relating them.

Angles are stored in the principal branch ``(-pi, pi]`` unless a
fundamental-domain window is required; conversions between windows are
explicit operations here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import CoincidentAngles, NotInC, NotInChamber, NotInSimplex, NotInteriorChamber, NotOnOverlap, ZeroZ
from .linalg import TWO_PI, wrap_angle

ANGLE_TOL = 1e-10
SIMPLEX_TOL = 1e-12
EQUALITY_TOL = 1e-9
CHART_EPS = 0.1


def _real_vector(a, name: str, size: int | None = None) -> np.ndarray:
    v = np.array(a, dtype=float).reshape(-1)
    if size is not None and v.size != size:
        raise ValueError(f"{name} must have {size} components, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite")
    return v


def _complex_vector(a, name: str, size: int | None = None) -> np.ndarray:
    v = np.array(a, dtype=complex).reshape(-1)
    if size is not None and v.size != size:
        raise ValueError(f"{name} must have {size} components, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite")
    return v


@dataclass(frozen=True)
class Coupling:
    """Particle number ``n >= 2`` and nonzero real coupling ``x``."""

    n: int
    x: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not np.isfinite(self.x) or self.x == 0:
            raise ValueError(f"x must be finite and nonzero, got {self.x}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x", float(self.x))

    def mirrored(self) -> "Coupling":
        return Coupling(self.n, -self.x)

    @property
    def abs(self) -> "Coupling":
        return Coupling(self.n, abs(self.x))


# ---------------------------------------------------------------------------
# Sutherland side
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SutherlandPoint:
    """Canonical representative of a point of ``T*Q(n)``.

    ``q`` is strictly decreasing inside ``(-pi, pi]`` (hence ``q_1 - q_n < 2 pi``);
    build instances through :func:`canonicalize_sutherland`.
    """

    q: np.ndarray
    p: np.ndarray

    @property
    def n(self) -> int:
        return self.q.size

    def distance(self, other: "SutherlandPoint") -> float:
        return sutherland_distance(self, other)

    def isclose(self, other: "SutherlandPoint", tol: float = EQUALITY_TOL) -> bool:
        return self.distance(other) < tol


def canonicalize_sutherland(q, p, tol: float = ANGLE_TOL) -> SutherlandPoint:
    """Bring ``(q, p)`` to the fundamental domain by wrapping and a joint permutation."""
    q = _real_vector(q, "q")
    p = _real_vector(p, "p", q.size)
    if q.size < 2:
        raise ValueError("need at least two particles")
    qw = wrap_angle(q)
    order = np.argsort(-qw, kind="stable")
    qs, ps = qw[order], p[order]
    gaps = np.concatenate([qs[:-1] - qs[1:], [TWO_PI - (qs[0] - qs[-1])]])
    if np.min(gaps) <= tol:
        raise CoincidentAngles(f"angles coincide mod 2pi (min gap {np.min(gaps):.3e})")
    return SutherlandPoint(qs, ps)


def sutherland_distance(a: SutherlandPoint, b: SutherlandPoint) -> float:
    """Max-norm distance on the quotient, minimised over cyclic relabellings.

    Cyclic shifts are the only ambiguity left between canonical
    representatives of nearby points (an angle crossing the branch cut).
    """
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    best = np.inf
    for k in range(a.n):
        qb = np.roll(b.q, k)
        pb = np.roll(b.p, k)
        d = max(np.max(np.abs(wrap_angle(a.q - qb))), np.max(np.abs(a.p - pb)))
        best = min(best, d)
    return float(best)


# ---------------------------------------------------------------------------
# Dual side
# ---------------------------------------------------------------------------


def chamber_gaps(phat) -> np.ndarray:
    phat = np.asarray(phat, dtype=float)
    return phat[:-1] - phat[1:]


@dataclass(frozen=True, eq=False)
class DualInteriorPoint:
    """Point ``(qhat, phat)`` of the torus times the open thick-walled chamber.

    ``interior=False`` admits the closed chamber (used by the extended chart map).
    """

    qhat: np.ndarray
    phat: np.ndarray

    @classmethod
    def make(cls, qhat, phat, c: Coupling, interior: bool = True, tol: float = 1e-12) -> "DualInteriorPoint":
        qhat = wrap_angle(_real_vector(qhat, "qhat", c.n))
        phat = _real_vector(phat, "phat", c.n)
        gaps = chamber_gaps(phat)
        if interior:
            if np.any(gaps <= abs(c.x)):
                raise NotInteriorChamber(f"chamber gaps {gaps} must exceed |x| = {abs(c.x)}")
        elif np.any(gaps < abs(c.x) - tol):
            raise NotInChamber(f"chamber gaps {gaps} must be at least |x| = {abs(c.x)}")
        return cls(np.atleast_1d(qhat), phat)

    @property
    def n(self) -> int:
        return self.phat.size


@dataclass(frozen=True, eq=False)
class DualCompletedPoint:
    """Point ``(z, Z)`` of ``C^(n-1) x C^*``."""

    z: np.ndarray
    Z: complex

    def __post_init__(self):
        object.__setattr__(self, "z", _complex_vector(self.z, "z"))
        object.__setattr__(self, "Z", complex(self.Z))
        if not (abs(self.Z) > 0 and np.isfinite(self.Z)):
            raise ZeroZ("Z must be a finite nonzero complex number")

    @property
    def n(self) -> int:
        return self.z.size + 1

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.z, [self.Z]])

    def distance(self, other: "DualCompletedPoint") -> float:
        """Max-norm distance; ``Z`` is compared through ``log|Z|`` and ``arg Z``."""
        dz = np.max(np.abs(self.z - other.z)) if self.z.size else 0.0
        dlog = abs(np.log(abs(self.Z)) - np.log(abs(other.Z)))
        darg = abs(wrap_angle(np.angle(self.Z) - np.angle(other.Z)))
        return float(max(dz, dlog, darg))


# ---------------------------------------------------------------------------
# Centre-of-mass models and coverings
# ---------------------------------------------------------------------------


def in_simplex(delta, tol: float = SIMPLEX_TOL) -> bool:
    delta = np.asarray(delta, dtype=float)
    return bool(np.all(delta > tol) and delta.sum() < TWO_PI - tol)


def check_simplex(delta, tol: float = SIMPLEX_TOL) -> np.ndarray:
    delta = _real_vector(delta, "delta")
    if not in_simplex(delta, tol):
        raise NotInSimplex(f"delta = {delta} is not in the open simplex")
    return delta


@dataclass(frozen=True, eq=False)
class CenterMassPointI:
    """Relative positions ``delta`` in the open simplex with conjugate momenta ``gamma``."""

    delta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        d = check_simplex(self.delta)
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "gamma", _real_vector(self.gamma, "gamma", d.size))

    @property
    def n(self) -> int:
        return self.delta.size + 1

    def distance(self, other: "CenterMassPointI") -> float:
        return float(max(np.max(np.abs(self.delta - other.delta)), np.max(np.abs(self.gamma - other.gamma))))


@dataclass(frozen=True, eq=False)
class CenterMassPointII:
    """Point ``zeta`` of ``C^(n-1)``."""

    zeta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "zeta", _complex_vector(self.zeta, "zeta"))
        if self.zeta.size < 1:
            raise ValueError("zeta needs at least one component")

    @property
    def n(self) -> int:
        return self.zeta.size + 1

    def distance(self, other: "CenterMassPointII") -> float:
        return float(np.max(np.abs(self.zeta - other.zeta)))


RelPoint = Union[CenterMassPointI, CenterMassPointII]


@dataclass(frozen=True, eq=False)
class CoveringPoint2:
    """Point of the line covering: centre of mass ``u0`` with momentum ``w0``."""

    u0: float
    w0: float
    rel: RelPoint

    def __post_init__(self):
        object.__setattr__(self, "u0", float(self.u0))
        object.__setattr__(self, "w0", float(self.w0))


@dataclass(frozen=True, eq=False)
class CoveringPoint1:
    """Point of the circle covering: unit ``zeta0`` with momentum ``v0``."""

    zeta0: complex
    v0: float
    rel: RelPoint
    tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        z0 = complex(self.zeta0)
        if abs(abs(z0) - 1.0) > self.tol:
            raise ValueError(f"|zeta0| must be 1, got {abs(z0)}")
        object.__setattr__(self, "zeta0", z0 / abs(z0))
        object.__setattr__(self, "v0", float(self.v0))

    def distance(self, other: "CoveringPoint1") -> float:
        return float(max(abs(self.zeta0 - other.zeta0), abs(self.v0 - other.v0), self.rel.distance(other.rel)))


# ---------------------------------------------------------------------------
# Line coordinates and the alcove
# ---------------------------------------------------------------------------


def check_line_config(u, tol: float = SIMPLEX_TOL) -> np.ndarray:
    u = _real_vector(u, "u")
    d = u[:-1] - u[1:]
    if np.any(d <= tol) or u[0] - u[-1] >= TWO_PI - tol:
        raise NotInC(f"u = {u} is not strictly decreasing within width 2pi")
    return u


def line_to_separated(u, w):
    """``(u, w) -> (u0, w0, delta, gamma)``: centre of mass and relative Darboux coordinates."""
    u = check_line_config(u)
    w = _real_vector(w, "w", u.size)
    n = u.size
    j = np.arange(1, n)
    delta = u[:-1] - u[1:]
    w0 = float(w.sum())
    gamma = np.cumsum(w)[:-1] - j / n * w0
    u0 = float(u.mean())
    return u0, w0, delta, gamma


def separated_to_line(u0, w0, delta, gamma):
    """Inverse of :func:`line_to_separated`."""
    delta = check_simplex(delta)
    gamma = _real_vector(gamma, "gamma", delta.size)
    u = float(u0) + alcove_embed(delta)
    g = np.concatenate([[0.0], gamma, [0.0]])
    w = g[1:] - g[:-1] + float(w0) / u.size
    return u, w


def alcove_embed(delta) -> np.ndarray:
    """Simplex point to the traceless decreasing alcove vector ``beta``."""
    delta = check_simplex(delta)
    n = delta.size + 1
    k = np.arange(1, n)
    beta_n = -np.dot(k, delta) / n
    tail = np.concatenate([np.cumsum(delta[::-1])[::-1], [0.0]])
    beta = beta_n + tail
    return beta - beta.mean()


def alcove_to_simplex(beta) -> np.ndarray:
    beta = _real_vector(beta, "beta")
    return check_simplex(beta[:-1] - beta[1:])


def cartan_matrix(m: int) -> np.ndarray:
    return 2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)


# ---------------------------------------------------------------------------
# Circle coordinates (zeta0, delta) and momenta (v0, gamma)
# ---------------------------------------------------------------------------


def momenta_to_relative(p):
    """``p -> (v0, gamma)``."""
    p = _real_vector(p, "p")
    n = p.size
    v0 = float(p.sum())
    gamma = np.cumsum(p)[:-1] - np.arange(1, n) / n * v0
    return v0, gamma


def relative_to_momenta(v0, gamma) -> np.ndarray:
    g = np.concatenate([[0.0], np.asarray(gamma, dtype=float), [0.0]])
    return g[1:] - g[:-1] + float(v0) / (g.size - 1)


def sutherland_to_circle(pt: SutherlandPoint):
    """Canonical point to ``K(n)`` coordinates ``(zeta0, v0, delta, gamma)``.

    The labelling chosen is the one of the canonical representative; other
    labellings differ by :func:`cyclic_deck_K`.
    """
    n = pt.n
    delta = pt.q[:-1] - pt.q[1:]
    zeta0 = np.exp(1j * (pt.q[-1] + np.dot(np.arange(1, n), delta) / n))
    v0, gamma = momenta_to_relative(pt.p)
    return complex(zeta0), v0, delta, gamma


def cyclic_deck_K(zeta0, delta, v0=None, gamma=None):
    """Cyclic relabelling of ``K(n)``, optionally cotangent-lifted.

    Returns ``(zeta0', delta')`` or, when momenta are given,
    ``(zeta0', v0, delta', gamma')``.
    """
    delta = check_simplex(delta)
    n = delta.size + 1
    zeta0 = complex(zeta0) * np.exp(-1j * TWO_PI / n)
    new_delta = np.concatenate([delta[1:], [TWO_PI - delta.sum()]])
    if v0 is None and gamma is None:
        return zeta0, new_delta
    gamma = _real_vector(gamma, "gamma", delta.size)
    new_gamma = np.concatenate([gamma[1:] - gamma[0], [-gamma[0]]])
    return zeta0, float(v0), new_delta, new_gamma


def cyclic_deck_K_inverse(zeta0, delta, v0=None, gamma=None):
    delta = check_simplex(delta)
    n = delta.size + 1
    zeta0 = complex(zeta0) * np.exp(1j * TWO_PI / n)
    new_delta = np.concatenate([[TWO_PI - delta.sum()], delta[:-1]])
    if v0 is None and gamma is None:
        return zeta0, new_delta
    gamma = _real_vector(gamma, "gamma", delta.size)
    new_gamma = np.concatenate([[-gamma[-1]], gamma[:-1] - gamma[-1]])
    return zeta0, float(v0), new_delta, new_gamma


# ---------------------------------------------------------------------------
# Two-chart atlas of T*Q(n)
# ---------------------------------------------------------------------------

CHARTS = ("U", "U'")


def chart_interval(chart: str, eps: float = CHART_EPS) -> tuple[float, float]:
    if chart == "U":
        return -eps, np.pi + eps
    if chart == "U'":
        return -np.pi - eps, eps
    raise ValueError(f"unknown chart {chart!r}")


@dataclass(frozen=True, eq=False)
class ChartPointQ:
    """Canonical coordinates ``(phi, pphi, delta, gamma)`` in one of the two charts."""

    chart: str
    phi: float
    pphi: float
    delta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        lo, hi = chart_interval(self.chart)
        if not lo < self.phi < hi:
            raise ValueError(f"phi = {self.phi} outside chart {self.chart} interval ({lo}, {hi})")
        d = check_simplex(self.delta)
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "pphi", float(self.pphi))
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "gamma", _real_vector(self.gamma, "gamma", d.size))

    @property
    def n(self) -> int:
        return self.delta.size + 1

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.phi, self.pphi], self.delta, self.gamma])


def overlap_component(chart: str, phi: float, eps: float = CHART_EPS) -> str:
    """Which overlap component (``'+'`` or ``'-'``) contains ``phi`` of the given chart."""
    if -eps < phi < eps:
        return "+"
    if chart == "U" and np.pi - eps < phi < np.pi + eps:
        return "-"
    if chart == "U'" and -np.pi - eps < phi < -np.pi + eps:
        return "-"
    raise NotOnOverlap(f"phi = {phi} is not on the overlap of the two charts")


def chart_transition(pt: ChartPointQ) -> ChartPointQ:
    """Re-express a point of the chart overlap in the other chart."""
    comp = overlap_component(pt.chart, pt.phi)
    target = "U'" if pt.chart == "U" else "U"
    if comp == "+":
        return ChartPointQ(target, pt.phi, pt.pphi, pt.delta, pt.gamma)
    if pt.chart == "U":
        _, _, d, g = cyclic_deck_K(1.0, pt.delta, 0.0, pt.gamma)
        return ChartPointQ(target, pt.phi - TWO_PI, pt.pphi, d, g)
    _, _, d, g = cyclic_deck_K_inverse(1.0, pt.delta, 0.0, pt.gamma)
    return ChartPointQ(target, pt.phi + TWO_PI, pt.pphi, d, g)


def base_transition(vec) -> np.ndarray:
    """The configuration part ``(phi, delta) -> (phi', delta')`` on the ``-`` overlap."""
    vec = np.asarray(vec, dtype=float)
    phi, delta = vec[0], vec[1:]
    return np.concatenate([[phi - TWO_PI], delta[1:], [TWO_PI - delta.sum()]])


def sutherland_to_chart(pt: SutherlandPoint, chart: str) -> ChartPointQ:
    """Chart coordinates of a point of ``T*Q(n)``.

    ``phi`` is the total angle placed in the chart interval; the labelling of
    the lift is the cyclic one whose angle sum equals ``phi``.
    """
    lo, hi = chart_interval(chart)
    n = pt.n
    s = float(pt.q.sum())
    m = np.floor((s - lo) / TWO_PI)
    phi = s - TWO_PI * m
    if not lo < phi < hi:
        raise NotOnOverlap(f"total angle {s} is not covered by chart {chart}")
    q, p = pt.q.copy(), pt.p.copy()
    # cyclic moves change the angle sum by -2pi (or +2pi) each
    for _ in range(int(abs(m))):
        if m > 0:
            q = np.concatenate([q[1:], [q[0] - TWO_PI]])
            p = np.concatenate([p[1:], p[:1]])
        else:
            q = np.concatenate([[q[-1] + TWO_PI], q[:-1]])
            p = np.concatenate([p[-1:], p[:-1]])
    delta = q[:-1] - q[1:]
    v0, gamma = momenta_to_relative(p)
    return ChartPointQ(chart, phi, v0 / n, delta, gamma)


def chart_to_sutherland(pt: ChartPointQ) -> SutherlandPoint:
    q = pt.phi / pt.n + alcove_embed(pt.delta)
    p = relative_to_momenta(pt.pphi * pt.n, pt.gamma)
    return canonicalize_sutherland(q, p)
