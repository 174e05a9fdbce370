"""Covering maps, deck transformations and the commuting square of dualities.

The coverings run ``line -> circle -> indistinguishable``:

    P2-I  --psi2_I-->  P1-I  --psi1_I-->  P
     |                   |                |
    id x R0           id x R0             R
     v                   v                v
    P2-II --psi2_II--> P1-II --psi1_II--> PhatC
"""

from __future__ import annotations

import numpy as np

from .duality import dual_transform, su_dual_invert, su_dual_transform
from .linalg import TWO_PI
from .spaces import (
    CenterMassPointI,
    CenterMassPointII,
    Coupling,
    CoveringPoint1,
    CoveringPoint2,
    DualCompletedPoint,
    SutherlandPoint,
    alcove_embed,
    canonicalize_sutherland,
    cyclic_deck_K,
    cyclic_deck_K_inverse,
    relative_to_momenta,
)


def _require(rel, kind):
    if not isinstance(rel, kind):
        raise TypeError(f"expected relative coordinates of type {kind.__name__}, got {type(rel).__name__}")


def psi2_I(pt: CoveringPoint2) -> CoveringPoint1:
    """``(u0, w0, delta, gamma) -> (e^{i u0}, w0, delta, gamma)``."""
    _require(pt.rel, CenterMassPointI)
    return CoveringPoint1(np.exp(1j * pt.u0), pt.w0, pt.rel)


def psi2_II(pt: CoveringPoint2) -> CoveringPoint1:
    """``(u0, w0, zeta) -> (e^{i u0}, w0, zeta)``."""
    _require(pt.rel, CenterMassPointII)
    return CoveringPoint1(np.exp(1j * pt.u0), pt.w0, pt.rel)


def psi1_I(pt: CoveringPoint1, c: Coupling) -> SutherlandPoint:
    """Forget the labelling: positions ``zeta0 e^{i beta(delta)}``, momenta from ``(v0, gamma)``."""
    _require(pt.rel, CenterMassPointI)
    q = np.angle(pt.zeta0) + alcove_embed(pt.rel.delta)
    p = relative_to_momenta(pt.v0, pt.rel.gamma)
    return canonicalize_sutherland(q, p)


def _psi1_II_positive(zeta0: complex, v0: float, zeta: np.ndarray, x: float) -> DualCompletedPoint:
    n = zeta.size + 1
    j = np.arange(1, n)
    z = zeta0 ** (n - j) * zeta
    expo = (1 - n) * x / 2.0 + v0 / n + np.sum((j - n) / n * np.abs(zeta) ** 2)
    return DualCompletedPoint(z, zeta0**n * np.exp(expo))


def psi1_II(pt: CoveringPoint1, c: Coupling) -> DualCompletedPoint:
    """Closed-form projection of the circle covering onto ``C^(n-1) x C^*``."""
    _require(pt.rel, CenterMassPointII)
    if c.x > 0:
        return _psi1_II_positive(pt.zeta0, pt.v0, pt.rel.zeta, c.x)
    return _psi1_II_positive(np.conj(pt.zeta0), -pt.v0, pt.rel.zeta, -c.x)


def _zeta_rotation(n: int, sign: int) -> np.ndarray:
    j = np.arange(1, n)
    return np.exp(sign * 1j * TWO_PI * (n - j) / n)


def _sign(c: Coupling | None) -> int:
    return 1 if c is None or c.x > 0 else -1


def alpha_red_I(pt: CoveringPoint1) -> CoveringPoint1:
    """Generator of the cyclic deck group of ``psi1_I``."""
    _require(pt.rel, CenterMassPointI)
    z0, v0, d, g = cyclic_deck_K(pt.zeta0, pt.rel.delta, pt.v0, pt.rel.gamma)
    return CoveringPoint1(z0, v0, CenterMassPointI(d, g))


def alpha_red_I_inverse(pt: CoveringPoint1) -> CoveringPoint1:
    _require(pt.rel, CenterMassPointI)
    z0, v0, d, g = cyclic_deck_K_inverse(pt.zeta0, pt.rel.delta, pt.v0, pt.rel.gamma)
    return CoveringPoint1(z0, v0, CenterMassPointI(d, g))


def alpha_red_II(pt: CoveringPoint1, c: Coupling | None = None) -> CoveringPoint1:
    """Generator of the cyclic deck group of ``psi1_II``.

    For negative coupling the phases of ``zeta`` rotate the opposite way.
    """
    _require(pt.rel, CenterMassPointII)
    n = pt.rel.n
    rot = _zeta_rotation(n, _sign(c))
    return CoveringPoint1(pt.zeta0 * np.exp(-1j * TWO_PI / n), pt.v0, CenterMassPointII(rot * pt.rel.zeta))


def shift_deck(pt: CoveringPoint2, c: Coupling | None = None, power: int = 1) -> CoveringPoint2:
    """Generator of the deck group of the line covering over ``T*Q(n)``.

    One step shifts ``u0`` by ``-2 pi / n`` and relabels the relative
    coordinates cyclically; ``n`` steps give the pure translation ``u0 -> u0 - 2 pi``.
    """
    out = pt
    n = pt.rel.n
    step = 1 if power >= 0 else -1
    for _ in range(abs(power)):
        rel = out.rel
        if isinstance(rel, CenterMassPointI):
            fn = cyclic_deck_K if step > 0 else cyclic_deck_K_inverse
            _, _, d, g = fn(1.0, rel.delta, 0.0, rel.gamma)
            rel = CenterMassPointI(d, g)
        else:
            rel = CenterMassPointII(_zeta_rotation(n, step * _sign(c)) * rel.zeta)
        out = CoveringPoint2(out.u0 - step * TWO_PI / n, out.w0, rel)
    return out


def lift_rel_I_to_II(pt, c: Coupling):
    """Apply the centre-of-mass duality to the relative factor of a covering point."""
    rel = su_dual_transform(pt.rel, c)
    if isinstance(pt, CoveringPoint2):
        return CoveringPoint2(pt.u0, pt.w0, rel)
    return CoveringPoint1(pt.zeta0, pt.v0, rel)


def lift_rel_II_to_I(pt, c: Coupling):
    rel = su_dual_invert(pt.rel, c)
    if isinstance(pt, CoveringPoint2):
        return CoveringPoint2(pt.u0, pt.w0, rel)
    return CoveringPoint1(pt.zeta0, pt.v0, rel)


def diagram_paths(pt: CoveringPoint2, c: Coupling) -> tuple[DualCompletedPoint, DualCompletedPoint]:
    """The two images in ``C^(n-1) x C^*`` of a line-covering point: via ``R`` and via ``R0``."""
    _require(pt.rel, CenterMassPointI)
    via_sutherland = dual_transform(psi1_I(psi2_I(pt), c), c)
    via_center = psi1_II(psi2_II(lift_rel_I_to_II(pt, c)), c)
    return via_sutherland, via_center


def diagram_check(pt: CoveringPoint2, c: Coupling) -> float:
    """Discrepancy between the two ways around the commuting square."""
    a, b = diagram_paths(pt, c)
    return a.distance(b)
