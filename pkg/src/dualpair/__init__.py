"""Numerical toolkit for the duality between the trigonometric Sutherland
system and the rational Ruijsenaars-Schneider system, realised through
Hamiltonian reduction of the cotangent bundle of U(n).
"""

from .duality import (
    dual_invert,
    dual_transform,
    gauge_fix_dual,
    project_to_dual,
    project_to_sutherland,
    su_dual_invert,
    su_dual_transform,
    zx_invert,
    zx_map,
)
from .dynamics import FlowSpec, Trajectory, eval_H, eval_HRS, eval_Hhat, evolve_dual, evolve_sutherland, free_flow, rk4_reference
from .errors import DualPairError, NumericalFailure
from .io import PointDocument
from .slices import (
    LevelPoint,
    completed_slice,
    dual_slice_interior,
    eval_eta,
    eval_V,
    moment_residual,
    su_slice_I,
    su_slice_II,
    sutherland_lax,
    sutherland_slice,
)
from .spaces import (
    CenterMassPointI,
    CenterMassPointII,
    Coupling,
    CoveringPoint1,
    CoveringPoint2,
    DualCompletedPoint,
    DualInteriorPoint,
    SutherlandPoint,
    canonicalize_sutherland,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
