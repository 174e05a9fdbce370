"""Commuting Hamiltonians and their flows.

Reduced flows are integrated exactly: lift to the unreduced space, apply the
closed-form free flow, project back.  Each sample is computed from ``t = 0``
so nothing accumulates.  :func:`rk4_reference` integrates the Sutherland
equations of motion directly and shares no code with the projected flows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CollisionGuard
from .linalg import dagger, eig_hermitian, matrix_power, unitary_power, wrap_angle
from .slices import LevelPoint, completed_slice, dual_spectrum, sutherland_slice
from .spaces import Coupling, DualCompletedPoint, SutherlandPoint, canonicalize_sutherland
from .duality import project_to_dual, project_to_sutherland


@dataclass(frozen=True)
class FlowSpec:
    """Hamiltonian ``H_k`` (``family='H'``, ``1 <= k``) or ``Hhat_k`` (``family='Hhat'``, ``k != 0``) for time ``t``."""

    family: str
    k: int
    t: float = 0.0

    def __post_init__(self):
        if self.family not in ("H", "Hhat"):
            raise ValueError(f"family must be 'H' or 'Hhat', got {self.family!r}")
        if int(self.k) != self.k:
            raise ValueError("k must be an integer")
        if self.family == "H" and self.k < 1:
            raise ValueError("H-family labels are 1..n")
        if self.family == "Hhat" and self.k == 0:
            raise ValueError("Hhat-family labels are +-1..+-n")

    def check_range(self, n: int):
        if abs(self.k) > n:
            raise ValueError(f"label {self.k} out of range for n = {n}")

    @property
    def name(self) -> str:
        return f"{self.family}{self.k}"


def eval_H(pt: LevelPoint, k: int) -> float:
    """``(1/k) tr (-iJ)^k``."""
    return float(np.trace(matrix_power(-1j * pt.J, k)).real / k)


def eval_Hhat(pt: LevelPoint, k: int) -> float:
    """``(1/k) tr(g^k + g^-k)`` for ``k > 0`` and ``(1/(i|k|)) tr(g^|k| - g^-|k|)`` for ``k < 0``."""
    m = abs(k)
    gp, gm = unitary_power(pt.g, m), unitary_power(pt.g, -m)
    if k > 0:
        return float(np.trace(gp + gm).real / m)
    return float((np.trace(gp - gm) / (1j * m)).real)


def eval_HRS(pt: LevelPoint) -> float:
    """Ruijsenaars-Schneider Hamiltonian, half of ``Hhat_1``."""
    return 0.5 * eval_Hhat(pt, 1)


def invariant_names(n: int) -> list[str]:
    return [f"H{k}" for k in range(1, n + 1)] + [f"Hhat{k}" for k in range(1, n + 1)] + [
        f"Hhat{-k}" for k in range(1, n + 1)
    ]


def all_invariants(pt: LevelPoint) -> np.ndarray:
    n = pt.n
    hs = [eval_H(pt, k) for k in range(1, n + 1)]
    hh = [eval_Hhat(pt, k) for k in range(1, n + 1)] + [eval_Hhat(pt, -k) for k in range(1, n + 1)]
    return np.array(hs + hh)


def free_flow(pt: LevelPoint, spec: FlowSpec) -> LevelPoint:
    """Exact flow of a free Hamiltonian on the unreduced space.

    ``H_k``: ``g -> exp(i t (-iJ)^(k-1)) g``.  ``Hhat_k``: ``J -> J + t (g^k - g^-k)``.
    ``Hhat_-k``: ``J -> J - i t (g^k + g^-k)``.
    """
    spec.check_range(pt.n)
    t, k = spec.t, spec.k
    if spec.family == "H":
        X = matrix_power(-1j * pt.J, k - 1)
        es = eig_hermitian(0.5 * (X + dagger(X)), tol=1e-8)
        U = (es.vectors * np.exp(1j * t * es.values)) @ dagger(es.vectors)
        # J generates left translations; right multiplication would leave the constraint surface
        return LevelPoint(U @ pt.g, pt.J, pt.v)
    m = abs(k)
    gp, gm = unitary_power(pt.g, m), unitary_power(pt.g, -m)
    if k > 0:
        J = pt.J + t * (gp - gm)
    else:
        J = pt.J - 1j * t * (gp + gm)
    return LevelPoint(pt.g, J, pt.v)


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Trajectory:
    """Sampled reduced trajectory.

    ``invariants`` holds every ``H_k`` and ``Hhat_{+-k}`` per sample (columns
    named by ``invariant_names``); ``invariant_drift`` is the per-sample max
    deviation of the generating family from its initial values.  For the
    Sutherland side ``raw_q`` holds branch-continuous angles in a fixed labelling.
    """

    times: np.ndarray
    points: list
    invariant_names: list[str]
    invariants: np.ndarray
    invariant_drift: np.ndarray
    raw_q: np.ndarray | None = None
    raw_p: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    @property
    def max_drift(self) -> float:
        return float(np.max(self.invariant_drift)) if self.invariant_drift.size else 0.0


def sample_times(t: float, samples: int) -> np.ndarray:
    if samples < 1:
        raise ValueError("samples must be positive")
    if t == 0 or samples == 1:
        return np.array([float(t)]) if t != 0 else np.array([0.0])
    return np.linspace(0.0, float(t), int(samples))


def _family_columns(names: Sequence[str], family: str) -> np.ndarray:
    if family == "H":
        return np.array([i for i, s in enumerate(names) if s.startswith("H") and not s.startswith("Hhat")])
    return np.array([i for i, s in enumerate(names) if s.startswith("Hhat")])


def _match_branch(prev_q: np.ndarray, pt: SutherlandPoint):
    """Relabel a canonical point to follow ``prev_q`` and unwrap to the nearest branch."""
    best = None
    for s in range(pt.n):
        q = np.roll(pt.q, s)
        d = wrap_angle(q - prev_q)
        score = np.max(np.abs(d))
        if best is None or score < best[0]:
            best = (score, prev_q + d, np.roll(pt.p, s))
    return best[1], best[2]


def evolve_sutherland(pt: SutherlandPoint, c: Coupling, k: int, t: float, samples: int = 11) -> Trajectory:
    """Projected ``H_k`` flow starting from a Sutherland point."""
    spec0 = FlowSpec("H", k)
    spec0.check_range(pt.n)
    lift = sutherland_slice(pt, c)
    times = sample_times(t, samples)
    names = invariant_names(pt.n)
    points, inv, raw_q, raw_p, duals = [], [], [], [], []
    q_prev = pt.q.copy()
    for s in times:
        moved = free_flow(lift, FlowSpec("H", k, float(s)))
        out = project_to_sutherland(moved, c)
        q_prev, p_prev = _match_branch(q_prev, out)
        points.append(out)
        raw_q.append(q_prev)
        raw_p.append(p_prev)
        inv.append(all_invariants(sutherland_slice(out, c)))
        duals.append(dual_spectrum(project_to_dual(moved, c), c))
    inv = np.array(inv)
    cols = _family_columns(names, "H")
    drift = np.max(np.abs(inv[:, cols] - inv[0, cols]), axis=1)
    return Trajectory(times, points, names, inv, drift, np.array(raw_q), np.array(raw_p), {"dual_spectrum": np.array(duals)})


def evolve_dual(pt: DualCompletedPoint, c: Coupling, k: int, t: float, samples: int = 11) -> Trajectory:
    """Projected ``Hhat_k`` flow on the completed dual space; passes through ``z_j = 0``."""
    spec0 = FlowSpec("Hhat", k)
    spec0.check_range(pt.n)
    lift = completed_slice(pt, c)
    times = sample_times(t, samples)
    names = invariant_names(pt.n)
    points, inv = [], []
    for s in times:
        moved = free_flow(lift, FlowSpec("Hhat", k, float(s)))
        out = project_to_dual(moved, c)
        points.append(out)
        inv.append(all_invariants(completed_slice(out, c)))
    inv = np.array(inv)
    cols = _family_columns(names, "Hhat")
    drift = np.max(np.abs(inv[:, cols] - inv[0, cols]), axis=1)
    return Trajectory(times, points, names, inv, drift)


# ---------------------------------------------------------------------------
# Independent reference integrator
# ---------------------------------------------------------------------------


def _sutherland_rhs(q: list[float], p: list[float], x2: float, guard: float):
    n = len(q)
    force = [0.0] * n
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            h = 0.5 * (q[i] - q[j])
            s = math.sin(h)
            if abs(s) < guard:
                raise CollisionGuard(f"particles {i} and {j} closer than the guard")
            force[i] += 0.25 * x2 * math.cos(h) / s**3
    return list(p), force


def _energy(q, p, x2: float) -> float:
    e = 0.5 * sum(v * v for v in p)
    for i in range(len(q)):
        for j in range(i + 1, len(q)):
            e += 0.25 * x2 / math.sin(0.5 * (q[i] - q[j])) ** 2
    return e


def rk4_reference(pt: SutherlandPoint, c: Coupling, t: float, step: float = 1e-3, samples: int = 11, guard: float = 1e-4) -> Trajectory:
    """Classic fixed-step RK4 on Hamilton's equations of the Sutherland Hamiltonian.

    Positions are evolved in the labelling of the input without wrapping.
    ``invariants`` has a single column, the energy; ``extra['energy_drift']``
    is its max deviation.
    """
    x2 = c.x**2
    q = [float(v) for v in pt.q]
    p = [float(v) for v in pt.p]
    times = sample_times(t, samples)
    nsteps_total = int(round(abs(t) / step)) if t != 0 else 0
    h = (t / nsteps_total) if nsteps_total else 0.0
    checkpoints = {int(round(abs(s) / abs(h))) if h else 0: idx for idx, s in enumerate(times)}
    out_q, out_p, energies = [None] * len(times), [None] * len(times), [None] * len(times)
    e0 = _energy(q, p, x2)

    def record(step_idx):
        if step_idx in checkpoints:
            i = checkpoints[step_idx]
            out_q[i], out_p[i] = list(q), list(p)
            energies[i] = _energy(q, p, x2)

    record(0)
    for s in range(1, nsteps_total + 1):
        k1q, k1p = _sutherland_rhs(q, p, x2, guard)
        q2 = [a + 0.5 * h * b for a, b in zip(q, k1q)]
        p2 = [a + 0.5 * h * b for a, b in zip(p, k1p)]
        k2q, k2p = _sutherland_rhs(q2, p2, x2, guard)
        q3 = [a + 0.5 * h * b for a, b in zip(q, k2q)]
        p3 = [a + 0.5 * h * b for a, b in zip(p, k2p)]
        k3q, k3p = _sutherland_rhs(q3, p3, x2, guard)
        q4 = [a + h * b for a, b in zip(q, k3q)]
        p4 = [a + h * b for a, b in zip(p, k3p)]
        k4q, k4p = _sutherland_rhs(q4, p4, x2, guard)
        q = [a + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(q, k1q, k2q, k3q, k4q)]
        p = [a + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(p, k1p, k2p, k3p, k4p)]
        record(s)
    raw_q, raw_p = np.array(out_q, dtype=float), np.array(out_p, dtype=float)
    points = [canonicalize_sutherland(a, b) for a, b in zip(raw_q, raw_p)]
    en = np.array(energies, dtype=float)[:, None]
    drift = np.abs(en[:, 0] - e0)
    return Trajectory(times, points, ["energy"], en, drift, raw_q, raw_p, {"energy_drift": float(np.max(drift))})


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def trajectory_rows(traj: Trajectory):
    """Header and rows for CSV export."""
    first = traj.points[0]
    if isinstance(first, SutherlandPoint):
        n = first.n
        header = ["t"] + [f"q_{i}" for i in range(1, n + 1)] + [f"p_{i}" for i in range(1, n + 1)]
        qs = traj.raw_q if traj.raw_q is not None else np.array([pt.q for pt in traj.points])
        ps = traj.raw_p if traj.raw_p is not None else np.array([pt.p for pt in traj.points])
        coords = [list(a) + list(b) for a, b in zip(qs, ps)]
    else:
        n = first.n
        header = ["t"]
        for j in range(1, n):
            header += [f"re_z_{j}", f"im_z_{j}"]
        header += ["re_Z", "im_Z"]
        coords = []
        for pt in traj.points:
            row = []
            for zj in pt.z:
                row += [zj.real, zj.imag]
            coords.append(row + [pt.Z.real, pt.Z.imag])
    header += list(traj.invariant_names)
    rows = [[t] + c + list(inv) for t, c, inv in zip(traj.times, coords, traj.invariants)]
    return header, rows


def write_csv(traj: Trajectory, path_or_file):
    header, rows = trajectory_rows(traj)
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([format(float(v), ".17g") for v in r])
    finally:
        if own:
            fh.close()
