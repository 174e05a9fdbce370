"""Certification engine: identity suites, on-shell audits, roundtrips, and
finite-difference symplecticity checks.

Each check owns a reproducible random stream derived from the suite seed and
the check name, so reports are bit-identical for a fixed seed regardless of
which other checks run.

Coordinate conventions for the symplectic checks (``Omega[i, j] = w`` encodes
``w dx_i ^ dx_j``):

* ``P``      ``(q, p)``                          ``sum dp ^ dq``
* ``Phat``   ``(qhat, phat)``                    ``sum dphat ^ dqhat``
* ``PhatC``  ``(sigma, chi, Re z, Im z)``        ``dsigma ^ dchi + 2 sum dRe z ^ dIm z``
  with ``Z = exp(sigma + i chi)``
* ``CM-I``   ``(delta, gamma)``                  ``sum dgamma ^ ddelta``
* ``CM-II``  ``(Re zeta, Im zeta)``              ``2 sum dRe zeta ^ dIm zeta``
* ``P1-*``   ``(arg zeta0, v0, rel)``            ``dv0 ^ darg zeta0 + rel``
* ``P2-*``   ``(u0, w0, rel)``                   ``dw0 ^ du0 + rel``

The ``PhatC`` matrix follows from ``|z_j|^2 = phat_j - phat_{j+1} - x``,
``arg z_j = -sum_{k>j} qhat_k``, ``sigma = -phat_1``, ``chi = -sum qhat``:
``dsigma ^ dchi + sum d|z_j|^2 ^ darg z_j`` telescopes to ``sum dphat ^ dqhat``,
and ``d|z|^2 ^ darg z = 2 dRe z ^ dIm z``.
"""

from __future__ import annotations

import json
import logging
import time
import zlib
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import coverings as cov
from .duality import (
    dual_invert,
    dual_transform,
    su_dual_invert,
    su_dual_transform,
    zx_map,
)
from .dynamics import (
    FlowSpec,
    all_invariants,
    eval_Hhat,
    evolve_dual,
    evolve_sutherland,
    free_flow,
    rk4_reference,
)
from .errors import SampleRejection
from .linalg import TWO_PI, dagger, eig_hermitian, wrap_angle
from .slices import (
    LevelPoint,
    boundary_solution,
    completed_slice,
    completed_theta,
    dual_slice_interior,
    eval_aleph,
    eval_eta,
    eval_eta_factorized,
    eval_V,
    gauge_act,
    moment_residual,
    su_slice_I,
    su_slice_II,
    su_spectrum,
    sum_rule_residual,
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
    alcove_embed,
    base_transition,
    canonicalize_sutherland,
    cyclic_deck_K,
    sutherland_distance,
)

log = logging.getLogger(__name__)

DEFAULT_FD_STEP = 1e-5
SIMPLEX_MARGIN = 0.05
# fixed-step RK4 at step 1e-3 loses accuracy near collisions
DYNAMICS_MARGIN = 0.6
MAX_ATTEMPTS = 1000


# ---------------------------------------------------------------------------
# Reports and random streams
# ---------------------------------------------------------------------------


@dataclass
class CheckReport:
    check_name: str
    samples: int
    max_residual: float
    tolerance: float
    seed: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        d["max_residual"] = float(self.max_residual)
        return d

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.check_name}: max residual {self.max_residual:.3e} < {self.tolerance:.1e} over {self.samples} samples"


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one check."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def merge_reports(reports: Sequence[CheckReport], name: str) -> CheckReport:
    worst = max(r.max_residual for r in reports)
    return CheckReport(name, sum(r.samples for r in reports), worst, reports[0].tolerance, reports[0].seed)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def sample_phat(rng, n: int, x: float, size: int | None = None) -> np.ndarray:
    """Interior chamber points: ``phat_n ~ U(-1, 1)``, gaps ``|x| (1 + U(0.1, 2))``."""
    shape = (n - 1,) if size is None else (size, n - 1)
    gaps = abs(x) * (1.0 + rng.uniform(0.1, 2.0, size=shape))
    last = rng.uniform(-1.0, 1.0, size=None if size is None else (size, 1))
    tail = np.cumsum(gaps[..., ::-1], axis=-1)[..., ::-1]
    zero = np.zeros(() if size is None else (size, 1))
    if size is None:
        return last + np.concatenate([tail, [0.0]])
    return last + np.concatenate([tail, zero], axis=-1)


def sample_angles(rng, n: int) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, size=n)


def sample_delta(rng, n: int, margin: float = SIMPLEX_MARGIN) -> np.ndarray:
    """Simplex point with every cyclic gap (including ``2 pi - sum``) at least ``margin``."""
    for _ in range(MAX_ATTEMPTS):
        gaps = (TWO_PI - margin) * rng.dirichlet(np.ones(n))
        delta = gaps[:-1]
        if np.all(delta >= margin) and TWO_PI - delta.sum() >= margin:
            return delta
    raise SampleRejection(f"could not sample a simplex point with margin {margin} for n = {n}")


def sample_sutherland(rng, c: Coupling, p_scale: float = 1.0, margin: float = SIMPLEX_MARGIN) -> SutherlandPoint:
    delta = sample_delta(rng, c.n, margin)
    q = rng.uniform(-np.pi, np.pi) + alcove_embed(delta)
    return canonicalize_sutherland(q, p_scale * rng.normal(size=c.n))


def sample_dual_interior(rng, c: Coupling) -> DualInteriorPoint:
    return DualInteriorPoint.make(sample_angles(rng, c.n), sample_phat(rng, c.n, c.x), c)


def _complex_normal(rng, m: int) -> np.ndarray:
    return rng.normal(size=m) + 1j * rng.normal(size=m)


def sample_completed(rng, c: Coupling) -> DualCompletedPoint:
    sigma = rng.uniform(-2.0, 2.0)
    return DualCompletedPoint(_complex_normal(rng, c.n - 1), np.exp(sigma + 1j * rng.uniform(-np.pi, np.pi)))


def sample_cm1(rng, c: Coupling) -> CenterMassPointI:
    return CenterMassPointI(sample_delta(rng, c.n), rng.normal(size=c.n - 1))


def sample_cm2(rng, c: Coupling) -> CenterMassPointII:
    return CenterMassPointII(_complex_normal(rng, c.n - 1))


def sample_p1(rng, c: Coupling, rel: str) -> CoveringPoint1:
    r = sample_cm1(rng, c) if rel == "I" else sample_cm2(rng, c)
    return CoveringPoint1(np.exp(1j * rng.uniform(-np.pi, np.pi)), rng.normal(), r)


def sample_p2(rng, c: Coupling, rel: str) -> CoveringPoint2:
    r = sample_cm1(rng, c) if rel == "I" else sample_cm2(rng, c)
    return CoveringPoint2(rng.uniform(-np.pi, np.pi), rng.normal(), r)


def random_unitary(rng, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------


def _form(size: int, pairs) -> np.ndarray:
    om = np.zeros((size, size))
    for i, j, w in pairs:
        om[i, j] += w
        om[j, i] -= w
    return om


@dataclass(frozen=True)
class Chart:
    """Coordinatisation of one model: encode/decode, angle mask, symplectic matrix."""

    name: str
    encode: Callable
    decode: Callable
    angles: Callable[[int], np.ndarray]
    omega: Callable[[int], np.ndarray]
    relabel: bool = False

    def align(self, vec: np.ndarray, ref: np.ndarray, n: int) -> np.ndarray:
        """Move ``vec`` to the branch (and, for ``P``, the labelling) nearest ``ref``."""
        mask = self.angles(n)
        candidates = [vec]
        if self.relabel:
            q, p = vec[:n], vec[n:]
            candidates = [np.concatenate([np.roll(q, s), np.roll(p, s)]) for s in range(n)]
        best, score = None, np.inf
        for cand in candidates:
            d = cand - ref
            d[mask] = wrap_angle(d[mask])
            s = np.max(np.abs(d))
            if s < score:
                best, score = ref + d, s
        return best


def _rel_I_vec(r):
    return np.concatenate([r.delta, r.gamma])


def _rel_II_vec(r):
    return np.concatenate([r.zeta.real, r.zeta.imag])


def _rel_I_from(v, m):
    return CenterMassPointI(v[:m], v[m:])


def _rel_II_from(v, m):
    return CenterMassPointII(v[:m] + 1j * v[m:])


def _omega_rel_I(m, off=0):
    return [(off + m + j, off + j, 1.0) for j in range(m)]


def _omega_rel_II(m, off=0):
    return [(off + j, off + m + j, 2.0) for j in range(m)]


def _mask(size, idx):
    m = np.zeros(size, dtype=bool)
    m[list(idx)] = True
    return m


def _cover_chart(name, level, rel, head_is_angle):
    m_of = lambda n: n - 1  # noqa: E731
    rel_vec = _rel_I_vec if rel == "I" else _rel_II_vec
    rel_from = _rel_I_from if rel == "I" else _rel_II_from
    rel_form = _omega_rel_I if rel == "I" else _omega_rel_II

    if level == 1:
        def enc(pt):
            return np.concatenate([[np.angle(pt.zeta0), pt.v0], rel_vec(pt.rel)])

        def dec(v, c):
            return CoveringPoint1(np.exp(1j * v[0]), v[1], rel_from(v[2:], c.n - 1))
    else:
        def enc(pt):
            return np.concatenate([[pt.u0, pt.w0], rel_vec(pt.rel)])

        def dec(v, c):
            return CoveringPoint2(v[0], v[1], rel_from(v[2:], c.n - 1))

    def angles(n):
        idx = [0] if head_is_angle else []
        return _mask(2 * n, idx)

    def omega(n):
        return _form(2 * n, [(1, 0, 1.0)] + rel_form(m_of(n), 2))

    return Chart(name, enc, dec, angles, omega)


CHARTS_REGISTRY: dict[str, Chart] = {
    "P": Chart(
        "P",
        lambda pt: np.concatenate([pt.q, pt.p]),
        lambda v, c: canonicalize_sutherland(v[: c.n], v[c.n:]),
        lambda n: _mask(2 * n, range(n)),
        lambda n: _form(2 * n, [(n + i, i, 1.0) for i in range(n)]),
        relabel=True,
    ),
    "Phat": Chart(
        "Phat",
        lambda pt: np.concatenate([pt.qhat, pt.phat]),
        lambda v, c: DualInteriorPoint.make(v[: c.n], v[c.n:], c),
        lambda n: _mask(2 * n, range(n)),
        lambda n: _form(2 * n, [(n + i, i, 1.0) for i in range(n)]),
    ),
    "PhatC": Chart(
        "PhatC",
        lambda pt: np.concatenate([[np.log(abs(pt.Z)), np.angle(pt.Z)], pt.z.real, pt.z.imag]),
        lambda v, c: DualCompletedPoint(v[2 : c.n + 1] + 1j * v[c.n + 1:], np.exp(v[0] + 1j * v[1])),
        lambda n: _mask(2 * n, [1]),
        lambda n: _form(2 * n, [(0, 1, 1.0)] + _omega_rel_II(n - 1, 2)),
    ),
    "CM-I": Chart(
        "CM-I",
        _rel_I_vec,
        lambda v, c: _rel_I_from(v, c.n - 1),
        lambda n: _mask(2 * n - 2, []),
        lambda n: _form(2 * n - 2, _omega_rel_I(n - 1)),
    ),
    "CM-II": Chart(
        "CM-II",
        _rel_II_vec,
        lambda v, c: _rel_II_from(v, c.n - 1),
        lambda n: _mask(2 * n - 2, []),
        lambda n: _form(2 * n - 2, _omega_rel_II(n - 1)),
    ),
    "P1-I": _cover_chart("P1-I", 1, "I", True),
    "P1-II": _cover_chart("P1-II", 1, "II", True),
    "P2-I": _cover_chart("P2-I", 2, "I", False),
    "P2-II": _cover_chart("P2-II", 2, "II", False),
}


@dataclass(frozen=True)
class MapEntry:
    name: str
    source: str
    target: str
    fn: Callable
    sampler: Callable


MAP_REGISTRY: dict[str, MapEntry] = {}


def _register(name, source, target, fn, sampler):
    MAP_REGISTRY[name] = MapEntry(name, source, target, fn, sampler)


_register("identity", "P", "P", lambda pt, c: pt, sample_sutherland)
_register("R", "P", "PhatC", dual_transform, sample_sutherland)
_register("Rinv", "PhatC", "P", dual_invert, sample_completed)
_register("Zx", "Phat", "PhatC", zx_map, sample_dual_interior)
_register("R0", "CM-I", "CM-II", su_dual_transform, sample_cm1)
_register("R0inv", "CM-II", "CM-I", su_dual_invert, sample_cm2)
_register("psi2_I", "P2-I", "P1-I", lambda pt, c: cov.psi2_I(pt), lambda r, c: sample_p2(r, c, "I"))
_register("psi2_II", "P2-II", "P1-II", lambda pt, c: cov.psi2_II(pt), lambda r, c: sample_p2(r, c, "II"))
_register("psi1_I", "P1-I", "P", cov.psi1_I, lambda r, c: sample_p1(r, c, "I"))
_register("psi1_II", "P1-II", "PhatC", cov.psi1_II, lambda r, c: sample_p1(r, c, "II"))
_register("alpha_red_I", "P1-I", "P1-I", lambda pt, c: cov.alpha_red_I(pt), lambda r, c: sample_p1(r, c, "I"))
_register("alpha_red_II", "P1-II", "P1-II", cov.alpha_red_II, lambda r, c: sample_p1(r, c, "II"))


def _cyclic_deck_map(pt, c):
    z0, v0, d, g = cyclic_deck_K(pt.zeta0, pt.rel.delta, pt.v0, pt.rel.gamma)
    return CoveringPoint1(z0, v0, CenterMassPointI(d, g))


_register("cyclic_deck_K", "P1-I", "P1-I", _cyclic_deck_map, lambda r, c: sample_p1(r, c, "I"))
_register("shift_deck_I", "P2-I", "P2-I", cov.shift_deck, lambda r, c: sample_p2(r, c, "I"))
_register("shift_deck_II", "P2-II", "P2-II", cov.shift_deck, lambda r, c: sample_p2(r, c, "II"))

DECK_MAPS = ("alpha_red_I", "alpha_red_II", "cyclic_deck_K", "shift_deck_I", "shift_deck_II")
PSI_MAPS = ("psi2_I", "psi2_II", "psi1_I", "psi1_II")


def jacobian(entry: MapEntry, pt, c: Coupling, step: float = DEFAULT_FD_STEP, richardson: bool = False):
    """Central-difference Jacobian of a registered map in its charts."""
    src, tgt = CHARTS_REGISTRY[entry.source], CHARTS_REGISTRY[entry.target]
    x0 = src.encode(pt)
    y0 = tgt.encode(entry.fn(pt, c))
    n = c.n

    def f(v):
        return tgt.align(tgt.encode(entry.fn(src.decode(v, c), c)), y0, n)

    def central(h):
        cols = []
        for i in range(x0.size):
            e = np.zeros_like(x0)
            e[i] = h
            up, down = x0 + e, x0 - e
            # divide by the realised step so that representation error cancels
            cols.append((f(up) - f(down)) / (up[i] - down[i]))
        return np.array(cols).T

    if not richardson:
        return central(step)
    return (4.0 * central(step / 2) - central(step)) / 3.0


def symplectic_residual(entry: MapEntry, pt, c: Coupling, step: float = DEFAULT_FD_STEP, richardson: bool = False) -> float:
    M = jacobian(entry, pt, c, step, richardson)
    n = c.n
    om_s = CHARTS_REGISTRY[entry.source].omega(n)
    om_t = CHARTS_REGISTRY[entry.target].omega(n)
    return float(np.max(np.abs(M.T @ om_t @ M - om_s)))


def check_symplectic(
    name: str,
    c: Coupling,
    samples: int = 20,
    fd_step: float = DEFAULT_FD_STEP,
    tol: float = 1e-6,
    seed: int = 0,
    richardson: bool | None = None,
) -> CheckReport:
    entry = MAP_REGISTRY[name]
    if richardson is None:
        richardson = c.n >= 4
    label = f"symplectic/{name}/n={c.n},x={c.x:g}"
    rng = stream(seed, label)
    worst = 0.0
    for _ in range(samples):
        pt = entry.sampler(rng, c)
        worst = max(worst, symplectic_residual(entry, pt, c, fd_step, richardson))
    return CheckReport(label, samples, worst, tol, seed, {"fd_step": fd_step, "richardson": richardson})


# ---------------------------------------------------------------------------
# Identity suite
# ---------------------------------------------------------------------------

IDENTITY_NS = (2, 3, 4, 5, 6)
IDENTITY_XS = (0.3, 1.0, 2.5)


def _scrambled_dual_point(rng, c: Coupling) -> tuple[LevelPoint, np.ndarray]:
    """A gauge-rotated dual-slice point and its chamber coordinate."""
    base = dual_slice_interior(sample_dual_interior(rng, c), c)
    phat = (1j * np.diag(base.J)).real
    return gauge_act(random_unitary(rng, c.n), base), phat


def check_identities(c: Coupling, samples: int = 1000, seed: int = 0, onshell_samples: int = 100) -> list[CheckReport]:
    """One report per identity family of the chamber functions ``V`` and ``eta``."""
    tag = f"n={c.n},x={c.x:g}"
    out = []

    def report(name, residuals, tol, count):
        out.append(CheckReport(f"identities/{name}/{tag}", count, float(np.max(residuals)), tol, seed))

    rng = stream(seed, f"identities/chamber/{tag}")
    phat = sample_phat(rng, c.n, c.x, size=samples)
    V = eval_V(phat, c)
    eta = eval_eta(phat, c)
    eye = np.eye(c.n)
    report("sum_rule", sum_rule_residual(phat, c), 1e-9, samples)
    report("V_norm", np.abs(np.sum(V**2, axis=-1) - c.n), 1e-10, samples)
    report("eta_orthogonal", np.linalg.norm(np.swapaxes(eta, -1, -2) @ eta - eye, axis=(-2, -1)), 1e-9, samples)
    report("eta_det", np.abs(np.linalg.det(eta) - 1.0), 1e-9, samples)
    report("eta_inverse", np.linalg.norm(np.linalg.inv(eta) - eval_eta(phat, c.mirrored()), axis=(-2, -1)), 1e-9, samples)
    report("eta_factorized", np.max(np.abs(eta - eval_eta_factorized(phat, c)), axis=(-2, -1)), 1e-10, samples)

    rng = stream(seed, f"identities/onshell/{tag}")
    char_res, v_res = [], []
    for _ in range(onshell_samples):
        pt, _ = _scrambled_dual_point(rng, c)
        es = eig_hermitian(1j * pt.J)
        ph = es.values
        w2 = np.abs(dagger(es.vectors) @ pt.v) ** 2
        lhs = np.poly(ph) * (-1) ** c.n
        shifted = ph - c.x
        rhs = np.poly(shifted) * (-1) ** c.n
        for k in range(c.n):
            rhs = rhs + np.concatenate([[0.0], c.x * w2[k] * np.poly(np.delete(shifted, k)) * (-1) ** (c.n - 1)])
        scale = max(1.0, float(np.max(np.abs(lhs))))
        char_res.append(np.max(np.abs(lhs - rhs)) / scale)
        v_res.append(np.max(np.abs(w2 - eval_V(ph, c) ** 2)))
    report("char_poly", char_res, 1e-9, onshell_samples)
    report("v_modulus", v_res, 1e-10, onshell_samples)

    rng = stream(seed, f"identities/aleph/{tag}")
    res = []
    for sign in (1, -1):
        cc = Coupling(c.n, sign * abs(c.x))
        for _ in range(onshell_samples):
            tau = np.exp(1j * sample_angles(rng, c.n))
            a, s = eval_aleph(tau, cc)
            res.append(np.max(np.abs(a / s - 1.0 / tau)))
    report("aleph", res, 1e-12, 2 * onshell_samples)
    return out


def suite_identities(seed: int = 0, samples: int = 1000) -> list[CheckReport]:
    by_family: dict[str, list[CheckReport]] = {}
    for n in IDENTITY_NS:
        for x in IDENTITY_XS:
            for r in check_identities(Coupling(n, x), samples, seed):
                by_family.setdefault(r.check_name.split("/")[1], []).append(r)
    return [merge_reports(rs, f"identities/{fam}") for fam, rs in by_family.items()]


# ---------------------------------------------------------------------------
# On-shell audits and the gap law
# ---------------------------------------------------------------------------

ONSHELL_COUPLINGS = tuple(Coupling(n, x) for n in (2, 3, 4, 5, 6) for x in (0.3, 1.0, 2.5, -1.0))


def _slice_makers():
    return {
        "sutherland_slice": lambda r, c: sutherland_slice(sample_sutherland(r, c), c),
        "dual_slice_interior": lambda r, c: dual_slice_interior(sample_dual_interior(r, c), c),
        "completed_slice": lambda r, c: completed_slice(sample_completed(r, c), c),
        "su_slice_I": lambda r, c: su_slice_I(sample_cm1(r, c), c),
        "su_slice_II": lambda r, c: su_slice_II(sample_cm2(r, c), c),
    }


def _phi0_residual(pt: LevelPoint, c: Coupling) -> float:
    return moment_residual(pt, c)


def suite_onshell(seed: int = 0, samples: int = 200) -> list[CheckReport]:
    out = []
    per = max(1, samples // len(ONSHELL_COUPLINGS) + 1)
    for name, make in _slice_makers().items():
        rng = stream(seed, f"onshell/{name}")
        worst, count = 0.0, 0
        for c in ONSHELL_COUPLINGS:
            for _ in range(per):
                worst = max(worst, _phi0_residual(make(rng, c), c))
                count += 1
        out.append(CheckReport(f"onshell/{name}", count, worst, 1e-9, seed))
    rng = stream(seed, "onshell/boundary_solution")
    worst = 0.0
    for c in ONSHELL_COUPLINGS:
        phat = rng.uniform(-1, 1) + abs(c.x) * np.arange(c.n - 1, -1, -1)
        worst = max(worst, moment_residual(boundary_solution(phat, c), c))
    out.append(CheckReport("onshell/boundary_solution", len(ONSHELL_COUPLINGS), worst, 1e-12, seed))
    return out


def spectral_gap_defect(pt: LevelPoint, c: Coupling) -> float:
    """``max(0, |x| - min gap of -iJ)``."""
    ev = eig_hermitian(1j * pt.J).values
    return max(0.0, abs(c.x) - float(np.min(ev[:-1] - ev[1:])))


def suite_gaps(seed: int = 0, samples: int = 200) -> list[CheckReport]:
    rng = stream(seed, "gaps/onshell")
    worst, count = 0.0, 0
    per = max(1, samples // len(ONSHELL_COUPLINGS) + 1)
    for name, make in _slice_makers().items():
        for c in ONSHELL_COUPLINGS:
            for _ in range(per):
                pt = make(rng, c)
                if moment_residual(pt, c) < 1e-10:
                    worst = max(worst, spectral_gap_defect(pt, c))
                    count += 1
        for c in ONSHELL_COUPLINGS:
            phat = abs(c.x) * np.arange(c.n - 1, -1, -1, dtype=float)
            worst = max(worst, spectral_gap_defect(boundary_solution(phat, c), c))
            count += 1
    out = [CheckReport("gaps/spectral_gap", count, worst, 1e-8, seed)]
    rng = stream(seed, "gaps/su_gap_law")
    worst = 0.0
    for c in ONSHELL_COUPLINGS:
        for _ in range(per):
            zeta = _complex_normal(rng, c.n - 1)
            pi0 = su_spectrum(zeta, abs(c.x))
            law = np.max(np.abs(pi0[:-1] - pi0[1:] - abs(c.x) - np.abs(zeta) ** 2))
            worst = max(worst, law, abs(pi0.sum()))
    out.append(CheckReport("gaps/su_gap_law", per * len(ONSHELL_COUPLINGS), worst, 1e-12, seed))
    return out


# ---------------------------------------------------------------------------
# Roundtrips and the exchange of actions and positions
# ---------------------------------------------------------------------------

ROUNDTRIP_NS = (2, 3, 4, 5)
ROUNDTRIP_X = 0.8


def suite_roundtrip(seed: int = 0, samples: int = 200, xs: Sequence[float] = (ROUNDTRIP_X, -ROUNDTRIP_X)) -> list[CheckReport]:
    checks = {
        "R_inverse_after_R": (sample_sutherland, lambda p, c: sutherland_distance(dual_invert(dual_transform(p, c), c), p)),
        "R_after_R_inverse": (sample_completed, lambda p, c: dual_transform(dual_invert(p, c), c).distance(p)),
        "R0_inverse_after_R0": (sample_cm1, lambda p, c: su_dual_invert(su_dual_transform(p, c), c).distance(p)),
        "R0_after_R0_inverse": (sample_cm2, lambda p, c: su_dual_transform(su_dual_invert(p, c), c).distance(p)),
    }
    out = []
    for name, (sampler, err) in checks.items():
        rng = stream(seed, f"roundtrip/{name}")
        worst, count = 0.0, 0
        per = max(1, samples // len(xs))
        for n in ROUNDTRIP_NS:
            for x in xs:
                c = Coupling(n, x)
                for _ in range(per):
                    worst = max(worst, err(sampler(rng, c), c))
                    count += 1
        out.append(CheckReport(f"roundtrip/{name}", count, worst, 1e-8, seed))
    return out


def lax_spectrum(pt: SutherlandPoint, c: Coupling) -> np.ndarray:
    """Descending eigenvalues of the Sutherland Lax matrix."""
    return np.sort(np.linalg.eigvalsh(sutherland_lax(pt, c)))[::-1]


def exchange_residuals(pt: SutherlandPoint, c: Coupling) -> dict[str, float]:
    """Residuals of the action/position exchange at one point.

    ``actions``: eigenvalues of the Lax matrix against ``-pi`` of the image
    (``J = -i diag(pi)`` on the dual side).  ``positions``: eigenphases of
    ``theta^-1`` at the image against the original angles.  ``trig``: the
    Hamiltonians ``Hhat_{+-k}`` evaluated on both slices.
    """
    dual = dual_transform(pt, c)
    from .slices import dual_spectrum

    pi = dual_spectrum(dual, c)
    actions = float(np.max(np.abs(lax_spectrum(pt, c) - np.sort(-pi)[::-1])))
    theta = completed_theta(dual, c)
    phases = np.sort(wrap_angle(np.angle(np.linalg.eigvals(np.linalg.inv(theta)))))[::-1]
    positions = float(np.max(np.abs(wrap_angle(phases - pt.q))))
    a, b = sutherland_slice(pt, c), completed_slice(dual, c)
    trig = max(abs(eval_Hhat(a, k) - eval_Hhat(b, k)) for m in range(1, c.n + 1) for k in (m, -m))
    return {"actions": actions, "positions": positions, "trig": float(trig)}


def suite_exchange(seed: int = 0, samples: int = 200) -> list[CheckReport]:
    worst = {"actions": 0.0, "positions": 0.0, "trig": 0.0}
    rng = stream(seed, "exchange")
    count = 0
    per = max(1, samples // (2 * len(ROUNDTRIP_NS)))
    for n in ROUNDTRIP_NS:
        for x in (ROUNDTRIP_X, -ROUNDTRIP_X):
            c = Coupling(n, x)
            for _ in range(per):
                res = exchange_residuals(sample_sutherland(rng, c), c)
                for k in worst:
                    worst[k] = max(worst[k], res[k])
                count += 1
    return [CheckReport(f"exchange/{k}", count, v, 1e-9, seed) for k, v in worst.items()]


# ---------------------------------------------------------------------------
# Symplecticity
# ---------------------------------------------------------------------------


def suite_symplectic(seed: int = 0, samples: int = 50) -> list[CheckReport]:
    out = []
    small = max(1, samples // 5)
    for x in (ROUNDTRIP_X, -ROUNDTRIP_X):
        for n in (2, 3):
            out.append(check_symplectic("R", Coupling(n, x), samples, tol=1e-5, seed=seed))
        for n in (2, 3, 4):
            c = Coupling(n, x)
            out.append(check_symplectic("identity", c, 2, tol=1e-12, seed=seed))
            for name in ("Zx",) + PSI_MAPS + DECK_MAPS:
                out.append(check_symplectic(name, c, small, tol=1e-6, seed=seed))
    return out


# ---------------------------------------------------------------------------
# Diagram of coverings and dualities
# ---------------------------------------------------------------------------

DIAGRAM_NS = (2, 3, 4)


def check_diagram(c: Coupling, samples: int = 100, seed: int = 0) -> CheckReport:
    label = f"diagram/commutes/n={c.n},x={c.x:g}"
    rng = stream(seed, label)
    worst = 0.0
    for _ in range(samples):
        worst = max(worst, cov.diagram_check(sample_p2(rng, c, "I"), c))
    return CheckReport(label, samples, worst, 1e-8, seed)


def check_deck_quotients(c: Coupling, samples: int = 100, seed: int = 0) -> list[CheckReport]:
    """``psi1 o alpha = psi1`` for both circle coverings."""
    out = []
    rng = stream(seed, f"diagram/deck_I/n={c.n},x={c.x:g}")
    worst = 0.0
    for _ in range(samples):
        pt = sample_p1(rng, c, "I")
        worst = max(worst, sutherland_distance(cov.psi1_I(cov.alpha_red_I(pt), c), cov.psi1_I(pt, c)))
    out.append(CheckReport(f"diagram/deck_I/n={c.n},x={c.x:g}", samples, worst, 1e-12, seed))
    rng = stream(seed, f"diagram/deck_II/n={c.n},x={c.x:g}")
    worst = 0.0
    for _ in range(samples):
        pt = sample_p1(rng, c, "II")
        worst = max(worst, cov.psi1_II(cov.alpha_red_II(pt, c), c).distance(cov.psi1_II(pt, c)))
    out.append(CheckReport(f"diagram/deck_II/n={c.n},x={c.x:g}", samples, worst, 1e-12, seed))
    return out


def suite_diagram(seed: int = 0, samples: int = 100) -> list[CheckReport]:
    out = []
    for n in DIAGRAM_NS:
        for x in (ROUNDTRIP_X, -ROUNDTRIP_X):
            c = Coupling(n, x)
            out.append(check_diagram(c, samples, seed))
            out.extend(check_deck_quotients(c, samples, seed))
    return out


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------


def rk4_deviation(pt: SutherlandPoint, c: Coupling, t: float = 1.0, step: float = 1e-3, samples: int = 11) -> float:
    exact = evolve_sutherland(pt, c, 2, t, samples)
    ref = rk4_reference(pt, c, t, step, samples)
    return float(max(np.max(np.abs(exact.raw_q - ref.raw_q)), np.max(np.abs(exact.raw_p - ref.raw_p))))


def boundary_crossing(c: Coupling, k: int, t: float, rng, samples: int = 21) -> dict[str, float]:
    """Run a dual flow through a point with ``z_1 = 0``.

    The start is obtained by evolving the boundary point backwards, so the
    forward trajectory reaches ``z_1 = 0`` at its midpoint.
    """
    z = _complex_normal(rng, c.n - 1)
    z[0] = 0.0
    target = DualCompletedPoint(z, np.exp(rng.uniform(-1, 1) + 1j * rng.uniform(-np.pi, np.pi)))
    start = evolve_dual(target, c, k, -t, 2).points[-1]
    traj = evolve_dual(start, c, k, 2 * t, samples)
    mid = traj.points[samples // 2]
    moduli = np.array([abs(p.z[0]) for p in traj.points])
    return {
        "midpoint_error": float(mid.distance(target)),
        "drift": traj.max_drift,
        "start_modulus": float(moduli[0]),
        "end_modulus": float(moduli[-1]),
    }


def suite_dynamics(seed: int = 0, samples: int = 5) -> list[CheckReport]:
    out = []
    rng = stream(seed, "dynamics/rk4")
    worst, energy = 0.0, 0.0
    c = Coupling(3, 1.0)
    for _ in range(samples):
        pt = sample_sutherland(rng, c, margin=DYNAMICS_MARGIN)
        worst = max(worst, rk4_deviation(pt, c))
        energy = max(energy, rk4_reference(pt, c, 1.0).extra["energy_drift"])
    out.append(CheckReport("dynamics/rk4_cross_oracle", samples, worst, 1e-5, seed))
    out.append(CheckReport("dynamics/rk4_energy_drift", samples, energy, 1e-8, seed))

    rng = stream(seed, "dynamics/sutherland_flows")
    drift, frozen, count = 0.0, 0.0, 0
    for n in (2, 3, 4):
        for x in (ROUNDTRIP_X, -ROUNDTRIP_X):
            c = Coupling(n, x)
            for k in range(1, n + 1):
                traj = evolve_sutherland(sample_sutherland(rng, c), c, k, 0.7, 6)
                drift = max(drift, traj.max_drift)
                ds = traj.extra["dual_spectrum"]
                frozen = max(frozen, float(np.max(np.abs(ds - ds[0]))))
                count += 1
    out.append(CheckReport("dynamics/H_invariant_drift", count, drift, 1e-9, seed))
    out.append(CheckReport("dynamics/dual_spectrum_constant", count, frozen, 1e-9, seed))

    rng = stream(seed, "dynamics/dual_flows")
    drift, count = 0.0, 0
    for n in (2, 3, 4):
        for x in (ROUNDTRIP_X, -ROUNDTRIP_X):
            c = Coupling(n, x)
            for m in range(1, n + 1):
                for k in (m, -m):
                    traj = evolve_dual(sample_completed(rng, c), c, k, 0.7, 6)
                    drift = max(drift, traj.max_drift)
                    count += 1
    out.append(CheckReport("dynamics/Hhat_invariant_drift", count, drift, 1e-9, seed))

    rng = stream(seed, "dynamics/boundary_crossing")
    worst, count = 0.0, 0
    for n in (2, 3, 4):
        for x in (ROUNDTRIP_X, -ROUNDTRIP_X):
            c = Coupling(n, x)
            for k in (1, -1):
                res = boundary_crossing(c, k, 0.5, rng)
                # a path that never leaves z_1 = 0 would certify nothing
                stuck = 0.0 if min(res["start_modulus"], res["end_modulus"]) > 1e-6 else np.inf
                worst = max(worst, res["midpoint_error"], res["drift"], stuck)
                count += 1
    out.append(CheckReport("dynamics/boundary_crossing", count, worst, 1e-8, seed))
    return out


# ---------------------------------------------------------------------------
# Orientability of the configuration space
# ---------------------------------------------------------------------------


def transition_det(n: int, rng, step: float = 1e-6) -> float:
    """Finite-difference determinant of the chart transition on the configuration space."""
    delta = sample_delta(rng, n)
    x0 = np.concatenate([[rng.uniform(np.pi - 0.05, np.pi + 0.05)], delta])
    cols = []
    for i in range(x0.size):
        e = np.zeros_like(x0)
        e[i] = step
        cols.append((base_transition(x0 + e) - base_transition(x0 - e)) / (2 * step))
    return float(np.linalg.det(np.array(cols).T))


def suite_orientability(seed: int = 0, samples: int = 10) -> list[CheckReport]:
    out = []
    for n in (2, 3, 4, 5, 6):
        rng = stream(seed, f"orientability/n={n}")
        dets = [transition_det(n, rng) for _ in range(samples)]
        wrong = sum((d > 0) != (n % 2 == 1) for d in dets)
        out.append(CheckReport(f"orientability/n={n}", samples, float(wrong), 0.5, seed, {"dets": [round(d, 12) for d in dets[:1]]}))
    return out


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

SUITES: dict[str, Callable[..., list[CheckReport]]] = {
    "identities": suite_identities,
    "onshell": suite_onshell,
    "roundtrip": suite_roundtrip,
    "exchange": suite_exchange,
    "symplectic": suite_symplectic,
    "diagram": suite_diagram,
    "dynamics": suite_dynamics,
    "gaps": suite_gaps,
    "orientability": suite_orientability,
}


def run_suite(name: str, seed: int = 0) -> list[CheckReport]:
    """Run one named suite, or every suite for ``'all'``."""
    if name == "all":
        out = []
        for key in SUITES:
            out.extend(run_suite(key, seed))
        return out
    if name not in SUITES:
        raise KeyError(name)
    t0 = time.perf_counter()
    reports = SUITES[name](seed=seed)
    log.info("suite %s: %d checks in %.2fs", name, len(reports), time.perf_counter() - t0)
    return reports


def reports_json(reports: Sequence[CheckReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)
