import io

import numpy as np
import pytest

from dualpair.dynamics import (
    FlowSpec,
    all_invariants,
    eval_H,
    eval_Hhat,
    eval_HRS,
    evolve_dual,
    evolve_sutherland,
    free_flow,
    rk4_reference,
    trajectory_rows,
    write_csv,
)
from dualpair.duality import dual_transform, project_to_dual
from dualpair.errors import CollisionGuard
from dualpair.slices import LevelPoint, completed_slice, dual_spectrum, gauge_act, moment_residual, sutherland_slice
from dualpair.spaces import Coupling, DualCompletedPoint, canonicalize_sutherland, sutherland_distance
from dualpair.verify import DYNAMICS_MARGIN, boundary_crossing, random_unitary, sample_completed, sample_sutherland

C21 = Coupling(2, 1.0)
WORKED_DUAL = DualCompletedPoint([1.0], np.exp(-2.0))


def _free_point(g):
    n = g.shape[0]
    return LevelPoint(g, np.zeros((n, n), dtype=complex), np.ones(n, dtype=complex))


def test_flowspec_validation():
    for bad in (("X", 1), ("H", 0), ("Hhat", 0), ("H", 1.5)):
        with pytest.raises(ValueError):
            FlowSpec(*bad)
    with pytest.raises(ValueError):
        FlowSpec("H", 4).check_range(3)
    assert FlowSpec("Hhat", -2).name == "Hhat-2"


def test_eval_H_example():
    pt = LevelPoint(np.eye(2), -1j * np.diag([2.0, 0.0]), np.ones(2))
    # (1/k) tr(-iJ)^k with -iJ = -diag(2, 0)
    assert np.isclose(eval_H(pt, 1), -2) and np.isclose(eval_H(pt, 2), 2)
    assert np.isclose(eval_H(LevelPoint(np.eye(2), 1j * np.diag([2.0, 0.0]), np.ones(2)), 1), 2)


def test_eval_Hhat_identity():
    pt = _free_point(np.eye(3, dtype=complex))
    for k in (1, 2, 3):
        assert np.isclose(eval_Hhat(pt, k), 6 / k) and np.isclose(eval_Hhat(pt, -k), 0)


def test_eval_Hhat_worked_point():
    lv = completed_slice(WORKED_DUAL, C21)
    assert np.isclose(eval_Hhat(lv, 1), 2 * np.sqrt(3))
    assert np.isclose(eval_HRS(lv), np.sqrt(3))


def test_invariants_gauge_invariant(rng):
    c = Coupling(3, 0.7)
    lv = sutherland_slice(sample_sutherland(rng, c), c)
    moved = gauge_act(random_unitary(rng, 3), lv)
    assert np.allclose(all_invariants(moved), all_invariants(lv), atol=1e-12)


def test_H2_is_sutherland_energy(rng):
    c = Coupling(4, 1.3)
    pt = sample_sutherland(rng, c)
    q, p = pt.q, pt.p
    pot = sum(1 / np.sin((q[i] - q[j]) / 2) ** 2 for i in range(4) for j in range(i + 1, 4))
    assert np.isclose(eval_H(sutherland_slice(pt, c), 2), 0.5 * np.sum(p**2) + c.x**2 / 4 * pot)


def test_Hhat_on_sutherland_slice_is_trig_sum(rng):
    c = Coupling(3, 0.9)
    pt = sample_sutherland(rng, c)
    lv = sutherland_slice(pt, c)
    for k in (1, 2, 3):
        assert np.isclose(eval_Hhat(lv, k), 2 * np.sum(np.cos(k * pt.q)) / k)
        assert np.isclose(eval_Hhat(lv, -k), 2 * np.sum(np.sin(k * pt.q)) / k)


@pytest.mark.parametrize("spec", [FlowSpec("H", 1), FlowSpec("H", 3), FlowSpec("Hhat", 2), FlowSpec("Hhat", -1)], ids=lambda s: s.name)
def test_free_flow_group_law(rng, spec):
    c = Coupling(3, 0.8)
    lv = sutherland_slice(sample_sutherland(rng, c), c)
    zero = free_flow(lv, FlowSpec(spec.family, spec.k, 0.0))
    assert np.allclose(zero.g, lv.g, atol=1e-14) and np.allclose(zero.J, lv.J, atol=1e-14)
    a = free_flow(free_flow(lv, FlowSpec(spec.family, spec.k, 0.3)), FlowSpec(spec.family, spec.k, 0.4))
    b = free_flow(lv, FlowSpec(spec.family, spec.k, 0.7))
    assert np.allclose(a.g, b.g, atol=1e-12) and np.allclose(a.J, b.J, atol=1e-12)
    assert moment_residual(b, c) < 1e-10
    y = random_unitary(rng, 3)
    u = free_flow(gauge_act(y, lv), FlowSpec(spec.family, spec.k, 0.7))
    w = gauge_act(y, b)
    assert np.allclose(u.g, w.g, atol=1e-12) and np.allclose(u.J, w.J, atol=1e-12)


def test_free_flows_commute(rng):
    c = Coupling(3, 0.8)
    lv = sutherland_slice(sample_sutherland(rng, c), c)
    for fam, (k1, k2) in (("H", (2, 3)), ("Hhat", (1, -2))):
        a = free_flow(free_flow(lv, FlowSpec(fam, k1, 0.5)), FlowSpec(fam, k2, 0.3))
        b = free_flow(free_flow(lv, FlowSpec(fam, k2, 0.3)), FlowSpec(fam, k1, 0.5))
        assert np.allclose(a.g, b.g, atol=1e-10) and np.allclose(a.J, b.J, atol=1e-10)


def test_k1_flow_is_rigid_rotation(rng):
    c = Coupling(3, 1.0)
    pt = sample_sutherland(rng, c)
    traj = evolve_sutherland(pt, c, 1, 1.5, samples=4)
    assert np.allclose(traj.raw_q - traj.raw_q[0], traj.times[:, None], atol=1e-10)
    assert np.allclose(traj.raw_p, pt.p, atol=1e-10)


def test_evolve_from_rest(rng):
    c = Coupling(3, 1.0)
    pt = canonicalize_sutherland(sample_sutherland(rng, c).q, np.zeros(3))
    traj = evolve_sutherland(pt, c, 2, 1.0)
    assert traj.max_drift < 1e-9
    assert np.max(np.abs(traj.raw_q[-1] - traj.raw_q[0])) > 1e-3


def test_evolve_t0(rng):
    c = Coupling(3, 1.0)
    pt = sample_sutherland(rng, c)
    traj = evolve_sutherland(pt, c, 2, 0.0)
    assert len(traj.points) == 1 and sutherland_distance(traj.points[0], pt) < 1e-10
    cp = sample_completed(rng, c)
    assert evolve_dual(cp, c, 1, 0.0).points[0].distance(cp) < 1e-10


def test_dual_spectrum_constant_along_sutherland_flow(rng):
    c = Coupling(4, 0.8)
    pt = sample_sutherland(rng, c)
    for k in (2, 3):
        traj = evolve_sutherland(pt, c, k, 1.0, samples=6)
        assert traj.max_drift < 1e-9
        ds = traj.extra["dual_spectrum"]
        assert np.max(np.abs(ds - ds[0])) < 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_rk4_cross_oracle(rng, n):
    c = Coupling(n, 1.0)
    pt = sample_sutherland(rng, c, margin=DYNAMICS_MARGIN)
    exact = evolve_sutherland(pt, c, 2, 1.0)
    ref = rk4_reference(pt, c, 1.0)
    assert ref.extra["energy_drift"] < 1e-8
    assert np.max(np.abs(exact.raw_q - ref.raw_q)) < 1e-5
    assert np.max(np.abs(exact.raw_p - ref.raw_p)) < 1e-5


def test_rk4_near_free_limit(rng):
    # slow particles that stay apart, so the tiny potential never matters
    c = Coupling(3, 1e-6)
    pt = sample_sutherland(rng, c, p_scale=0.1, margin=DYNAMICS_MARGIN)
    ref = rk4_reference(pt, c, 1.0)
    assert np.max(np.abs(ref.raw_q - (pt.q + np.outer(ref.times, pt.p)))) < 1e-8


def test_rk4_collision_guard():
    c = Coupling(2, 1.0)
    pt = canonicalize_sutherland([1e-5, -1e-5], [0, 0])
    with pytest.raises(CollisionGuard):
        rk4_reference(pt, c, 0.1)


@pytest.mark.parametrize("k", [1, -1, 2])
def test_evolve_dual_conserves(rng, k):
    c = Coupling(3, -0.9)
    traj = evolve_dual(sample_completed(rng, c), c, k, 1.0, samples=6)
    assert traj.max_drift < 1e-9


def test_hhat1_flow_two_by_two():
    lv = completed_slice(WORKED_DUAL, C21)
    traj = evolve_dual(WORKED_DUAL, C21, 1, 0.8, samples=5)
    theta = lv.g.conj().T
    for t, pt in zip(traj.times, traj.points):
        J = -1j * np.diag([2.0, 0.0]) + t * (np.linalg.inv(theta) - theta)
        direct = np.sort(np.linalg.eigvalsh(1j * J))[::-1]
        assert np.allclose(dual_spectrum(pt, C21), direct, atol=1e-9)


@pytest.mark.parametrize("k", [1, -1])
def test_boundary_crossing(rng, k):
    res = boundary_crossing(Coupling(3, 1.0), k, 0.5, rng)
    assert res["midpoint_error"] < 1e-9 and res["drift"] < 1e-8
    assert res["start_modulus"] > 1e-3 and res["end_modulus"] > 1e-3


def test_sutherland_flow_matches_dual_side(rng):
    # the H_k flow does not move pi_hat, only the dual angles
    c = Coupling(3, 0.8)
    pt = sample_sutherland(rng, c)
    last = evolve_sutherland(pt, c, 2, 0.7, samples=2).points[-1]
    assert np.allclose(dual_spectrum(dual_transform(last, c), c), dual_spectrum(dual_transform(pt, c), c), atol=1e-9)


def test_csv_output(rng, tmp_path):
    c = Coupling(2, 1.0)
    traj = evolve_sutherland(sample_sutherland(rng, c), c, 2, 1.0, samples=3)
    header, rows = trajectory_rows(traj)
    assert header[:5] == ["t", "q_1", "q_2", "p_1", "p_2"] and header[5:] == traj.invariant_names
    buf = io.StringIO()
    write_csv(traj, buf)
    lines = buf.getvalue().strip().splitlines()
    assert len(lines) == 4 and lines[0].split(",") == header
    write_csv(evolve_dual(sample_completed(rng, c), c, 1, 1.0, samples=2), tmp_path / "d.csv")
    head = (tmp_path / "d.csv").read_text().splitlines()[0].split(",")
    assert head[:5] == ["t", "re_z_1", "im_z_1", "re_Z", "im_Z"]
