import numpy as np
import pytest

from dualpair.coverings import (
    alpha_red_I,
    alpha_red_I_inverse,
    alpha_red_II,
    diagram_check,
    diagram_paths,
    lift_rel_I_to_II,
    lift_rel_II_to_I,
    psi1_I,
    psi1_II,
    psi2_I,
    psi2_II,
    shift_deck,
)
from dualpair.slices import dual_spectrum, moment_residual, su_slice_I, sutherland_slice
from dualpair.spaces import CenterMassPointI, CenterMassPointII, Coupling, CoveringPoint1, CoveringPoint2, sutherland_distance
from dualpair.verify import sample_p1, sample_p2

COUPLINGS = [Coupling(n, x) for n in (2, 3, 4) for x in (0.8, -0.8)]
IDS = [f"n{c.n}x{c.x:+g}" for c in COUPLINGS]


def test_psi2_examples(rng):
    c = Coupling(3, 1.0)
    for rel, psi in (("I", psi2_I), ("II", psi2_II)):
        pt = sample_p2(rng, c, rel)
        assert np.isclose(psi(CoveringPoint2(0.0, pt.w0, pt.rel)).zeta0, 1)
        a = psi(pt)
        b = psi(CoveringPoint2(pt.u0 + 2 * np.pi, pt.w0, pt.rel))
        assert a.distance(b) < 1e-12


def test_psi2_rejects_wrong_relative_type(rng):
    pt = sample_p2(rng, Coupling(3, 1.0), "II")
    with pytest.raises(TypeError):
        psi2_I(pt)


def test_psi1_I_example():
    out = psi1_I(CoveringPoint1(1.0, 0.0, CenterMassPointI([np.pi], [0.0])), Coupling(2, 1.0))
    assert np.allclose(np.sort(out.q), [-np.pi / 2, np.pi / 2]) and np.allclose(out.p, 0)


@pytest.mark.parametrize("c", COUPLINGS, ids=IDS)
def test_psi1_I_deck_invariance_and_momentum(rng, c):
    for _ in range(30):
        pt = sample_p1(rng, c, "I")
        out = psi1_I(pt, c)
        assert sutherland_distance(out, psi1_I(alpha_red_I(pt), c)) < 1e-10
        assert np.isclose(out.p.sum(), pt.v0)


def test_alpha_red_I_n2():
    pt = CoveringPoint1(np.exp(0.4j), 1.5, CenterMassPointI([2.0], [0.7]))
    out = alpha_red_I(pt)
    assert np.isclose(out.zeta0, -pt.zeta0) and out.v0 == 1.5
    assert np.allclose(out.rel.delta, [2 * np.pi - 2.0]) and np.allclose(out.rel.gamma, [-0.7])


@pytest.mark.parametrize("n", [2, 3, 5])
def test_alpha_red_orders(rng, n):
    c = Coupling(n, 1.0)
    p1 = sample_p1(rng, c, "I")
    p2 = sample_p1(rng, c, "II")
    a, b = p1, p2
    for k in range(n):
        a, b = alpha_red_I(a), alpha_red_II(b, c)
        if k < n - 1:
            assert a.distance(p1) > 1e-6 and b.distance(p2) > 1e-6
    assert a.distance(p1) < 1e-10 and b.distance(p2) < 1e-10
    assert alpha_red_I_inverse(alpha_red_I(p1)).distance(p1) < 1e-12


def test_psi1_II_example():
    out = psi1_II(CoveringPoint1(1.0, 1.0, CenterMassPointII([0.0])), Coupling(2, 1.0))
    assert np.allclose(out.z, [0]) and np.isclose(out.Z, 1)


def test_alpha_red_II_n2():
    pt = CoveringPoint1(np.exp(0.4j), 1.5, CenterMassPointII([0.3 - 0.2j]))
    out = alpha_red_II(pt)
    assert np.isclose(out.zeta0, -pt.zeta0) and np.allclose(out.rel.zeta, [-(0.3 - 0.2j)])


@pytest.mark.parametrize("c", COUPLINGS, ids=IDS)
def test_psi1_II_deck_invariance_and_modulus(rng, c):
    for _ in range(30):
        pt = sample_p1(rng, c, "II")
        out = psi1_II(pt, c)
        assert out.distance(psi1_II(alpha_red_II(pt, c), c)) < 1e-12
        rot = CoveringPoint1(pt.zeta0 * np.exp(0.9j), pt.v0, CenterMassPointII(pt.rel.zeta * np.exp(1j * rng.normal(size=c.n - 1))))
        assert np.isclose(abs(psi1_II(rot, c).Z), abs(out.Z))


@pytest.mark.parametrize("c", COUPLINGS, ids=IDS)
def test_psi1_II_total_action(rng, c):
    # the trace of J is carried by v0 alone
    pt = sample_p1(rng, c, "II")
    assert np.isclose(dual_spectrum(psi1_II(pt, c), c).sum(), -pt.v0)


@pytest.mark.parametrize("c", COUPLINGS, ids=IDS)
def test_shift_deck(rng, c):
    for rel, psi2, psi1 in (("I", psi2_I, psi1_I), ("II", psi2_II, psi1_II)):
        pt = sample_p2(rng, c, rel)
        full = shift_deck(pt, c, power=c.n)
        assert np.isclose(full.u0, pt.u0 - 2 * np.pi) and full.rel.distance(pt.rel) < 1e-10
        assert shift_deck(shift_deck(pt, c), c, power=-1).rel.distance(pt.rel) < 1e-12
        a, b = psi1(psi2(pt), c), psi1(psi2(shift_deck(pt, c)), c)
        dist = sutherland_distance(a, b) if rel == "I" else a.distance(b)
        assert dist < 1e-10


@pytest.mark.parametrize("c", COUPLINGS, ids=IDS)
def test_diagram_commutes(rng, c):
    for _ in range(20):
        pt = sample_p2(rng, c, "I")
        assert diagram_check(pt, c) < 1e-8


def test_diagram_paths_land_on_shell(rng):
    c = Coupling(3, 0.8)
    a, b = diagram_paths(sample_p2(rng, c, "I"), c)
    from dualpair.slices import completed_slice

    assert moment_residual(completed_slice(a, c), c) < 1e-9 and a.distance(b) < 1e-8


def test_center_of_mass_trace_sum(rng):
    # sum of eig(-iJ) over the Sutherland slice is the total momentum w0
    c = Coupling(4, 0.8)
    pt = sample_p2(rng, c, "I")
    sp = psi1_I(psi2_I(pt), c)
    assert np.isclose(np.sum(np.linalg.eigvalsh(-1j * sutherland_slice(sp, c).J)), pt.w0)


def test_lifts_roundtrip(rng):
    c = Coupling(3, -0.8)
    for make in (sample_p1, sample_p2):
        pt = make(rng, c, "I")
        back = lift_rel_II_to_I(lift_rel_I_to_II(pt, c), c)
        assert back.rel.distance(pt.rel) < 1e-8 and type(back) is type(pt)
    assert moment_residual(su_slice_I(pt.rel, c), c) < 1e-12
