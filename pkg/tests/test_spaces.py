import numpy as np
import pytest

from dualpair.errors import CoincidentAngles, NotInC, NotInSimplex, NotInteriorChamber, NotOnOverlap, ZeroZ
from dualpair.spaces import (
    ChartPointQ,
    Coupling,
    CoveringPoint1,
    DualCompletedPoint,
    DualInteriorPoint,
    alcove_embed,
    alcove_to_simplex,
    canonicalize_sutherland,
    cartan_matrix,
    chart_to_sutherland,
    chart_transition,
    cyclic_deck_K,
    cyclic_deck_K_inverse,
    line_to_separated,
    momenta_to_relative,
    relative_to_momenta,
    separated_to_line,
    sutherland_distance,
    sutherland_to_chart,
    sutherland_to_circle,
)
from dualpair.verify import sample_delta, sample_sutherland

PI = np.pi


def test_coupling_validation():
    with pytest.raises(ValueError):
        Coupling(1, 1.0)
    with pytest.raises(ValueError):
        Coupling(3, 0.0)
    c = Coupling(3, -0.5)
    assert c.mirrored().x == 0.5 and c.abs.x == 0.5


@pytest.mark.parametrize(
    "q, p, q_out, p_out",
    [
        ((0, PI / 2), (1, 2), (PI / 2, 0), (2, 1)),
        ((PI / 4, -PI / 4), (0, 0), (PI / 4, -PI / 4), (0, 0)),
        ((3 * PI, 0), (1, 0), (PI, 0), (1, 0)),
    ],
)
def test_canonicalize_examples(q, p, q_out, p_out):
    pt = canonicalize_sutherland(q, p)
    assert np.allclose(pt.q, q_out, atol=1e-15)
    assert np.allclose(pt.p, p_out)


def test_canonicalize_rejects_coincident():
    with pytest.raises(CoincidentAngles):
        canonicalize_sutherland([0.3, 0.3 + 2 * PI], [0, 0])


def test_sutherland_distance_equivalence(rng):
    pt = sample_sutherland(rng, Coupling(4, 1.0))
    q = np.roll(pt.q, 1)
    q[0] -= 2 * PI
    other = canonicalize_sutherland(q, np.roll(pt.p, 1))
    assert sutherland_distance(pt, other) < 1e-14
    assert pt.isclose(other)


def test_line_to_separated_example():
    u0, w0, delta, gamma = line_to_separated([1.0, 0.0], [1.0, -1.0])
    assert (u0, w0) == (0.5, 0.0)
    assert np.allclose(delta, [1.0]) and np.allclose(gamma, [1.0])


def test_line_zero_momenta():
    _, w0, _, gamma = line_to_separated([2.0, 1.0, 0.0], [0, 0, 0])
    assert w0 == 0 and np.all(gamma == 0)


def test_line_rejects_wide_configuration():
    with pytest.raises(NotInC):
        line_to_separated([7.0, 0.0], [0, 0])


def test_kinetic_split(rng):
    n = 5
    u = np.sort(rng.uniform(0, 6, size=n))[::-1]
    w = rng.normal(size=n)
    u0, w0, delta, gamma = line_to_separated(u, w)
    kinetic = 0.5 * np.sum(w**2)
    A = cartan_matrix(n - 1)
    assert np.isclose(kinetic, w0**2 / (2 * n) + 0.5 * gamma @ A @ gamma)
    u2, w2 = separated_to_line(u0, w0, delta, gamma)
    assert np.allclose(u2, u) and np.allclose(w2, w)


def test_alcove_examples():
    assert np.allclose(alcove_embed([PI]), [PI / 2, -PI / 2])
    assert np.allclose(alcove_embed([2 * PI / 3, 2 * PI / 3]), [2 * PI / 3, 0, -2 * PI / 3])


def test_alcove_traceless_and_inverse(rng):
    for n in range(2, 7):
        delta = sample_delta(rng, n)
        beta = alcove_embed(delta)
        assert abs(beta.sum()) < 1e-14
        assert np.allclose(alcove_to_simplex(beta), delta)


def test_simplex_rejection():
    with pytest.raises(NotInSimplex):
        alcove_embed([4.0, 3.0])


def test_momenta_relative_roundtrip(rng):
    p = rng.normal(size=4)
    v0, gamma = momenta_to_relative(p)
    assert np.isclose(v0, p.sum())
    assert np.allclose(relative_to_momenta(v0, gamma), p)


def test_circle_coordinates_reconstruct(rng):
    pt = sample_sutherland(rng, Coupling(4, 1.0))
    zeta0, v0, delta, gamma = sutherland_to_circle(pt)
    q = np.angle(zeta0) + alcove_embed(delta)
    again = canonicalize_sutherland(q, relative_to_momenta(v0, gamma))
    assert sutherland_distance(again, pt) < 1e-13


def test_cyclic_deck_n2():
    z0, v0, d, g = cyclic_deck_K(1j, [1.0], 0.3, [0.7])
    assert np.isclose(z0, -1j) and v0 == 0.3
    assert np.allclose(d, [2 * PI - 1.0]) and np.allclose(g, [-0.7])


def test_cyclic_deck_n3():
    _, d = cyclic_deck_K(1.0, [1.0, 2.0])
    assert np.allclose(d, [2.0, 2 * PI - 3.0])


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cyclic_deck_order(rng, n):
    start = (np.exp(0.4j), 0.2, sample_delta(rng, n), rng.normal(size=n - 1))
    z0, v0, d, g = start
    for _ in range(n):
        z0, v0, d, g = cyclic_deck_K(z0, d, v0, g)
    assert np.isclose(z0, start[0]) and v0 == start[1]
    assert np.allclose(d, start[2], atol=1e-12) and np.allclose(g, start[3], atol=1e-12)
    z1, v1, d1, g1 = cyclic_deck_K(start[0], start[2], start[1], start[3])
    z2, _, d2, g2 = cyclic_deck_K_inverse(z1, d1, v1, g1)
    assert np.isclose(z2, start[0]) and np.allclose(d2, start[2]) and np.allclose(g2, start[3])


def test_chart_transition_plus_overlap():
    pt = ChartPointQ("U", 0.05, 0.3, np.array([1.0]), np.array([0.2]))
    out = chart_transition(pt)
    assert out.chart == "U'" and out.phi == pt.phi and np.array_equal(out.delta, pt.delta)


def test_chart_transition_minus_n2():
    pt = ChartPointQ("U", PI + 0.05, 0.3, np.array([1.0]), np.array([0.2]))
    out = chart_transition(pt)
    assert np.isclose(out.phi, PI + 0.05 - 2 * PI)
    assert np.allclose(out.delta, [2 * PI - 1.0]) and np.allclose(out.gamma, [-0.2]) and out.pphi == 0.3
    assert chart_transition(out).chart == "U"


def test_chart_off_overlap():
    with pytest.raises(NotOnOverlap):
        chart_transition(ChartPointQ("U", 1.0, 0.0, np.array([1.0]), np.array([0.0])))


def test_chart_describes_same_point(rng):
    c = Coupling(3, 1.0)
    for _ in range(20):
        pt = sample_sutherland(rng, c)
        for chart in ("U", "U'"):
            try:
                cp = sutherland_to_chart(pt, chart)
            except NotOnOverlap:
                continue
            assert sutherland_distance(chart_to_sutherland(cp), pt) < 1e-12


def test_dual_interior_validation():
    c = Coupling(2, 1.0)
    with pytest.raises(NotInteriorChamber):
        DualInteriorPoint.make([0, 0], [1.0, 0.0], c)
    DualInteriorPoint.make([0, 0], [1.0, 0.0], c, interior=False)


def test_completed_point_rejects_zero():
    with pytest.raises(ZeroZ):
        DualCompletedPoint([1.0], 0.0)


def test_covering_point_unit_circle():
    with pytest.raises(ValueError):
        CoveringPoint1(2.0, 0.0, None)
