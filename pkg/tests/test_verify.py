import json

import numpy as np
import pytest

from dualpair.errors import SampleRejection
from dualpair.spaces import Coupling, check_simplex
from dualpair.verify import (
    CHARTS_REGISTRY,
    MAP_REGISTRY,
    CheckReport,
    check_symplectic,
    merge_reports,
    reports_json,
    run_suite,
    sample_delta,
    stream,
    suite_identities,
    symplectic_residual,
    transition_det,
)


def test_report_pass_and_line():
    ok = CheckReport("a/b", 3, 1e-13, 1e-12, 0)
    bad = CheckReport("a/c", 3, 2e-12, 1e-12, 0)
    assert ok.passed and not bad.passed
    assert ok.line().startswith("PASS a/b") and bad.line().startswith("FAIL a/c")
    d = bad.to_dict()
    assert d["pass"] is False and d["check_name"] == "a/c"
    m = merge_reports([ok, bad], "a")
    assert m.samples == 6 and m.max_residual == 2e-12


def test_streams_are_independent_and_reproducible():
    a = stream(7, "x").normal(size=4)
    assert np.array_equal(a, stream(7, "x").normal(size=4))
    assert not np.allclose(a, stream(7, "y").normal(size=4))
    assert not np.allclose(a, stream(8, "x").normal(size=4))


def test_sample_delta(rng):
    for n in (2, 3, 6):
        d = sample_delta(rng, n)
        check_simplex(d)
        assert d.size == n - 1 and d.min() >= 0.05 and 2 * np.pi - d.sum() >= 0.05
    with pytest.raises(SampleRejection):
        sample_delta(rng, 200, margin=0.05)


@pytest.mark.parametrize("name", sorted(CHARTS_REGISTRY))
def test_chart_roundtrip(rng, name):
    c = Coupling(3, 0.8)
    chart = CHARTS_REGISTRY[name]
    sampler = next(e.sampler for e in MAP_REGISTRY.values() if e.source == name)
    pt = sampler(rng, c)
    v = chart.encode(pt)
    assert np.allclose(chart.encode(chart.decode(v, c)), v, atol=1e-12)
    om = chart.omega(3)
    assert np.allclose(om, -om.T) and abs(np.linalg.det(om)) > 0


def test_identity_residual_is_zero(rng):
    c = Coupling(3, 1.0)
    e = MAP_REGISTRY["identity"]
    assert symplectic_residual(e, e.sampler(rng, c), c) < 1e-12


@pytest.mark.parametrize("name", ["alpha_red_II", "Zx", "psi1_II"])
def test_symplectic_maps(name):
    rep = check_symplectic(name, Coupling(3, 0.8), samples=5)
    assert rep.passed, rep.line()


def test_non_symplectic_map_is_caught(rng):
    from dualpair.spaces import canonicalize_sutherland
    from dualpair.verify import MapEntry, sample_sutherland

    doubled = MapEntry("double_p", "P", "P", lambda pt, c: canonicalize_sutherland(pt.q, 2 * pt.p), sample_sutherland)
    c = Coupling(2, 1.0)
    assert symplectic_residual(doubled, sample_sutherland(rng, c), c) > 0.5


def test_transition_orientation(rng):
    for n in (2, 3, 4, 5):
        assert (transition_det(n, rng) > 0) == (n % 2 == 1)


def test_suite_reproducible():
    a = reports_json(suite_identities(seed=7, samples=50))
    b = reports_json(suite_identities(seed=7, samples=50))
    assert a == b
    data = json.loads(a)
    assert all(r["pass"] for r in data) and {"check_name", "max_residual", "tolerance", "seed", "samples"} <= set(data[0])


def test_run_suite_unknown():
    with pytest.raises(KeyError):
        run_suite("nonsense")


def test_orientability_suite():
    reps = run_suite("orientability")
    assert reps and all(r.passed for r in reps)
