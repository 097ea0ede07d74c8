import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatwalk import load_surface
from flatwalk.cylinders import direction_periodicity
from flatwalk.errors import SeedNotExtendable
from flatwalk.regular import (
    LARGE,
    NOT_SHORT,
    SMALL,
    _unoriented_key,
    build_regular_triangulation,
    classify_curve,
    classify_short_curves,
    ext_bracket,
    ext_estimate,
    g_function,
    lemma44_bound_check,
    measure_cylinders,
)
from flatwalk.saddle import enumerate_saddle_connections
from flatwalk.surface import geodesic_flow


def _conn(S, x, y):
    return next(c for c in enumerate_saddle_connections(S, math.hypot(x, y) + 1e-9)
                if (c.holonomy.x, c.holonomy.y) == (x, y))


def test_unit_torus_estimate_and_bracket(catalog):
    (cc,) = measure_cylinders(catalog["torus"], (1, 0))
    assert ext_estimate(catalog["torus"], cc) == pytest.approx(1.0)
    assert cc.bracket == pytest.approx((1.0, 1.0))
    assert ext_estimate(catalog["torus"], 1.0) == 1.0


def test_flowed_torus_short_curve_estimate():
    T = geodesic_flow(1, load_surface("torus"))
    (cc,) = measure_cylinders(T, (0, 1))
    assert cc.estimate == pytest.approx(math.exp(-2), rel=1e-12)
    assert cc.bracket == pytest.approx((math.exp(-2), math.exp(-2)), rel=1e-12)


def test_golden_L_wide_cylinder_bracket_within_two(catalog):
    wide = max(measure_cylinders(catalog["golden_L"], (1, 0)), key=lambda c: c.circumference)
    lo, hi = wide.bracket
    assert lo <= hi <= 2 * lo


@pytest.mark.xfail(strict=True, reason="thin golden L cylinder bracket spans a factor of about 3.6")
def test_golden_L_thin_cylinder_bracket_within_two(catalog):
    thin = min(measure_cylinders(catalog["golden_L"], (1, 0)), key=lambda c: c.circumference)
    lo, hi = thin.bracket
    assert hi <= 2 * lo


def test_saddle_bracket_has_no_upper_end(catalog):
    c = enumerate_saddle_connections(catalog["octagon"], 1)[0]
    lo, hi = ext_bracket(catalog["octagon"], c)
    assert lo == pytest.approx(c.length**2 / float(catalog["octagon"].area)) and hi == math.inf


def test_unflowed_octagon_has_no_short_curves(catalog):
    assert classify_short_curves(catalog["octagon"], 0.1) == []
    assert g_function(catalog["octagon"]) == 2.0


@pytest.mark.parametrize("t", [1.0, 2.0])
def test_flowed_torus_curve_large_for_tau_at_least_t(t):
    T = geodesic_flow(t, load_surface("torus"))
    eps0 = 1.5 * math.exp(-2 * t)
    for tau in (t, t + 1):
        reports = classify_short_curves(T, eps0, tau)
        assert [r.classification for r in reports] == [LARGE]


def test_classification_threshold():
    assert classify_curve(0.5, 0.01, 0.04, 0.0) == SMALL
    assert classify_curve(1.0, 0.01, 0.04, 0.0) == LARGE
    assert classify_curve(5.0, 0.05, 0.04, 3.0) == NOT_SHORT
    assert classify_curve(None, 0.01, 0.04, 9.0) == SMALL


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_large_set_monotone_in_tau(t1, t2):
    S = geodesic_flow(2.5, load_surface("golden_L"))
    lo, hi = sorted((t1, t2))

    def large(tau):
        return {(r.curve.direction, r.curve.index) for r in classify_short_curves(S, 0.04, tau)
                if r.classification == LARGE}

    # the threshold e^(-2 tau) falls as tau grows, so the large set can only gain members
    assert large(lo) <= large(hi)


# -- G function ------------------------------------------------------------------------------

@pytest.mark.parametrize("t", [1, 2, 3])
def test_g_on_flowed_torus(t):
    assert g_function(geodesic_flow(t, load_surface("torus")), 0.2) == pytest.approx(1 + math.exp(t), rel=1e-9)


def test_g_default_threshold_not_short_yet():
    assert g_function(geodesic_flow(1, load_surface("torus"))) == 2.0


def test_g_octagon_from_vertical_cylinders(catalog):
    S = catalog["octagon"]
    dec = direction_periodicity(S, (0, 1))
    area = float(S.area)
    # after g_3 the vertical circumferences shrink by e^-3
    ests = [(float(c.circumference) * math.exp(-3)) ** 2 / area for c in dec.cylinders]
    expected = 1 + math.prod(1 / math.sqrt(e) for e in ests)
    assert g_function(geodesic_flow(3, S)) == pytest.approx(expected, rel=1e-9)


# -- regular triangulations ------------------------------------------------------------------

def test_unflowed_torus_two_triangles(catalog):
    tri = build_regular_triangulation(catalog["torus"], 0.0)
    assert len(tri.edges) == 3 and len(tri.faces) == 2
    assert tri.excluded_cylinders == [] and tri.ok


def test_flowed_torus_degenerate():
    T = geodesic_flow(2, load_surface("torus"))
    tri = build_regular_triangulation(T, 2.0, eps0=0.1)
    assert tri.edges == [] and len(tri.excluded_cylinders) == 1 and tri.ok


def test_flowed_octagon_excludes_large_cylinders():
    T = geodesic_flow(2, load_surface("octagon"))
    tri = build_regular_triangulation(T, 2.0)
    assert tri.excluded_cylinders
    assert tri.ok
    assert all(r.ok for r in tri.records)
    assert tri.constants == {"eps0": 0.04, "tau": 2.0, "C_len": 4.0, "C_cross": 8}


@pytest.mark.parametrize("name", ["octagon", "golden_L", "double_pentagon"])
def test_unflowed_triangulation_valid(catalog, name):
    tri = build_regular_triangulation(catalog[name], 0.0)
    assert tri.conditions["validity"]
    assert len(tri.faces) == 2 * len(tri.edges) // 3


def test_seeds_preserved(catalog):
    S = catalog["torus"]
    seed = _conn(S, 1, -1)
    tri = build_regular_triangulation(S, 0.0, seeds=[seed])
    assert _unoriented_key(seed) in {_unoriented_key(c) for c in tri.edges}


def test_crossing_seeds_rejected(catalog):
    S = catalog["torus"]
    with pytest.raises(SeedNotExtendable):
        build_regular_triangulation(S, 0.0, seeds=[_conn(S, 1, 1), _conn(S, 1, -1)])


def test_lemma44_torus_diagonal(catalog):
    S = catalog["torus"]
    tri = build_regular_triangulation(S, 0.0)
    rep = lemma44_bound_check(tri, _conn(S, 1, 1), c44=1.0)
    assert sorted(n for _, n, _, _ in rep.rows) == [0, 1, 1]
    assert rep.ok


def test_lemma44_octagon_census_finite(catalog):
    S = catalog["octagon"]
    tri = build_regular_triangulation(S, 0.0)
    worst = 0.0
    for w in enumerate_saddle_connections(S, 3):
        rep = lemma44_bound_check(tri, w)
        worst = max(worst, rep.max_ratio)
        assert rep.ok
    assert math.isfinite(worst)


def test_lemma44_parallel_edge_zero(catalog):
    S = catalog["golden_L"]
    tri = build_regular_triangulation(S, 0.0)
    e = tri.edges[0]
    rep = lemma44_bound_check(tri, e)
    assert next(n for c, n, _, _ in rep.rows if _unoriented_key(c) == _unoriented_key(e)) == 0
