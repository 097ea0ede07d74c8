import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatwalk.errors import NotRealizable, StabilizerCheckFailed, UnknownSurface
from flatwalk.field import FieldScalar, mat_mul
from flatwalk.geodesics import (
    GROUPS,
    CoreCache,
    axis_endpoints,
    class_key,
    count_N_theta,
    cusp_height,
    enumerate_closed_geodesics,
    excursion_fraction,
    huber_ratio,
    inverse_word,
    is_primitive,
    sum_diag,
    systole_along_geodesic,
    validate_stabilizer,
    veech_group,
    word_matrix,
)
from flatwalk.catalog import load_surface
from oracles import modular_class_counts, sampled_excursion


@pytest.fixture(scope="module")
def torus_records():
    return enumerate_closed_geodesics(veech_group("torus"), 7.0)


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_generators_stabilize_surface(name):
    assert veech_group(name).name == name


@pytest.mark.parametrize("M, name", [
    (((1, 1), (0, 1)), "octagon"),
    (((2, 1), (1, 1)), "golden_L"),
    (((1, FieldScalar(1, 1, 2)), (0, 1)), "octagon"),
])
def test_non_elements_rejected(M, name):
    M = tuple(tuple(FieldScalar.lift(x) if not isinstance(x, FieldScalar) else x for x in row) for row in M)
    with pytest.raises(StabilizerCheckFailed):
        validate_stabilizer(M, load_surface(name))


def test_unknown_group():
    with pytest.raises(UnknownSurface):
        veech_group("klein_quartic")


@pytest.mark.parametrize("R", [2.0, 5.0, 9.0])
def test_torus_counts_match_quadratic_forms(R):
    assert len(enumerate_closed_geodesics(veech_group("torus"), R)) == modular_class_counts(R)


def test_enumeration_independent_of_letter_order():
    G = veech_group("goldenL")
    a = enumerate_closed_geodesics(G, 6.0)
    order = list(range(1, G.hecke_q))
    random.Random(7).shuffle(order)
    b = enumerate_closed_geodesics(G, 6.0, order=order)
    assert [(r.word, r.length) for r in a] == [(r.word, r.length) for r in b]


def test_records_consistent(torus_records):
    G = veech_group("torus")
    for r in torus_records:
        M = word_matrix(G, r.word)
        assert sum_diag(M) == r.trace
        assert r.length == pytest.approx(2 * math.acosh(float(r.trace) / 2), abs=1e-12)
        assert is_primitive(r.word)
        assert class_key(r.word, G.hecke_q) == r.word


@given(st.lists(st.integers(1, 4), min_size=1, max_size=6))
def test_inverse_word_gives_inverse_trace(word):
    G = veech_group("goldenL")
    q = G.hecke_q
    M = word_matrix(G, tuple(word))
    Minv = word_matrix(G, inverse_word(tuple(word), q))
    # conjugacy classes of g and g^-1 share the trace up to sign
    assert abs(float(sum_diag(M))) == pytest.approx(abs(float(sum_diag(Minv))), rel=1e-12)


def test_excursion_matches_sampling_torus(torus_records):
    G = veech_group("torus")
    for r in torus_records:
        u, v = axis_endpoints(r.matrix)
        want = sampled_excursion(u, v, r.length, 1.0, 1.0, n=2000)
        assert excursion_fraction(r, G, y0=1.0) == pytest.approx(want, abs=5e-3)


def test_excursion_matches_sampling_golden_L():
    G = veech_group("goldenL")
    for r in enumerate_closed_geodesics(G, 5.0):
        u, v = axis_endpoints(r.matrix)
        want = sampled_excursion(u, v, r.length, float(G.hecke_lambda), 1.5, n=2000)
        assert excursion_fraction(r, G, y0=1.5) == pytest.approx(want, abs=5e-3)


def test_excursion_grows_with_parabolic_power():
    # R^n L spends more and more of its length high in the cusp (n = 1, trace 3, sits
    # entirely above y = 1 and is excluded)
    G = veech_group("torus")
    fr = []
    for n in range(2, 9):
        word = (1,) * n + (2,)
        fr.append(excursion_fraction(word_matrix(G, word), G, y0=1.0))
    assert all(a < b for a, b in zip(fr, fr[1:]))


def test_cusp_height_calibration():
    assert cusp_height(0.04) == 25.0
    assert cusp_height(2.0) == 1.0


def test_counting_rows(torus_records):
    G = veech_group("torus")
    rows = count_N_theta(G, 7.0, [0, 0.5, 0.9], records=torus_records)
    assert [r.n_theta for r in rows] == sorted((r.n_theta for r in rows), reverse=True)
    assert rows[0].n_theta == len(torus_records)
    assert rows[0].bound == pytest.approx(1.35)
    assert 0.4 <= huber_ratio(torus_records, 7.0) <= 2.5


def test_j_count_structural(torus_records):
    assert all(r.j_count == (1 if r.excursion_fraction > 0 else 0) for r in torus_records)


def test_systole_bound_on_short_torus_geodesics(torus_records):
    S = load_surface("torus")
    cache = CoreCache(S)
    for r in torus_records[:8]:
        m, bound, ok = systole_along_geodesic(r, S, samples=16, cache=cache)
        assert ok and m > bound
        assert bound == pytest.approx(1e-3 * math.exp(-2 * r.length))


def test_systole_not_realizable_for_octagon():
    G = veech_group("octagon")
    rec = enumerate_closed_geodesics(veech_group("torus"), 3.0)[0]
    fake = type(rec)(rec.word, rec.trace, rec.length, 0.0, 0, rec.matrix, G.name)
    with pytest.raises(NotRealizable):
        systole_along_geodesic(fake)


def test_octagon_not_enumerable():
    with pytest.raises(NotRealizable):
        enumerate_closed_geodesics(veech_group("octagon"), 3.0)


def test_double_pentagon_rotation_order_ten():
    R = veech_group("double_pentagon").generators["R"]
    P = R
    for _ in range(4):
        P = mat_mul(P, R)
    # R^5 = -I
    assert P == ((FieldScalar(-1), FieldScalar(0)), (FieldScalar(0), FieldScalar(-1)))
