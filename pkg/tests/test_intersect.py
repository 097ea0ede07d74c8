import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatwalk import FieldScalar, load_surface
from flatwalk.cylinders import direction_periodicity, saddle_directions
from flatwalk.errors import ParallelDirection, ParallelOverlap
from flatwalk.intersect import (
    DecompositionCache,
    algebraic_intersection,
    core_path,
    dehn_twist,
    derive_relations,
    eq31_intersection,
    first_traversal,
    geometric_intersection,
    intersection_matrix,
    saddle_path,
    signed_intersection,
    theorem45_residuals,
    twist,
    twist_of_traversals,
)
from flatwalk.linalg import int_det
from flatwalk.saddle import enumerate_saddle_connections

coprime = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(
    lambda v: v != (0, 0) and math.gcd(*v) == 1 and (v[0] > 0 or (v[0] == 0 and v[1] > 0)))


@given(coprime, coprime)
def test_torus_closed_curves_meet_det_times(a, b):
    if a == b:
        return
    S = load_surface("torus")
    pa = core_path(direction_periodicity(S, a), 0)
    pb = core_path(direction_periodicity(S, b), 0)
    assert geometric_intersection(pa, pb) == abs(a[0] * b[1] - a[1] * b[0])


def test_torus_pairing(catalog):
    S = catalog["torus"]
    assert algebraic_intersection((1, 0), (0, 1), S) == 1
    assert algebraic_intersection((0, 1), (1, 0), S) == -1
    assert algebraic_intersection((1, 1), (1, 1), S) == 0


@pytest.mark.parametrize("name", ["octagon", "golden_L", "double_pentagon"])
def test_pairing_unimodular(catalog, name):
    S = catalog[name]
    E = [tuple(1 if i == k else 0 for i in range(4)) for k in range(4)]
    M = intersection_matrix(S, E)
    assert abs(int_det(M)) == 1
    assert all(M[i][j] == -M[j][i] for i in range(4) for j in range(4))


vec4 = st.tuples(*[st.integers(-3, 3)] * 4)


@given(vec4, vec4, vec4)
def test_pairing_bilinear_antisymmetric(a, b, c):
    S = load_surface("golden_L")
    ab = algebraic_intersection(a, b, S)
    assert ab == -algebraic_intersection(b, a, S)
    s = tuple(x + y for x, y in zip(a, c))
    assert algebraic_intersection(s, b, S) == ab + algebraic_intersection(c, b, S)


def test_eq31_golden_L_shortest_against_horizontal(catalog):
    S = catalog["golden_L"]
    dec = direction_periodicity(S, (1, 0))
    cores = [core_path(dec, i) for i in range(len(dec.cylinders))]
    conns = [c for c in enumerate_saddle_connections(S, 3) if c.holonomy.y.sign() != 0][:10]
    assert len(conns) == 10
    for c in conns:
        p = saddle_path(S, c)
        assert eq31_intersection(c, dec) == [geometric_intersection(p, q) for q in cores]


def test_eq31_octagon_diagonal(catalog):
    S = catalog["octagon"]
    for v in saddle_directions(S, 2.5):
        dec = direction_periodicity(S, v)
        cores = [core_path(dec, i) for i in range(len(dec.cylinders))]
        for c in enumerate_saddle_connections(S, 2.5):
            if dec.to_rotated(c.holonomy).y.sign() == 0:
                continue
            p = saddle_path(S, c)
            assert eq31_intersection(c, dec) == [geometric_intersection(p, q) for q in cores]


def test_parallel_errors(catalog):
    S = catalog["golden_L"]
    dec = direction_periodicity(S, (1, 0))
    h = next(c for c in enumerate_saddle_connections(S, 2) if c.holonomy.y.sign() == 0)
    with pytest.raises(ParallelDirection):
        eq31_intersection(h, dec)
    p = saddle_path(S, h)
    with pytest.raises(ParallelOverlap):
        geometric_intersection(p, p)


@pytest.mark.parametrize("name", ["golden_L", "octagon"])
def test_relation_transfer_exact(catalog, name):
    S = catalog[name]
    conns = [c for c in enumerate_saddle_connections(S, 2)
             if c.holonomy.x.sign() > 0 or (c.holonomy.x.sign() == 0 and c.holonomy.y.sign() > 0)]
    rels = derive_relations(conns)
    assert rels
    tests = enumerate_saddle_connections(S, 3)
    cache = DecompositionCache(S)
    for rel in rels:
        assert rel.holds(conns)
        assert all(r == 0 for r in theorem45_residuals(rel, conns, tests, cache))
    rel = rels[0]
    j0, c0 = rel.coefficients[0]
    bumped = ((j0, c0 + FieldScalar(1) / 7),) + tuple(rel.coefficients[1:])
    assert any(r != 0 for r in theorem45_residuals(rel, conns, tests, cache, bumped))


def test_signed_intersection_linear_on_torus(catalog):
    S = catalog["torus"]
    cache = DecompositionCache(S)
    conns = {(int(c.holonomy.x), int(c.holonomy.y)): c for c in enumerate_saddle_connections(S, 3)}
    T = conns[(1, 2)]
    a, b, ab = conns[(1, 0)], conns[(0, 1)], conns[(1, 1)]
    assert signed_intersection(ab, T, cache) == signed_intersection(a, T, cache) + signed_intersection(b, T, cache)


@given(st.integers(-4, 4))
def test_dehn_twist_shifts_twist_by_count(k):
    S = load_surface("golden_L")
    dec = direction_periodicity(S, (1, 0))
    c = next(c for c in enumerate_saddle_connections(S, 2) if c.holonomy.y.sign() != 0
             and any(t.cylinder == 0 for t in _walk(dec, c)))
    t = first_traversal(dec, 0, c)
    assert twist_of_traversals(dec.cylinders[0].circ, t, dehn_twist(dec, 0, t, k)) == k
    assert twist(dec, 0, c, c) == 0


def _walk(dec, c):
    from flatwalk.intersect import atlas_walk

    return list(atlas_walk(dec, c))
