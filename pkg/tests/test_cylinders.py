import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatwalk import FieldScalar, load_surface
from flatwalk.cylinders import (
    basis_from_decomposition,
    circumference_ratios,
    cylinder_diagram,
    direction_periodicity,
    finiteness_census,
    height_relation,
    phi_round_trip,
    saddle_directions,
)
from flatwalk.errors import NonFieldDirection
from flatwalk.surface import apply_matrix

PHI = FieldScalar(Fraction(1, 2), Fraction(1, 2), 5)

coprime = st.tuples(st.integers(-6, 6), st.integers(-6, 6)).filter(
    lambda v: v != (0, 0) and math.gcd(*v) == 1)


@given(coprime)
def test_torus_single_cylinder_oracle(v):
    p, q = v
    dec = direction_periodicity(load_surface("torus"), v)
    assert len(dec.cylinders) == 1
    c = dec.cylinders[0]
    n2 = p * p + q * q
    assert float(c.circumference) == pytest.approx(math.sqrt(n2), rel=1e-12)
    assert c.modulus == FieldScalar(Fraction(1, n2))
    assert c.area == 1


def test_golden_L_horizontal_moduli(catalog):
    dec = direction_periodicity(catalog["golden_L"], (1, 0))
    assert len(dec.cylinders) == 2
    assert all(c.modulus == 1 / PHI for c in dec.cylinders)
    assert sorted(c.circumference for c in dec.cylinders) == [1, PHI]


def test_octagon_horizontal_moduli_equal(catalog):
    dec = direction_periodicity(catalog["octagon"], (1, 0))
    mods = {c.modulus for c in dec.cylinders}
    assert len(dec.cylinders) == 2 and len(mods) == 1


@pytest.mark.parametrize("name", ["golden_L", "octagon", "double_pentagon"])
def test_area_exact_in_saddle_directions(catalog, name):
    S = catalog[name]
    for v in saddle_directions(S, 4):
        assert direction_periodicity(S, v).area == S.area


def test_non_field_direction(catalog):
    with pytest.raises(NonFieldDirection):
        direction_periodicity(catalog["golden_L"], (1.3, 0.7))
    with pytest.raises(NonFieldDirection):
        direction_periodicity(catalog["golden_L"], (FieldScalar(0, 1, 2), FieldScalar(1)))


@pytest.mark.parametrize("name", ["golden_L", "octagon"])
def test_basis_from_decomposition_unimodular(catalog, name):
    S = catalog[name]
    for v in saddle_directions(S, 3):
        basis = basis_from_decomposition(direction_periodicity(S, v))
        assert len(basis) == 4


def test_diagram_invariant_under_veech_element(catalog):
    S = catalog["golden_L"]
    T = apply_matrix(((1, PHI), (0, 1)), S)
    d1 = cylinder_diagram(direction_periodicity(S, (1, 1))).canonical()
    d2 = cylinder_diagram(direction_periodicity(T, (1 + PHI, 1))).canonical()
    assert d1 == d2


@pytest.mark.parametrize("name", ["torus", "golden_L", "octagon", "double_pentagon"])
def test_phi_round_trip_short_directions(catalog, name):
    S = catalog[name]
    for v in saddle_directions(S, 3):
        assert phi_round_trip(direction_periodicity(S, v))


def test_census_stabilizes_early(catalog):
    lo, hi = finiteness_census(catalog["golden_L"], 4, cutoffs=[2, 4])
    assert hi.n_directions > lo.n_directions
    assert hi.ratios == lo.ratios and hi.diagrams == lo.diagrams
    assert hi.height_relations == lo.height_relations


def test_ratio_and_height_sets(catalog):
    dec = direction_periodicity(catalog["golden_L"], (0, 1))
    assert circumference_ratios(dec) == {PHI, 1 / PHI}
    assert height_relation(dec) == (1, 1)
