import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatwalk import FieldScalar, load_surface, stratum
from flatwalk.catalog import dump_surf, parse_surf
from flatwalk.errors import (
    CatalogError,
    ClosureViolation,
    GluingMismatch,
    NonPositiveDeterminant,
    UnknownSurface,
)
from flatwalk.field import Vec, field_sqrt, parse_scalar
from flatwalk.surface import (
    apply_matrix,
    delaunay_retriangulate,
    find_isomorphism,
    flip_edge,
    gauss_bonnet_holds,
    geodesic_flow,
    is_delaunay,
    is_isomorphic,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
scalars = st.builds(lambda a, b: FieldScalar(a, b, 5), rationals, rationals)


@given(scalars, scalars, scalars)
def test_field_ring_laws(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x - x == 0


@given(scalars, scalars)
def test_field_division_inverts_multiplication(x, y):
    if y:
        assert (x / y) * y == x


@given(scalars)
def test_field_sign_matches_float(x):
    f = float(x)
    if abs(f) > 1e-9:
        assert x.sign() == (1 if f > 0 else -1)
    assert (x.sign() == 0) == (not x)


@given(scalars)
def test_field_sqrt_of_square(x):
    r = field_sqrt(x * x, 5)
    assert r is not None and r == abs(x)


@given(scalars)
def test_scalar_text_round_trip(x):
    assert parse_scalar(str(x)) == x


def test_golden_ratio_identity():
    phi = FieldScalar(Fraction(1, 2), Fraction(1, 2), 5)
    assert phi * phi == phi + 1
    assert (phi - 1) * phi == 1


# -- catalog and stratum oracles ------------------------------------------------------------

EXPECTED = {
    "torus": (1, (0,), 2, 1),
    "octagon": (2, (2,), 4, 2 * math.sqrt(2)),  # circumradius 1
    "golden_L": (2, (2,), 4, math.sqrt(5)),
    "double_pentagon": (2, (2,), 4, None),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_stratum_matches_oracle(catalog, name):
    g, orders, h, area = EXPECTED[name]
    s = stratum(catalog[name])
    assert (s.genus, s.zero_orders, s.rel_homology_dim) == (g, orders, h)
    assert gauss_bonnet_holds(catalog[name])
    if area is not None:
        assert float(catalog[name].area) == pytest.approx(area, rel=1e-12)


def test_golden_L_area_is_exact(catalog):
    phi = FieldScalar(Fraction(1, 2), Fraction(1, 2), 5)
    # unit square plus two arms of area phi - 1
    assert catalog["golden_L"].area == 1 + 2 * (phi - 1)


@pytest.mark.parametrize("name", ["torus", "octagon", "golden_L", "double_pentagon"])
def test_catalog_round_trip(catalog, name):
    S = catalog[name]
    again = parse_surf(dump_surf(S))
    assert again.hol == S.hol and again.glue == S.glue and again.triangles == S.triangles


def test_cone_angle_sum(catalog):
    for S in catalog.values():
        # total angle is pi per triangle
        assert 2 * sum(p.turns for p in S.cone_points) == len(S.triangles)


def test_bad_catalog_text():
    with pytest.raises(CatalogError):
        parse_surf("triangle 0: 0 1 2\n")
    with pytest.raises(CatalogError):
        parse_surf("discriminant 4\n")
    with pytest.raises(CatalogError, match="unknown record"):
        parse_surf("discriminant 0\nbogus 1 2\n")


def test_unknown_surface():
    with pytest.raises(UnknownSurface):
        load_surface("no_such_surface")


def test_open_triangle_rejected():
    text = ("discriminant 0\ntriangle 0: 0 1 2\ntriangle 1: 3 4 5\n"
            "edge 0: 1/1 0/1 0/1 0/1\nedge 1: 0/1 0/1 1/1 0/1\nedge 2: -1/1 0/1 -2/1 0/1\n"
            "edge 3: -1/1 0/1 0/1 0/1\nedge 4: 0/1 0/1 -1/1 0/1\nedge 5: 1/1 0/1 2/1 0/1\n"
            "glue 0 3\nglue 1 4\nglue 2 5\n")
    with pytest.raises((ClosureViolation, CatalogError)):
        parse_surf(text)


def test_gluing_mismatch_rejected():
    text = ("discriminant 0\ntriangle 0: 0 1 2\ntriangle 1: 3 4 5\n"
            "edge 0: 1/1 0/1 0/1 0/1\nedge 1: -1/1 0/1 1/1 0/1\nedge 2: 0/1 0/1 -1/1 0/1\n"
            "edge 3: -1/1 0/1 0/1 0/1\nedge 4: 1/1 0/1 -1/1 0/1\nedge 5: 0/1 0/1 1/1 0/1\n"
            "glue 0 4\nglue 1 3\nglue 2 5\n")
    with pytest.raises((GluingMismatch, CatalogError)):
        parse_surf(text)


def test_negative_determinant_rejected(catalog):
    with pytest.raises(NonPositiveDeterminant):
        apply_matrix(((1, 0), (0, -1)), catalog["torus"])


# -- linear action and Delaunay ----------------------------------------------------------------

sl2_int = st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)).filter(
    lambda t: t[0] != 0).map(lambda t: ((t[0], t[1]), (t[2], Fraction(1 + t[1] * t[2], t[0]))))


@given(sl2_int)
def test_sl2_action_preserves_area_and_stratum(A):
    S = load_surface("golden_L")
    T = apply_matrix(A, S)
    assert T.area == S.area
    assert stratum(T) == stratum(S)


@given(st.floats(-2.5, 2.5))
def test_flow_is_delaunay_and_area_preserving(t):
    S = load_surface("octagon")
    T = geodesic_flow(t, S)
    assert is_delaunay(T)
    assert float(T.area) == pytest.approx(float(S.area), rel=1e-9)


def test_flip_twice_restores_triangulation(catalog):
    S = catalog["octagon"]
    for l in S.edge_reps():
        try:
            T = flip_edge(flip_edge(S, l), l)
        except Exception:
            continue  # non-convex quadrilateral
        assert is_isomorphic(S, T)


def test_delaunay_retriangulation_is_isomorphic(catalog):
    S = catalog["golden_L"]
    D = delaunay_retriangulate(apply_matrix(((1, 3), (0, 1)), S))
    assert is_delaunay(D)
    # the shear by 3 is not in the Veech group of the golden L
    assert not is_isomorphic(D, delaunay_retriangulate(S))
    U = delaunay_retriangulate(apply_matrix(((1, 0), (0, 1)), S))
    assert find_isomorphism(U, S) is not None


def test_torus_affine_images_isomorphic(catalog):
    S = catalog["torus"]
    for A in (((1, 1), (0, 1)), ((2, 1), (1, 1)), ((0, -1), (1, 0))):
        assert is_isomorphic(delaunay_retriangulate(apply_matrix(A, S)), S)


def test_vec_arithmetic():
    v = Vec(FieldScalar(1), FieldScalar(2))
    assert v + (-v) == Vec(FieldScalar(0), FieldScalar(0))
    assert v.scale(FieldScalar(3)) == Vec(FieldScalar(3), FieldScalar(6))
