import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import Poly

from mel.errors import MeasureMismatch, MissingSeed, ParseError
from mel.fans import P1, P112, P1xP1, P2, P3, hirzebruch, stellar_subdivide
from mel.gw import GF, QQ, form_from_diagonal, hyperbolic, parse_gw
from mel.motive import (
    DEFAULT_TAG,
    POINT_COUNT,
    Q,
    TOPOLOGICAL,
    Atom,
    MotiveClass,
    SeedTable,
    apply_measure,
    bittner_blowup_check,
    class_of_toric,
    format_class,
    measure_from_name,
    parse_class,
    quadratic,
)
from oracles import count_blowup_p2, count_p1xp1, count_pn

L = MotiveClass.lefschetz()
A, B = MotiveClass.named("A"), MotiveClass.named("B")

atoms = st.sampled_from([MotiveClass.point(), L, L * L, A, B, A * L, A * B])
classes = st.lists(st.tuples(st.integers(-3, 3), atoms), max_size=5).map(
    lambda terms: sum((atom * c for c, atom in terms), MotiveClass()))

SEEDS = SeedTable({"A": {"top": 3, "count": "q^2 - 1", "gw": "<2> + h"},
                   "B": {"top": -1, "count": "2*q", "gw": "<-3>"}})


def test_atoms_sorted_and_multiplied():
    assert Atom(("B", "A"), 1) == Atom(("A", "B"), 1)
    assert Atom(("A",), 1) * Atom(("B",), 2) == Atom(("A", "B"), 3)


@given(classes, classes, classes)
def test_ring_laws(a, b, c):
    assert a + b == b + a and a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == MotiveClass()
    assert a * 1 == a


@given(classes)
def test_print_parse_round_trip(x):
    text = format_class(x)
    assert parse_class(text) == x
    assert format_class(parse_class(text)) == text


def test_printing():
    assert format_class(1 + 2 * L + L * L) == "1 + 2L + L^2"
    assert format_class(MotiveClass()) == "0"
    assert format_class(parse_class("3[Cg(2)]*L - [A]*[B]")) == "-[A]*[B] + 3[Cg(2)]*L"


def test_parse_syntax():
    assert parse_class("(1 + L)^2") == 1 + 2 * L + L * L
    assert parse_class("2L") == 2 * L
    assert parse_class("[A](L - 1)") == A * L - A
    for bad in ["1 +", "[A", "L^", "(1"]:
        with pytest.raises(ParseError):
            parse_class(bad)


def test_lpoly():
    x = parse_class("1 + 2L + L^2")
    assert x.is_lpoly() and x.lpoly() == [1, 2, 1]
    assert not (x + A).is_lpoly()


@pytest.mark.parametrize("m", [TOPOLOGICAL, POINT_COUNT, quadratic(QQ), quadratic(GF(5))])
@given(a=classes, b=classes)
def test_measures_are_ring_homomorphisms(m, a, b):
    fa, fb = apply_measure(a, m, SEEDS), apply_measure(b, m, SEEDS)
    assert apply_measure(a + b, m, SEEDS) == fa + fb
    assert apply_measure(a * b, m, SEEDS) == fa * fb
    assert apply_measure(MotiveClass.point(), m, SEEDS) == m.one()


def test_measure_values():
    p2 = parse_class("1 + L + L^2")
    assert apply_measure(p2, TOPOLOGICAL) == 3
    assert apply_measure(p2, POINT_COUNT) == Poly(Q**2 + Q + 1, Q, domain="ZZ")
    assert str(apply_measure(p2, quadratic())) == "h + <1>"
    assert apply_measure(L, quadratic()) == form_from_diagonal([-1], QQ)


def test_lefschetz_override():
    seeds = SeedTable({"L": {"gw": "<1>"}})
    assert apply_measure(parse_class("1 + L"), quadratic(), seeds) == form_from_diagonal([1, 1], QQ)


def test_curve_defaults_recorded():
    seeds = SeedTable()
    assert apply_measure(parse_class("[Cg(2)]"), TOPOLOGICAL, seeds) == -2
    assert apply_measure(parse_class("[Cg(2)]"), quadratic(), seeds) == hyperbolic(QQ) * -1
    assert seeds.defaults_used == {("Cg(2)", "top"), ("Cg(2)", "gw")}
    with pytest.raises(MissingSeed):
        apply_measure(parse_class("[Cg(2)]"), POINT_COUNT, seeds)
    assert DEFAULT_TAG == "external default, configurable"


def test_missing_and_malformed_seeds():
    with pytest.raises(MissingSeed):
        apply_measure(A, TOPOLOGICAL)
    with pytest.raises(ParseError):
        SeedTable.from_json("[1, 2]")
    with pytest.raises(ParseError):
        SeedTable.from_json("{")
    assert SeedTable.from_json('{"A": {"top": 3}}').to_json() == {"A": {"top": 3}}


def test_seed_field_mismatch():
    seeds = SeedTable({"A": {"gw": form_from_diagonal([1], GF(5))}})
    with pytest.raises(MeasureMismatch):
        apply_measure(A, quadratic(QQ), seeds)


def test_measure_names():
    assert measure_from_name("top") == TOPOLOGICAL
    assert measure_from_name("gw", GF(7)) == quadratic(GF(7))
    with pytest.raises(ParseError):
        measure_from_name("hodge")


# -- toric classes ------------------------------------------------------------

@pytest.mark.parametrize("fan,text", [
    (P1, "1 + L"), (P2, "1 + L + L^2"), (P1xP1, "1 + 2L + L^2"), (P112, "1 + L + L^2"),
    (P3, "1 + L + L^2 + L^3"), (stellar_subdivide(P2, [0, 1]), "1 + 2L + L^2"),
    (stellar_subdivide(P3, [0, 1, 2]), "1 + 2L + 2L^2 + L^3"), (hirzebruch(3), "1 + 2L + L^2"),
])
def test_class_of_toric(fan, text):
    assert class_of_toric(fan) == parse_class(text)


@pytest.mark.parametrize("q", [3, 5])
def test_point_counts_match_enumeration(q):
    cases = [(P1, count_pn(1, q)), (P2, count_pn(2, q)), (P1xP1, count_p1xp1(q)),
             (stellar_subdivide(P2, [0, 1]), count_blowup_p2(q))]
    for fan, expected in cases:
        assert apply_measure(class_of_toric(fan), POINT_COUNT).eval(q) == expected


def test_bittner_relation_example():
    x, c = parse_class("1 + L + L^2"), MotiveClass.point()
    assert bittner_blowup_check(x, c, parse_class("1 + 2L + L^2"), parse_class("1 + L"))
    assert not bittner_blowup_check(x, c, parse_class("1 + 2L + L^2"), MotiveClass.point())


def test_gw_seed_parsing():
    m = quadratic(QQ)
    assert m.parse_value("h + <2>") == parse_gw("h + <2>", QQ)
    assert m.parse_value(2) == form_from_diagonal([1, 1], QQ)
