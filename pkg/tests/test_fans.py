import random
from itertools import combinations

import pytest
import sympy

from mel.errors import FanValidation, InvalidSubdivisionRay, NoSuchCone, ParseError
from mel.fans import (
    P1,
    P112,
    P1xP1,
    P1xP1xP1,
    P2,
    P3,
    Fan,
    _circuit_faces_meet_properly,
    _planar_cones_meet_properly,
    affine_space,
    all_cones,
    completeness,
    contract_ray,
    det,
    fans_equivalent,
    hirzebruch,
    integer_kernel,
    is_complete,
    is_smooth,
    is_smooth_cone,
    nullspace,
    primitive,
    rank,
    require_valid,
    resolve_2d,
    stellar_subdivide,
    star_fan,
    validate_fan,
)
from oracles import hull_boundary_points


# -- exact linear algebra ------------------------------------------------------

def test_linear_algebra_against_sympy():
    rng = random.Random(0)
    for _ in range(200):
        n, k = rng.randint(1, 4), rng.randint(1, 5)
        cols = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(k)]
        mat = sympy.Matrix(cols).T
        assert rank(cols) == mat.rank()
        ns = nullspace(cols)
        assert len(ns) == k - mat.rank()
        for y in ns:
            assert all(sum(y[j] * cols[j][i] for j in range(k)) == 0 for i in range(n))
        if n == k:
            assert det(cols) == sympy.Matrix(cols).det()


def test_integer_kernel_is_saturated():
    rows = [[2, 4, 6]]
    ker = integer_kernel(rows, 3)
    assert len(ker) == 2
    # a saturated basis spans a lattice of index 1 inside the kernel
    assert sympy.Matrix(ker).rank() == 2
    minors = [sympy.Matrix([[r[i], r[j]] for r in ker]).det() for i, j in combinations(range(3), 2)]
    assert sympy.gcd_list([abs(m) for m in minors]) == 1


def test_primitive():
    assert primitive((4, -6)) == (2, -3)
    with pytest.raises(InvalidSubdivisionRay):
        primitive((0, 0))


# -- validation --------------------------------------------------------------

def test_validation_messages():
    bad = Fan(2, [(2, 0), (0, 1)], [{0, 1}])
    assert validate_fan(bad) == ("non-primitive ray 0 (2, 0)",)
    overlap = Fan(2, [(1, 0), (0, 1), (1, 1)], [{0, 2}, {1, 2}, {0, 1}])
    assert any("intersection not a face" in d for d in validate_fan(overlap))
    with pytest.raises(FanValidation):
        require_valid(Fan(2, [(1, 0), (0, 1)], [{0, 5}]))
    assert validate_fan(Fan(2, [(1, 0), (-1, 0)], [{0, 1}]))  # not simplicial
    assert validate_fan(Fan(2, [(1, 0), (0, 1)], [{0}]))  # unused ray


def test_standard_fans_valid():
    for f in (P1, P2, P3, P1xP1, P1xP1xP1, P112, hirzebruch(2), affine_space(2)):
        assert validate_fan(f) == ()


def test_planar_test_agrees_with_circuits():
    rng = random.Random(1)
    compared = 0
    for _ in range(3000):
        vs = [(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(5)]
        rays = sorted({primitive(v) for v in vs if any(v)})
        if len(rays) < 3:
            continue
        cones = set()
        for _ in range(3):
            c = frozenset(rng.sample(range(len(rays)), rng.choice([1, 2, 2])))
            if rank([rays[i] for i in c]) == len(c):
                cones.add(c)
        f = Fan(2, rays, cones)
        for a, b in combinations(cones, 2):
            if not (a <= b or b <= a):
                compared += 1
                assert _planar_cones_meet_properly(f, a, b) == _circuit_faces_meet_properly(f, a, b)
    assert compared > 2000


def test_three_dim_overlap_detected():
    f = Fan(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 1, -1)],
            [{0, 1, 2}, {0, 1, 3}])
    assert any("intersection not a face" in d for d in validate_fan(f))


def test_json_round_trip_and_errors():
    f = stellar_subdivide(P2, [0, 1])
    assert Fan.from_json(f.to_json()) == f
    with pytest.raises(ParseError):
        Fan.from_json("{")
    with pytest.raises(ParseError):
        Fan.from_json('{"dim": 2}')


# -- smoothness and completeness ----------------------------------------------

def test_smoothness():
    assert is_smooth(P2) and is_smooth(P1xP1xP1)
    assert not is_smooth(P112)
    assert is_smooth_cone(P112, [0, 1]) and not is_smooth_cone(P112, [0, 2])


def test_completeness():
    assert completeness(P1xP1xP1) == (True, "complete (verified)")
    assert completeness(P3) == (True, "complete (verified)")
    assert completeness(P2) == (True, "complete (exact)")
    assert not is_complete(affine_space(2))
    assert not is_complete(Fan(2, [(1, 0), (0, 1), (-1, 0)], [{0, 1}, {1, 2}]))
    assert not is_complete(Fan(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [{0, 1, 2}]))


def test_all_cones_counts():
    assert len(all_cones(P2)) == 7
    assert len(all_cones(P3)) == 15


# -- constructions -----------------------------------------------------------

def test_stellar_subdivision():
    bl = stellar_subdivide(P2, [0, 1])
    assert len(bl.max_cones) == 4 and bl.rays[-1] == (1, 1) and is_smooth(bl) and is_complete(bl)
    bl3 = stellar_subdivide(P3, [0, 1, 2])
    assert len(bl3.max_cones) == 6 and is_smooth(bl3)
    edge = stellar_subdivide(P3, [0, 1])
    assert len(edge.max_cones) == 6 and is_smooth(edge)
    custom = stellar_subdivide(Fan(2, [(1, 0), (1, 3)], [{0, 1}]), [0, 1], (1, 1))
    assert custom.rays[-1] == (1, 1)


def test_subdivision_errors():
    with pytest.raises(NoSuchCone):
        stellar_subdivide(P2, [0])
    with pytest.raises(NoSuchCone):
        stellar_subdivide(P2, [0, 7])
    with pytest.raises(InvalidSubdivisionRay):
        stellar_subdivide(P2, [0, 1], (1, -1))
    with pytest.raises(InvalidSubdivisionRay):
        stellar_subdivide(P2, [0, 1], (2, 2))


def test_star_fans():
    assert fans_equivalent(star_fan(P2, [0]), P1)
    assert fans_equivalent(star_fan(P3, [0]), P2)
    assert fans_equivalent(star_fan(P3, [0, 1]), P1)
    assert star_fan(P2, [0, 1]).dim == 0
    bl = stellar_subdivide(P2, [0, 1])
    assert fans_equivalent(star_fan(bl, [3]), P1)
    bl3 = stellar_subdivide(P3, [0, 1, 2])
    assert fans_equivalent(star_fan(bl3, [4]), P2)


def test_resolve_examples():
    res, ins = resolve_2d(P112)
    assert ins == [(0, -1)] and is_smooth(res) and is_complete(res)
    _, ins = resolve_2d(Fan(2, [(1, 0), (1, 3)], [{0, 1}]))
    assert ins == [(1, 1), (1, 2)]
    assert resolve_2d(P2) == (P2, [])


def test_resolution_matches_convex_hull_oracle():
    rng = random.Random(2)
    n = 0
    while n < 150:
        u = (rng.randint(-9, 9), rng.randint(-9, 9))
        v = (rng.randint(-9, 9), rng.randint(-9, 9))
        if not any(u) or not any(v):
            continue
        u, v = primitive(u), primitive(v)
        if u[0] * v[1] - u[1] * v[0] == 0:
            continue
        n += 1
        res, inserted = resolve_2d(Fan(2, [u, v], [{0, 1}]))
        assert sorted(inserted) == sorted(hull_boundary_points(u, v))
        assert is_smooth(res) and validate_fan(res) == ()


def test_contract_inverts_subdivide():
    rng = random.Random(4)
    for _ in range(20):
        f = hirzebruch(rng.randint(0, 3))
        cone = sorted(f.max_cones, key=sorted)[rng.randrange(len(f.max_cones))]
        g = stellar_subdivide(f, cone)
        back, center = contract_ray(g, g.rays[-1])
        assert fans_equivalent(back, f)
        assert {back.rays[i] for i in center} == {f.rays[i] for i in cone}


def test_hirzebruch():
    for a in range(4):
        f = hirzebruch(a)
        assert is_smooth(f) and is_complete(f) and len(f.max_cones) == 4
