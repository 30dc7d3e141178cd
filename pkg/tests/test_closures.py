import random

import pytest

from mel.closures import (
    FactorizationPath,
    Move,
    StratumData,
    blowup_closure,
    blowup_square,
    closure_from_json,
    make_good_closure,
    toric_good_closure,
    verify_closure_compatibility,
    weak_factorization_path_2d,
)
from mel.corpus import curve_closure, random_smooth_fan_2d
from mel.errors import ClosureValidation, MissingAmbient, NotAGoodClosure, Unsupported, UnsupportedClosure
from mel.euler import strata_class
from mel.fans import P1, P112, P1xP1, P2, P3, fans_equivalent, hirzebruch, stellar_subdivide
from mel.motive import MotiveClass, parse_class, quadratic

PT = MotiveClass.point()


def test_toric_closure_strata():
    gc = toric_good_closure(P2)
    assert gc.components == (0, 1, 2)
    assert len(gc.nonempty_strata()) == 7
    assert gc.ambient.motive == parse_class("1 + L + L^2")
    assert gc.stratum({0}).motive == parse_class("1 + L")
    assert gc.stratum({0, 1}).motive == PT
    assert gc.stratum({0, 1, 2}).empty
    assert gc.open_class() == parse_class("L^2 - 2L + 1")


def test_partial_boundary():
    a2 = toric_good_closure(P2, [2])
    assert a2.open_class() == parse_class("L^2")
    a1 = toric_good_closure(P1, [1])
    assert a1.open_class() == parse_class("L")
    assert toric_good_closure(P2, []).open_class() == parse_class("1 + L + L^2")


def test_toric_closure_rejects_bad_fans():
    with pytest.raises(NotAGoodClosure):
        toric_good_closure(P112)
    with pytest.raises(NotAGoodClosure):
        toric_good_closure(P2, [5])


def test_user_declared_closure_validation():
    with pytest.raises(MissingAmbient):
        make_good_closure(["p"], {("p",): StratumData(motive=PT, dim=0)}, 1)
    with pytest.raises(ClosureValidation) as err:
        make_good_closure(["p"], {(): StratumData(motive=PT, dim=1), ("q",): StratumData(motive=PT)}, 1)
    assert "unknown components" in str(err.value)
    with pytest.raises(ClosureValidation):
        make_good_closure(["p"], {(): StratumData(motive=PT, dim=1), ("p",): StratumData(motive=PT, dim=1)}, 1)
    with pytest.raises(ClosureValidation):
        make_good_closure(["a", "b"], {(): StratumData(motive=PT, dim=2), ("a", "b"): StratumData(motive=PT)}, 2)


def test_json_round_trip():
    for gc in (toric_good_closure(P1xP1, [1, 3]), curve_closure(parse_class("1 + L"), 2, "conic")):
        again = closure_from_json(gc.to_json())
        assert again.open_class() == gc.open_class()
        assert again.components == gc.components
    regenerated = closure_from_json({"components": [2], "toric_source": P2.to_json()})
    assert regenerated.open_class() == parse_class("L^2")


def test_blowup_at_boundary_corner():
    gc = toric_good_closure(P2)
    total, sq = blowup_closure(gc, [0, 1])
    assert sq.z_empty
    assert total.components == (0, 1, 2, 3)
    assert total.open_class() == gc.open_class()
    assert sq.total_class == parse_class("1 + 2L + L^2")
    assert sq.exceptional_class == parse_class("1 + L")


def test_blowup_meeting_open_part():
    gc = toric_good_closure(P2, [2])
    total, sq = blowup_closure(gc, [0, 1])
    assert not sq.z_empty
    assert sq.z_closure.open_class() == PT
    # U = (V minus E) + Z
    assert total.open_class() + sq.z_closure.open_class() == gc.open_class()


def test_blowup_needs_toric_closure():
    with pytest.raises(UnsupportedClosure):
        blowup_closure(curve_closure(parse_class("1 + L"), 1, "A1"), [0])


def test_blowup_square_classes():
    sq = blowup_square(P3, [0, 1, 2])
    assert sq.total_class == parse_class("1 + 2L + 2L^2 + L^3")
    assert sq.exceptional_class == parse_class("1 + L + L^2")
    edge = blowup_square(P3, [0, 1])
    assert edge.center_class == parse_class("1 + L")
    assert edge.exceptional_class == parse_class("1 + 2L + L^2")


def test_factorization_p2_to_p1xp1():
    path = weak_factorization_path_2d(P2, P1xP1)
    assert [m.direction for m in path.moves] == ["subdivide", "subdivide", "contract"]
    assert path.diagnostics() == []
    assert path.peak == 2
    fans = path.replay()
    assert fans_equivalent(fans[-1], P1xP1)


def test_factorization_random_pairs():
    rng = random.Random(9)
    q = quadratic()
    for _ in range(6):
        a, b = random_smooth_fan_2d(rng), random_smooth_fan_2d(rng)
        path = weak_factorization_path_2d(a, b)
        assert path.diagnostics() == []
        assert verify_closure_compatibility(path, lambda gc: strata_class(gc, q))


def test_factorization_rejects_bad_input():
    with pytest.raises(Unsupported):
        weak_factorization_path_2d(P3, P3)
    with pytest.raises(Unsupported):
        weak_factorization_path_2d(P112, P2)


def test_diagnostics_catch_broken_paths():
    bl = stellar_subdivide(P2, [0, 1])
    wrong_end = FactorizationPath(P2, hirzebruch(2), (Move("subdivide", ((1, 0), (0, 1)), (1, 1)),))
    assert "final fan differs from the endpoint" in wrong_end.diagnostics()
    unpeaked = FactorizationPath(P2, bl, (
        Move("subdivide", ((1, 0), (0, 1)), (1, 1)),
        Move("contract", ((1, 0), (0, 1)), (1, 1)),
        Move("subdivide", ((1, 0), (0, 1)), (1, 1)),
    ))
    assert any("not peaked" in d for d in unpeaked.diagnostics())
    bogus = FactorizationPath(P2, P2, (Move("contract", ((1, 0), (0, 1)), (5, 7)),))
    assert bogus.diagnostics()[0].startswith("replay failed")


def test_compatibility_detects_a_non_invariant():
    path = weak_factorization_path_2d(P2, P1xP1)
    assert not verify_closure_compatibility(path, lambda gc: len(gc.components))
