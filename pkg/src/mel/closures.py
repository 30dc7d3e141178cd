"""Good closures (smooth proper compactifications with SNC boundary),
their toric generation and blow-ups, and 2D weak-factorization paths.

Classes living on intermediate closures are tracked only through their
pushforward to the base point, i.e. as degrees in Z, Z[q] or GW(k).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import (
    ClosureValidation,
    MissingAmbient,
    NotAGoodClosure,
    ParseError,
    Unsupported,
    UnsupportedClosure,
)
from .fans import (
    Fan,
    Vector,
    all_cones,
    complete_fan_2d,
    contract_ray,
    fans_equivalent,
    is_complete,
    is_smooth,
    require_valid,
    resolve_2d,
    star_fan,
    star_fan_with_map,
    stellar_subdivide,
    validate_fan,
)
from .motive import MotiveClass, class_of_toric, format_class, parse_class

TORUS = "torus"


@dataclass(frozen=True)
class StratumData:
    """What is known about one stratum D_I: its motive and/or direct seeds per measure."""

    motive: MotiveClass | None = None
    seeds: Mapping[str, object] = field(default_factory=dict)
    origin: str = "UserDeclared"
    cone: frozenset | None = None
    dim: int | None = None

    @property
    def empty(self) -> bool:
        return self.origin == "Empty"


EMPTY = StratumData(origin="Empty")


@dataclass(frozen=True, eq=False)
class GoodClosure:
    """U inside a smooth proper closure with boundary components D_i.

    ``strata`` maps frozensets I of component ids to the data of D_I;
    subsets not present are empty strata.
    """

    components: tuple
    strata: Mapping[frozenset, StratumData]
    ambient_dim: int
    toric_source: Fan | None = None
    name: str = ""

    def stratum(self, subset: Iterable) -> StratumData:
        return self.strata.get(frozenset(subset), EMPTY)

    def nonempty_strata(self) -> list[tuple[frozenset, StratumData]]:
        items = [(k, v) for k, v in self.strata.items() if not v.empty]
        return sorted(items, key=lambda kv: (len(kv[0]), sorted(map(str, kv[0]))))

    @property
    def ambient(self) -> StratumData:
        return self.stratum(())

    def open_class(self) -> MotiveClass | None:
        """[U] = sum_I (-1)^|I| [D_I], when every stratum carries a motive."""
        total = MotiveClass()
        for subset, data in self.nonempty_strata():
            if data.motive is None:
                return None
            total = total + data.motive * (-1) ** len(subset)
        return total

    def to_json(self) -> dict:
        strata = []
        for subset, data in self.nonempty_strata():
            entry: dict = {"subset": sorted(subset, key=str)}
            if data.motive is not None:
                entry["motive"] = format_class(data.motive)
            if data.seeds:
                entry["seeds"] = {k: v if isinstance(v, (int, str)) else str(v)
                                  for k, v in sorted(data.seeds.items())}
            if data.dim is not None:
                entry["dim"] = data.dim
            strata.append(entry)
        out = {
            "components": list(self.components),
            "strata": strata,
            "ambient_dim": self.ambient_dim,
            "toric_source": self.toric_source.to_json() if self.toric_source else None,
        }
        if self.name:
            out["name"] = self.name
        return out


def validate_closure(gc: GoodClosure) -> list[str]:
    diags: list[str] = []
    comps = set(gc.components)
    if len(comps) != len(gc.components):
        diags.append("duplicate component ids")
    for subset, data in gc.strata.items():
        label = sorted(subset, key=str)
        if not subset <= comps:
            diags.append(f"stratum {label} uses unknown components")
        if data.empty:
            continue
        expected = gc.ambient_dim - len(subset)
        if data.dim is not None and data.dim != expected:
            diags.append(f"stratum {label} declared of dimension {data.dim}, "
                         f"but codimension {len(subset)} in dimension {gc.ambient_dim} gives {expected}")
        if expected < 0:
            diags.append(f"stratum {label} would have negative dimension")
        for i in subset:
            if gc.stratum(subset - {i}).empty:
                diags.append(f"stratum {label} is nonempty but its face {sorted(subset - {i}, key=str)} is empty")
    return diags


def make_good_closure(components: Iterable, strata: Mapping, ambient_dim: int,
                      toric_source: Fan | None = None, name: str = "") -> GoodClosure:
    """Build and validate a user-declared closure record."""
    norm: dict[frozenset, StratumData] = {}
    for subset, data in strata.items():
        norm[frozenset(subset)] = data
    if frozenset() not in norm or norm[frozenset()].empty:
        raise MissingAmbient("the stratum for the empty subset (the closure itself) is required")
    gc = GoodClosure(tuple(components), norm, int(ambient_dim), toric_source, name)
    diags = validate_closure(gc)
    if diags:
        raise ClosureValidation(diags)
    return gc


def toric_good_closure(f: Fan, open_spec=TORUS, name: str = "") -> GoodClosure:
    """Closure X_f of U = X_f minus the chosen toric boundary divisors.

    ``open_spec`` is ``"torus"`` (remove every divisor, U the dense torus)
    or an iterable of ray indices whose divisors form the boundary.
    """
    require_valid(f)
    if not is_smooth(f) or not is_complete(f):
        raise NotAGoodClosure("a toric good closure needs a smooth complete fan")
    boundary = frozenset(range(len(f.rays))) if open_spec == TORUS else frozenset(open_spec)
    if not all(0 <= i < len(f.rays) for i in boundary):
        raise NotAGoodClosure(f"boundary {sorted(boundary)} references missing rays")
    strata = {}
    for cone in all_cones(f):
        if cone <= boundary:
            strata[cone] = StratumData(
                motive=class_of_toric(star_fan(f, cone)),
                origin="ToricCone",
                cone=cone,
                dim=f.dim - len(cone),
            )
    return GoodClosure(tuple(sorted(boundary)), strata, f.dim, f, name)


def closure_from_json(data) -> GoodClosure:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"closure JSON line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError("closure JSON must be an object")
    src = data.get("toric_source")
    fan = Fan.from_json(src) if src else None
    name = data.get("name", "")
    if fan is not None and not data.get("strata"):
        comps = data.get("components", TORUS)
        return toric_good_closure(fan, comps if comps != TORUS else TORUS, name)
    strata = {}
    try:
        for entry in data["strata"]:
            motive = entry.get("motive")
            strata[frozenset(entry["subset"])] = StratumData(
                motive=parse_class(motive) if motive is not None else None,
                seeds=dict(entry.get("seeds", {})),
                origin="UserDeclared",
                dim=entry.get("dim"),
            )
        return make_good_closure(data["components"], strata, data["ambient_dim"], fan, name)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"closure JSON is missing a field: {exc}") from exc


# -- blow-ups ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlowupSquareData:
    """Blow-up of a toric closure along the orbit closure W = V(center).

    ``z_closure`` is the good closure of Z = W & U inside W, or None when
    W lies in the boundary (Z empty).
    """

    base: GoodClosure
    center: frozenset
    total: GoodClosure
    exceptional: int
    z_closure: GoodClosure | None = None

    @property
    def z_empty(self) -> bool:
        return self.z_closure is None

    @property
    def base_class(self) -> MotiveClass:
        return class_of_toric(self.base.toric_source)

    @property
    def center_class(self) -> MotiveClass:
        return class_of_toric(star_fan(self.base.toric_source, self.center))

    @property
    def total_class(self) -> MotiveClass:
        return class_of_toric(self.total.toric_source)

    @property
    def exceptional_class(self) -> MotiveClass:
        return class_of_toric(star_fan(self.total.toric_source, {self.exceptional}))


def blowup_closure(gc: GoodClosure, center: Iterable[int]) -> tuple[GoodClosure, BlowupSquareData]:
    if gc.toric_source is None:
        raise UnsupportedClosure("blow-ups are implemented for toric closures only")
    f = gc.toric_source
    c = frozenset(center)
    g = stellar_subdivide(f, c)
    e = len(f.rays)
    boundary = set(gc.components)
    total = toric_good_closure(g, sorted(boundary | {e}))
    z_closure = None
    if not c & boundary:
        w, remap = star_fan_with_map(f, c)
        z_closure = toric_good_closure(w, sorted({remap[b] for b in boundary if b in remap}))
    return total, BlowupSquareData(gc, c, total, e, z_closure)


def blowup_square(f: Fan, center: Iterable[int]) -> BlowupSquareData:
    """Blow-up square of a smooth complete fan at a torus-invariant center."""
    return blowup_closure(toric_good_closure(f), center)[1]


# -- weak factorization in dimension 2 --------------------------------------

@dataclass(frozen=True)
class Move:
    """One elementary step; ``center`` is a 2-cone of the smaller fan, as ray vectors."""

    direction: str
    center: tuple[Vector, ...]
    new_ray: Vector

    def to_json(self) -> dict:
        return {"direction": self.direction, "center": [list(v) for v in self.center],
                "new_ray": list(self.new_ray)}


@dataclass(frozen=True)
class FactorizationPath:
    start: Fan
    end: Fan
    moves: tuple[Move, ...]

    @property
    def peak(self) -> int:
        """Number of leading subdivisions (the index r where the path turns)."""
        return sum(1 for m in self.moves if m.direction == "subdivide")

    def replay(self) -> list[Fan]:
        """Every intermediate fan, starting at ``start``; checks each step."""
        fans = [self.start]
        current = self.start
        for mv in self.moves:
            if mv.direction == "subdivide":
                current = stellar_subdivide(current, current.cone_from_vectors(mv.center), mv.new_ray)
            elif mv.direction == "contract":
                current, c = contract_ray(current, mv.new_ray)
                if set(current.cone_rays(c)) != set(mv.center):
                    raise ValueError(f"contraction of {mv.new_ray} lands on a different center")
            else:
                raise ValueError(f"unknown move direction {mv.direction!r}")
            fans.append(current)
        return fans

    def diagnostics(self) -> list[str]:
        try:
            fans = self.replay()
        except Exception as exc:  # replay failures are reported, not raised
            return [f"replay failed: {exc}"]
        out = []
        for i, fan in enumerate(fans):
            if validate_fan(fan):
                out.append(f"step {i}: invalid fan")
            elif not is_smooth(fan):
                out.append(f"step {i}: not smooth")
            elif not is_complete(fan):
                out.append(f"step {i}: not complete")
        if not fans_equivalent(fans[-1], self.end):
            out.append("final fan differs from the endpoint")
        seen_contract = False
        for mv in self.moves:
            seen_contract |= mv.direction == "contract"
            if seen_contract and mv.direction == "subdivide":
                out.append("subdivision after a contraction: path is not peaked")
                break
        return out

    def to_json(self) -> dict:
        return {"start": self.start.to_json(), "end": self.end.to_json(),
                "peak": self.peak, "moves": [m.to_json() for m in self.moves]}


def _sum_subdivisions(f: Fan, target: set[Vector]) -> list[Move]:
    """Blow-ups at fixed points taking the smooth fan ``f`` to the refinement with rays ``target``.

    Any smooth subdivision of a smooth 2-cone <u, v> contains u + v, so
    repeatedly inserting the sum of the cone hosting a missing ray works.
    """
    moves = []
    current = f
    while set(current.rays) != target:
        for cone in current.max_cones:
            u, v = current.cone_rays(cone)
            inside = [w for w in target if w not in current.rays and _in_open_cone(u, v, w)]
            if inside:
                s = (u[0] + v[0], u[1] + v[1])
                if s not in target:
                    raise AssertionError(f"refinement misses {s}; target is not a smooth subdivision")
                moves.append(Move("subdivide", (u, v), s))
                current = stellar_subdivide(current, cone, s)
                break
        else:
            raise AssertionError("target rays are not a refinement of the fan")
    return moves


def _in_open_cone(u: Vector, v: Vector, w: Vector) -> bool:
    d = u[0] * v[1] - u[1] * v[0]
    a = w[0] * v[1] - w[1] * v[0]
    b = u[0] * w[1] - u[1] * w[0]
    return (a > 0 and b > 0) if d > 0 else (a < 0 and b < 0)


def weak_factorization_path_2d(a: Fan, b: Fan) -> FactorizationPath:
    """Peaked path of fixed-point blow-ups then blow-downs from ``a`` to ``b``.

    The peak is the Hirzebruch-Jung resolution of the fan on the union of
    both ray sets, which refines ``a`` and ``b`` simultaneously.
    """
    for f in (a, b):
        if f.dim != 2:
            raise Unsupported("weak factorization is implemented in dimension 2 only")
        require_valid(f)
        if not is_smooth(f) or not is_complete(f):
            raise Unsupported("weak factorization endpoints must be smooth and complete")
    union = complete_fan_2d(set(a.rays) | set(b.rays))
    peak, _ = resolve_2d(union)
    target = set(peak.rays)
    up = _sum_subdivisions(a, target)
    down = [Move("contract", m.center, m.new_ray) for m in reversed(_sum_subdivisions(b, target))]
    return FactorizationPath(a, b, tuple(up + down))


def verify_closure_compatibility(path: FactorizationPath,
                                 class_fn: Callable[[GoodClosure], object]) -> bool:
    """Degree-level compatibility: class_fn is constant along every move of the path."""
    values = [class_fn(toric_good_closure(f)) for f in path.replay()]
    return all(v == values[0] for v in values[1:])
