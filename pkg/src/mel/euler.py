"""Degree-level Euler classes: strata sums on good closures, the pro-Euler
class of stratified varieties, compactly supported Euler characteristics
and the identities relating them.

Every class is pushed forward to the base point, so values are integers
(topological), polynomials in q (point count) or elements of GW(k)
(quadratic).  For smooth proper strata the Euler degree is evaluated as
the measure of the stratum's motive (Gauss-Bonnet for smooth proper
varieties); strata without a motive must carry a direct seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .closures import BlowupSquareData, GoodClosure, StratumData, closure_from_json
from .errors import CrossCheckMismatch, MeasureMismatch, MissingSeed, NotProper, ParseError, Unsupported
from .motive import (
    DEFAULT_TAG,
    Measure,
    MotiveClass,
    SeedTable,
    apply_measure,
    format_class,
    parse_class,
)


@dataclass(frozen=True, eq=False)
class EulerDegree:
    value: object
    measure: Measure

    def _check(self, other: EulerDegree):
        if not isinstance(other, EulerDegree):
            return NotImplemented
        if other.measure != self.measure:
            raise MeasureMismatch(f"{self.measure} vs {other.measure}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return EulerDegree(self.value + other.value, self.measure)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return EulerDegree(self.value - other.value, self.measure)

    def __neg__(self):
        return EulerDegree(-self.value, self.measure)

    def __mul__(self, k: int):
        return EulerDegree(self.value * k, self.measure)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, EulerDegree):
            return NotImplemented
        return self.measure == other.measure and self.value == other.value

    __hash__ = None

    def __str__(self):
        return self.measure.format_value(self.value)

    def __repr__(self):
        return f"EulerDegree({self}, {self.measure})"


def _zero(m: Measure) -> EulerDegree:
    return EulerDegree(m.zero(), m)


def stratum_degree(data: StratumData, m: Measure, seeds: SeedTable) -> EulerDegree:
    """Euler degree of one smooth proper stratum."""
    if data.motive is not None:
        try:
            return EulerDegree(apply_measure(data.motive, m, seeds), m)
        except MissingSeed:
            if m.id not in data.seeds:
                raise
    if m.id in data.seeds:
        return EulerDegree(m.parse_value(data.seeds[m.id]), m)
    raise MissingSeed("stratum" if data.cone is None else f"stratum {sorted(data.cone)}", m.id)


def strata_class(gc: GoodClosure, m: Measure, seeds: SeedTable | None = None) -> EulerDegree:
    """sum over I of (-1)^|I| deg(D_I); empty strata contribute nothing."""
    seeds = seeds if seeds is not None else SeedTable()
    total = _zero(m)
    for subset, data in gc.nonempty_strata():
        d = stratum_degree(data, m, seeds)
        total = total - d if len(subset) % 2 else total + d
    return total


# -- blow-up identities -----------------------------------------------------

@dataclass(frozen=True)
class BlowupReport:
    base: EulerDegree
    center: EulerDegree
    total: EulerDegree
    exceptional: EulerDegree
    holds: bool

    def __bool__(self):
        return self.holds

    def __str__(self):
        return (f"chi(X)={self.base} chi(C)={self.center} chi(Bl)={self.total} "
                f"chi(E)={self.exceptional} {'OK' if self.holds else 'FAIL'}")


def check_blowup_additivity(sq: BlowupSquareData, m: Measure,
                            seeds: SeedTable | None = None) -> BlowupReport:
    """chi(X) - chi(C) == chi(Bl_C X) - chi(E) for a blow-up square."""
    seeds = seeds if seeds is not None else SeedTable()
    vals = [EulerDegree(apply_measure(c, m, seeds), m)
            for c in (sq.base_class, sq.center_class, sq.total_class, sq.exceptional_class)]
    x, c, xt, e = vals
    return BlowupReport(x, c, xt, e, x - c == xt - e)


def trivial_blowup_report(x: MotiveClass, c: MotiveClass, m: Measure,
                          seeds: SeedTable | None = None) -> BlowupReport:
    """The degenerate square X~ = X, E = C."""
    seeds = seeds if seeds is not None else SeedTable()
    dx = EulerDegree(apply_measure(x, m, seeds), m)
    dc = EulerDegree(apply_measure(c, m, seeds), m)
    return BlowupReport(dx, dc, dx, dc, dx - dc == dx - dc)


@dataclass(frozen=True)
class IdentityReport:
    lhs: EulerDegree
    rhs: EulerDegree
    holds: bool
    label: str = ""

    def __bool__(self):
        return self.holds

    def __str__(self):
        return f"{self.label}lhs={self.lhs} rhs={self.rhs} {'OK' if self.holds else 'FAIL'}"


def check_good_local_data(sq: BlowupSquareData, m: Measure,
                          seeds: SeedTable | None = None) -> IdentityReport:
    """c_U = pi_* c_{V-E} + w_* c_Z at degree level (c_Z = 0 when Z is empty)."""
    lhs = strata_class(sq.base, m, seeds)
    rhs = strata_class(sq.total, m, seeds)
    if sq.z_closure is not None:
        rhs = rhs + strata_class(sq.z_closure, m, seeds)
    return IdentityReport(lhs, rhs, lhs == rhs, "good local data: ")


# -- singular varieties -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class StratifiedVariety:
    """A variety given by smooth strata U_i, each with a chosen good closure.

    ``weights`` are the multiplicities n_i of a constructible function
    sum n_i 1_{U_i}; they default to 1.
    """

    name: str
    pieces: tuple[GoodClosure, ...]
    weights: tuple[int, ...] | None = None
    total_class: MotiveClass | None = None
    proper: bool = True

    def __post_init__(self):
        if not self.pieces:
            raise ParseError(f"variety {self.name!r} has no pieces")
        if self.weights is not None and len(self.weights) != len(self.pieces):
            raise ParseError(f"variety {self.name!r}: {len(self.weights)} weights for "
                             f"{len(self.pieces)} pieces")

    def weight(self, i: int) -> int:
        return 1 if self.weights is None else self.weights[i]

    def named_atoms(self) -> set[str]:
        out = set()
        for gc in self.pieces:
            for _, data in gc.nonempty_strata():
                if data.motive is not None:
                    out |= data.motive.named_atoms()
        if self.total_class is not None:
            out |= self.total_class.named_atoms()
        return out

    def to_json(self) -> dict:
        out = {"name": self.name, "pieces": [gc.to_json() for gc in self.pieces],
               "proper": self.proper}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        if self.total_class is not None:
            out["total_class"] = format_class(self.total_class)
        return out

    @classmethod
    def from_json(cls, data) -> StratifiedVariety:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"variety JSON line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
        try:
            pieces = tuple(closure_from_json(p) for p in data["pieces"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"variety JSON needs a list of pieces: {exc}") from exc
        weights = data.get("weights")
        total = data.get("total_class")
        return cls(
            name=data.get("name", ""),
            pieces=pieces,
            weights=tuple(int(w) for w in weights) if weights is not None else None,
            total_class=parse_class(total) if total is not None else None,
            proper=bool(data.get("proper", True)),
        )


def disjoint_union(x: StratifiedVariety, y: StratifiedVariety, name: str | None = None) -> StratifiedVariety:
    weights = None
    if x.weights is not None or y.weights is not None:
        weights = tuple(x.weight(i) for i in range(len(x.pieces))) + \
            tuple(y.weight(i) for i in range(len(y.pieces)))
    total = None
    if x.total_class is not None and y.total_class is not None:
        total = x.total_class + y.total_class
    return StratifiedVariety(name or f"{x.name} + {y.name}", x.pieces + y.pieces, weights,
                             total, x.proper and y.proper)


def pro_euler_degree(x: StratifiedVariety, m: Measure, seeds: SeedTable | None = None) -> EulerDegree:
    """sum_i n_i * c_{U_i}, each piece pushed forward to the point."""
    total = _zero(m)
    for i, gc in enumerate(x.pieces):
        total = total + strata_class(gc, m, seeds) * x.weight(i)
    return total


def strata_motive(x: StratifiedVariety) -> MotiveClass | None:
    """sum_i n_i [U_i] in K_0(Var) via [U_i] = sum_I (-1)^|I| [D_I]; None if a motive is missing."""
    total = MotiveClass()
    for i, gc in enumerate(x.pieces):
        cls = gc.open_class()
        if cls is None:
            return None
        total = total + cls * x.weight(i)
    return total


def chi_c(x: StratifiedVariety, m: Measure, seeds: SeedTable | None = None) -> EulerDegree:
    """Compactly supported Euler characteristic as the measure of the class in K_0(Var).

    When both the strata motive and ``total_class`` are available they are
    evaluated separately and must agree.
    """
    routes = []
    via_strata = strata_motive(x)
    if via_strata is not None:
        routes.append(EulerDegree(apply_measure(via_strata, m, seeds), m))
    if x.total_class is not None:
        routes.append(EulerDegree(apply_measure(x.total_class, m, seeds), m))
    if not routes:
        raise Unsupported(f"{x.name}: no motive route (strata lack motives and no total_class)")
    if len(routes) == 2 and routes[0] != routes[1]:
        raise CrossCheckMismatch(routes[0], routes[1])
    return routes[0]


@dataclass(frozen=True)
class GaussBonnetReport:
    name: str
    lhs: EulerDegree
    rhs: EulerDegree
    equal: bool
    measure: Measure
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self):
        return self.equal

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": str(self.lhs), "rhs": str(self.rhs),
                "equal": self.equal, "measure": str(self.measure), "notes": list(self.notes)}

    def line(self) -> str:
        return f"lhs={self.lhs} rhs={self.rhs} {'OK' if self.equal else 'FAIL'}"

    def table(self) -> str:
        rows = [("variety", self.name), ("measure", str(self.measure)),
                ("chi_c", str(self.lhs)), ("pro-Euler degree", str(self.rhs)),
                ("equal", "yes" if self.equal else "NO")]
        rows += [("note", n) for n in self.notes]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def gauss_bonnet_check(x: StratifiedVariety, m: Measure,
                       seeds: SeedTable | None = None) -> GaussBonnetReport:
    """chi_c(X) against the degree of the pro-Euler class, for proper X."""
    if not x.proper:
        raise NotProper(f"{x.name} is not flagged proper")
    seeds = seeds if seeds is not None else SeedTable()
    lhs = chi_c(x, m, seeds)
    rhs = pro_euler_degree(x, m, seeds)
    notes = tuple(f"[{atom}] under {mid}: {DEFAULT_TAG}" for atom, mid in sorted(seeds.defaults_used)
                  if atom in x.named_atoms())
    return GaussBonnetReport(x.name, lhs, rhs, lhs == rhs, m, notes)
