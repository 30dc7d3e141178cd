"""The computable fragment of K_0(Var) and motivic measures on it.

A :class:`MotiveClass` is an integer combination of monomials
``L^n * [A] * [B] ...`` where ``L`` is the Lefschetz class and the
bracketed names are free atoms (classes with no known cellular
decomposition, e.g. a genus-g curve ``[Cg(g)]``).  Equality is syntactic
on this normal form, which is exact for the Z[L] part and treats named
atoms as algebraically independent.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from sympy import Poly, Symbol, sympify

from .errors import MeasureMismatch, MissingSeed, ParseError
from .gw import FieldDescriptor, GWElement, QQ, form_from_diagonal, hyperbolic, parse_gw

Q = Symbol("q")


@dataclass(frozen=True, order=True)
class Atom:
    """Monomial ``L^lpower`` times the named atoms in ``names`` (sorted)."""

    names: tuple[str, ...] = ()
    lpower: int = 0

    def __post_init__(self):
        if self.lpower < 0:
            raise ValueError("negative power of L")
        if tuple(sorted(self.names)) != self.names:
            object.__setattr__(self, "names", tuple(sorted(self.names)))

    def __mul__(self, other: Atom) -> Atom:
        return Atom(self.names + other.names, self.lpower + other.lpower)

    def __str__(self):
        parts = [f"[{n}]" for n in self.names]
        if self.lpower == 1:
            parts.append("L")
        elif self.lpower > 1:
            parts.append(f"L^{self.lpower}")
        return "*".join(parts) if parts else "1"


def LPower(n: int) -> Atom:
    return Atom((), n)


def Named(name: str) -> Atom:
    return Atom((name,), 0)


class MotiveClass:
    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[Atom, int] | None = None):
        acc: dict[Atom, int] = {}
        for atom, c in (coeffs or {}).items():
            acc[atom] = acc.get(atom, 0) + int(c)
        self._coeffs = {a: c for a, c in sorted(acc.items()) if c}

    @classmethod
    def point(cls) -> MotiveClass:
        return cls({LPower(0): 1})

    @classmethod
    def lefschetz(cls) -> MotiveClass:
        return cls({LPower(1): 1})

    @classmethod
    def named(cls, name: str) -> MotiveClass:
        return cls({Named(name): 1})

    @classmethod
    def from_poly(cls, coeffs: Iterable[int]) -> MotiveClass:
        """``from_poly([a0, a1, ...])`` is a0 + a1 L + ..."""
        return cls({LPower(i): c for i, c in enumerate(coeffs)})

    @property
    def coeffs(self) -> dict[Atom, int]:
        return dict(self._coeffs)

    def atoms(self):
        return list(self._coeffs)

    def named_atoms(self) -> set[str]:
        return {n for a in self._coeffs for n in a.names}

    def is_lpoly(self) -> bool:
        """True when the class lies in the Z[L] fragment."""
        return all(not a.names for a in self._coeffs)

    def lpoly(self) -> list[int]:
        if not self.is_lpoly():
            raise ValueError(f"{self} has named atoms")
        top = max((a.lpower for a in self._coeffs), default=-1)
        out = [0] * (top + 1)
        for a, c in self._coeffs.items():
            out[a.lpower] = c
        return out

    def _coerce(self, other):
        if isinstance(other, MotiveClass):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return MotiveClass({LPower(0): other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._coeffs)
        for a, c in other._coeffs.items():
            acc[a] = acc.get(a, 0) + c
        return MotiveClass(acc)

    __radd__ = __add__

    def __neg__(self):
        return MotiveClass({a: -c for a, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Atom, int] = {}
        for a, c in self._coeffs.items():
            for b, d in other._coeffs.items():
                ab = a * b
                acc[ab] = acc.get(ab, 0) + c * d
        return MotiveClass(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = MotiveClass.point()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(tuple(self._coeffs.items()))

    def __str__(self):
        return format_class(self)

    def __repr__(self):
        return f"MotiveClass({format_class(self)!r})"


def mc_add(a: MotiveClass, b: MotiveClass) -> MotiveClass:
    return a + b


def mc_mul(a: MotiveClass, b: MotiveClass) -> MotiveClass:
    return a * b


def mc_neg(a: MotiveClass) -> MotiveClass:
    return -a


def format_class(x: MotiveClass) -> str:
    """``1 + 2L + L^2 - [Cg(1)]``; coefficients are juxtaposed."""
    if not x._coeffs:
        return "0"
    out = ""
    for i, (atom, c) in enumerate(x._coeffs.items()):
        body = str(atom)
        mag = abs(c)
        if body == "1":
            term = str(mag)
        elif mag == 1:
            term = body
        else:
            term = f"{mag}{body}"
        if i == 0:
            out = ("-" if c < 0 else "") + term
        else:
            out += (" - " if c < 0 else " + ") + term
    return out


_MTOKEN = re.compile(r"\s*(?:(\d+)|(L)|\[([^\]]+)\]|([+\-*^()]))")


def parse_class(text: str) -> MotiveClass:
    """Parse ``1 + 2L + L^2``, ``(L-1)^2``, ``3[Cg(2)]*L`` and the like."""
    tokens: list[tuple[str, str]] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _MTOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        kind = ("int", "L", "name", "op")[m.lastindex - 1]
        tokens.append((kind, m.group(m.lastindex).strip()))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise ParseError("empty class expression")
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None)

    def take(value=None):
        nonlocal i
        tok = peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or 'token'} in {text!r}")
        i += 1
        return tok

    def primary():
        kind, val = peek()
        if kind == "int":
            take()
            return MotiveClass({LPower(0): int(val)})
        if kind == "L":
            take()
            return MotiveClass.lefschetz()
        if kind == "name":
            take()
            return MotiveClass.named(val)
        if val == "(":
            take()
            out = expr()
            take(")")
            return out
        raise ParseError(f"unexpected {val!r} in {text!r}")

    def power():
        base = primary()
        if peek()[1] == "^":
            take()
            kind, val = take()
            if kind != "int":
                raise ParseError(f"exponent must be an integer in {text!r}")
            base = base ** int(val)
        return base

    def term():
        val = power()
        while True:
            kind, tok = peek()
            if tok == "*":
                take()
                val = val * power()
            elif kind in ("int", "L", "name") or tok == "(":
                val = val * power()
            else:
                return val

    def expr():
        sign = 1
        if peek()[1] in ("+", "-"):
            sign = -1 if take()[1] == "-" else 1
        val = term() * sign
        while peek()[1] in ("+", "-"):
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    out = expr()
    if i != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return out


# -- measures ---------------------------------------------------------------

@dataclass(frozen=True)
class Measure:
    """A motivic measure: ring homomorphism from the fragment to Z, Z[q] or GW(k).

    ``id`` is the key used in seed tables: ``top``, ``count`` or ``gw``.
    """

    id: str
    target: str
    field: FieldDescriptor | None = None

    def zero(self):
        if self.target == "Integers":
            return 0
        if self.target == "IntegerPolynomialInQ":
            return Poly(0, Q, domain="ZZ")
        return GWElement.zero(self.field)

    def one(self):
        if self.target == "Integers":
            return 1
        if self.target == "IntegerPolynomialInQ":
            return Poly(1, Q, domain="ZZ")
        return GWElement.one(self.field)

    def default_lefschetz(self):
        if self.target == "Integers":
            return 1
        if self.target == "IntegerPolynomialInQ":
            return Poly(Q, Q, domain="ZZ")
        return form_from_diagonal([-1], self.field)

    def parse_value(self, raw):
        """Read a value in this measure's target from text (or pass through)."""
        if self.target == "Integers":
            if isinstance(raw, int) and not isinstance(raw, bool):
                return raw
            try:
                return int(str(raw).strip())
            except ValueError as exc:
                raise ParseError(f"bad integer value {raw!r}") from exc
        if self.target == "IntegerPolynomialInQ":
            if isinstance(raw, Poly):
                return raw
            try:
                return Poly(sympify(str(raw).replace("^", "**")), Q, domain="ZZ")
            except Exception as exc:
                raise ParseError(f"bad polynomial in q: {raw!r}") from exc
        if isinstance(raw, GWElement):
            if raw.field != self.field:
                raise MeasureMismatch(f"seed over {raw.field}, measure over {self.field}")
            return raw
        if isinstance(raw, int) and not isinstance(raw, bool):
            return GWElement.one(self.field) * raw
        return parse_gw(str(raw), self.field)

    def format_value(self, v) -> str:
        if self.target == "IntegerPolynomialInQ":
            return str(v.as_expr()).replace("**", "^")
        return str(v)

    def __str__(self):
        return f"gw[{self.field}]" if self.target == "GW" else self.id


TOPOLOGICAL = Measure("top", "Integers")
POINT_COUNT = Measure("count", "IntegerPolynomialInQ")


def quadratic(fld: FieldDescriptor = QQ) -> Measure:
    return Measure("gw", "GW", fld)


def measure_from_name(name: str, fld: FieldDescriptor | None = None) -> Measure:
    name = name.strip().lower()
    if name in ("top", "topological", "chi"):
        return TOPOLOGICAL
    if name in ("count", "points", "point-count"):
        return POINT_COUNT
    if name in ("gw", "quadratic"):
        return quadratic(fld or QQ)
    raise ParseError(f"unknown measure {name!r} (use top, count or gw)")


_GENUS = re.compile(r"Cg\((\d+)\)")
DEFAULT_TAG = "external default, configurable"


class SeedTable:
    """Values of measures on named atoms.

    The key ``"L"`` overrides the image of the Lefschetz class.  Curves
    ``Cg(g)`` fall back to topological ``2-2g`` and quadratic ``(1-g)h``
    when no explicit entry exists; such lookups are recorded in
    :attr:`defaults_used`.
    """

    def __init__(self, entries: Mapping[str, Mapping[str, object]] | None = None):
        self.entries: dict[tuple[str, str], object] = {}
        for atom, per_measure in (entries or {}).items():
            for mid, value in per_measure.items():
                self.entries[(atom, mid)] = value
        self.defaults_used: set[tuple[str, str]] = set()

    @classmethod
    def from_json(cls, text: str) -> SeedTable:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"seed table: {exc}") from exc
        if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
            raise ParseError('seed table must look like {"atom": {"measure": "value"}}')
        return cls(data)

    def to_json(self) -> dict:
        out: dict[str, dict] = {}
        for (atom, mid), v in sorted(self.entries.items()):
            out.setdefault(atom, {})[mid] = v if isinstance(v, (int, str)) else str(v)
        return out

    def with_entries(self, extra: Mapping[str, Mapping[str, object]]) -> SeedTable:
        merged = SeedTable()
        merged.entries = dict(self.entries)
        for atom, per_measure in extra.items():
            for mid, value in per_measure.items():
                merged.entries[(atom, mid)] = value
        return merged

    def lefschetz(self, m: Measure):
        if ("L", m.id) in self.entries:
            return m.parse_value(self.entries[("L", m.id)])
        return m.default_lefschetz()

    def lookup(self, name: str, m: Measure):
        if (name, m.id) in self.entries:
            return m.parse_value(self.entries[(name, m.id)])
        g = _GENUS.fullmatch(name)
        if g and m.target in ("Integers", "GW"):
            genus = int(g.group(1))
            self.defaults_used.add((name, m.id))
            if m.target == "Integers":
                return 2 - 2 * genus
            return hyperbolic(m.field) * (1 - genus)
        raise MissingSeed(name, m.id)


def _atom_value(atom: Atom, m: Measure, seeds: SeedTable, lval):
    v = m.one()
    for _ in range(atom.lpower):
        v = v * lval
    for name in atom.names:
        v = v * seeds.lookup(name, m)
    return v


def apply_measure(x: MotiveClass, m: Measure, seeds: SeedTable | None = None):
    """Evaluate the measure on ``x`` (Z-linear in the atoms, multiplicative on monomials)."""
    seeds = seeds if seeds is not None else SeedTable()
    lval = seeds.lefschetz(m)
    total = m.zero()
    for atom, c in x.coeffs.items():
        total = total + _atom_value(atom, m, seeds, lval) * c
    return total


def bittner_blowup_check(X: MotiveClass, C: MotiveClass, Xt: MotiveClass, E: MotiveClass) -> bool:
    """Blow-up relation [Bl_C X] - [E] = [X] - [C]."""
    return Xt - E == X - C


def class_of_toric(fan) -> MotiveClass:
    """Orbit decomposition: sum over cones s of (L - 1)^(n - dim s)."""
    from .fans import all_cones, require_valid

    require_valid(fan)
    torus = MotiveClass.lefschetz() - 1
    counts: dict[int, int] = {}
    for cone in all_cones(fan):
        k = fan.dim - len(cone)
        counts[k] = counts.get(k, 0) + 1
    total = MotiveClass()
    for k, c in counts.items():
        total = total + (torus ** k) * c
    return total
