"""Grothendieck-Witt rings GW(k) for k = Q, R and F_p (p odd).

Elements are virtual diagonal forms: finite integer combinations of the
symbols <a>, with every a reduced to a canonical square-class
representative.  Equality is semantic (isometry of the positive and
negative parts), decided by rank/signature/discriminant/Hasse invariants.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping

from sympy import factorint, isprime

from .errors import (
    FieldMismatch,
    InvalidFormEntry,
    InvalidPlace,
    ParseError,
    UnsupportedField,
    VirtualFormNotClassifiable,
)

INF = "inf"


def legendre_symbol(a: int, p: int) -> int:
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@dataclass(frozen=True)
class FieldDescriptor:
    """One of the supported base fields: ``Q``, ``R`` or ``F_p`` with p odd."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Q", "R", "Fp"):
            raise UnsupportedField(f"unknown field kind {self.kind!r}")
        if self.kind == "Fp":
            if self.p is None or not isprime(self.p):
                raise UnsupportedField(f"F_p needs a prime p, got {self.p!r}")
            if self.p == 2:
                raise UnsupportedField("characteristic 2 is not supported")
        elif self.p is not None:
            raise UnsupportedField(f"field {self.kind} takes no prime")

    def __str__(self):
        return f"F{self.p}" if self.kind == "Fp" else self.kind

    @classmethod
    def parse(cls, text: str) -> FieldDescriptor:
        t = text.strip()
        if t in ("Q", "QQ"):
            return QQ
        if t in ("R", "RR"):
            return RR
        m = re.fullmatch(r"(?:F|Fp|GF)\(?(\d+)\)?", t)
        if m:
            return GF(int(m.group(1)))
        raise UnsupportedField(f"cannot parse field {text!r} (use Q, R or F<p>)")


QQ = FieldDescriptor("Q")
RR = FieldDescriptor("R")


def GF(p: int) -> FieldDescriptor:
    return FieldDescriptor("Fp", p)


# -- square classes ---------------------------------------------------------

@lru_cache(maxsize=4096)
def _squarefree(n: int) -> int:
    sign = -1 if n < 0 else 1
    out = 1
    for prime, e in factorint(abs(n)).items():
        if e % 2:
            out *= prime
    return sign * out


@lru_cache(maxsize=None)
def non_residue(p: int) -> int:
    """Smallest quadratic non-residue mod p; the fixed representative."""
    for a in range(2, p):
        if legendre_symbol(a, p) == -1:
            return a
    raise UnsupportedField(f"no non-residue mod {p}")


def _to_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise InvalidFormEntry(f"not a field element: {x!r}")
    try:
        return Fraction(x)
    except (TypeError, ValueError) as exc:
        raise InvalidFormEntry(f"not a field element: {x!r}") from exc


def square_class(x, fld: FieldDescriptor) -> int:
    """Canonical representative of the square class of the nonzero ``x``."""
    q = _to_fraction(x)
    if fld.kind == "Fp":
        p = fld.p
        if q.denominator % p == 0:
            raise InvalidFormEntry(f"{x} is not defined in F_{p}")
        r = q.numerator * pow(q.denominator, -1, p) % p
        if r == 0:
            raise InvalidFormEntry(f"zero entry {x} in F_{p}")
        return 1 if legendre_symbol(r, p) == 1 else non_residue(p)
    if q == 0:
        raise InvalidFormEntry("zero entry in a diagonal form")
    if fld.kind == "R":
        return 1 if q > 0 else -1
    return _squarefree(q.numerator * q.denominator)


def _mul_classes(a: int, b: int, fld: FieldDescriptor) -> int:
    if fld.kind == "Q":
        g = math.gcd(a, b)
        return (a * b) // (g * g)
    return square_class(a * b, fld)


# -- ring elements ----------------------------------------------------------

class GWElement:
    """A virtual quadratic form sum m_a <a> over a fixed field.

    ``==`` is equality in GW(k), not syntactic equality of the
    coefficient maps; use :meth:`same_presentation` for the latter.
    """

    __slots__ = ("field", "_coeffs")

    def __init__(self, fld: FieldDescriptor, coeffs: Mapping | None = None):
        acc: dict[int, int] = {}
        for key, mult in (coeffs or {}).items():
            if int(mult) != mult:
                raise InvalidFormEntry(f"multiplicity {mult!r} is not an integer")
            k = square_class(key, fld)
            acc[k] = acc.get(k, 0) + int(mult)
        self.field = fld
        self._coeffs = {k: v for k, v in sorted(acc.items()) if v}

    @classmethod
    def _raw(cls, fld, coeffs):
        obj = cls.__new__(cls)
        obj.field = fld
        obj._coeffs = {k: v for k, v in sorted(coeffs.items()) if v}
        return obj

    @classmethod
    def zero(cls, fld):
        return cls._raw(fld, {})

    @classmethod
    def one(cls, fld):
        return cls._raw(fld, {1: 1})

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._coeffs)

    @property
    def rank(self) -> int:
        return sum(self._coeffs.values())

    def is_honest(self) -> bool:
        return all(v > 0 for v in self._coeffs.values())

    def positive_part(self) -> GWElement:
        return GWElement._raw(self.field, {k: v for k, v in self._coeffs.items() if v > 0})

    def negative_part(self) -> GWElement:
        """The honest form N with self = P - N."""
        return GWElement._raw(self.field, {k: -v for k, v in self._coeffs.items() if v < 0})

    @property
    def signature(self) -> int | None:
        if self.field.kind == "Fp":
            return None
        return sum(v if k > 0 else -v for k, v in self._coeffs.items())

    @property
    def disc(self) -> int:
        """Product of the entries up to squares (a group homomorphism on GW)."""
        d = 1
        for k, v in self._coeffs.items():
            if v % 2:
                d = _mul_classes(d, k, self.field)
        return d

    def same_presentation(self, other: GWElement) -> bool:
        return self.field == other.field and self._coeffs == other._coeffs

    def _coerce(self, other):
        if isinstance(other, GWElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return GWElement._raw(self.field, {1: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._coeffs)
        for k, v in other._coeffs.items():
            acc[k] = acc.get(k, 0) + v
        return GWElement._raw(self.field, acc)

    __radd__ = __add__

    def __neg__(self):
        return GWElement._raw(self.field, {k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[int, int] = {}
        for a, m in self._coeffs.items():
            for b, n in other._coeffs.items():
                k = _mul_classes(a, b, self.field)
                acc[k] = acc.get(k, 0) + m * n
        return GWElement._raw(self.field, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined in GW")
        out = GWElement.one(self.field)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            other = self._coerce(other)
        if not isinstance(other, GWElement):
            return NotImplemented
        if other.field != self.field:
            return False
        return gw_equals(self, other)

    def __hash__(self):
        # rank, signature and discriminant are GW-invariants, so this is
        # consistent with the semantic __eq__
        return hash((self.field, self.rank, self.signature, self.disc))

    def __str__(self):
        return format_gw(self)

    def __repr__(self):
        return f"GWElement({self.field}, {format_gw(self)!r})"


def form_from_diagonal(entries: Iterable, fld: FieldDescriptor) -> GWElement:
    """The diagonal form <a_1, ..., a_n>."""
    acc: dict[int, int] = {}
    for a in entries:
        k = square_class(a, fld)
        acc[k] = acc.get(k, 0) + 1
    return GWElement._raw(fld, acc)


def hyperbolic(fld: FieldDescriptor) -> GWElement:
    return form_from_diagonal([1, -1], fld)


def gw_add(a: GWElement, b: GWElement) -> GWElement:
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    return a + b


def gw_mul(a: GWElement, b: GWElement) -> GWElement:
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    return a * b


# -- local invariants -------------------------------------------------------

def _normalize_place(place):
    if place in (INF, "oo", "∞") or (isinstance(place, float) and math.isinf(place) and place > 0):
        return INF
    if isinstance(place, bool) or not isinstance(place, int) or not isprime(place):
        raise InvalidPlace(f"{place!r} is neither a prime nor infinity")
    return place


def _split(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def hilbert_symbol(a, b, place) -> int:
    """Hilbert symbol (a, b)_v of nonzero rationals at a prime or at ``INF``."""
    place = _normalize_place(place)
    fa, fb = _to_fraction(a), _to_fraction(b)
    if fa == 0 or fb == 0:
        raise InvalidFormEntry("Hilbert symbol of zero")
    # a and a*d^2 have the same symbol; clear denominators that way
    x = fa.numerator * fa.denominator
    y = fb.numerator * fb.denominator
    if place == INF:
        return -1 if (x < 0 and y < 0) else 1
    p = place
    alpha, u = _split(x, p)
    beta, v = _split(y, p)
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2
        omega = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    lu = legendre_symbol(u % p, p) ** beta
    lv = legendre_symbol(v % p, p) ** alpha
    return sign * lu * lv


def relevant_places(entries: Iterable[int]) -> list:
    """Places where a diagonal form over Q can have nontrivial Hasse invariant."""
    primes = {2}
    for a in entries:
        primes.update(factorint(abs(a)).keys())
    return sorted(primes) + [INF]


def hasse_invariant(x: GWElement, place) -> int:
    """s_v(q) = prod_{i<j} (a_i, a_j)_v, expanded over multiplicities."""
    place = _normalize_place(place)
    items = list(x.coeffs.items())
    s = 1
    for (a, m), (b, n) in combinations(items, 2):
        if (m * n) % 2 and hilbert_symbol(a, b, place) == -1:
            s = -s
    for a, m in items:
        if (m * (m - 1) // 2) % 2 and hilbert_symbol(a, a, place) == -1:
            s = -s
    return s


@dataclass(frozen=True)
class FormInvariants:
    rank: int
    disc: int
    signatures: dict = field(default_factory=dict)
    hasse: dict = field(default_factory=dict)

    def hasse_at(self, place) -> int:
        return self.hasse.get(_normalize_place(place), 1)


def invariants(x: GWElement) -> FormInvariants:
    if not x.is_honest():
        raise VirtualFormNotClassifiable(
            f"{x} has negative multiplicities; split it into positive and negative parts")
    fld = x.field
    if fld.kind == "Fp":
        return FormInvariants(x.rank, x.disc)
    sig = {INF: x.signature}
    if fld.kind == "R":
        return FormInvariants(x.rank, x.disc, sig, {INF: hasse_invariant(x, INF)})
    hasse = {v: hasse_invariant(x, v) for v in relevant_places(x.coeffs)}
    return FormInvariants(x.rank, x.disc, sig, hasse)


def _isometric(p: GWElement, n: GWElement) -> bool:
    if p.rank != n.rank:
        return False
    if p.rank == 0:
        return True
    fld = p.field
    if fld.kind == "R":
        return p.signature == n.signature
    if fld.kind == "Fp":
        return p.disc == n.disc
    if p.signature != n.signature or p.disc != n.disc:
        return False
    places = relevant_places(list(p.coeffs) + list(n.coeffs))
    return all(hasse_invariant(p, v) == hasse_invariant(n, v) for v in places)


def gw_equals(a: GWElement, b: GWElement) -> bool:
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    d = a - b
    if d.rank != 0:
        return False
    return _isometric(d.positive_part(), d.negative_part())


def _is_local_square(d: int, p: int) -> bool:
    v, u = _split(d, p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return legendre_symbol(u % p, p) == 1


def is_isotropic(x: GWElement) -> bool:
    if not x.is_honest():
        raise VirtualFormNotClassifiable(f"{x} is virtual")
    n = x.rank
    if n < 1:
        raise InvalidFormEntry("isotropy of the zero form")
    fld = x.field
    if n == 1:
        return False
    if fld.kind == "R":
        return len(x.coeffs) == 2
    minus_disc = _mul_classes(x.disc, square_class(-1, fld), fld)
    if fld.kind == "Fp":
        return n >= 3 or minus_disc == 1
    # Q: Hasse-Minkowski, local criteria at every place
    if n == 2:
        return minus_disc == 1
    if len({k > 0 for k in x.coeffs}) < 2:
        return False
    if n >= 5:
        return True
    d = x.disc
    for v in relevant_places(x.coeffs):
        if v == INF:
            continue
        eps = hasse_invariant(x, v)
        if n == 3 and hilbert_symbol(-1, -d, v) != eps:
            return False
        if n == 4 and _is_local_square(d, v) and eps != hilbert_symbol(-1, -1, v):
            return False
    return True


# -- text syntax ------------------------------------------------------------

def _fmt_entry(a: int) -> str:
    return str(a)


def format_gw(x: GWElement) -> str:
    """Print as ``k*h + <a,...> - <b,...>`` with hyperbolic pairs extracted."""
    fld = x.field
    rest = dict(x.coeffs)
    hcount = 0
    for a in list(rest):
        if a not in rest:
            continue
        partner = square_class(-a, fld)
        if partner == a:
            k = int(math.copysign(abs(rest[a]) // 2, rest[a]))
            rest[a] -= 2 * k
        elif partner in rest and (rest[a] > 0) == (rest[partner] > 0):
            k = int(math.copysign(min(abs(rest[a]), abs(rest[partner])), rest[a]))
            rest[a] -= k
            rest[partner] -= k
        else:
            continue
        hcount += k
        for key in (a, partner):
            if rest.get(key) == 0:
                del rest[key]
    # h - <a> = <-a>: keep the h count and the leftover entries of one sign
    while hcount:
        s = 1 if hcount > 0 else -1
        a = next((b for b in sorted(rest, key=_entry_order) if rest[b] * s < 0), None)
        if a is None:
            break
        partner = square_class(-a, fld)
        hcount -= s
        rest[a] += s
        rest[partner] = rest.get(partner, 0) + s
        for key in (a, partner):
            if rest.get(key) == 0:
                del rest[key]
    pos = [a for a in sorted(rest, key=_entry_order) for _ in range(rest[a]) if rest[a] > 0]
    neg = [a for a in sorted(rest, key=_entry_order) for _ in range(-rest[a]) if rest[a] < 0]
    parts: list[tuple[str, str]] = []
    if hcount:
        sign = "-" if hcount < 0 else "+"
        mag = abs(hcount)
        parts.append((sign, "h" if mag == 1 else f"{mag}*h"))
    if pos:
        parts.append(("+", "<" + ",".join(_fmt_entry(a) for a in pos) + ">"))
    if neg:
        parts.append(("-", "<" + ",".join(_fmt_entry(a) for a in neg) + ">"))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _entry_order(a: int):
    return (abs(a), a < 0)


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(h)|([<>,+\-*()]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def parse_gw(text: str, fld: FieldDescriptor) -> GWElement:
    """Parse expressions like ``2*h + <1,-3> - <5>`` or ``<1,2/3>*<5>``."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'} in {text!r}, got {tok!r}")
        pos += 1
        return tok

    def entry():
        neg = False
        while peek() in ("-", "+"):
            neg ^= take() == "-"
        tok = take()
        try:
            val = Fraction(tok)
        except ValueError as exc:
            raise ParseError(f"bad form entry {tok!r}") from exc
        return -val if neg else val

    def atom():
        tok = peek()
        if tok == "h":
            take()
            return hyperbolic(fld)
        if tok == "<":
            take()
            entries = [entry()]
            while peek() == ",":
                take()
                entries.append(entry())
            take(">")
            return form_from_diagonal(entries, fld)
        if tok == "(":
            take()
            val = expr()
            take(")")
            return val
        if tok is not None and tok[0].isdigit():
            take()
            if "/" in tok:
                raise ParseError(f"bare rational {tok!r} is not a ring element")
            return GWElement.one(fld) * int(tok)
        raise ParseError(f"unexpected {tok!r} in {text!r}")

    def term():
        val = atom()
        while peek() == "*" or peek() in ("h", "<", "("):
            if peek() == "*":
                take()
            val = val * atom()
        return val

    def expr():
        sign = 1
        if peek() in ("-", "+"):
            sign = -1 if take() == "-" else 1
        val = term() * sign
        while peek() in ("+", "-"):
            op = take()
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    if not tokens:
        raise ParseError("empty form expression")
    result = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input {tokens[pos:]!r} in {text!r}")
    return result
