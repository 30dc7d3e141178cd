"""Simplicial rational fans: validation, smoothness, completeness, stellar
subdivision, star fans and Hirzebruch-Jung resolution of surfaces.

All arithmetic is exact (integers and ``Fraction``).  Cones are referred
to by frozensets of ray indices.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache, reduce
from itertools import combinations
from typing import Iterable, Sequence

from .errors import FanValidation, InvalidSubdivisionRay, NoSuchCone, ParseError, Unsupported

Vector = tuple[int, ...]


# -- exact linear algebra ---------------------------------------------------

def _normalize_row(row: list[int]) -> list[int]:
    g = reduce(math.gcd, row, 0)
    return [x // g for x in row] if g > 1 else row


def _rref(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free reduced echelon form: each pivot column is zero off its pivot row."""
    m = [list(row) for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
        m[r] = _normalize_row(m[r])
        a = m[r][c]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                b = m[i][c]
                m[i] = _normalize_row([a * x - b * y for x, y in zip(m[i], m[r])])
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(vectors: Sequence[Sequence[int]]) -> int:
    if not vectors:
        return 0
    return len(_rref(vectors)[1])


def nullspace(columns: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Basis of {y : sum_j y_j columns[j] = 0}."""
    if not columns:
        return []
    n = len(columns[0])
    matrix = [[columns[j][i] for j in range(len(columns))] for i in range(n)]
    m, pivots = _rref(matrix)
    free = [j for j in range(len(columns)) if j not in pivots]
    basis = []
    for fj in free:
        y = [Fraction(0)] * len(columns)
        y[fj] = Fraction(1)
        for row, pc in zip(m, pivots):
            y[pc] = Fraction(-row[fj], row[pc])
        basis.append(y)
    return basis


def cone_coordinates(generators: Sequence[Vector], x: Sequence[int]) -> list[Fraction] | None:
    """Coefficients of ``x`` in the linearly independent ``generators``, or None."""
    cols = list(generators) + [tuple(-v for v in x)]
    ns = nullspace(cols)
    for y in ns:
        if y[-1] != 0:
            return [c / y[-1] for c in y[:-1]]
    return None


def det(matrix: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    m = [list(map(int, row)) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Saturated Z-basis of {x in Z^n : row . x = 0 for every row}.

    Column-reduces the matrix with unimodular operations tracked in U;
    the columns of U beyond the pivots span the kernel lattice.
    """
    a = [list(map(int, r)) for r in rows]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(j, k, q):  # col_j -= q * col_k
        for mat in (a, u):
            for row in mat:
                row[j] -= q * row[k]

    def col_swap(j, k):
        for mat in (a, u):
            for row in mat:
                row[j], row[k] = row[k], row[j]

    c = 0
    for r in range(len(a)):
        if c == n:
            break
        while True:
            nz = [j for j in range(c, n) if a[r][j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(a[r][j]))
            col_swap(c, j0)
            done = True
            for j in range(c + 1, n):
                if a[r][j]:
                    col_op(j, c, a[r][j] // a[r][c])
                    if a[r][j]:
                        done = False
            if done:
                c += 1
                break
    return [[u[i][j] for i in range(n)] for j in range(c, n)]


def primitive(v: Iterable[int]) -> Vector:
    v = tuple(int(x) for x in v)
    g = reduce(math.gcd, v, 0)
    if g == 0:
        raise InvalidSubdivisionRay("zero vector has no primitive generator")
    return tuple(x // g for x in v)


# -- the fan record ---------------------------------------------------------

@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple[Vector, ...]
    max_cones: tuple[frozenset, ...]

    def __init__(self, dim: int, rays: Iterable[Iterable[int]], max_cones: Iterable[Iterable[int]]):
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in rays))
        object.__setattr__(self, "max_cones", tuple(frozenset(int(i) for i in c) for c in max_cones))

    def cone_rays(self, cone: Iterable[int]) -> list[Vector]:
        return [self.rays[i] for i in sorted(cone)]

    def index_of(self, ray: Sequence[int]) -> int:
        try:
            return self.rays.index(tuple(ray))
        except ValueError:
            raise NoSuchCone(f"ray {tuple(ray)} is not a ray of the fan") from None

    def cone_from_vectors(self, vectors: Iterable[Sequence[int]]) -> frozenset:
        return frozenset(self.index_of(v) for v in vectors)

    def canonical(self):
        """Index-free description, for comparing fans up to ray reindexing."""
        return (
            self.dim,
            frozenset(self.rays),
            frozenset(frozenset(self.rays[i] for i in c) for c in self.max_cones),
        )

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [sorted(c) for c in self.max_cones],
        }

    @classmethod
    def from_json(cls, data) -> Fan:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"fan JSON line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
        try:
            return cls(data["dim"], data["rays"], data["max_cones"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"fan JSON needs dim, rays, max_cones: {exc}") from exc


def fans_equivalent(f: Fan, g: Fan) -> bool:
    return f.canonical() == g.canonical()


# -- validation -------------------------------------------------------------

def _faces_meet_properly(f: Fan, a: frozenset, b: frozenset) -> bool:
    """Whether cone(a) and cone(b) intersect exactly in cone(a & b).

    Extreme rays of {(l, m) >= 0 : sum l_i v_i = sum m_j v_j} are the
    nonnegative elementary vectors (minimal supports with a 1-dimensional
    kernel).  The intersection is too large iff some extreme ray puts
    weight on a ray of ``a`` outside the shared face.
    """
    if f.dim == 2:
        return _planar_cones_meet_properly(f, a, b)
    return _circuit_faces_meet_properly(f, a, b)


def _circuit_faces_meet_properly(f: Fan, a: frozenset, b: frozenset) -> bool:
    shared = a & b
    la, lb = sorted(a), sorted(b)
    cols = [f.rays[i] for i in la] + [tuple(-x for x in f.rays[j]) for j in lb]
    outside = [k for k, i in enumerate(la) if i not in shared]
    if not outside:
        return True
    rk = rank(cols)
    for size in range(2, min(len(cols), rk + 1) + 1):
        for support in combinations(range(len(cols)), size):
            ns = nullspace([cols[k] for k in support])
            if len(ns) != 1:
                continue
            y = ns[0]
            if any(c == 0 for c in y):
                continue
            if not (all(c > 0 for c in y) or all(c < 0 for c in y)):
                continue
            if any(k in outside for k in support):
                return False
    return True


def _det2(u: Vector, v: Vector) -> int:
    return u[0] * v[1] - u[1] * v[0]


def _oriented(f: Fan, c: frozenset) -> tuple[Vector, ...]:
    rays = f.cone_rays(c)
    if len(rays) == 2 and _det2(*rays) < 0:
        rays = rays[::-1]
    return tuple(rays)


def _in_open_sector(p: Vector, sector: tuple[Vector, ...]) -> bool:
    if len(sector) == 1:
        return False
    u, v = sector
    return _det2(u, p) > 0 and _det2(p, v) > 0


def _planar_cones_meet_properly(f: Fan, a: frozenset, b: frozenset) -> bool:
    """Exact test in the plane: rays are distinct and primitive, so two
    sectors meet in a common face unless one holds a ray of the other in
    its interior or both leave a shared ray on the same side."""
    sa, sb = _oriented(f, a), _oriented(f, b)
    if any(_in_open_sector(p, sb) for p in sa) or any(_in_open_sector(p, sa) for p in sb):
        return False
    if len(sa) == 2 and len(sb) == 2:
        return sa[0] != sb[0] and sa[1] != sb[1]
    return True


@lru_cache(maxsize=2048)
def validate_fan(f: Fan) -> tuple[str, ...]:
    """All invariant violations of ``f``; an empty tuple means valid."""
    diags: list[str] = []
    n = f.dim
    if n < 0:
        return ("negative dimension",)
    for i, r in enumerate(f.rays):
        if len(r) != n:
            diags.append(f"ray {i} has length {len(r)}, expected {n}")
            continue
        g = reduce(math.gcd, r, 0)
        if g == 0:
            diags.append(f"ray {i} is zero")
        elif g != 1:
            diags.append(f"non-primitive ray {i} {r}")
    seen: dict[Vector, int] = {}
    for i, r in enumerate(f.rays):
        if r in seen:
            diags.append(f"duplicate ray {r} (indices {seen[r]} and {i})")
        seen.setdefault(r, i)
    if diags:
        return tuple(diags)
    used: set[int] = set()
    for k, cone in enumerate(f.max_cones):
        bad = [i for i in cone if not 0 <= i < len(f.rays)]
        if bad:
            diags.append(f"cone {k} references missing rays {sorted(bad)}")
            continue
        used |= cone
        if rank(f.cone_rays(cone)) != len(cone):
            diags.append(f"cone {k} {sorted(cone)} is not simplicial")
    if diags:
        return tuple(diags)
    for i in range(len(f.rays)):
        if i not in used:
            diags.append(f"ray {i} lies in no maximal cone")
    for (k, a), (l, b) in combinations(enumerate(f.max_cones), 2):
        if a <= b or b <= a:
            diags.append(f"cone {k} and cone {l} are nested; maximal cones must be incomparable")
        elif not _faces_meet_properly(f, a, b):
            diags.append(f"intersection not a face: cones {k} {sorted(a)} and {l} {sorted(b)}")
    return tuple(diags)


def require_valid(f: Fan) -> None:
    diags = validate_fan(f)
    if diags:
        raise FanValidation(diags)


def all_cones(f: Fan) -> list[frozenset]:
    """Every cone of the fan (faces of maximal cones), including the zero cone."""
    cones = {frozenset()}
    for m in f.max_cones:
        for k in range(1, len(m) + 1):
            cones.update(frozenset(c) for c in combinations(sorted(m), k))
    return sorted(cones, key=lambda c: (len(c), sorted(c)))


def is_cone(f: Fan, c: Iterable[int]) -> bool:
    c = frozenset(c)
    return any(c <= m for m in f.max_cones)


def _require_cone(f: Fan, c) -> frozenset:
    c = frozenset(c)
    if not is_cone(f, c):
        raise NoSuchCone(f"{sorted(c)} is not a cone of the fan")
    return c


# -- smoothness / completeness ----------------------------------------------

def is_smooth_cone(f: Fan, c: Iterable[int]) -> bool:
    """Rays of ``c`` extend to a Z-basis: gcd of the maximal minors is 1."""
    c = _require_cone(f, c)
    vecs = f.cone_rays(c)
    k = len(vecs)
    if k == 0:
        return True
    g = 0
    for cols in combinations(range(f.dim), k):
        g = math.gcd(g, det([[v[j] for j in cols] for v in vecs]))
        if g == 1:
            return True
    return False


def is_smooth(f: Fan) -> bool:
    require_valid(f)
    return all(is_smooth_cone(f, m) for m in f.max_cones)


def _angle_cmp(u: Vector, v: Vector) -> int:
    hu = 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1
    hv = 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1
    if hu != hv:
        return hu - hv
    cross = u[0] * v[1] - u[1] * v[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def sort_by_angle(rays: Iterable[Vector]) -> list[Vector]:
    return sorted(rays, key=cmp_to_key(_angle_cmp))


def _complete_2d(f: Fan) -> bool:
    if len(f.rays) < 3 or any(len(c) != 2 for c in f.max_cones):
        return False
    order = sort_by_angle(f.rays)
    m = len(order)
    expected = set()
    for i in range(m):
        u, v = order[i], order[(i + 1) % m]
        if u[0] * v[1] - u[1] * v[0] <= 0:
            return False
        expected.add(frozenset((f.index_of(u), f.index_of(v))))
    return expected == set(f.max_cones)


def _structural_complete(f: Fan) -> bool:
    n = f.dim
    if any(len(c) != n for c in f.max_cones) or not f.max_cones:
        return False
    facets: dict[frozenset, list[int]] = {}
    for k, c in enumerate(f.max_cones):
        for i in c:
            facets.setdefault(c - {i}, []).append(k)
    if any(len(owners) != 2 for owners in facets.values()):
        return False
    adj: dict[int, set[int]] = {k: set() for k in range(len(f.max_cones))}
    for a, b in facets.values():
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(f.max_cones)


def _sampled_cover(f: Fan, samples: int, seed: int) -> bool:
    """Each random generic point lies in the interior of exactly one maximal cone."""
    rng = random.Random(seed)
    hits = 0
    tries = 0
    while hits < samples and tries < 20 * samples:
        tries += 1
        x = [rng.randint(-97, 97) for _ in range(f.dim)]
        if not any(x):
            continue
        inside, boundary = 0, False
        for c in f.max_cones:
            coords = cone_coordinates(f.cone_rays(c), x)
            if coords is None or any(t < 0 for t in coords):
                continue
            if any(t == 0 for t in coords):
                boundary = True
                break
            inside += 1
        if boundary:
            continue
        if inside != 1:
            return False
        hits += 1
    return True


@lru_cache(maxsize=2048)
def completeness(f: Fan, samples: int = 64, seed: int = 0) -> tuple[bool, str]:
    """(complete?, method).  Exact in dimension <= 2; structural plus sampling above."""
    require_valid(f)
    if f.dim == 0:
        return True, "complete (exact)"
    if f.dim == 1:
        ok = set(f.rays) == {(1,), (-1,)}
        return ok, "complete (exact)" if ok else "not complete"
    if f.dim == 2:
        ok = _complete_2d(f)
        return ok, "complete (exact)" if ok else "not complete"
    if not _structural_complete(f):
        return False, "not complete"
    if _sampled_cover(f, samples, seed):
        return True, "complete (verified)"
    return True, "complete (structural)"


def is_complete(f: Fan) -> bool:
    return completeness(f)[0]


# -- constructions ----------------------------------------------------------

def stellar_subdivide(f: Fan, cone: Iterable[int], new_ray: Sequence[int] | None = None) -> Fan:
    """Toric blow-up along the orbit closure V(cone).

    The new ray defaults to the primitive generator of the sum of the
    cone's rays; it is appended at the end of the ray list.
    """
    require_valid(f)
    c = frozenset(cone)
    if not is_cone(f, c):
        raise NoSuchCone(f"{sorted(c)} is not a cone of the fan")
    if len(c) < 2:
        raise NoSuchCone(f"stellar subdivision needs a cone of dimension >= 2, got {sorted(c)}")
    gens = f.cone_rays(c)
    if new_ray is None:
        ray = primitive(map(sum, zip(*gens)))
    else:
        ray = tuple(int(x) for x in new_ray)
        if len(ray) != f.dim or reduce(math.gcd, ray, 0) != 1:
            raise InvalidSubdivisionRay(f"{ray} is not a primitive vector of Z^{f.dim}")
        coords = cone_coordinates(gens, ray)
        if coords is None or any(t <= 0 for t in coords):
            raise InvalidSubdivisionRay(f"{ray} is not in the relative interior of {sorted(c)}")
    new_index = len(f.rays)
    cones: list[frozenset] = []
    for m in f.max_cones:
        if c <= m:
            for i in sorted(c):
                cones.append((m - {i}) | {new_index})
        else:
            cones.append(m)
    return Fan(f.dim, f.rays + (ray,), cones)


def star_fan(f: Fan, cone: Iterable[int]) -> Fan:
    """Fan of the orbit closure V(cone) in the quotient lattice Z^n / (span(cone) & Z^n)."""
    return star_fan_with_map(f, cone)[0]


def star_fan_with_map(f: Fan, cone: Iterable[int]) -> tuple[Fan, dict[int, int]]:
    """:func:`star_fan` plus the map from ray indices of ``f`` to rays of the star."""
    require_valid(f)
    c = _require_cone(f, cone)
    n = f.dim
    proj = integer_kernel(f.cone_rays(c), n) if c else [[int(i == j) for j in range(n)] for i in range(n)]
    k = len(proj)
    images: dict[int, Vector] = {}
    containing = [m for m in f.max_cones if c <= m]
    for m in containing:
        for i in sorted(m - c):
            if i not in images:
                images[i] = primitive(sum(p[t] * f.rays[i][t] for t in range(n)) for p in proj)
    index_order = sorted(images)
    new_rays: list[Vector] = []
    remap: dict[int, int] = {}
    for i in index_order:
        v = images[i]
        if v not in new_rays:
            new_rays.append(v)
        remap[i] = new_rays.index(v)
    cones = []
    for m in containing:
        img = frozenset(remap[i] for i in m - c)
        if img not in cones:
            cones.append(img)
    return Fan(k, new_rays, cones), remap


def _two_cone_resolution(u: Vector, v: Vector) -> list[Vector]:
    """Interior rays resolving the 2-cone <u, v> (det(u, v) > 0), in order from u."""
    out = []
    d = u[0] * v[1] - u[1] * v[0]
    while d > 1:
        # w0 with det(u, w0) = 1
        _, s, t = _ext_gcd(u[0], u[1])
        w0 = (-t, s)  # det(u, w0) = u0*s + u1*t = 1
        base = w0[0] * v[1] - w0[1] * v[0]
        # det(w0 + m u, v) = base + m d; choose it in [0, d)
        m = (-base) // d
        if base + m * d < 0:
            m += 1
        w = (w0[0] + m * u[0], w0[1] + m * u[1])
        out.append(w)
        u = w
        d = u[0] * v[1] - u[1] * v[0]
    return out


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def resolve_2d(f: Fan) -> tuple[Fan, list[Vector]]:
    """Hirzebruch-Jung resolution of a 2-dimensional fan.

    Returns the smooth refinement and the inserted rays in insertion
    order; replaying them with :func:`stellar_subdivide` (explicit ray)
    reproduces the output fan exactly.
    """
    require_valid(f)
    if f.dim != 2:
        raise Unsupported("resolve_2d handles only 2-dimensional fans")
    current = f
    inserted: list[Vector] = []
    for cone in f.max_cones:
        if len(cone) != 2:
            continue
        a, b = sorted(cone)
        u, v = f.rays[a], f.rays[b]
        if u[0] * v[1] - u[1] * v[0] < 0:
            u, v = v, u
        for w in _two_cone_resolution(u, v):
            # the ray goes into the cone between the previously inserted ray and v
            host = next(
                m for m in current.max_cones
                if len(m) == 2 and v in current.cone_rays(m)
                and _strictly_inside(current.cone_rays(m), w)
            )
            current = stellar_subdivide(current, host, w)
            inserted.append(w)
    return current, inserted


def _strictly_inside(gens, w) -> bool:
    coords = cone_coordinates(gens, w)
    return coords is not None and all(t > 0 for t in coords)


def contract_ray(f: Fan, ray: Sequence[int]) -> tuple[Fan, frozenset]:
    """Inverse of a 2-dimensional stellar subdivision (blow-down).

    Returns the contracted fan and the 2-cone (of the contracted fan)
    that subdividing again with ``ray`` restores.
    """
    require_valid(f)
    if f.dim != 2:
        raise Unsupported("contract_ray handles only 2-dimensional fans")
    r = f.index_of(ray)
    around = [m for m in f.max_cones if r in m]
    if len(around) != 2:
        raise InvalidSubdivisionRay(f"ray {tuple(ray)} is not interior to two 2-cones")
    (a,), (b,) = (around[0] - {r}), (around[1] - {r})
    keep = [i for i in range(len(f.rays)) if i != r]
    remap = {old: new for new, old in enumerate(keep)}
    cones = [frozenset(remap[i] for i in m) for m in f.max_cones if r not in m]
    center = frozenset((remap[a], remap[b]))
    cones.append(center)
    g = Fan(2, [f.rays[i] for i in keep], cones)
    if validate_fan(g) or not fans_equivalent(stellar_subdivide(g, center, ray), f):
        raise InvalidSubdivisionRay(f"ray {tuple(ray)} is not the center of a blow-down")
    return g, center


# -- standard fans ------------------------------------------------------------

def projective_space(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays.append(tuple([-1] * n))
    cones = [frozenset(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan(n, rays, cones)


def affine_space(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return Fan(n, rays, [range(n)])


def product_fan(f: Fan, g: Fan) -> Fan:
    rays = [r + (0,) * g.dim for r in f.rays] + [(0,) * f.dim + r for r in g.rays]
    off = len(f.rays)
    cones = [a | frozenset(off + j for j in b) for a in f.max_cones for b in g.max_cones]
    return Fan(f.dim + g.dim, rays, cones)


def complete_fan_2d(rays: Iterable[Sequence[int]]) -> Fan:
    """Complete 2D fan whose maximal cones join angularly consecutive rays."""
    order = sort_by_angle({primitive(r) for r in rays})
    m = len(order)
    return Fan(2, order, [frozenset((i, (i + 1) % m)) for i in range(m)])


def hirzebruch(a: int) -> Fan:
    return complete_fan_2d([(1, 0), (0, 1), (-1, a), (0, -1)])


P1 = projective_space(1)
P2 = projective_space(2)
P3 = projective_space(3)
P1xP1 = product_fan(P1, P1)
P1xP1xP1 = product_fan(P1xP1, P1)
P112 = complete_fan_2d([(1, 0), (0, 1), (-1, -2)])
