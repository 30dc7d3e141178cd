"""Brute-force reference implementations used to cross-check the library.

Nothing here imports the code under test except for plain data types.
"""

from __future__ import annotations

from itertools import product


def vp(n: int, p: int) -> int:
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def hilbert_bruteforce(a: int, b: int, p) -> int | None:
    """(a, b)_p by searching primitive zeros of a x^2 + b y^2 - z^2 modulo p^k.

    A primitive zero mod p^k with k = 2 v_p(2ab) + 1 lifts by Hensel's
    lemma (some partial derivative has valuation <= v_p(2ab)); conversely a
    p-adic zero reduces to one.  Returns None when p^k is too large to search.
    """
    if p == "inf":
        return -1 if a < 0 and b < 0 else 1
    k = 2 * vp(2 * a * b, p) + 1
    mod = p ** k
    if mod > 400:
        return None
    zs: dict[int, set[bool]] = {}
    for z in range(mod):
        zs.setdefault(z * z % mod, set()).add(z % p == 0)
    for x in range(mod):
        for y in range(mod):
            t = (a * x * x + b * y * y) % mod
            if t not in zs:
                continue
            if x % p or y % p or False in zs[t]:
                return 1
    return -1


def squarefree_part(n: int) -> int:
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
        if n % d == 0:
            out *= d
            n //= d
        d += 1
    return sign * out * n


def _qf(diag, v, p):
    return sum(a * x * x for a, x in zip(diag, v)) % p


def _bilinear(diag, u, v, p):
    return sum(a * x * y for a, x, y in zip(diag, u, v)) % p


def fp_isometric_bruteforce(a: list[int], b: list[int], p: int) -> bool:
    """Search for an orthogonal basis of <a> over F_p with Gram matrix diag(b)."""
    if len(a) != len(b):
        return False
    n = len(a)
    vectors = [v for v in product(range(p), repeat=n) if any(v)]

    def independent(vs):
        # Gaussian elimination mod p
        rows = [list(v) for v in vs]
        r = 0
        for c in range(n):
            piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = pow(rows[r][c], p - 2, p)
            rows[r] = [x * inv % p for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
            r += 1
        return r == len(vs)

    def search(chosen):
        k = len(chosen)
        if k == n:
            return True
        for v in vectors:
            if _qf(a, v, p) != b[k] % p:
                continue
            if any(_bilinear(a, v, w, p) for w in chosen):
                continue
            if not independent(chosen + [v]):
                continue
            if search(chosen + [v]):
                return True
        return False

    return search([])


def fp_isotropic_bruteforce(a: list[int], p: int) -> bool:
    return any(_qf(a, v, p) == 0 for v in product(range(p), repeat=len(a)) if any(v))


# -- point counts over F_p (p prime) ------------------------------------------

def projective_points(n: int, p: int) -> list[tuple[int, ...]]:
    """Normalized representatives: first nonzero coordinate equal to 1."""
    pts = []
    for v in product(range(p), repeat=n + 1):
        nz = next((x for x in v if x), None)
        if nz == 1:
            pts.append(v)
    return pts


def count_pn(n: int, p: int) -> int:
    return len(projective_points(n, p))


def count_p1xp1(p: int) -> int:
    pts = projective_points(1, p)
    return len(pts) * len(pts)


def count_blowup_p2(p: int) -> int:
    """Points of {([x:y:z], [u:v]) : x v = y u} in P^2 x P^1."""
    return sum(1 for (x, y, _z) in projective_points(2, p) for (u, v) in projective_points(1, p)
               if (x * v - y * u) % p == 0)


# -- 2D cones -----------------------------------------------------------------

def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def hull_boundary_points(u, v):
    """Lattice points on the compact boundary of conv(cone(u, v) & Z^2 minus 0),
    strictly between u and v, listed from u to v."""
    if _cross(u, v) < 0:
        return hull_boundary_points(v, u)[::-1]
    xs = [0, u[0], v[0], u[0] + v[0]]
    ys = [0, u[1], v[1], u[1] + v[1]]
    pts = [(x, y) for x in range(min(xs), max(xs) + 1) for y in range(min(ys), max(ys) + 1)
           if (x, y) != (0, 0) and _cross(u, (x, y)) >= 0 and _cross((x, y), v) >= 0]
    out = []
    cur = u
    while cur != v:
        ahead = [s for s in pts if _cross(cur, s) > 0]
        best = None
        for p in ahead:
            d = (p[0] - cur[0], p[1] - cur[1])
            if all(_cross(d, (s[0] - cur[0], s[1] - cur[1])) <= 0 for s in ahead):
                if best is None or abs(d[0]) + abs(d[1]) < abs(best[0] - cur[0]) + abs(best[1] - cur[1]):
                    best = p
        cur = best
        if cur != v:
            out.append(cur)
    return out
