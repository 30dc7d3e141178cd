"""Built-in corpus: open varieties with several good closures, proper
singular varieties with several smooth stratifications, and smooth
complete surface fans.  Everything is generated deterministically.
"""

from __future__ import annotations

import random
from itertools import combinations

from .closures import (
    GoodClosure,
    StratumData,
    blowup_closure,
    make_good_closure,
    toric_good_closure,
)
from .euler import StratifiedVariety
from .fans import (
    P1,
    P112,
    P1xP1,
    P2,
    P3,
    Fan,
    complete_fan_2d,
    hirzebruch,
    is_smooth_cone,
    primitive,
    resolve_2d,
    stellar_subdivide,
    validate_fan,
)
from .motive import MotiveClass, class_of_toric, parse_class

PT = MotiveClass.point()
P1_CLASS = parse_class("1 + L")


# -- closure building blocks ------------------------------------------------

def point_closure() -> GoodClosure:
    return make_good_closure([], {(): StratumData(motive=PT, dim=0)}, 0, name="pt")


def curve_closure(ambient: MotiveClass, n_points: int, name: str) -> GoodClosure:
    """A smooth proper curve with ``n_points`` rational boundary points (user-declared)."""
    comps = [f"p{i}" for i in range(n_points)]
    strata = {(): StratumData(motive=ambient, dim=1)}
    for c in comps:
        strata[(c,)] = StratumData(motive=PT, dim=0)
    return make_good_closure(comps, strata, 1, name=name)


def torus_closure(k: int) -> GoodClosure:
    if k == 0:
        return point_closure()
    if k == 1:
        return toric_good_closure(P1, name="Gm in P1")
    if k == 2:
        return toric_good_closure(P1xP1, name="Gm^2 in P1xP1")
    raise ValueError("torus closures are provided up to dimension 2")


def _boundary_blowups(gc: GoodClosure) -> list[GoodClosure]:
    """Every blow-up of a 2-dim toric closure at a fixed point lying on the boundary."""
    out = []
    f = gc.toric_source
    for cone in f.max_cones:
        if len(cone) >= 2 and cone & set(gc.components):
            total, _ = blowup_closure(gc, cone)
            out.append(total)
    return out


def open_variety_closures() -> dict[str, list[GoodClosure]]:
    """For each open U, several distinct good closures of U."""
    gm = [torus_closure(1), curve_closure(P1_CLASS, 2, "Gm in a conic")]
    a1 = [toric_good_closure(P1, [1], name="A1 in P1"), curve_closure(P1_CLASS, 1, "A1 in a conic")]
    a2_bases = [toric_good_closure(P2, [2], name="A2 in P2"),
                toric_good_closure(P1xP1, [1, 3], name="A2 in P1xP1")]
    gm2_bases = [toric_good_closure(P2, name="Gm^2 in P2"), torus_closure(2),
                 toric_good_closure(hirzebruch(1), name="Gm^2 in F1"),
                 toric_good_closure(hirzebruch(2), name="Gm^2 in F2")]
    a1gm_bases = [toric_good_closure(P2, [1, 2], name="A1xGm in P2"),
                  toric_good_closure(P1xP1, [1, 2, 3], name="A1xGm in P1xP1")]
    out = {"Gm": gm, "A1": a1}
    for name, bases in (("A2", a2_bases), ("Gm^2", gm2_bases), ("A1xGm", a1gm_bases)):
        closures = list(bases)
        for base in bases[:2]:
            closures += _boundary_blowups(base)
        out[name] = closures
    return out


# -- proper varieties with several stratifications ----------------------------

def _variety(name, pieces, total, weights=None) -> StratifiedVariety:
    return StratifiedVariety(name, tuple(pieces), weights, total, True)


def toric_orbit_stratification(f: Fan, name: str) -> StratifiedVariety:
    """One piece per torus orbit O(s) = Gm^(n - dim s)."""
    from .fans import all_cones

    pieces = [torus_closure(f.dim - len(c)) for c in all_cones(f)]
    return _variety(f"{name} [orbits]", pieces, class_of_toric(f))


def toric_resolution_stratification(f: Fan, name: str) -> StratifiedVariety:
    """Smooth locus (closed up by the HJ resolution) plus the singular fixed points."""
    res, inserted = resolve_2d(f)
    new = [res.index_of(r) for r in inserted]
    pieces = [toric_good_closure(res, new, name=f"{name} smooth locus")]
    pieces += [point_closure() for c in f.max_cones if not is_smooth_cone(f, c)]
    return _variety(f"{name} [resolution]", pieces, class_of_toric(f))


def random_singular_surface_fans(count: int = 3, seed: int = 20261015) -> list[Fan]:
    rng = random.Random(seed)
    out: list[Fan] = []
    while len(out) < count:
        m = rng.randint(3, 6)
        rays = set()
        while len(rays) < m:
            v = (rng.randint(-3, 3), rng.randint(-3, 3))
            if v != (0, 0):
                rays.add(primitive(v))
        f = complete_fan_2d(rays)
        if validate_fan(f):
            continue
        dets = []
        for c in f.max_cones:
            u, v = f.cone_rays(c)
            dets.append(u[0] * v[1] - u[1] * v[0])
        if any(d == 0 for d in dets):
            continue
        from .fans import is_complete
        if not is_complete(f) or all(is_smooth_cone(f, c) for c in f.max_cones):
            continue
        if any(f.canonical() == g.canonical() for g in out):
            continue
        out.append(f)
    return out


def singular_varieties() -> dict[str, list[StratifiedVariety]]:
    """Proper varieties, each with at least two smooth stratifications."""
    L = MotiveClass.lefschetz()
    gm_p1 = torus_closure(1)
    a1_p1 = toric_good_closure(P1, [1], name="A1 in P1")
    pt = point_closure()
    gm_minus_pt = curve_closure(P1_CLASS, 3, "Gm minus a point in P1")
    out: dict[str, list[StratifiedVariety]] = {}

    out["nodal cubic"] = [
        _variety("nodal cubic [node + Gm]", [pt, gm_p1], L),
        _variety("nodal cubic [node + pt + Gm-pt]", [pt, pt, gm_minus_pt], L),
    ]
    out["cuspidal cubic"] = [
        _variety("cuspidal cubic [cusp + A1]", [pt, a1_p1], 1 + L),
        _variety("cuspidal cubic [cusp + pt + Gm]", [pt, pt, gm_p1], 1 + L),
    ]
    out["two lines"] = [
        _variety("two lines [pt + A1 + A1]", [pt, a1_p1, a1_p1], 1 + 2 * L),
        _variety("two lines [P1 + A1]", [toric_good_closure(P1, []), a1_p1], 1 + 2 * L),
    ]
    out["P(1,1,2)"] = [toric_orbit_stratification(P112, "P(1,1,2)"),
                       toric_resolution_stratification(P112, "P(1,1,2)")]
    for i, f in enumerate(random_singular_surface_fans()):
        label = f"toric surface #{i + 1} {list(f.rays)}"
        out[label] = [toric_orbit_stratification(f, label), toric_resolution_stratification(f, label)]
    out["P2"] = [
        _variety("P2 [smooth proper]", [toric_good_closure(P2, [])], parse_class("1 + L + L^2")),
        _variety("P2 [A2 + line]", [toric_good_closure(P2, [2]), toric_good_closure(P1, [])],
                 parse_class("1 + L + L^2")),
        toric_orbit_stratification(P2, "P2"),
    ]
    elliptic = parse_class("[Cg(1)]")
    ell_minus_o = make_good_closure(
        ["O"], {(): StratumData(motive=elliptic, dim=1), ("O",): StratumData(motive=PT, dim=0)},
        1, name="E minus O")
    out["elliptic curve"] = [
        _variety("elliptic curve [E]", [make_good_closure([], {(): StratumData(motive=elliptic, dim=1)}, 1)],
                 elliptic),
        _variety("elliptic curve [E-O + O]", [ell_minus_o, pt], elliptic),
    ]
    return out


def weighted_examples() -> list[StratifiedVariety]:
    """Constructible functions sum n_i 1_{U_i}."""
    L = MotiveClass.lefschetz()
    return [
        StratifiedVariety("3*node + 1*(nodal cubic - node)", (point_closure(), torus_closure(1)),
                          (3, 1), 3 + (L - 1), True),
        StratifiedVariety("2*P1 - 1*pt", (toric_good_closure(P1, []), point_closure()),
                          (2, -1), 2 * (1 + L) - 1, True),
    ]


# -- smooth complete fans -----------------------------------------------------

def smooth_surface_fans(max_rays: int = 12, random_count: int = 8, seed: int = 7) -> list[tuple[str, Fan]]:
    """Named smooth complete 2D fans with at most ``max_rays`` rays."""
    base = [("P2", P2), ("P1xP1", P1xP1)] + [(f"F{a}", hirzebruch(a)) for a in (1, 2, 3)]
    out = list(base)
    out.append(("Bl_pt P2", stellar_subdivide(P2, [0, 1])))
    rng = random.Random(seed)
    for i in range(random_count):
        name, f = base[i % len(base)]
        target = rng.randint(len(f.rays) + 1, max_rays)
        steps = []
        while len(f.rays) < target:
            cone = sorted(f.max_cones, key=sorted)[rng.randrange(len(f.max_cones))]
            f = stellar_subdivide(f, cone)
            steps.append(len(f.rays))
        out.append((f"{name} blown up {len(steps)}x (seed {seed}:{i})", f))
    return out


def random_smooth_fan_2d(rng: random.Random, max_rays: int = 10) -> Fan:
    name, f = rng.choice([("P2", P2), ("P1xP1", P1xP1)] + [(f"F{a}", hirzebruch(a)) for a in range(4)])
    target = rng.randint(len(f.rays), max_rays)
    while len(f.rays) < target:
        cone = sorted(f.max_cones, key=sorted)[rng.randrange(len(f.max_cones))]
        f = stellar_subdivide(f, cone)
    return f


def bl_pt_p3() -> Fan:
    return stellar_subdivide(P3, [0, 1, 2])


def closures_pairs_gm2():
    return list(combinations(open_variety_closures()["Gm^2"], 2))


# -- JSON corpus --------------------------------------------------------------

def _slug(text: str) -> str:
    keep = [c.lower() if c.isalnum() else "_" for c in text]
    return "_".join(filter(None, "".join(keep).split("_")))


def _variety_slug(name: str) -> str:
    if name.startswith("toric surface #"):
        return f"singular_surface_{name.split('#')[1].split()[0]}_var"
    return {"P(1,1,2)": "p112_var", "P2": "p2_var"}.get(name, _slug(name))


def corpus_files() -> dict[str, dict]:
    """File name -> JSON payload for the bundled corpus."""
    from .fans import P1xP1xP1

    files: dict[str, dict] = {}
    fans = [("p2", P2), ("p3", P3), ("p1xp1", P1xP1), ("p1xp1xp1", P1xP1xP1), ("p112", P112),
            ("bl_p3", bl_pt_p3())]
    fans += [(_slug(n), f) for n, f in smooth_surface_fans()[1:]]
    fans += [(f"singular_surface_{i + 1}", f) for i, f in enumerate(random_singular_surface_fans())]
    for name, f in fans:
        files[f"{name}.json"] = f.to_json()
    for open_name, closures in open_variety_closures().items():
        files[f"open_{_slug(open_name)}.json"] = {
            "open": open_name, "closures": [gc.to_json() for gc in closures]}
    files["a2_in_p2.json"] = toric_good_closure(P2, [2], name="A2 in P2").to_json()
    files["gm2_in_p1xp1.json"] = torus_closure(2).to_json()
    for name, variants in singular_varieties().items():
        slug = _variety_slug(name)
        files[f"{slug}.json"] = variants[0].to_json()
        files[f"{slug}_strata.json"] = {"variety": name, "stratifications": [v.to_json() for v in variants]}
    for i, x in enumerate(weighted_examples()):
        files[f"weighted_{i + 1}.json"] = x.to_json()
    return files


def write_corpus(directory) -> list[str]:
    import json
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    for name, payload in sorted(corpus_files().items()):
        (d / name).write_text(json.dumps(payload, indent=1) + "\n")
        names.append(name)
    return names
