"""Batch verification over a directory of JSON inputs.

Files are classified by their keys:

* ``max_cones``: a fan
* ``pieces``: a stratified variety
* ``closures``: several good closures of one open variety
* ``stratifications``: several stratifications of one proper variety
* ``components``: a single good closure
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .closures import (
    blowup_square,
    closure_from_json,
    verify_closure_compatibility,
    weak_factorization_path_2d,
)
from .errors import CrossCheckMismatch, InputError, MissingSeed
from .euler import (
    StratifiedVariety,
    check_blowup_additivity,
    gauss_bonnet_check,
    pro_euler_degree,
    strata_class,
)
from .fans import Fan, completeness, is_smooth, validate_fan
from .motive import POINT_COUNT, TOPOLOGICAL, SeedTable, apply_measure, bittner_blowup_check, class_of_toric, quadratic

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"
MEASURES = (TOPOLOGICAL, POINT_COUNT, quadratic())
PACKAGE_CORPUS = Path(__file__).with_name("corpus")


def default_corpus_dir() -> Path:
    env = os.environ.get("MEL_CORPUS")
    return Path(env) if env else PACKAGE_CORPUS


@dataclass(frozen=True)
class CaseResult:
    kind: str
    name: str
    status: str
    detail: str

    def line(self) -> str:
        return f"{self.status} {self.kind} {self.name}: {self.detail}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "name": self.name, "status": self.status, "detail": self.detail}


def classify(data) -> str:
    if not isinstance(data, dict):
        return "unknown"
    for key, kind in (("max_cones", "fan"), ("pieces", "variety"), ("closures", "closure-group"),
                      ("stratifications", "stratification-group"), ("components", "closure")):
        if key in data:
            return kind
    return "unknown"


def _load(path: Path):
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path.name}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc


def _fan_cases(name: str, f: Fan) -> list[CaseResult]:
    diags = validate_fan(f)
    if diags:
        return [CaseResult("fan", name, FAIL, "; ".join(diags))]
    complete, how = completeness(f)
    out = [CaseResult("fan", name, PASS, f"valid, {'smooth' if is_smooth(f) else 'singular'}, "
                      f"{how if complete else 'not complete'}")]
    if not complete:
        return out
    cls = class_of_toric(f)
    top = apply_measure(cls, TOPOLOGICAL)
    ok = top == len(f.max_cones)
    out.append(CaseResult("toric-class", name, PASS if ok else FAIL,
                          f"{cls}; top={top}, maximal cones={len(f.max_cones)}"))
    if not is_smooth(f):
        return out
    for cone in sorted(f.max_cones, key=sorted):
        sq = blowup_square(f, cone)
        bad = [str(m) for m in MEASURES if not check_blowup_additivity(sq, m)]
        bittner = bittner_blowup_check(sq.base_class, sq.center_class, sq.total_class, sq.exceptional_class)
        label = f"{name} at {sorted(cone)}"
        if bad or not bittner:
            out.append(CaseResult("blowup", label, FAIL, f"fails under {', '.join(bad) or 'K0'}"))
        else:
            gw = check_blowup_additivity(sq, quadratic())
            out.append(CaseResult("blowup", label, PASS, f"chi_gw(Bl)={gw.total}"))
    return out


def _values(fn) -> tuple[list[str], bool]:
    """Evaluate ``fn(m)`` for each measure; returns the text values and whether all were defined."""
    shown = []
    for m in MEASURES:
        try:
            shown.append(f"{m}={m.format_value(fn(m).value)}")
        except MissingSeed:
            shown.append(f"{m}=n/a")
    return shown, all(not s.endswith("n/a") for s in shown)


def _closure_group_cases(name: str, data: dict) -> list[CaseResult]:
    closures = [closure_from_json(c) for c in data["closures"]]
    detail = []
    ok = True
    for m in MEASURES:
        vals = [strata_class(gc, m) for gc in closures]
        same = all(v == vals[0] for v in vals[1:])
        ok &= same
        detail.append(f"{m}={vals[0]}" if same else f"{m} differs: {', '.join(map(str, vals))}")
    label = f"{name} ({data.get('open', '?')}, {len(closures)} closures)"
    return [CaseResult("closure-independence", label, PASS if ok else FAIL, "; ".join(detail))]


def _variety_cases(name: str, x: StratifiedVariety) -> list[CaseResult]:
    out = []
    for m in MEASURES:
        label = f"{name} [{m}]"
        try:
            r = gauss_bonnet_check(x, m, SeedTable())
        except MissingSeed as exc:
            out.append(CaseResult("gauss-bonnet", label, SKIP, str(exc)))
            continue
        except CrossCheckMismatch as exc:
            out.append(CaseResult("gauss-bonnet", label, FAIL, str(exc)))
            continue
        out.append(CaseResult("gauss-bonnet", label, PASS if r.equal else FAIL, r.line()))
    return out


def _stratification_cases(name: str, data: dict) -> list[CaseResult]:
    variants = [StratifiedVariety.from_json(v) for v in data["stratifications"]]
    out = []
    for m in MEASURES:
        try:
            vals = [pro_euler_degree(v, m, SeedTable()) for v in variants]
        except MissingSeed as exc:
            out.append(CaseResult("stratification-independence", f"{name} [{m}]", SKIP, str(exc)))
            continue
        same = all(v == vals[0] for v in vals[1:])
        out.append(CaseResult("stratification-independence", f"{name} [{m}]", PASS if same else FAIL,
                              f"{len(vals)} stratifications: " + ", ".join(map(str, vals))))
    return out


def _factorization_cases(fans: list[tuple[str, Fan]]) -> list[CaseResult]:
    smooth2 = [(n, f) for n, f in fans if f.dim == 2 and is_smooth(f) and completeness(f)[0]]
    out = []
    for i, (na, a) in enumerate(smooth2):
        nb, b = smooth2[(i + 1) % len(smooth2)]
        if na == nb:
            continue
        path = weak_factorization_path_2d(a, b)
        diags = path.diagnostics()
        compatible = all(verify_closure_compatibility(path, lambda gc, m=m: strata_class(gc, m))
                         for m in MEASURES)
        ok = not diags and compatible
        downs = len(path.moves) - path.peak
        detail = (f"{path.peak} blow-ups then {downs} blow-downs, closure-compatible"
                  if ok else "; ".join(diags) or "strata class changes along the path")
        out.append(CaseResult("factorization", f"{na} -> {nb}", PASS if ok else FAIL, detail))
    return out


def run_suite(corpus: Path | None = None) -> list[CaseResult]:
    corpus = Path(corpus) if corpus is not None else default_corpus_dir()
    if not corpus.is_dir():
        raise InputError(f"corpus directory not found: {corpus}")
    results: list[CaseResult] = []
    fans: list[tuple[str, Fan]] = []
    for path in sorted(corpus.glob("*.json")):
        name = path.stem
        try:
            data = _load(path)
            kind = classify(data)
            if kind == "fan":
                f = Fan.from_json(data)
                if not validate_fan(f):
                    fans.append((name, f))
                results += _fan_cases(name, f)
            elif kind == "variety":
                results += _variety_cases(name, StratifiedVariety.from_json(data))
            elif kind == "closure-group":
                results += _closure_group_cases(name, data)
            elif kind == "stratification-group":
                results += _stratification_cases(name, data)
            elif kind == "closure":
                gc = closure_from_json(data)
                shown, _ = _values(lambda m: strata_class(gc, m))
                results.append(CaseResult("closure", name, PASS, ", ".join(shown)))
            else:
                results.append(CaseResult("input", name, SKIP, "unrecognised JSON shape"))
        except InputError as exc:
            results.append(CaseResult("input", name, FAIL, str(exc)))
    results += _factorization_cases(fans)
    return results


def summary(results: list[CaseResult]) -> str:
    counts = {s: sum(r.status == s for r in results) for s in (PASS, FAIL, SKIP)}
    return f"{counts[PASS]} passed, {counts[FAIL]} failed, {counts[SKIP]} skipped"
