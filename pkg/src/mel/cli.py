"""Command-line front end (``mel``).

Exit codes: 0 success or identity holds, 1 identity violated, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .closures import (
    blowup_closure,
    blowup_square,
    closure_from_json,
    verify_closure_compatibility,
    weak_factorization_path_2d,
)
from .errors import CrossCheckMismatch, InputError
from .euler import (
    StratifiedVariety,
    check_blowup_additivity,
    check_good_local_data,
    gauss_bonnet_check,
    pro_euler_degree,
    strata_class,
)
from .fans import Fan, completeness, is_smooth, require_valid, resolve_2d, stellar_subdivide, validate_fan
from .gw import FieldDescriptor, invariants, parse_gw
from .motive import SeedTable, apply_measure, bittner_blowup_check, class_of_toric, measure_from_name, parse_class
from .suite import FAIL, default_corpus_dir, run_suite, summary

OK, VIOLATED, BAD_INPUT = 0, 1, 2


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def _fan(path: str) -> Fan:
    return Fan.from_json(_read(path))


def _measure(args):
    fld = FieldDescriptor.parse(args.field)
    return measure_from_name(args.measure, fld)


def _seeds(args) -> SeedTable:
    return SeedTable.from_json(_read(args.seeds)) if getattr(args, "seeds", None) else SeedTable()


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


# -- verbs ------------------------------------------------------------------

def cmd_fan_validate(args) -> int:
    f = _fan(args.file)
    diags = validate_fan(f)
    if diags:
        for d in diags:
            print(d)
        return BAD_INPUT
    complete, how = completeness(f)
    print(f"valid fan: dim {f.dim}, {len(f.rays)} rays, {len(f.max_cones)} maximal cones")
    print(f"smooth: {'yes' if is_smooth(f) else 'no'}")
    print(f"complete: {'yes' if complete else 'no'} ({how})")
    return OK


def cmd_fan_subdivide(args) -> int:
    f = _fan(args.file)
    ray = _int_list(args.ray) if args.ray else None
    _emit(stellar_subdivide(f, _int_list(args.cone), ray).to_json())
    return OK


def cmd_fan_resolve2d(args) -> int:
    res, inserted = resolve_2d(_fan(args.file))
    _emit({"fan": res.to_json(), "inserted": [list(r) for r in inserted]})
    return OK


def cmd_class_toric(args) -> int:
    print(class_of_toric(_fan(args.file)))
    return OK


def cmd_measure_apply(args) -> int:
    m = _measure(args)
    print(m.format_value(apply_measure(parse_class(args.expr), m, _seeds(args))))
    return OK


def cmd_euler_closure(args) -> int:
    text = _read(args.file)
    m, seeds = _measure(args), _seeds(args)
    try:
        group = json.loads(text).get("closures")
    except (json.JSONDecodeError, AttributeError):
        group = None
    if not isinstance(group, list):
        print(strata_class(closure_from_json(text), m, seeds))
        return OK
    # a group of closures of one open variety: one line each
    for i, data in enumerate(group):
        gc = closure_from_json(data)
        print(f"{gc.name or f'closure {i}'}: {strata_class(gc, m, seeds)}")
    return OK


def cmd_euler_singular(args) -> int:
    x = StratifiedVariety.from_json(_read(args.file))
    print(pro_euler_degree(x, _measure(args), _seeds(args)))
    return OK


def cmd_check_blowup(args) -> int:
    f = _fan(args.file)
    sq = blowup_square(f, _int_list(args.cone))
    rep = check_blowup_additivity(sq, _measure(args), _seeds(args))
    k0 = bittner_blowup_check(sq.base_class, sq.center_class, sq.total_class, sq.exceptional_class)
    print(rep)
    print(f"K0: [X]={sq.base_class} [C]={sq.center_class} [Bl]={sq.total_class} [E]={sq.exceptional_class} "
          f"{'OK' if k0 else 'FAIL'}")
    return OK if rep.holds and k0 else VIOLATED


def cmd_check_gld(args) -> int:
    gc = closure_from_json(_read(args.file))
    _, sq = blowup_closure(gc, _int_list(args.cone))
    rep = check_good_local_data(sq, _measure(args), _seeds(args))
    print(f"Z {'empty' if sq.z_empty else 'nonempty'}")
    print(rep)
    return OK if rep.holds else VIOLATED


def cmd_check_gauss_bonnet(args) -> int:
    x = StratifiedVariety.from_json(_read(args.file))
    rep = gauss_bonnet_check(x, _measure(args), _seeds(args))
    if args.format == "json":
        _emit(rep.to_json())
    elif args.format == "table":
        print(rep.table())
    else:
        print(rep.line())
    return OK if rep.equal else VIOLATED


def cmd_check_factorization(args) -> int:
    a, b = _fan(args.fan_a), _fan(args.fan_b)
    for f in (a, b):
        require_valid(f)
    path = weak_factorization_path_2d(a, b)
    diags = path.diagnostics()
    _emit(path.to_json()["moves"])
    for d in diags:
        print(d)
    m = _measure(args)
    compatible = verify_closure_compatibility(path, lambda gc: strata_class(gc, m, _seeds(args)))
    print(f"{path.peak} blow-ups then {len(path.moves) - path.peak} blow-downs; {args.classfn} class "
          f"{'compatible' if compatible else 'NOT compatible'} under {m}")
    return OK if compatible and not diags else VIOLATED


def cmd_gw_eval(args) -> int:
    fld = FieldDescriptor.parse(args.field)
    x = parse_gw(args.expr, fld)
    print(x)
    inv = invariants(x)
    extra = f"sig {x.signature}" if x.signature is not None else f"disc {inv.disc}"
    print(f"(rank {x.rank}, {extra})")
    return OK


def cmd_suite_run(args) -> int:
    corpus = Path(args.corpus) if args.corpus else default_corpus_dir()
    results = run_suite(corpus)
    if args.json:
        _emit({"results": [r.to_json() for r in results], "summary": summary(results)})
    else:
        for r in results:
            print(r.line())
        print(summary(results))
    return VIOLATED if any(r.status == FAIL for r in results) else OK


# -- parser -----------------------------------------------------------------

def _measure_opts(p, default="gw"):
    p.add_argument("--measure", default=default, help="top, count or gw (default %(default)s)")
    p.add_argument("--field", default="Q", help="Q, R or Fp such as F5 (default %(default)s)")
    p.add_argument("--seeds", help="JSON seed table for named atoms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mel", description="Exact degree-level Euler class computations.")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="verb")

    fan = verbs.add_parser("fan", help="fan utilities").add_subparsers(dest="action", required=True)
    p = fan.add_parser("validate")
    p.add_argument("file")
    p.set_defaults(run=cmd_fan_validate)
    p = fan.add_parser("subdivide")
    p.add_argument("file")
    p.add_argument("--cone", required=True, help="ray indices i,j[,k]")
    p.add_argument("--ray", help="new ray x,y[,z]; defaults to the sum of the cone's rays")
    p.set_defaults(run=cmd_fan_subdivide)
    p = fan.add_parser("resolve2d")
    p.add_argument("file")
    p.set_defaults(run=cmd_fan_resolve2d)

    cls = verbs.add_parser("class", help="classes in K0(Var)").add_subparsers(dest="action", required=True)
    p = cls.add_parser("toric")
    p.add_argument("file")
    p.set_defaults(run=cmd_class_toric)

    meas = verbs.add_parser("measure", help="motivic measures").add_subparsers(dest="action", required=True)
    p = meas.add_parser("apply")
    p.add_argument("expr", help='class expression such as "1 + L + L^2"')
    _measure_opts(p)
    p.set_defaults(run=cmd_measure_apply)

    eul = verbs.add_parser("euler", help="Euler degrees").add_subparsers(dest="action", required=True)
    p = eul.add_parser("closure")
    p.add_argument("file")
    _measure_opts(p)
    p.set_defaults(run=cmd_euler_closure)
    p = eul.add_parser("singular")
    p.add_argument("file")
    _measure_opts(p)
    p.set_defaults(run=cmd_euler_singular)

    chk = verbs.add_parser("check", help="verify identities").add_subparsers(dest="action", required=True)
    p = chk.add_parser("blowup")
    p.add_argument("file")
    p.add_argument("--cone", required=True)
    _measure_opts(p)
    p.set_defaults(run=cmd_check_blowup)
    p = chk.add_parser("gld")
    p.add_argument("file")
    p.add_argument("--cone", required=True)
    _measure_opts(p)
    p.set_defaults(run=cmd_check_gld)
    p = chk.add_parser("gauss-bonnet")
    p.add_argument("file")
    _measure_opts(p)
    p.add_argument("--format", choices=("line", "table", "json"), default="line")
    p.set_defaults(run=cmd_check_gauss_bonnet)
    p = chk.add_parser("factorization")
    p.add_argument("fan_a")
    p.add_argument("fan_b")
    p.add_argument("--classfn", choices=("euler",), default="euler")
    _measure_opts(p)
    p.set_defaults(run=cmd_check_factorization)

    gw = verbs.add_parser("gw", help="Grothendieck-Witt arithmetic").add_subparsers(dest="action", required=True)
    p = gw.add_parser("eval")
    p.add_argument("expr")
    p.add_argument("--field", default="Q")
    p.set_defaults(run=cmd_gw_eval)

    suite = verbs.add_parser("suite", help="corpus verification").add_subparsers(dest="action", required=True)
    p = suite.add_parser("run")
    p.add_argument("--corpus", help="corpus directory (default: $MEL_CORPUS or the bundled corpus)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_suite_run)
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CrossCheckMismatch as exc:
        print(f"identity violated: {exc}", file=sys.stderr)
        return VIOLATED
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
