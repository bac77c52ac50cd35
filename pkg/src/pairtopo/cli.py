"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 parse or schema error,
3 unsupported formula shape, 4 budget exceeded, 5 the two membership paths
disagree.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import formulas as fm
from . import pairsets as ps
from . import ranks, translator as tr
from .difffield import DomainError, wronskian_eval
from .exactalg import BudgetExceeded

EXIT_OK, EXIT_INPUT, EXIT_PARSE, EXIT_SHAPE, EXIT_BUDGET, EXIT_MISMATCH = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# input helpers

def _read_text(arg):
    return sys.stdin.read() if arg == "-" else arg


def _params(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise CliError(f"parameter {item!r} is not of the form name=value", EXIT_INPUT)
        name, value = item.split("=", 1)
        out[name.strip()] = fm.parse_omega(value)
    return out


def _budgets(args):
    return tr.Budgets(groebner=args.budget_groebner, kcells=args.budget_kcells,
                      degree_cap=args.degree_cap)


def _free_vars(args, formula):
    if args.vars:
        return tuple(v.strip() for v in args.vars.split(",") if v.strip())
    return fm.free_variables(formula)


def _formula(args, text):
    params = _params(args.param)
    f = fm.parse(text, params=tuple(params))
    return fm.substitute_params(f, params)


def _combined(args, text):
    f = _formula(args, text)
    free = _free_vars(args, f)
    tree = fm.to_blocks(f, free_vars=free)
    return tr.translate_combination(tree, _budgets(args)), f, free


_BUILTIN = re.compile(r"(Y|X)(\d+)\Z|k(\^(\d+))?\Z|Omega(\^(\d+))?\Z")


def builtin_set(name):
    """Catalog sets by name: Y<n>, X<n>, k, k^n, Omega, Omega^n, span:a,b,..."""
    name = name.strip()
    if name.startswith("span:"):
        return ps.Constructible.closed(ps.mk_span(fm.parse_point(name[5:])))
    m = _BUILTIN.match(name)
    if not m:
        return None
    if m.group(1) == "Y":
        return ps.Constructible.closed(ps.mk_yn(int(m.group(2))))
    if m.group(1) == "X":
        return ps.mk_xn(int(m.group(2)))
    if name.startswith("k"):
        return ps.Constructible.closed(ps.mk_kn(int(m.group(4) or 1)))
    return ps.Constructible.full(int(m.group(6) or 1))


def _load_set(args, source):
    X = builtin_set(source)
    if X is not None:
        return X
    if os.path.isfile(source):
        with open(source, "rb") as fh:
            data = fh.read()
        obj = json.loads(data)
        if "pairs" in obj:
            return ps.from_json(obj)
        flat = tr.load_combined(obj).flat
    else:
        flat = _combined(args, _read_text(source))[0].flat
    if isinstance(flat, tr.NotFlattenable):
        raise CliError(f"set has no flat presentation (nonlinear condition {flat.reason})", EXIT_SHAPE)
    return flat


def _emit(args, obj, text):
    if args.format == "json":
        print(json.dumps(obj, separators=(",", ":"), ensure_ascii=False))
    else:
        print(text)


# commands

def cmd_translate(args):
    comb, f, free = _combined(args, _read_text(args.formula))
    obj = comb.to_json()
    lines = [f"formula: {fm.to_text(f)}", f"free variables: {', '.join(free)}"]
    for i, (block, cert) in enumerate(comb.leaves):
        lines.append(f"block {i}: {block}")
        lines.append(f"  K-cells: {len(cert.cells)}")
        for cell in cert.cells:
            K = " x ".join("{" + ", ".join(str(list(i)) for i in Kj) + "}" for Kj in cell.K)
            lines.append(f"    K = {K}; z = {cell.z}")
    if isinstance(comb.flat, ps.Constructible):
        lines.append("flat: " + ps.serialize(comb.flat).decode())
    else:
        lines.append(f"flat: not flattenable ({comb.flat.reason})")
    _emit(args, obj, "\n".join(lines))
    return EXIT_OK


def cmd_member(args):
    point = fm.parse_point(args.point)
    source = args.target
    if os.path.isfile(source):
        with open(source, "rb") as fh:
            obj = json.loads(fh.read())
        if "pairs" in obj:
            value = ps.member(ps.from_json(obj), point)
            paths = ["constructible"]
        else:
            comb = tr.load_combined(obj)
            value = tr.member_combined(comb, point)
            paths = ["certificate"]
    else:
        comb, _, _ = _combined(args, _read_text(source))
        a = tr.member_combined(comb, point)
        b = tr.decide_combined(comb, point, args.budget_groebner)
        if a != b:
            report = {"error": "dual-path mismatch", "formula": _read_text(source),
                      "point": args.point, "certificate": a, "direct": b,
                      "dump": comb.to_json()}
            print(json.dumps(report), file=sys.stderr)
            return EXIT_MISMATCH
        value, paths = a, ["certificate", "direct"]
    _emit(args, {"member": value, "paths": paths},
          f"{'true' if value else 'false'} (paths: {', '.join(paths)})")
    return EXIT_OK


def cmd_closure(args):
    X = _load_set(args, args.set)
    res = ps.closure(X, samples=args.samples, seed=args.seed)
    _emit(args, res.to_json(),
          f"{res.tag}: " + json.dumps(res.closed.to_json(), separators=(",", ":")))
    return EXIT_OK


def cmd_sdim(args):
    X = _load_set(args, args.set)
    rep = ranks.sdim(X, samples=args.samples, seed=args.seed)
    text = str(rep.value) if rep.exact else f"unknown ({rep.lower} <= sdim <= {rep.upper})"
    _emit(args, rep.to_json(), text)
    return EXIT_OK


def cmd_mr(args):
    X = _load_set(args, args.set)
    b = ranks.mr_bounds(X, samples=args.samples, seed=args.seed)
    _emit(args, b.to_json(), str(b))
    return EXIT_OK


def cmd_wronskian(args):
    elems = fm.parse_point(_read_text(args.elements))
    if not elems:
        raise CliError("need at least one element", EXIT_INPUT)
    w = wronskian_eval(elems)
    _emit(args, {"wronskian": str(w)}, str(w))
    return EXIT_OK


def _add_common(p, suppress):
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p.add_argument("--format", choices=("json", "text"), default=d("text"))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--samples", type=int, default=d(100))
    p.add_argument("--budget-groebner", type=int, default=d(tr.DEFAULT_MAX_STEPS))
    p.add_argument("--budget-kcells", type=int, default=d(tr.DEFAULT_KCELL_BUDGET))
    p.add_argument("--degree-cap", type=int, default=d(tr.acfqe.DEFAULT_DEGREE_CAP))
    p.add_argument("--param", action="append", metavar="NAME=VALUE", default=d(None),
                   help="value for a formula parameter (repeatable)")
    p.add_argument("--vars", default=d(None),
                   help="comma-separated free variables, in coordinate order")


def build_parser():
    # options may come before or after the subcommand; the subcommand copies
    # use SUPPRESS so they do not overwrite values given earlier
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, suppress=True)

    p = argparse.ArgumentParser(prog="pairtopo", description=__doc__.splitlines()[0])
    _add_common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("translate", parents=[common], help="certificate for a formula")
    s.add_argument("formula", help="formula text, or - for stdin")
    s.set_defaults(func=cmd_translate)
    s = sub.add_parser("member", parents=[common], help="membership of a point")
    s.add_argument("target", help="formula text, - for stdin, or a JSON file")
    s.add_argument("point", help='point such as "(1, t0)"')
    s.set_defaults(func=cmd_member)
    for name, fn, help_ in (("closure", cmd_closure, "closure of a set"),
                            ("sdim", cmd_sdim, "small dimension"),
                            ("mr", cmd_mr, "Morley rank value or bounds")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("set", help="built-in name (Y2, k, k^2, Omega^2, span:1,t0, X2), "
                                   "JSON file, or formula")
        s.set_defaults(func=fn)
    s = sub.add_parser("wronskian", parents=[common], help="Wronskian of field elements")
    s.add_argument("elements", help='comma-separated elements such as "1, t0, t0^2"')
    s.set_defaults(func=cmd_wronskian)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (fm.ParseError, ps.SchemaError, json.JSONDecodeError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except fm.UnsupportedShape as e:
        print(f"unsupported shape: {e}", file=sys.stderr)
        return EXIT_SHAPE
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except tr.InvariantBreach as e:
        print(f"invariant breach: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except (fm.MissingParameterError, DomainError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
