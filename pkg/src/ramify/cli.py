"""Command-line front end.

    ramify build    --spec FILE
    ramify breaks   --spec FILE
    ramify galois   --spec FILE
    ramify verify   hasse-arf|imperfect --spec FILE
    ramify verify   converse --p 3 --b 1 --a 4
    ramify verify   composite --spec FILE --spec2 FILE
    ramify catalog  [NAME]

``--spec`` takes a path, inline JSON or a catalog name.  Output is JSON with
sorted keys.  Exit status: 0 on success or a passing verdict, 1 on a failing
verdict, 2 on bad input, 3 on precision or internal failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import RamifyError
from .galois import enumerate_automorphisms, group_table
from .pgroups import group_name
from .ramification import analyze, hasse_arf_check, theorem_check
from .tower import TowerSpec, build
from .witness import catalog, construct_h11, disjoint_composite, report

ENV_PRECISION = "RAMIFY_PRECISION"


def load_spec(arg: str) -> TowerSpec:
    text = arg.strip()
    if text.startswith("{"):
        return TowerSpec.from_json(text)
    named = catalog()
    if arg in named:
        return named[arg]
    try:
        with open(arg) as fh:
            return TowerSpec.from_json(fh.read())
    except OSError as err:
        raise_input(f"cannot read spec {arg!r}: {err.strerror}")


class InputError(RamifyError):
    hint = "command-line input could not be used"


def raise_input(msg: str):
    raise InputError(msg)


def _precision(args) -> int | None:
    if args.precision is not None:
        return args.precision
    env = os.environ.get(ENV_PRECISION)
    if env:
        try:
            return int(env)
        except ValueError:
            raise_input(f"{ENV_PRECISION}={env!r} is not an integer")
    return None


def _need_spec(args) -> TowerSpec:
    if not args.spec:
        raise_input("--spec is required")
    return load_spec(args.spec)


# ---------------------------------------------------------------- commands

def cmd_build(args) -> tuple[int, dict]:
    model = build(_need_spec(args), precision=_precision(args))
    return 0, model.summary()


def _breaks_payload(an) -> dict:
    out = an.breaks.to_json()
    out["group"] = group_name(an.table)
    out["hasse_arf"] = hasse_arf_check(an.breaks, an.table)["verdict"]
    out["theorem_imperfect"] = theorem_check(an.breaks, an.table)["verdict"]
    out["converse"] = any(u.denominator != 1 for u in an.breaks.nonlog)
    return out


def cmd_breaks(args) -> tuple[int, dict]:
    an = analyze(_need_spec(args), precision=_precision(args), seed=args.seed)
    return 0, _breaks_payload(an)


def cmd_galois(args) -> tuple[int, dict]:
    spec = _need_spec(args)
    model = build(spec, precision=_precision(args))
    autos = enumerate_automorphisms(model)
    table = group_table(model, autos, seed=args.seed)
    out = {
        "group": group_name(table),
        "invariants": table.invariants(),
        "automorphisms": [a.to_json() for a in autos],
    }
    out.update(table.to_json())
    return 0, out


def cmd_verify(args) -> tuple[int, dict]:
    prec = _precision(args)
    what = args.what
    if what == "converse":
        if args.spec:
            an = analyze(load_spec(args.spec), precision=prec, seed=args.seed)
            out = _breaks_payload(an)
        else:
            if None in (args.p, args.b, args.a):
                raise_input("verify converse needs --p, --b and --a (or --spec)")
            rep = construct_h11(args.p, args.b, args.a, residue_n=args.n, precision=prec)
            out = rep.to_json()
        return (0 if out["converse"] else 1), out
    if what == "composite":
        if not args.spec or not args.spec2:
            raise_input("verify composite needs --spec and --spec2")
        rep = disjoint_composite(load_spec(args.spec), load_spec(args.spec2), precision=prec, seed=args.seed)
        out = rep.to_json()
        out["composite"] = rep.ok()
        return (0 if rep.ok() else 1), out
    rep = report(_need_spec(args), precision=prec, seed=args.seed)
    out = rep.to_json()
    if what == "hasse-arf":
        verdict = out["hasse_arf"]
        return (1 if verdict == "FAIL" else 0), out
    verdict = out["theorem_imperfect"]
    return (1 if verdict == "VIOLATION" else 0), out


def cmd_catalog(args) -> tuple[int, dict]:
    named = catalog()
    if args.name:
        if args.name not in named:
            raise_input(f"unknown catalog entry {args.name!r}; known: {', '.join(sorted(named))}")
        return 0, named[args.name].to_json()
    return 0, {name: spec.to_json() for name, spec in named.items()}


# ---------------------------------------------------------------- plumbing

def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help=f"top relative precision (default ${ENV_PRECISION} or 64)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "table"], default="json")

    ap = argparse.ArgumentParser(prog="ramify", description="Ramification of explicit towers over F_q((t)).")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in [("build", "build a tower and summarize it"), ("breaks", "ramification breaks"), ("galois", "Galois group table")]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--spec", required=True, help="spec path, inline JSON or catalog name")
    vp = sub.add_parser("verify", parents=[common], help="verdicts")
    vp.add_argument("what", choices=["hasse-arf", "imperfect", "converse", "composite"])
    vp.add_argument("--spec")
    vp.add_argument("--spec2")
    vp.add_argument("--p", type=int)
    vp.add_argument("--b", type=int)
    vp.add_argument("--a", type=int)
    vp.add_argument("--n", type=int, default=1, help="residue degree for converse")
    cp = sub.add_parser("catalog", parents=[common], help="named witness specs")
    cp.add_argument("name", nargs="?")
    return ap


COMMANDS = {"build": cmd_build, "breaks": cmd_breaks, "galois": cmd_galois, "verify": cmd_verify, "catalog": cmd_catalog}


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2)
    lines = []
    for key in sorted(payload):
        val = payload[key]
        if not isinstance(val, str):
            val = json.dumps(val, sort_keys=True)
        lines.append(f"{key:<18} {val}")
    return "\n".join(lines)


def error_payload(err: Exception) -> dict:
    if isinstance(err, RamifyError):
        out = {"error": type(err).__name__, "message": str(err), "hint": err.hint}
        if err.step is not None:
            out["step"] = err.step
        return out
    return {"error": type(err).__name__, "message": str(err), "hint": "internal error"}


def run(argv=None) -> tuple[int, str]:
    """Parse ``argv`` and return (exit status, rendered output)."""
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""
    fmt = getattr(args, "format", "json")
    try:
        status, payload = COMMANDS[args.command](args)
    except RamifyError as err:
        return err.exit_code, render(error_payload(err), fmt)
    except Exception as err:  # noqa: BLE001 - surfaced as exit 3
        return 3, render(error_payload(err), fmt)
    return status, render(payload, fmt)


def main(argv=None) -> int:
    status, text = run(argv)
    if text:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
