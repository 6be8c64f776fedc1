"""Command-line front end.

Exit codes: 10 for SAT/VALID (or a model found), 20 for UNSAT/INVALID (or
none found), 0/2 for an accepted/rejected certificate, 1 for usage, parse
and I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .certificate import check_certificate, dumps
from .formula import FormulaSyntaxError, closure, desugar, parse, to_text
from .hardness import MachineError, encode_tm, parse_tm
from .oracle import sat_search
from .rms import decide_sat, decide_valid

EXIT_YES, EXIT_NO, EXIT_ERROR = 10, 20, 1
EXIT_ACCEPT, EXIT_REJECT = 0, 2


class CliError(Exception):
    pass


def _read(arg: str) -> str:
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as e:
            raise CliError(f"cannot read {arg[1:]}: {e.strerror}")
    return arg


def _formula(arg: str):
    text = _read(arg).strip()
    try:
        return parse(text)
    except FormulaSyntaxError as e:
        raise CliError(f"formula syntax error: {e}")


def _emit(out, obj) -> None:
    out.write(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _public_stats(stats: dict) -> dict:
    return {k: v for k, v in stats.items() if k != "seconds"}


def _decide(args, out, err, valid: bool) -> int:
    f = _formula(args.formula)
    run = decide_valid if valid else decide_sat
    v = run(f, depth_bound=args.depth_bound, certificate=bool(args.json or args.cert))
    result = {"status": v.status.lower(), "formula": to_text(f), "stats": _public_stats(v.stats)}
    if v.certificate is not None:
        if args.json:
            result["certificate"] = v.certificate
        if args.cert:
            try:
                with open(args.cert, "w", encoding="utf-8") as fh:
                    fh.write(dumps(v.certificate) + "\n")
            except OSError as e:
                raise CliError(f"cannot write {args.cert}: {e.strerror}")
    _emit(out, result)
    err.write(f"{v.status} in {v.stats.get('seconds', 0)}s\n")
    return EXIT_YES if v.status in ("SAT", "VALID") else EXIT_NO


def cmd_sat(args, out, err) -> int:
    return _decide(args, out, err, valid=False)


def cmd_valid(args, out, err) -> int:
    return _decide(args, out, err, valid=True)


def cmd_check(args, out, err) -> int:
    text = _read("@" + args.certificate)
    formula = _formula(args.formula) if args.formula else None
    res = check_certificate(text, formula)
    if args.json:
        _emit(out, {"accepted": res.accepted, "path": res.path, "clause": res.clause})
    else:
        out.write(res.describe() + "\n")
    return EXIT_ACCEPT if res.accepted else EXIT_REJECT


def cmd_oracle(args, out, err) -> int:
    f = _formula(args.formula)
    if args.max_regions < 1:
        raise CliError("--max-regions must be at least 1")
    found = sat_search(f, args.max_regions)
    if args.json:
        body = {"model": None} if found is None else {"model": str(found[0]), "region": found[1]}
        _emit(out, body)
    else:
        out.write(("none" if found is None else f"{found[0]} @ region {found[1]}") + "\n")
    return EXIT_NO if found is None else EXIT_YES


def cmd_encode_tm(args, out, err) -> int:
    try:
        spec = parse_tm(_read("@" + args.machine))
    except MachineError as e:
        raise CliError(f"machine error: {e}")
    out.write(to_text(encode_tm(spec)) + "\n")
    return 0


def cmd_stats(args, out, err) -> int:
    f = _formula(args.formula)
    v = decide_sat(f, depth_bound=args.depth_bound, early_stop=False, certificate=False)
    stats = _public_stats(v.stats)
    stats["status"] = v.status.lower()
    stats["core_closure_size"] = closure(desugar(f)).size
    if args.json:
        _emit(out, stats)
    else:
        for key in ("status", "core_closure_size", "closure_size", "mpcs", "N", "depth_bound",
                    "ledger_size", "last_tag", "saturated"):
            out.write(f"{key}: {stats.get(key)}\n")
        for tag, size in stats["tag_sizes"].items():
            out.write(f"level {tag}: {size}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth-bound", type=int, default=None, help="override the 2N level bound")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized procedures")
    common.add_argument("--threads", type=int, default=1, help="worker count (runs single-threaded)")

    p = argparse.ArgumentParser(prog="rtlmosaic", parents=[common],
                                description="Decide temporal logic with Until and Since over the reals.")
    p.add_argument("--version", action="version", version=f"rtlmosaic {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("sat", cmd_sat, "decide satisfiability"), ("valid", cmd_valid, "decide validity")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("formula", help="formula text or @file")
        s.add_argument("--cert", metavar="PATH", help="write the certificate here")
        s.set_defaults(func=fn)

    s = sub.add_parser("check", parents=[common], help="verify a certificate")
    s.add_argument("certificate", help="certificate JSON file")
    s.add_argument("--formula", help="require the certificate to be for this formula")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("oracle", parents=[common], help="search interval words for a model")
    s.add_argument("formula")
    s.add_argument("--max-regions", type=int, default=5)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("encode-tm", parents=[common], help="encode a machine description")
    s.add_argument("machine", help="machine description file")
    s.set_defaults(func=cmd_encode_tm)

    s = sub.add_parser("stats", parents=[common], help="closure and ledger statistics")
    s.add_argument("formula")
    s.set_defaults(func=cmd_stats)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else 0
    try:
        return args.func(args, out, err)
    except CliError as e:
        err.write(f"error: {e}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
