"""Command-line front end.

Exit status: 0 success, 1 semantic negative (invalid proof, no proof found,
non-maximal under ``--assert-maximal``), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis, rewrite, search
from .kernel import EXPERIMENTAL, STRICT, NotSpentError, check, dsize, format_path
from .proofio import (
    ProofFormatError, ReconstructionError, load_proof, parse_sequent, print_proof,
    print_sequent, proof_to_json, sequent_to_json,
)
from .sexpr import SExprError
from .syntax import FormulaSyntaxError, PolarityError

OK, NEGATIVE, USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _color_enabled(stream) -> bool:
    flag = os.environ.get("LLMFOC_COLOR")
    if flag is not None:
        return flag == "1"
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, code: str, stream) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if _color_enabled(stream) else text


class Output:
    def __init__(self, path: str | None):
        self.path = path
        self.chunks = []

    def write(self, text: str):
        self.chunks.append(text if text.endswith("\n") else text + "\n")

    def flush(self):
        text = "".join(self.chunks)
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _load(path):
    try:
        return load_proof(path)
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None


def _emit_json(out, obj):
    out.write(json.dumps(obj, indent=2, ensure_ascii=False))


# -- commands ---------------------------------------------------------------------

def cmd_check(args, out):
    status = OK
    results = []
    mode = EXPERIMENTAL if args.experimental else STRICT
    for path in args.files:
        try:
            d = _load(path)
        except ReconstructionError as exc:
            msgs = [f"{format_path(exc.path)}: {exc.rule}: {c}" for c in exc.clauses]
            results.append((path, msgs))
            status = NEGATIVE
            continue
        report = check(d, mode)
        msgs = [str(v) for v in report.violations]
        if msgs:
            status = NEGATIVE
        results.append((path, msgs))
    if args.json:
        _emit_json(out, [{"file": p, "ok": not m, "violations": m} for p, m in results])
        return status
    many = len(results) > 1
    for path, msgs in results:
        prefix = f"{path}: " if many else ""
        if not msgs:
            out.write(prefix + _paint("ok", "32", sys.stdout))
        for m in msgs:
            out.write(prefix + _paint("violation", "31", sys.stdout) + " " + m)
    return status


def cmd_cutelim(args, out):
    d = _load(args.file)
    try:
        result, trace = rewrite.normalize(d, flexible=args.flexible, paranoid=args.paranoid)
    except rewrite.IllFormedCut as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    except rewrite.InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    if args.json:
        obj = {"proof": proof_to_json(result), "cut_free": True,
               "valid": check(result).ok, "coercions": trace.coercions}
        if args.trace:
            obj["trace"] = trace.as_dict()["steps"]
        _emit_json(out, obj)
    else:
        out.write(print_proof(result))
        if args.trace:
            for line in trace.lines():
                print(line, file=sys.stderr)
        for c in trace.coercions:
            print(f"coercion {c}", file=sys.stderr)
    return OK


def cmd_decompose(args, out):
    d = _load(args.file)
    try:
        res = rewrite.decompose(d, args.focus)
    except rewrite.InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    core, steps, total = dsize(res.core), res.suffix.size, dsize(d)
    if args.json:
        _emit_json(out, {
            "core": proof_to_json(res.core),
            "sigma": sequent_to_json(res.core.conclusion)["ctx"],
            "suffix": [s.describe() for s in res.suffix.steps],
            "sizes": {"core": core, "suffix": steps, "input": total, "exact": core + steps == total},
        })
        return OK
    out.write(print_proof(res.core))
    out.write(f"; sigma: {', '.join(map(str, res.sigma)) or '.'}")
    for s in res.suffix.steps:
        out.write(f"; suffix {s.describe()}")
    verdict = "exact" if core + steps == total else "MISMATCH"
    out.write(f"; size core={core} suffix={steps} input={total} {verdict}")
    return OK


def cmd_lower(args, out):
    d = _load(args.file)
    try:
        res = rewrite.lower_deriv(d, args.focus)
    except (NotSpentError, rewrite.InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    if args.json:
        _emit_json(out, {"proof": proof_to_json(res)})
    else:
        out.write(print_proof(res))
    return OK


def cmd_erase(args, out):
    d = _load(args.file)
    try:
        u = analysis.erase_derivation(d)
    except analysis.AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    problems = analysis.check_dyadic(u)
    if args.json:
        _emit_json(out, {"proof": analysis.uderiv_to_json(u), "valid": not problems,
                         "violations": problems})
    else:
        out.write(analysis.print_uderiv(u))
        out.write("; dyadic: " + ("valid" if not problems else "INVALID"))
        for p in problems:
            out.write(f"; {p}")
    return OK if not problems else NEGATIVE


def cmd_phases(args, out):
    d = _load(args.file)
    try:
        ps = analysis.phases(d)
    except analysis.AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    root = analysis.root_segment(d)
    if args.json:
        def js(p):
            return {"decide": None if p.path is None else format_path(p.path),
                    "foci": [str(f) for f in p.foci],
                    "nodes": [format_path(n) for n in p.nodes],
                    "releases": [format_path(n) for n in p.releases]}
        _emit_json(out, {"phases": [js(p) for p in ps], "root": js(root) if root else None})
        return OK
    out.write(f"phases: {len(ps)}")
    for p in ps:
        out.write(p.describe())
    if root is not None:
        out.write(root.describe())
    return OK


def cmd_maximal(args, out):
    d = _load(args.file)
    try:
        report = analysis.check_maximal(d, args.depth, copy_cap=args.copy_cap)
    except analysis.AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    if args.json:
        _emit_json(out, {"depth": args.depth, "nodes": [
            {"path": format_path(v.path), "status": v.status,
             "formula": None if v.formula is None else str(v.formula),
             "witness": None if v.witness is None else proof_to_json(v.witness)}
            for v in report.verdicts]})
    else:
        for line in report.lines():
            out.write(line)
    if args.assert_maximal and not report.all_maximal:
        return NEGATIVE
    return OK


def cmd_search(args, out):
    try:
        seq = parse_sequent(args.sequent)
    except (ProofFormatError, FormulaSyntaxError, PolarityError, SExprError) as exc:
        raise _Usage(str(exc)) from None
    budget = search.SearchBudget(depth=args.depth, limit=args.limit, copy_cap=args.copy_cap)
    try:
        if args.all:
            proofs, cutoff = search.enumerate_with_status(seq, budget)
        else:
            first, cutoff = search.prove_with_status(seq, budget)
            proofs = [first] if first is not None else []
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    if args.json:
        _emit_json(out, {"sequent": print_sequent(seq), "count": len(proofs),
                         "hit_cutoff": cutoff, "proofs": [proof_to_json(p) for p in proofs]})
    else:
        if not proofs:
            out.write("; no proof found" + (" (depth bound reached)" if cutoff else ""))
        for p in proofs:
            out.write(print_proof(p))
        if args.all:
            out.write(f"; {len(proofs)} proof(s)")
    return OK if proofs else NEGATIVE


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("-o", "--output", metavar="FILE", help="write results to FILE")

    parser = argparse.ArgumentParser(prog="llmfoc", description="Multifocused linear logic proof toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check proof files")
    p.add_argument("files", nargs="+")
    p.add_argument("--experimental", action="store_true", help="admit acut")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("cutelim", parents=[common], help="eliminate all cuts")
    p.add_argument("file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="flexible", action="store_false")
    mode.add_argument("--flexible", dest="flexible", action="store_true")
    p.add_argument("--trace", action="store_true", help="print reduction steps to stderr")
    p.add_argument("--paranoid", action="store_true", help="check after every step")
    p.set_defaults(func=cmd_cutelim, flexible=False)

    p = sub.add_parser("decompose", parents=[common], help="split off a spent core")
    p.add_argument("file")
    p.add_argument("--focus", type=int, required=True, help="index into the conclusion context")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("lower", parents=[common], help="lower spent foci")
    p.add_argument("file")
    p.add_argument("--focus", type=int, default=None)
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("erase", parents=[common], help="erase to a dyadic proof")
    p.add_argument("file")
    p.set_defaults(func=cmd_erase)

    p = sub.add_parser("phases", parents=[common], help="list focusing phases")
    p.add_argument("file")
    p.set_defaults(func=cmd_phases)

    p = sub.add_parser("maximal", parents=[common], help="probe decide nodes for extra foci")
    p.add_argument("file")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--copy-cap", type=int, default=2)
    p.add_argument("--assert-maximal", action="store_true")
    p.set_defaults(func=cmd_maximal)

    p = sub.add_parser("search", parents=[common], help="bounded proof search")
    p.add_argument("sequent")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--all", action="store_true")
    p.add_argument("--limit", type=int, default=10_000)
    p.add_argument("--copy-cap", type=int, default=2)
    p.set_defaults(func=cmd_search)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    out = Output(args.output)
    try:
        status = args.func(args, out)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (ProofFormatError, FormulaSyntaxError, PolarityError, SExprError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return USAGE
    except ReconstructionError as exc:
        print(f"invalid proof: {exc}", file=sys.stderr)
        return NEGATIVE
    out.flush()
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
