"""Command-line entry point.

Exit codes: 0 success, 1 semantic rejection, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bases as B
from . import circuits as C
from . import encoding as E
from . import oracle
from . import prop as P
from . import sigma as S
from . import simulation as M
from .proofs import FPlusProof, ProofFormatError, check_fplus, check_proof, dumps_proof, parse_proof
from .translation import TranslationError, parse_profile, semantically_valid, translate

OK, REJECT, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _formula(path: str) -> S.Formula:
    return S.parse_formula(_read(path))


def _bits(text: str) -> list[int]:
    bits = [c for c in text if not c.isspace()]
    if any(c not in "01" for c in bits):
        raise UsageError("g-proof files hold a 0/1 payload string")
    return [int(c) for c in bits]


def _lengths(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad length list {text!r}") from exc


# ---------------------------------------------------------------- subcommands

def cmd_translate(args) -> int:
    phi = _formula(args.formula)
    F = translate(phi, parse_profile(args.profile), fold=not args.no_fold)
    _write(args.output, P.to_text(F) + "\n")
    return OK


def cmd_check(args) -> int:
    proof = parse_proof(_read(args.proof))
    premises = []
    if args.premises:
        premises = [P.from_text(line) for line in _read(args.premises).splitlines() if line.strip()]
    if isinstance(proof, FPlusProof):
        v = check_fplus(proof, B.BASES[args.base](args.cap), strict=args.strict)
    else:
        v = check_proof(proof, premises, strict=args.strict)
    print(v)
    return OK if v else REJECT


def _system(args):
    if args.system == "truth-table":
        return C.truth_table_system()
    if args.system == "formula":
        if not args.formula:
            raise UsageError("--formula is required for the formula system")
        phi = _formula(args.formula)
        shape = args.shape.split(",") if args.shape else None
        return C.make_formula_system(phi, shape)
    raise UsageError(f"unknown system {args.system!r}")


def _g_proof(args, spec):
    if args.proof:
        return S.StringValue.from_payload(_bits(_read(args.proof)))
    if args.tautology:
        return C.truth_table_proof(P.from_text(_read(args.tautology)))
    if args.lengths:
        if not isinstance(spec, C.FormulaSystem):
            raise UsageError("--lengths only applies to the formula system")
        return C.formula_system_input(_lengths(args.lengths))
    raise UsageError("give one of --proof, --tautology, --lengths")


def cmd_simulate(args) -> int:
    spec = _system(args)
    U = _g_proof(args, spec)
    try:
        run = M.simulate(spec, U, args.mode, cap=args.cap)
    except M.SimulationError as exc:
        print(json.dumps({"stage": exc.stage, "error": str(exc)}))
        return REJECT
    _write(args.output, dumps_proof(run.output))
    report = "\n".join(run.report_lines()) + "\n"
    if args.report:
        _write(args.report, report)
    else:
        sys.stderr.write(report)
    return OK


def cmd_oracle(args) -> int:
    phi = _formula(args.formula)
    prof = parse_profile(args.profile)
    F = translate(phi, prof)
    taut = oracle.is_tautology_bruteforce(F, cap=args.cap)
    out = {"profile": str(prof), "atoms": len(P.atoms(F)), "taut": taut}
    if len(prof.lengths) <= 2 and all(n <= 8 for n in prof.lengths.values()):
        sem = semantically_valid(phi, prof)
        out["semantic"] = sem
        out["agree"] = sem == taut
    print(json.dumps(out))
    if out.get("agree") is False:
        return REJECT
    return OK if taut else REJECT


def cmd_evalgen(args) -> int:
    phi = E.generate_eval()
    if args.nodes is None:
        _write(args.output, S.render(phi) + "\n")
        return OK
    F = translate(phi, E.eval_profile(args.nodes, args.atoms))
    _write(args.output, P.to_text(F) + "\n")
    return OK


def cmd_bench(args) -> int:
    spec = _system(args)
    if args.system == "truth-table":
        sizes = _lengths(args.sizes or "1,2,3,4,5")
        inputs = [C.truth_table_proof(M.excluded_middle_family(k)) for k in sizes]
    else:
        sizes = _lengths(args.sizes or "1,2,3,4,5,6")
        inputs = [C.formula_system_input([n] * len(spec.shape)) for n in sizes]
    if len(inputs) < 4:
        rows = []
        for U in inputs:
            run = M.simulate(spec, U, args.mode)
            rows.append(M.BenchRow(U.length, run.size, run.seconds))
        res = M.BenchResult(rows, None, None, None, [])
        sys.stderr.write("warning: fewer than 4 sizes, slope omitted\n")
    else:
        res = M.bench_polynomiality(spec, inputs, args.mode)
    text = res.csv()
    if not args.timings:
        text = "\n".join(",".join(line.split(",")[:2]) for line in text.splitlines()) + "\n"
    if res.slope is not None:
        text += f"# slope={res.slope:.4f} r2={res.r_squared:.4f}\n"
    _write(args.output, text)
    return OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reducts", description="Bounded-formula translations and proof compilation.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("translate", help="propositional translation at fixed lengths")
    p.add_argument("formula")
    p.add_argument("--profile", required=True, help="e.g. X=3,Y=2;x=1")
    p.add_argument("--no-fold", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("check", help="check a proof file")
    p.add_argument("proof")
    p.add_argument("--premises", help="file with one allowed premise per line")
    p.add_argument("--base", choices=sorted(B.BASES), default="oracle")
    p.add_argument("--cap", type=int)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(fn=cmd_check)

    def system_args(p):
        p.add_argument("--system", default="truth-table", help="truth-table or formula")
        p.add_argument("--formula", help="bounded formula file for the formula system")
        p.add_argument("--shape", help="string variable order, e.g. X,Y")
        p.add_argument("--mode", choices=M.MODES, default=M.ORACLE)

    p = sub.add_parser("simulate", help="compile a g-proof into an f+ proof")
    system_args(p)
    p.add_argument("--proof", help="file with the g-proof payload as 0/1 text")
    p.add_argument("--tautology", help="propositional formula file; uses its truth-table proof")
    p.add_argument("--lengths", help="formula system input, e.g. 3 or 2,4")
    p.add_argument("--cap", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--report", help="SIMRUN JSON-lines output (default stderr)")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("oracle", help="brute-force tautology check with semantic cross-check")
    p.add_argument("formula")
    p.add_argument("--profile", required=True)
    p.add_argument("--cap", type=int)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("evalgen", help="print Eval, or its translation")
    p.add_argument("--nodes", type=int)
    p.add_argument("--atoms", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_evalgen)

    p = sub.add_parser("bench", help="proof size against input size")
    system_args(p)
    p.add_argument("--sizes", help="comma list of family parameters")
    p.add_argument("--timings", action="store_true", help="include wall-clock column")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UsageError, S.SigmaError, P.PropError, ProofFormatError, TranslationError,
            E.EncodingError, C.CircuitError, C.ProfileError, oracle.AtomCapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
