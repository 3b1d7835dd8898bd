"""Compiling a g-proof into an f+ proof of the same tautology.

Given a proof U0 of A in a system g, the pipeline instantiates the soundness
statement Sound_g at the lengths fixed by U0, plugs in U0, A and the circuit
trace W0, discharges the closed verifier part, renames the X and Z bits to
the atoms and subformulas of A, and closes with a Frege proof of Eval'.
"""

from __future__ import annotations

import contextlib
import gc
import json
import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import bases as B
from . import circuits as C
from . import encoding as E
from . import oracle
from . import prop as P
from . import sigma as S
from .builder import ProofBuilder
from .proofs import FPlusProof, Proof, check_fplus, check_proof, parse_proof, proof_size
from .translation import LengthProfile, translate

PREMISE, ORACLE = "premise", "oracle-import"
MODES = (PREMISE, ORACLE)


class SimulationError(Exception):
    def __init__(self, stage: str, msg: str):
        super().__init__(f"[{stage}] {msg}")
        self.stage = stage


@dataclass
class StageRecord:
    stage: str
    lines: int
    symbols: int
    cumulative: int

    def as_dict(self):
        return {"stage": self.stage, "lines added": self.lines,
                "symbols added": self.symbols, "cumulative size": self.cumulative}


@dataclass
class SimulationRun:
    system: str
    U0: S.StringValue
    A: P.Prop
    W0: S.StringValue
    mode: str
    output: object
    profile: C.SoundProfile
    ledger: list = field(default_factory=list)
    verdict: object = None
    seconds: float = 0.0

    @property
    def conclusion(self) -> P.Prop:
        return self.output.conclusion

    @property
    def size(self) -> int:
        return proof_size(self.output)

    def report_lines(self) -> list[str]:
        out = [json.dumps(r.as_dict()) for r in self.ledger]
        out.append(json.dumps({"stage": "verdict", "accepted": bool(self.verdict),
                               "verdict": str(self.verdict), "conclusion": P.to_text(self.A),
                               "size": self.size}))
        return out


class _Ledger:
    def __init__(self, b: ProofBuilder):
        self.b = b
        self.records: list[StageRecord] = []
        self._seen = 0
        self._total = 0

    def close(self, stage: str, extra: int = 0):
        new = self.b.lines[self._seen:]
        sym = extra
        for line in new:
            sym += line.formula.size
            if line.rule == "SUB":
                sym += sum(1 + v.size for _, v in line.args[1])
        self._seen = len(self.b.lines)
        self._total += sym
        self.records.append(StageRecord(stage, len(new), sym, self._total))


def _string_sub(var: str, sv: S.StringValue) -> dict:
    return {P.StringBit(var, j): P.const(sv.bit(j)) for j in range(max(sv.length - 1, 0))}


@contextlib.contextmanager
def gc_paused():
    """The pipeline allocates millions of acyclic nodes; cyclic GC only slows it."""
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def simulate(spec: C.ProofSystemSpec, U0: S.StringValue, mode: str = ORACLE,
             cap: int | None = None, reflection: bool = True, check: bool = True) -> SimulationRun:
    """Run the pipeline on U0; the returned run carries the checked output proof."""
    with gc_paused():
        return _simulate(spec, U0, mode, cap, reflection, check)


def _simulate(spec, U0, mode, cap, reflection, check) -> SimulationRun:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    t0 = time.perf_counter()
    b = ProofBuilder()
    led = _Ledger(b)

    # (1) output and trace
    stage = "compute"
    Y = spec.compute(U0)
    atoms = spec.output_atoms(U0)
    try:
        recs = E.decode_records(Y)
        A = E.records_to_formulas(recs, atoms)[0]
    except E.EncodingError as exc:
        raise SimulationError(stage, f"output does not decode: {exc}") from exc
    c = spec.circuit_family(U0.length, Y.length)
    wires = C.run_circuit(c, U0.payload() if U0.length else [])
    if not wires[c.accept]:
        raise SimulationError(stage, "circuit rejects the proof")
    W0 = C.trace_string(wires)
    prof = C.sound_profile_for(spec, U0)
    b.mark(f"stage compute: A has {len(recs)} nodes, {prof.lenX - 1} atoms; W0 has {len(wires)} wires")
    led.close(stage)

    # (2) soundness statement
    stage = "sound"
    SG = C.sound_g_translation(spec, prof)
    b.mark(f"stage sound: Sound_g at U={prof.lenU} Y={prof.lenY} X={prof.lenX} Z={prof.lenZ} W={prof.lenW}")
    imports = []
    if mode == PREMISE:
        s0 = b.premise(SG)
        extra = 0
    else:
        n_atoms = len(P.atoms(SG))
        limit = oracle.atom_cap() if cap is None else cap
        if n_atoms <= limit:
            payload = B.truth_table_payload(SG, cap=limit)
        elif reflection:
            payload = B.reflection_payload(spec, prof)
        else:
            raise SimulationError(stage, f"Sound_g has {n_atoms} atoms, over the oracle cap {limit}")
        imports.append((SG, payload))
        s0 = b.import_(0, SG)
        extra = SG.size + len(payload)
    if SG.op != P.IMP or SG.a.op != P.AND:
        raise SimulationError(stage, "unexpected shape of the soundness translation")
    led.close(stage, extra)

    # (3) plug in U0, Y, W0
    stage = "subst-1"
    b.mark("stage subst-1: U, Y, W bits := constants of U0, A, W0")
    sigma1 = {**_string_sub("U", U0), **_string_sub("Y", Y), **_string_sub("W", W0)}
    s1 = b.sub(s0, sigma1)
    led.close(stage)

    # (4) discharge the closed verifier part and fold the rest
    stage = "simplify"
    b.mark("stage simplify: closed verifier conjunct proved, Eval part folded")
    S1 = b.formula(s1)
    E1, P1, z0 = S1.a.a, S1.a.b, S1.b
    if not P.is_closed(P1):
        raise SimulationError(stage, "verifier conjunct is not closed after substitution")
    p1 = b.closed(P1)
    e_ep = b.pair(b.id_(E1), b.lift(p1, E1))
    e_z = b.trans(e_ep, s1)
    fe = b.fold_proof(E1, up=True)
    s2 = b.trans(fe, e_z)
    S2 = b.formula(s2)
    expected = translate(S.Imp(E.generate_eval(), S.In("Z", S.ZERO)),
                         E.eval_profile(len(recs), prof.lenX - 1), strings={"Y": Y})
    if S2 is not expected:
        raise SimulationError(stage, "folded statement differs from the translation of Eval > Z(0)")
    led.close(stage)

    # (5) rename X and Z bits
    stage = "subst-2"
    b.mark("stage subst-2: pX.j := atom j, pZ.i := subformula i")
    forms = E.records_to_formulas(recs, atoms)
    sigma2 = {P.StringBit("X", j): P.atom(atoms[j]) for j in range(prof.lenX - 1)}
    for i, Bi in enumerate(forms):
        sigma2[P.StringBit("Z", i)] = Bi
    s3 = b.sub(s2, sigma2)
    S3 = b.formula(s3)
    if S3.op != P.IMP or S3.b is not A:
        raise SimulationError(stage, "renamed statement does not end in A")
    led.close(stage)

    # (6) Eval' and modus ponens
    stage = "eval"
    b.mark("stage eval: Eval' proved, A by modus ponens")
    ev = E.prove_conjunctive(b, S3.a)
    final = b.mp(ev, s3)
    led.close(stage)

    proof = b.proof(final)
    output = FPlusProof(imports, proof) if mode == ORACLE else proof
    if output.conclusion is not A:
        raise SimulationError("output", "conclusion drifted from A")
    run = SimulationRun(spec.name, U0, A, W0, mode, output, prof, led.records)
    if check:
        run.verdict = verify_run(run, cap=cap, reflection=reflection)
        if not run.verdict:
            raise SimulationError("check", str(run.verdict))
    run.seconds = time.perf_counter() - t0
    return run


def verify_run(run: SimulationRun, cap: int | None = None, reflection: bool = True):
    if run.mode == ORACLE:
        return check_fplus(run.output, B.oracle_base(cap, reflection))
    return check_proof(run.output, allowed_premises=run.output.premises)


# ---------------------------------------------------------------- benchmarks

@dataclass
class BenchRow:
    input_length: int
    proof_size: int
    seconds: float


@dataclass
class BenchResult:
    rows: list
    slope: float | None
    intercept: float | None
    r_squared: float | None
    residuals: list

    def csv(self) -> str:
        out = ["input_length,proof_size,seconds"]
        out += [f"{r.input_length},{r.proof_size},{r.seconds:.4f}" for r in self.rows]
        return "\n".join(out) + "\n"


def loglog_fit(xs: Sequence[float], ys: Sequence[float]):
    """Least-squares line through (log x, log y): slope, intercept, R^2, residuals."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    if len(set(lx)) < 2:
        return None, None, None, []
    slope, icpt = statistics.linear_regression(lx, ly)
    res = [y - (slope * x + icpt) for x, y in zip(lx, ly)]
    mean = statistics.fmean(ly)
    ss_tot = sum((y - mean) ** 2 for y in ly)
    ss_res = sum(r * r for r in res)
    r2 = 1.0 if ss_tot == 0 else 1 - ss_res / ss_tot
    return slope, icpt, r2, res


def bench_polynomiality(spec: C.ProofSystemSpec, inputs: Sequence[S.StringValue],
                        mode: str = ORACLE, min_sizes: int = 4) -> BenchResult:
    if len(inputs) < min_sizes:
        raise ValueError(f"need at least {min_sizes} inputs")
    rows = []
    for U in inputs:
        run = simulate(spec, U, mode)
        rows.append(BenchRow(U.length, run.size, run.seconds))
    slope, icpt, r2, res = loglog_fit([r.input_length for r in rows], [r.proof_size for r in rows])
    return BenchResult(rows, slope, icpt, r2, res)


def excluded_middle_family(k: int) -> P.Prop:
    """(q1 | ~q1) & ... & (qk | ~qk), left-nested."""
    out = None
    for j in range(1, k + 1):
        c = P.disj(P.q(j), P.neg(P.q(j)))
        out = c if out is None else P.conj(out, c)
    return out


# ---------------------------------------------------------------- membership witnesses

@dataclass
class WitnessVerdict:
    accepted: bool
    sizes: dict
    failures: dict
    warnings: list

    def __bool__(self):
        return self.accepted


def verify_membership_witness(phi, proofs: Mapping, base=None, shape: Sequence[str] | None = None,
                              numvals: Mapping | None = None) -> WitnessVerdict:
    """Check each proof concludes exactly the translation of phi at its lengths."""
    if shape is None:
        shape = sorted(S.free_variables(phi)[1])
    base = base or B.oracle_base()
    sizes, failures, warnings = {}, {}, []
    if not proofs:
        warnings.append("no proofs supplied; vacuously accepted")
    for ns, data in proofs.items():
        ns = tuple(ns)
        try:
            p = data
            if isinstance(p, bytes):
                p = p.decode()
            if isinstance(p, str):
                p = parse_proof(p)
            target = translate(phi, LengthProfile(dict(zip(shape, ns)), dict(numvals or {})))
            if isinstance(p, FPlusProof):
                v = check_fplus(p, base)
            elif isinstance(p, Proof):
                v = check_proof(p)
            else:
                raise TypeError("not a proof")
            if not v:
                failures[ns] = str(v)
            elif p.conclusion is not target:
                failures[ns] = "conclusion differs from the translation"
            else:
                sizes[ns] = proof_size(p)
        except Exception as exc:
            failures[ns] = f"error: {exc}"
    return WitnessVerdict(not failures, sizes, failures, warnings)


