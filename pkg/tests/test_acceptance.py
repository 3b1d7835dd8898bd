"""Acceptance suite.  Each test prints one PASS/FAIL line.

Run alone with `pytest tests/test_acceptance.py -v` (lines appear even
without -s), or as a script: `python tests/test_acceptance.py`.
"""

import itertools
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reducts import circuits as C  # noqa: E402
from reducts import encoding as E  # noqa: E402
from reducts import oracle as O  # noqa: E402
from reducts import prop as P  # noqa: E402
from reducts import sigma as S  # noqa: E402
from reducts import simulation as M  # noqa: E402
from reducts.bases import oracle_base  # noqa: E402
from reducts.corpus import load_corpus  # noqa: E402
from reducts.proofs import (ProofFormatError, check_fplus, check_proof, dumps_proof,  # noqa: E402
                            parse_proof, substitute_proof)
from reducts.translation import LengthProfile, semantically_valid, translate  # noqa: E402

from conftest import FIXTURES, qatoms, random_prop  # noqa: E402
from gen import proof_suite  # noqa: E402
from refcheck import reference_check  # noqa: E402

# time budgets (seconds) and sizes, one entry per criterion
BUDGET = {1: 60, 2: 60, 3: 120, 4: 30, 5: 120, 6: 60, 7: 120, 8: 60}
MAX_LEN = 8
EVAL_FORMULAS, EVAL_NODES = 200, 25
MUTATIONS = 1000
SUB_PAIRS = 100
SOUND_BITS = 14
SLOPE_MAX, R2_MIN = 3.0, 0.9
WITNESS_CAP = 3


def report(n: int, ok: bool, detail: str, seconds: float):
    within = seconds < BUDGET[n]
    verdict = "PASS" if ok and within else "FAIL"
    return ok and within, f"ACCEPTANCE {n} {verdict} {detail} ({seconds:.1f}s, budget {BUDGET[n]}s)"


# ---- 1: translation soundness over the corpus

def criterion_1():
    t0 = time.perf_counter()
    corpus = load_corpus()
    bad = []
    checked = 0
    for entry in corpus:
        phi, vs = entry.formula, entry.string_vars
        for ns in itertools.product(range(MAX_LEN + 1), repeat=len(vs)):
            prof = LengthProfile(dict(zip(vs, ns)))
            taut = O.is_tautology_bruteforce(translate(phi, prof))
            if taut != semantically_valid(phi, prof):
                bad.append((entry.name, ns))
            checked += 1
    ok = len(corpus) >= 20 and not bad
    return ok, f"{len(corpus)} formulas, {checked} length vectors, {len(bad)} disagreements", time.perf_counter() - t0


# ---- 2: Eval characterization

def criterion_2():
    t0 = time.perf_counter()
    rng = random.Random(2002)
    ev = S.compile_formula(E.generate_eval())
    failures = corruptions = 0
    for _ in range(EVAL_FORMULAS):
        F = random_prop(rng, qatoms(4), rng.randint(0, EVAL_NODES - 1))
        while P.node_count(F) > EVAL_NODES:
            F = random_prop(rng, qatoms(4), rng.randint(0, EVAL_NODES - 1))
        F = P.substitute(F, {a: P.q(j + 1) for j, a in enumerate(P.sorted_atoms(F))})
        atoms = E.default_atoms(F)
        a = {x: rng.random() < 0.5 for x in atoms}
        X, Y = E.assignment_string(a, atoms), E.encode_formula(F, atoms)
        Z = E.compute_eval_trace(F, a, atoms)
        if not ev({}, {"X": X, "Y": Y, "Z": Z}) or Z.bit(0) != P.eval_prop(F, a):
            failures += 1
        bits = Z.payload()
        for j in range(len(bits)):
            bad = list(bits)
            bad[j] ^= 1
            corruptions += 1
            if ev({}, {"X": X, "Y": Y, "Z": S.StringValue.from_payload(bad)}):
                failures += 1
    return failures == 0, f"{EVAL_FORMULAS} formulas, {corruptions} corruptions, {failures} failures", \
        time.perf_counter() - t0


# ---- 3: checker soundness harness

CONNECTIVES = ["&", "|", ">"]


def _mutants(rng, text, count):
    rows = [i for i, l in enumerate(text.splitlines()) if l.startswith("LINE ")]
    lines = text.splitlines()
    schemas = sorted(__import__("reducts.proofs", fromlist=["SCHEMAS"]).SCHEMAS)
    for _ in range(count):
        i = rng.choice(rows)
        toks = lines[i].replace("(", " ( ").replace(")", " ) ").split()
        kinds = [k for k, t in enumerate(toks) if k > 1 and t not in "()"]
        k = rng.choice(kinds)
        t = toks[k]
        if t in CONNECTIVES:
            new = rng.choice([c for c in CONNECTIVES if c != t])
        elif t in schemas:
            new = rng.choice([s for s in schemas if s != t])
        elif t.isdigit():
            new = str(max(1, int(t) + rng.choice([-2, -1, 1, 2])))
        elif t in ("T", "F"):
            new = "F" if t == "T" else "T"
        elif t.startswith("q"):
            new = rng.choice(["q1", "q2", "q3", "q4"])
        elif t in ("AX", "MP"):
            new = "MP" if t == "AX" else "AX"
        else:
            new = "q9"
        toks[k] = new
        out = list(lines)
        out[i] = " ".join(toks).replace("( ", "(").replace(" )", ")")
        yield "\n".join(out) + "\n"


def criterion_3():
    t0 = time.perf_counter()
    suite = proof_suite(3003, 60)
    suite.append(("fixture", parse_proof((FIXTURES / "excluded_middle.proof").read_text())))
    unsound = checked = 0
    for _, p in suite:
        if check_proof(p) and not p.premises and len(P.atoms(p.conclusion)) <= 12:
            checked += 1
            if not O.is_tautology_bruteforce(p.conclusion):
                unsound += 1
    rng = random.Random(3003)
    valid = [dumps_proof(p) for _, p in suite if len(p.lines) >= 3]
    silent = rejected = survived = 0
    per = MUTATIONS // len(valid) + 1
    produced = 0
    for text in valid:
        for mtext in _mutants(rng, text, per):
            if produced == MUTATIONS:
                break
            produced += 1
            try:
                mp = parse_proof(mtext)
            except ProofFormatError:
                rejected += 1
                continue
            if not check_proof(mp):
                rejected += 1
            elif reference_check(mp):
                survived += 1
            else:
                silent += 1
    ok = unsound == 0 and silent == 0 and produced == MUTATIONS and checked > 0
    return ok, (f"{checked} accepted proofs all tautological ({unsound} not); {produced} mutants: "
                f"{rejected} rejected, {survived} independently valid, {silent} silent"), time.perf_counter() - t0


# ---- 4: substitution closure

def criterion_4():
    t0 = time.perf_counter()
    rng = random.Random(4004)
    suite = [p for _, p in proof_suite(4004, SUB_PAIRS)]
    failures = 0
    for p in suite:
        names = sorted({a for line in p.lines for a in P.atoms(line.formula)}, key=lambda a: P.to_text(P.atom(a)))
        sigma = {a: random_prop(rng, qatoms(3, base=5), rng.randint(0, 4)) for a in names}
        q = substitute_proof(p, sigma)
        if not check_proof(q) or q.conclusion is not P.substitute(p.conclusion, sigma):
            failures += 1
    return failures == 0, f"{len(suite)} pairs, {failures} failures", time.perf_counter() - t0


# ---- 5: end-to-end pipeline on 2-atom tautologies

CANDIDATES = [
    "(> q1 q1)", "(| q1 (~ q1))", "(> q1 (> q2 q1))", "(> (& q1 q2) q1)",
    "(> (& q1 q2) q2)", "(> q1 (| q1 q2))", "(> q2 (| q1 q2))", "(~ (& q1 (~ q1)))",
    "(| (> q1 q2) (> q2 q1))", "(> (& q1 (> q1 q2)) q2)", "(> q1 q2)", "(| q1 q2)",
    "(& q1 (~ q2))", "(> (| q1 q2) q1)", "(~ (~ q1))", "(| (& q1 q2) (~ q1))",
]


def _depth(F):
    return 0 if F.op in (P.CONST, P.ATOM) else 1 + max(_depth(c) for c in (F.a, F.b) if c is not None)


def criterion_5():
    t0 = time.perf_counter()
    spec = C.truth_table_system()
    forms = [P.from_text(s) for s in CANDIDATES]
    assert all(_depth(F) <= 3 for F in forms)
    tauts = [F for F in forms if O.is_tautology_bruteforce(F)]
    failures = 0
    for A in tauts:
        run = M.simulate(spec, C.truth_table_proof(A), M.ORACLE)
        if not check_fplus(run.output, oracle_base()) or run.conclusion is not A:
            failures += 1
    return failures == 0 and tauts, f"{len(forms)} candidates, {len(tauts)} tautologies simulated, {failures} failures", \
        time.perf_counter() - t0


# ---- 6: Sound_g universal truth at tiny profiles

def _strings(n):
    if n == 0:
        return [S.StringValue(frozenset())]
    return [S.StringValue.from_payload(list(b)) for b in itertools.product((0, 1), repeat=n - 1)]


def criterion_6():
    t0 = time.perf_counter()
    spec = C.truth_table_system()
    profiles = []
    for lenU in range(SOUND_BITS + 2):
        for lenY in range(SOUND_BITS + 2):
            m = E.nodes_for_length(lenY)
            if m is None:
                continue
            gates = len(spec.circuit_family(lenU, lenY).gates)
            for lenX in range(1, m + 2):
                prof = C.SoundProfile(lenU, lenY, lenX, m + 1, gates + 1)
                if sum(max(n - 1, 0) for n in prof.as_dict().values()) <= SOUND_BITS:
                    profiles.append(prof)
    tuples = bad = 0
    for prof in profiles:
        fn = S.compile_formula(C.build_sound_g(spec, prof.lenU, prof.lenY, prof.lenX, prof.lenZ, prof.lenW))
        for U, Y, X, Z, W in itertools.product(*(_strings(n) for n in
                                                 (prof.lenU, prof.lenY, prof.lenX, prof.lenZ, prof.lenW))):
            tuples += 1
            if not fn({}, {"U": U, "Y": Y, "X": X, "Z": Z, "W": W}):
                bad += 1
    return bad == 0 and tuples > 0, f"{len(profiles)} profiles, {tuples} tuples, {bad} counterexamples", \
        time.perf_counter() - t0


# ---- 7: polynomiality

def criterion_7():
    t0 = time.perf_counter()
    spec = C.truth_table_system()
    inputs = [C.truth_table_proof(M.excluded_middle_family(k)) for k in range(1, 6)]
    res = M.bench_polynomiality(spec, inputs, M.ORACLE)
    ok = res.slope is not None and res.slope <= SLOPE_MAX and res.r_squared >= R2_MIN
    rows = " ".join(f"{r.input_length}:{r.proof_size}" for r in res.rows)
    return ok, f"slope {res.slope:.3f} (<= {SLOPE_MAX}), R^2 {res.r_squared:.4f} (>= {R2_MIN}); {rows}", \
        time.perf_counter() - t0


# ---- 8: formula-system constructor and membership witnesses

WITNESS_FORMULAS = ["refl", "beyond-len", "len-bound", "two-len", "sum-len"]


def criterion_8():
    t0 = time.perf_counter()
    corpus = {e.name: e for e in load_corpus()}
    flagged, rejected, proofs_total = [], [], 0
    for name in WITNESS_FORMULAS:
        entry = corpus[name]
        assert entry.status == "true"
        fs = C.make_formula_system(entry.formula, entry.string_vars)
        flagged += [(name, ns) for ns in C.validate_formula_system(fs, 4)]
        family = {}
        for ns in itertools.product(range(WITNESS_CAP + 1), repeat=len(fs.shape)):
            if sum(ns) > WITNESS_CAP:
                continue
            run = M.simulate(fs, C.formula_system_input(ns), M.ORACLE)
            family[ns] = dumps_proof(run.output).encode()
        proofs_total += len(family)
        v = M.verify_membership_witness(entry.formula, family, shape=fs.shape)
        if not v.accepted:
            rejected.append((name, sorted(v.failures)))
    ok = not flagged and not rejected
    return ok, (f"{len(WITNESS_FORMULAS)} formulas, validator flags {len(flagged)}, "
                f"{proofs_total} witness proofs, {len(rejected)} rejected families"), time.perf_counter() - t0


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance(n, capsys):
    ok, detail, seconds = CRITERIA[n]()
    passed, line = report(n, bool(ok), detail, seconds)
    with capsys.disabled():
        print("\n" + line, flush=True)
    assert passed, line


if __name__ == "__main__":
    results = []
    for n, fn in sorted(CRITERIA.items()):
        ok, detail, seconds = fn()
        passed, line = report(n, bool(ok), detail, seconds)
        print(line, flush=True)
        results.append(passed)
    sys.exit(0 if all(results) else 1)
