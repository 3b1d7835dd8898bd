import itertools
import random

import pytest

from reducts import circuits as C
from reducts import encoding as E
from reducts import oracle as O
from reducts import prop as P
from reducts import sigma as S
from reducts.translation import translate

SV = S.StringValue.from_payload
q0, q1 = P.q(0), P.q(1)


def gate_circuit(gates, accept, ybits=()):
    n = sum(1 for op, _ in gates if op == C.INPUT)
    return C.Circuit(list(gates), n, accept, list(ybits))


def test_run_single_input():
    assert C.run_circuit(gate_circuit([(C.INPUT, (0,))], 0), [1]) == [1]


def test_run_not():
    c = gate_circuit([(C.INPUT, (0,)), (C.NOT, (0,))], 1)
    assert C.run_circuit(c, [0]) == [0, 1]


def test_run_and():
    c = gate_circuit([(C.INPUT, (0,)), (C.INPUT, (1,)), (C.AND, (0, 1))], 2)
    assert C.run_circuit(c, [1, 0])[2] == 0


def test_run_wrong_input_count():
    c = gate_circuit([(C.INPUT, (0,))], 0)
    with pytest.raises(C.CircuitError):
        C.run_circuit(c, [1, 1])


def test_forward_reference_rejected():
    with pytest.raises(C.CircuitError):
        gate_circuit([(C.AND, (0, 1)), (C.INPUT, (0,)), (C.INPUT, (1,))], 0)
    with pytest.raises(C.CircuitError):
        gate_circuit([(C.INPUT, (0,)), (C.NOT, (0, 0))], 1)


def test_builder_constant_folding():
    cb = C.CircuitBuilder(2)
    x, y = cb.inputs
    assert cb.and_(x, cb.zero) == cb.zero
    assert cb.or_(x, cb.one) == cb.one
    assert cb.and_(x, y) == cb.and_(x, y)
    assert cb.not_(cb.not_(x)) == x


def test_exactly_one():
    cb = C.CircuitBuilder(3)
    g = cb.exactly_one(cb.inputs)
    c = cb.build(g, [])
    for bits in itertools.product((0, 1), repeat=3):
        assert C.run_circuit(c, bits)[g] == (sum(bits) == 1)


def test_text_round_trip():
    c = C.truth_table_system().circuit_family(11, 10)
    d = C.parse_circuit(C.circuit_text(c))
    assert (d.gates, d.n_inputs, d.accept, d.ybits) == (c.gates, c.n_inputs, c.accept, c.ybits)
    with pytest.raises(C.CircuitError):
        C.parse_circuit("0 INPUT 0\n")


# ---- truth-table system

def test_tt_split():
    assert C.tt_split(10) == (1, 0)
    assert C.tt_split(11) == (1, 1)
    assert C.tt_split(9) is None and C.tt_split(12) is None
    assert C.tt_split(2 * 11 + 4) == (2, 2)


def test_tt_lem_round_trip():
    A = P.disj(q0, P.neg(q0))
    U = C.truth_table_proof(A)
    spec = C.truth_table_system()
    assert spec.compute(U) == E.encode_formula(A)
    # outputs are read back over the canonical atoms q1, q2, ...
    assert spec.output_formula(U) is P.disj(q1, P.neg(q1))


def test_tt_bad_row_gives_top():
    recs = E.node_records(q0, [P.Named("0")])
    U = SV(E.encode_records(recs) + [1, 1])
    assert C.truth_table_system().compute(U) == C.TOP_STRING
    assert C.truth_table_system().output_formula(U) is P.TRUE


def test_tt_three_atom_tautologies():
    rng = random.Random(7)
    from conftest import qatoms, random_prop
    got = 0
    while got < 15:
        F = random_prop(rng, qatoms(3), rng.randint(3, 9))
        if not O.is_tautology_bruteforce(F):
            continue
        atoms = P.sorted_atoms(F)
        F = P.substitute(F, {a: P.q(j + 1) for j, a in enumerate(atoms)})
        U = C.truth_table_proof(F)
        assert C.truth_table_system().output_formula(U) is F
        got += 1


def test_tt_non_tautology_refused():
    with pytest.raises(ValueError):
        from reducts.bases import truth_table_payload
        truth_table_payload(q1)


def _agrees(spec, U):
    Y = spec.compute(U)
    c = spec.circuit_family(U.length, Y.length)
    v = C.run_circuit(c, U.payload() if U.length else [])
    return v[c.accept] == 1 and [v[g] for g in c.ybits] == Y.payload()


@pytest.mark.parametrize("L", [0, 1, 2, 9, 10, 11])
def test_tt_circuit_compute_agreement_exhaustive(L):
    spec = C.truth_table_system()
    for bits in itertools.product((0, 1), repeat=L):
        assert _agrees(spec, SV(list(bits)))


def _tt_samples(rng, m, l, count):
    R = E.record_width(m)
    L = m * R + (1 << l)
    out = [SV([rng.randint(0, 1) for _ in range(L)]) for _ in range(count)]
    from conftest import qatoms, random_prop
    while len(out) < 2 * count:
        F = random_prop(rng, qatoms(max(l, 1)), m - 1)
        if not l:
            F = P.substitute(F, {a: rng.choice([P.TRUE, P.FALSE]) for a in P.atoms(F)})
        if P.node_count(F) != m:
            continue
        recs = E.node_records(F, [P.Named(str(j + 1)) for j in range(l)])
        table = [1 if E.trace_of_records(recs, [r >> j & 1 for j in range(l)])[0] else rng.randint(0, 1)
                 for r in range(1 << l)]
        out.append(SV(E.encode_records(recs) + table))
    return out


@pytest.mark.parametrize("m,l", [(2, 0), (2, 1), (2, 2), (3, 2)])
def test_tt_circuit_compute_agreement_sampled(m, l):
    rng = random.Random(m * 10 + l)
    spec = C.truth_table_system()
    for U in _tt_samples(rng, m, l, 250):
        assert _agrees(spec, U)
        Y = spec.compute(U)
        # a wrong output length is never accepted
        c = spec.circuit_family(U.length, Y.length + 1)
        assert C.run_circuit(c, U.payload())[c.accept] == 0


# ---- phi_g

def _phi_holds(spec, U, Y, W):
    phi = C.gen_phi_g(spec, U.length, Y.length)
    return S.eval_formula(phi, {"U": U, "Y": Y, "W": W})


def test_identity_phi_g_exact():
    spec = C.identity_system()
    for L in range(4):
        for u in itertools.product((0, 1), repeat=L):
            U = SV(list(u))
            c = spec.circuit_family(U.length, U.length)
            W = C.trace_string(C.run_circuit(c, list(u)))
            assert _phi_holds(spec, U, U, W)
            for y in itertools.product((0, 1), repeat=L):
                if list(y) != list(u):
                    assert not _phi_holds(spec, U, SV(list(y)), W)
            for j in range(W.length - 1):
                bad = W.payload()
                bad[j] ^= 1
                assert not _phi_holds(spec, U, U, SV(bad))


def test_phi_g_flipped_wire():
    spec = C.truth_table_system()
    U = C.truth_table_proof(P.disj(q1, P.neg(q1)))
    Y = spec.compute(U)
    W = C.trace_string(spec.trace(U))
    assert _phi_holds(spec, U, Y, W)
    rng = random.Random(3)
    for j in rng.sample(range(W.length - 1), 40):
        bad = W.payload()
        bad[j] ^= 1
        assert not _phi_holds(spec, U, Y, SV(bad))


@pytest.mark.parametrize("L", [0, 1, 10, 11])
def test_phi_g_faithful_truth_table(L):
    spec = C.truth_table_system()
    for u in itertools.product((0, 1), repeat=L):
        U = SV(list(u))
        Y = spec.compute(U)
        c = spec.circuit_family(U.length, Y.length)
        phi = S.compile_formula(C.gen_phi_g(spec, U.length, Y.length))
        W = C.trace_string(C.run_circuit(c, list(u)))
        assert phi({}, {"U": U, "Y": Y, "W": W})
        other = C.TOP_STRING if Y != C.TOP_STRING else SV([0] * (Y.length - 1))
        if other.length == Y.length:
            assert not phi({}, {"U": U, "Y": other, "W": W})


def test_phi_g_faithful_atom_count_two():
    rng = random.Random(11)
    spec = C.truth_table_system()
    seen = set()
    for U in _tt_samples(rng, 2, 2, 150) + _tt_samples(rng, 3, 2, 100):
        Y = spec.compute(U)
        W = C.trace_string(spec.trace(U))
        fn = S.compile_formula(C.gen_phi_g(spec, U.length, Y.length))
        assert fn({}, {"U": U, "Y": Y, "W": W})
        seen.add(Y == C.TOP_STRING)
        j = rng.randrange(W.length - 1)
        bad = W.payload()
        bad[j] ^= 1
        assert not fn({}, {"U": U, "Y": Y, "W": SV(bad)})
    assert seen == {True, False}


def test_phi_g_pins_lengths():
    spec = C.identity_system()
    U = SV([1, 0])
    c = spec.circuit_family(3, 3)
    W = C.trace_string(C.run_circuit(c, [1, 0]))
    assert _phi_holds(spec, U, U, W)
    assert not _phi_holds(spec, U, U, SV(W.payload() + [0]))


# ---- Sound_g

def test_sound_g_structure():
    spec = C.truth_table_system()
    prof = C.sound_profile_for(spec, C.truth_table_proof(P.disj(q1, P.neg(q1))))
    phi = C.build_sound_g(spec, prof.lenU, prof.lenY, prof.lenX, prof.lenZ, prof.lenW)
    assert isinstance(phi, S.Imp)
    assert isinstance(phi.left, S.And)
    assert phi.left.left == E.generate_eval()
    assert phi.left.right == C.gen_phi_g(spec, prof.lenU, prof.lenY)
    assert phi.right == S.In("Z", S.ZERO)


def test_sound_g_inconsistent_profile():
    spec = C.truth_table_system()
    with pytest.raises(C.ProfileError):
        C.build_sound_g(spec, 11, 10, 2, 3, 4)
    with pytest.raises(C.ProfileError):
        C.build_sound_g(spec, 11, 11, 2, 2, 4)


def _small_profiles(spec, budget):
    for lenU in range(0, budget + 2):
        for lenY in range(0, budget + 2):
            m = E.nodes_for_length(lenY)
            if m is None:
                continue
            gates = len(spec.circuit_family(lenU, lenY).gates)
            for lenX in range(1, m + 2):
                prof = C.SoundProfile(lenU, lenY, lenX, m + 1, gates + 1)
                bits = sum(max(n - 1, 0) for n in prof.as_dict().values())
                if bits <= budget:
                    yield prof


def _strings(n):
    if n == 0:
        return [S.StringValue(frozenset())]
    return [SV(list(b)) for b in itertools.product((0, 1), repeat=n - 1)]


def test_sound_g_exhaustive_small():
    spec = C.truth_table_system()
    profiles = list(_small_profiles(spec, 13))
    assert profiles
    for prof in profiles:
        fn = S.compile_formula(C.build_sound_g(spec, prof.lenU, prof.lenY))
        for U, Y, X, Z, W in itertools.product(*(_strings(n) for n in
                                                 (prof.lenU, prof.lenY, prof.lenX, prof.lenZ, prof.lenW))):
            assert fn({}, {"U": U, "Y": Y, "X": X, "Z": Z, "W": W})


@pytest.mark.parametrize("L", [10, 11])
def test_sound_g_true_on_real_proofs(L):
    # phi_g pins Y and W to the run on U, so ranging over U, X, Z covers
    # every satisfying tuple of the antecedent.
    spec = C.truth_table_system()
    for u in itertools.product((0, 1), repeat=L):
        U = SV(list(u))
        prof = C.sound_profile_for(spec, U)
        Y = spec.compute(U)
        W = C.trace_string(spec.trace(U))
        fn = S.compile_formula(C.build_sound_g(spec, prof.lenU, prof.lenY))
        m = E.nodes_for_length(Y.length)
        for lenX in range(1, m + 2):
            for X in _strings(lenX):
                for Z in _strings(m + 1):
                    assert fn({}, {"U": U, "Y": Y, "X": X, "Z": Z, "W": W})


def test_sound_g_translation_tautology():
    spec = C.truth_table_system()
    tried = 0
    for prof in _small_profiles(spec, 13):
        F = C.sound_g_translation(spec, prof)
        if len(P.atoms(F)) <= 20:
            assert O.is_tautology_bruteforce(F)
            tried += 1
    assert tried


# ---- formula systems

REFL = S.parse_formula("(all x (len X) (imp (in X x) (in X x)))")


def test_formula_system_compute():
    fs = C.make_formula_system(REFL)
    U = C.formula_system_input([4])
    assert fs.output_formula(U) is translate(REFL, fs.profile((4,)))
    assert O.is_tautology_bruteforce(fs.output_formula(U))


def test_formula_system_malformed_gives_top():
    fs = C.make_formula_system(S.parse_formula("(= (len X) (len Y))"), ["X", "Y"])
    assert fs.compute(SV([1, 1])) == C.TOP_STRING
    assert fs.compute(S.StringValue(frozenset())) == C.TOP_STRING
    assert fs.lengths_of(C.formula_system_input([2, 0])) == (2, 0)


def test_formula_system_validator_flags():
    bad = C.make_formula_system(S.parse_formula("(in X (+ (len X) 1))"))
    assert (1,) in C.validate_formula_system(bad, 3)
    assert C.validate_formula_system(C.make_formula_system(REFL), 6) == []


@pytest.mark.parametrize("L", range(0, 7))
def test_formula_system_circuit_agreement(L):
    fs = C.make_formula_system(REFL)
    for u in itertools.product((0, 1), repeat=L):
        assert _agrees(fs, SV(list(u)))


def test_formula_system_circuit_agreement_two_strings():
    fs = C.make_formula_system(S.parse_formula("(imp (= (len X) (len Y)) (= (len Y) (len X)))"), ["X", "Y"])
    for L in range(0, 5):
        for u in itertools.product((0, 1), repeat=L):
            assert _agrees(fs, SV(list(u)))


def test_formula_system_output_size_polynomial():
    import math
    import statistics
    fs = C.make_formula_system(REFL)
    ns = list(range(1, 11))
    sizes = [P.symbol_size(fs.translation((n,))) for n in ns]
    slope, _ = statistics.linear_regression([math.log(n) for n in ns], [math.log(s) for s in sizes])
    assert slope <= 2
