"""Verifier circuits for proof systems, and the formulas phi_g and Sound_g.

A proof system g is given by a total `compute` from proof strings U to
encoded formulas Y, together with a circuit family: for each pair of
lengths (|U|, |Y|) a gate list whose accept gate is 1 exactly when
compute(U) has length |Y|, and whose Y-bit gates then spell out its bits.
The trace W of a circuit is the list of all gate values plus a sentinel.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import encoding as E
from . import oracle
from . import prop as P
from . import sigma as S
from .translation import LengthProfile, translate

INPUT, CONST0, CONST1, AND, OR, NOT = "INPUT", "CONST0", "CONST1", "AND", "OR", "NOT"
ARITY = {INPUT: 0, CONST0: 0, CONST1: 0, AND: 2, OR: 2, NOT: 1}


class CircuitError(Exception):
    pass


@dataclass
class Circuit:
    """gates[g] = (op, args); INPUT args is (k,) meaning payload bit k of U."""
    gates: list
    n_inputs: int
    accept: int
    ybits: list = field(default_factory=list)

    def __post_init__(self):
        for g, (op, args) in enumerate(self.gates):
            if op not in ARITY:
                raise CircuitError(f"gate {g}: unknown op {op}")
            if op == INPUT:
                if len(args) != 1 or not 0 <= args[0] < self.n_inputs:
                    raise CircuitError(f"gate {g}: bad input index")
            elif len(args) != ARITY[op] or any(not 0 <= a < g for a in args):
                raise CircuitError(f"gate {g}: arity or ordering violation")
        for g in [self.accept, *self.ybits]:
            if not 0 <= g < len(self.gates):
                raise CircuitError("output refers to a missing gate")

    def __len__(self):
        return len(self.gates)


class CircuitBuilder:
    """Hash-consed gates with constant propagation."""

    def __init__(self, n_inputs: int):
        self.gates: list = []
        self._memo: dict = {}
        self.inputs = [self._add(INPUT, (k,)) for k in range(n_inputs)]
        self.n_inputs = n_inputs
        self.zero = self._add(CONST0, ())
        self.one = self._add(CONST1, ())

    def _add(self, op, args):
        key = (op, args)
        g = self._memo.get(key)
        if g is None:
            g = len(self.gates)
            self.gates.append((op, args))
            self._memo[key] = g
        return g

    def const(self, v) -> int:
        return self.one if v else self.zero

    def not_(self, a):
        if a == self.zero:
            return self.one
        if a == self.one:
            return self.zero
        op, args = self.gates[a]
        if op == NOT:
            return args[0]
        return self._add(NOT, (a,))

    def and_(self, a, b):
        if a == self.zero or b == self.zero:
            return self.zero
        if a == self.one:
            return b
        if b == self.one or a == b:
            return a
        return self._add(AND, (min(a, b), max(a, b)))

    def or_(self, a, b):
        if a == self.one or b == self.one:
            return self.one
        if a == self.zero:
            return b
        if b == self.zero or a == b:
            return a
        return self._add(OR, (min(a, b), max(a, b)))

    def _many(self, f, unit, xs):
        xs = list(xs)
        if not xs:
            return unit
        while len(xs) > 1:
            nxt = [f(xs[i], xs[i + 1]) for i in range(0, len(xs) - 1, 2)]
            if len(xs) % 2:
                nxt.append(xs[-1])
            xs = nxt
        return xs[0]

    def all_(self, xs):
        return self._many(self.and_, self.one, xs)

    def any_(self, xs):
        return self._many(self.or_, self.zero, xs)

    def imp_(self, a, b):
        return self.or_(self.not_(a), b)

    def exactly_one(self, xs):
        xs = list(xs)
        seen, two = self.zero, self.zero
        for x in xs:
            two = self.or_(two, self.and_(seen, x))
            seen = self.or_(seen, x)
        return self.and_(seen, self.not_(two))

    def build(self, accept: int, ybits: Sequence[int]) -> Circuit:
        return Circuit(list(self.gates), self.n_inputs, accept, list(ybits))


def run_circuit(c: Circuit, bits: Sequence[int]) -> list[int]:
    """Gate values on the given input payload bits."""
    bits = list(bits)
    if len(bits) != c.n_inputs:
        raise CircuitError(f"expected {c.n_inputs} input bits, got {len(bits)}")
    v = [0] * len(c.gates)
    for g, (op, args) in enumerate(c.gates):
        if op == INPUT:
            v[g] = 1 if bits[args[0]] else 0
        elif op == AND:
            v[g] = v[args[0]] & v[args[1]]
        elif op == OR:
            v[g] = v[args[0]] | v[args[1]]
        elif op == NOT:
            v[g] = 1 - v[args[0]]
        elif op == CONST1:
            v[g] = 1
        else:
            v[g] = 0
    return v


def trace_string(values: Sequence[int]) -> S.StringValue:
    return S.StringValue.from_payload(values)


def circuit_text(c: Circuit) -> str:
    out = [f"{g} {op}" + "".join(f" {a}" for a in args) for g, (op, args) in enumerate(c.gates)]
    out.append(f"ACCEPT {c.accept}")
    out.append("YBITS" + "".join(f" {g}" for g in c.ybits))
    return "\n".join(out) + "\n"


def parse_circuit(text: str) -> Circuit:
    gates, accept, ybits = [], None, []
    for raw in text.splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "ACCEPT":
            accept = int(parts[1])
        elif parts[0] == "YBITS":
            ybits = [int(x) for x in parts[1:]]
        else:
            gid, op = int(parts[0]), parts[1]
            if gid != len(gates):
                raise CircuitError("gate ids must be 0,1,2,...")
            gates.append((op, tuple(int(x) for x in parts[2:])))
    if accept is None:
        raise CircuitError("missing ACCEPT line")
    n_inputs = 1 + max((a[0] for op, a in gates if op == INPUT), default=-1)
    return Circuit(gates, n_inputs, accept, ybits)


# ---------------------------------------------------------------- proof systems

TOP_BITS = E.encode_records([(E.KTRUE, None, None)])
TOP_STRING = S.StringValue.from_payload(TOP_BITS)


class ProofSystemSpec:
    """A proof system: total compute, output atoms, and a circuit family."""

    def __init__(self, name: str, compute: Callable, atoms: Callable, circuit: Callable):
        self.name = name
        self._compute = compute
        self._atoms = atoms
        self._circuit = circuit
        self._circuits: dict = {}
        self._phi: dict = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"<ProofSystemSpec {self.name}>"

    def compute(self, U: S.StringValue) -> S.StringValue:
        return self._compute(U)

    def output_atoms(self, U: S.StringValue) -> list:
        return self._atoms(U)

    def output_formula(self, U: S.StringValue) -> P.Prop:
        return E.decode_formula(self.compute(U), self.output_atoms(U))

    def circuit_family(self, lenU: int, lenY: int) -> Circuit:
        key = (lenU, lenY)
        with self._lock:
            c = self._circuits.get(key)
        if c is None:
            c = self._circuit(lenU, lenY)
            with self._lock:
                self._circuits.setdefault(key, c)
        return c

    def trace(self, U: S.StringValue, lenY: int | None = None) -> list[int]:
        if lenY is None:
            lenY = self.compute(U).length
        return run_circuit(self.circuit_family(U.length, lenY), U.payload())


def _payload(U: S.StringValue) -> list[int]:
    return U.payload() if U.length else []


# ---------------------------------------------------------------- truth-table system

def tt_split(L: int):
    """(m, l) with m*(7+2m) + 2**l == L, smallest m, 0 <= l <= m; or None."""
    m = 1
    while m * E.record_width(m) < L:
        rest = L - m * E.record_width(m)
        l = rest.bit_length() - 1
        if rest == 1 << l and l <= m:
            return m, l
        m += 1
    return None


def _tt_valid(bits: list[int], m: int, l: int) -> bool:
    R = E.record_width(m)
    try:
        recs = E.decode_records(bits[: m * R])
    except E.DecodeError:
        return False
    if E.atom_count(recs) > l:
        return False
    if not all(bits[m * R:]):
        return False
    for r in range(1 << l):
        if not E.trace_of_records(recs, [r >> j & 1 for j in range(l)])[0]:
            return False
    return True


def _tt_compute(U: S.StringValue) -> S.StringValue:
    bits = _payload(U)
    sp = tt_split(len(bits)) if U.length else None
    if sp is None:
        return TOP_STRING
    m, l = sp
    if not _tt_valid(bits, m, l):
        return TOP_STRING
    return S.StringValue.from_payload(bits[: m * E.record_width(m)])


def _tt_atoms(U: S.StringValue) -> list:
    Y = _tt_compute(U)
    return E.canonical_atoms(E.atom_count(E.decode_records(Y)))


def _tt_circuit(lenU: int, lenY: int) -> Circuit:
    L = max(lenU - 1, 0)
    cb = CircuitBuilder(L)
    u = cb.inputs
    ny = max(lenY - 1, 0)
    top_len = len(TOP_BITS) + 1
    sp = tt_split(L) if lenU else None
    if sp is None:
        if lenY == top_len:
            return cb.build(cb.one, [cb.const(b) for b in TOP_BITS])
        return cb.build(cb.zero, [cb.zero] * ny)
    m, l = sp
    R = E.record_width(m)
    kind = [[u[i * R + k] for k in range(E.NKINDS)] for i in range(m)]
    left = [[u[i * R + E.NKINDS + c] for c in range(m)] for i in range(m)]
    right = [[u[i * R + E.NKINDS + m + c] for c in range(m)] for i in range(m)]
    oks = []
    for i in range(m):
        k = kind[i]
        no_l, no_r = cb.not_(cb.any_(left[i])), cb.not_(cb.any_(right[i]))
        one_l, one_r = cb.exactly_one(left[i]), cb.exactly_one(right[i])
        l_low = cb.not_(cb.any_(left[i][: i + 1]))
        r_low = cb.not_(cb.any_(right[i][: i + 1]))
        a_high = cb.not_(cb.any_(left[i][l:]))
        const_ok = cb.all_([no_l, no_r])
        atom_ok = cb.all_([one_l, a_high, no_r])
        not_ok = cb.all_([one_l, l_low, no_r])
        bin_ok = cb.all_([one_l, one_r, l_low, r_low])
        oks.append(cb.all_([
            cb.exactly_one(k),
            cb.imp_(cb.or_(k[0], k[1]), const_ok),
            cb.imp_(k[2], atom_ok),
            cb.imp_(k[3], not_ok),
            cb.imp_(cb.any_(k[4:]), bin_ok),
        ]))
    table = u[m * R:]
    roots = []
    for r in range(1 << l):
        v = [None] * m
        for i in range(m - 1, -1, -1):
            k = kind[i]
            Lv = cb.any_(cb.and_(left[i][c], v[c]) for c in range(i + 1, m))
            Rv = cb.any_(cb.and_(right[i][c], v[c]) for c in range(i + 1, m))
            av = cb.any_(left[i][j] for j in range(l) if r >> j & 1)
            v[i] = cb.any_([
                k[0],
                cb.and_(k[2], av),
                cb.and_(k[3], cb.not_(Lv)),
                cb.and_(k[4], cb.and_(Lv, Rv)),
                cb.and_(k[5], cb.or_(Lv, Rv)),
                cb.and_(k[6], cb.or_(cb.not_(Lv), Rv)),
            ])
        roots.append(v[0])
    valid = cb.all_([cb.all_(oks), cb.all_(table), cb.all_(roots)])
    lenA = m * R + 1
    abits = u[: m * R]
    if lenY == lenA and lenY == top_len:
        ys = [cb.or_(cb.and_(valid, a), cb.and_(cb.not_(valid), cb.const(t))) for a, t in zip(abits, TOP_BITS)]
        return cb.build(cb.one, ys)
    if lenY == lenA:
        return cb.build(valid, abits)
    if lenY == top_len:
        return cb.build(cb.not_(valid), [cb.const(b) for b in TOP_BITS])
    return cb.build(cb.zero, [cb.zero] * ny)


_TT = None


def truth_table_system() -> ProofSystemSpec:
    """Proofs are an encoded formula followed by its truth table (all ones)."""
    global _TT
    if _TT is None:
        _TT = ProofSystemSpec("truth-table", _tt_compute, _tt_atoms, _tt_circuit)
    return _TT


def truth_table_proof(A: P.Prop, atoms: Sequence | None = None) -> S.StringValue:
    """The truth-table system's proof of A (its table is the all-ones column)."""
    if atoms is None:
        atoms = E.default_atoms(A)
    recs = E.node_records(A, atoms)
    m, l = len(recs), len(atoms)
    if E.atom_count(recs) > m or l > m:
        raise E.EncodingError("too many atoms for the node count")
    bits = E.encode_records(recs) + [1] * (1 << l)
    if tt_split(len(bits)) != (m, l):
        raise E.EncodingError(f"proof length {len(bits)} does not split back into (m={m}, l={l})")
    return S.StringValue.from_payload(bits)


# ---------------------------------------------------------------- identity system (testing aid)

def identity_system() -> ProofSystemSpec:
    """Y := U, always accepted.  Not onto tautologies; used to exercise phi_g."""
    def circuit(lenU, lenY):
        cb = CircuitBuilder(max(lenU - 1, 0))
        if lenU == lenY:
            return cb.build(cb.one, list(cb.inputs))
        return cb.build(cb.zero, [cb.zero] * max(lenY - 1, 0))
    return ProofSystemSpec("identity", lambda U: U, lambda U: [], circuit)


# ---------------------------------------------------------------- formula systems

def formula_system_input(ns: Sequence[int]) -> S.StringValue:
    """U = 1^n1 0 1^n2 0 ... 1^nk."""
    bits: list[int] = []
    for j, n in enumerate(ns):
        if j:
            bits.append(0)
        bits.extend([1] * n)
    return S.StringValue.from_payload(bits)


def _parse_ns(bits: list[int], k: int):
    if bits.count(0) != k - 1:
        return None
    ns, run = [], 0
    for b in bits:
        if b:
            run += 1
        else:
            ns.append(run)
            run = 0
    ns.append(run)
    return tuple(ns)


def _compositions(total: int, k: int):
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


class FormulaSystem(ProofSystemSpec):
    """Proofs of the translations of one fixed bounded formula."""

    def __init__(self, phi, shape: Sequence[str], numvals: dict | None = None):
        self.phi = phi
        self.shape = tuple(shape)
        self.numvals = dict(numvals or {})
        nums, strs = S.free_variables(phi)
        if not set(strs) <= set(self.shape):
            raise ValueError(f"shape {self.shape} misses string variables {sorted(set(strs) - set(self.shape))}")
        if not nums <= set(self.numvals):
            raise ValueError("free number variables need values")
        self._trans: dict = {}
        super().__init__(f"formula[{S.render(phi)}]", self._compute_fs, self._atoms_fs, self._circuit_fs)

    def profile(self, ns) -> LengthProfile:
        return LengthProfile(dict(zip(self.shape, ns)), self.numvals)

    def translation(self, ns) -> P.Prop:
        ns = tuple(ns)
        F = self._trans.get(ns)
        if F is None:
            F = translate(self.phi, self.profile(ns))
            self._trans[ns] = F
        return F

    def encoded(self, ns):
        F = self.translation(ns)
        atoms = P.sorted_atoms(F)
        return E.encode_formula(F, atoms), atoms

    def lengths_of(self, U: S.StringValue):
        if not U.length:
            return None
        return _parse_ns(U.payload(), len(self.shape))

    def _compute_fs(self, U):
        ns = self.lengths_of(U)
        if ns is None:
            return TOP_STRING
        return self.encoded(ns)[0]

    def _atoms_fs(self, U):
        ns = self.lengths_of(U)
        if ns is None:
            return []
        return self.encoded(ns)[1]

    def _circuit_fs(self, lenU, lenY):
        L = max(lenU - 1, 0)
        cb = CircuitBuilder(L)
        u = cb.inputs
        k = len(self.shape)
        ny = max(lenY - 1, 0)
        top_len = len(TOP_BITS) + 1
        if lenU == 0 or L < k - 1:
            if lenY == top_len:
                return cb.build(cb.one, [cb.const(b) for b in TOP_BITS])
            return cb.build(cb.zero, [cb.zero] * ny)
        accepts, ybits = [], [[] for _ in range(ny)]
        good = []
        for ns in _compositions(L - (k - 1), k):
            pattern = _payload(formula_system_input(ns))
            ind = cb.all_(u[j] if b else cb.not_(u[j]) for j, b in enumerate(pattern))
            good.append(ind)
            Y, _ = self.encoded(ns)
            if Y.length != lenY:
                continue
            accepts.append(ind)
            for j, b in enumerate(Y.payload()):
                if b:
                    ybits[j].append(ind)
        if lenY == top_len:
            bad = cb.not_(cb.any_(good))
            accepts.append(bad)
            for j, b in enumerate(TOP_BITS):
                if b:
                    ybits[j].append(bad)
        return cb.build(cb.any_(accepts), [cb.any_(g) for g in ybits])


def make_formula_system(phi, shape: Sequence[str] | None = None, numvals: dict | None = None) -> FormulaSystem:
    if shape is None:
        shape = sorted(S.free_variables(phi)[1])
    return FormulaSystem(phi, shape, numvals)


def validate_formula_system(fs: FormulaSystem, cap: int, atom_cap: int | None = None) -> list:
    """The length vectors with entries <= cap whose translation is not a tautology."""
    flagged = []
    for ns in itertools.product(range(cap + 1), repeat=len(fs.shape)):
        if not oracle.is_tautology_bruteforce(fs.translation(ns), cap=atom_cap):
            flagged.append(ns)
    return flagged


# ---------------------------------------------------------------- phi_g and Sound_g

def _iff(a, b):
    return S.iff(a, b)


def gen_phi_g(spec: ProofSystemSpec, lenU: int, lenY: int, max_gates: int = 10 ** 6) -> S.Formula:
    """Gate-by-gate statement that W is the run of g's circuit on U with output Y."""
    key = (lenU, lenY)
    hit = spec._phi.get(key)
    if hit is not None:
        return hit
    c = spec.circuit_family(lenU, lenY)
    if len(c.gates) > max_gates:
        raise CircuitError(f"{len(c.gates)} gates exceeds the cap {max_gates}")
    num = S.numeral

    def w(g):
        return S.In("W", num(g))

    parts = [
        S.Eq(S.Len("U"), num(lenU)),
        S.Eq(S.Len("Y"), num(lenY)),
        S.Eq(S.Len("W"), num(len(c.gates) + 1)),
    ]
    for g, (op, args) in enumerate(c.gates):
        if op == INPUT:
            parts.append(_iff(w(g), S.In("U", num(args[0]))))
        elif op == CONST0:
            parts.append(S.Not(w(g)))
        elif op == CONST1:
            parts.append(w(g))
        elif op == NOT:
            parts.append(_iff(w(g), S.Not(w(args[0]))))
        elif op == AND:
            parts.append(_iff(w(g), S.And(w(args[0]), w(args[1]))))
        else:
            parts.append(_iff(w(g), S.Or(w(args[0]), w(args[1]))))
    parts.append(w(c.accept))
    for k, g in enumerate(c.ybits):
        parts.append(_iff(w(g), S.In("Y", num(k))))
    phi = S.conj(parts)
    spec._phi[key] = phi
    return phi


class ProfileError(Exception):
    pass


@dataclass(frozen=True)
class SoundProfile:
    lenU: int
    lenY: int
    lenX: int
    lenZ: int
    lenW: int

    def lengths(self) -> LengthProfile:
        return LengthProfile({"U": self.lenU, "W": self.lenW, "X": self.lenX, "Y": self.lenY, "Z": self.lenZ})

    def as_dict(self) -> dict:
        return {"U": self.lenU, "Y": self.lenY, "X": self.lenX, "Z": self.lenZ, "W": self.lenW}


def check_sound_profile(spec: ProofSystemSpec, prof: SoundProfile) -> None:
    m = E.nodes_for_length(prof.lenY)
    if m is None:
        raise ProfileError(f"|Y| = {prof.lenY} is not the length of an encoded formula")
    if prof.lenZ != m + 1:
        raise ProfileError(f"|Z| must be {m + 1} for {m} nodes")
    if not 1 <= prof.lenX <= m + 1:
        raise ProfileError("|X| must be 1 + atom count, at most m + 1")
    gates = len(spec.circuit_family(prof.lenU, prof.lenY).gates)
    if prof.lenW != gates + 1:
        raise ProfileError(f"|W| must be {gates + 1} for this circuit")


def build_sound_g(spec: ProofSystemSpec, lenU: int, lenY: int, lenX: int | None = None,
                  lenZ: int | None = None, lenW: int | None = None) -> S.Formula:
    """Eval(X,Y,Z) & phi_g(U,Y,W) > Z(0)."""
    if None not in (lenX, lenZ, lenW):
        check_sound_profile(spec, SoundProfile(lenU, lenY, lenX, lenZ, lenW))
    return S.Imp(S.And(E.generate_eval(), gen_phi_g(spec, lenU, lenY)), S.In("Z", S.ZERO))


def sound_profile_for(spec: ProofSystemSpec, U: S.StringValue) -> SoundProfile:
    """Lengths fixed by a proof U: its own, its output's, the trace's, and
    X, Z sized by the output's atom and node counts."""
    Y = spec.compute(U)
    recs = E.decode_records(Y)
    m = len(recs)
    l = E.atom_count(recs)
    gates = len(spec.circuit_family(U.length, Y.length).gates)
    return SoundProfile(U.length, Y.length, l + 1, m + 1, gates + 1)


def sound_g_translation(spec: ProofSystemSpec, prof: SoundProfile) -> P.Prop:
    check_sound_profile(spec, prof)
    return translate(build_sound_g(spec, prof.lenU, prof.lenY), prof.lengths())
