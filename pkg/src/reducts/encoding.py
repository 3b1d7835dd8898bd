"""Formulas as bit strings, the evaluation formula Eval(X, Y, Z), traces.

Layout of an encoded formula with m nodes.  Each node is a record of
R = 7 + 2m bits, node i occupying bits i*R .. i*R + R - 1:

    offset 0..6        kind, one-hot: TRUE FALSE ATOM NOT AND OR IMP
    offset 7..7+m-1    left field, one-hot: child index, or atom index
    offset 7+m..7+2m-1 right field, one-hot: second child index

Unused fields are all zero.  A final sentinel bit at position m*R makes
|Y| = m*R + 1, from which m is recovered.  Node 0 is the whole formula and
children always sit at larger indices than their parents.

An assignment to atoms a_0..a_{l-1} is the string X with X(j) = value of
a_j and a sentinel at l.  A trace Z has Z(i) = value of node i and a
sentinel at m.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Mapping, Sequence

from . import prop as P
from . import sigma as S
from .builder import ProofBuilder
from .proofs import Proof
from .translation import LengthProfile, translate

KTRUE, KFALSE, KATOM, KNOT, KAND, KOR, KIMP = range(7)
KIND_NAMES = ("TRUE", "FALSE", "ATOM", "NOT", "AND", "OR", "IMP")
NKINDS = 7
_OP_KIND = {P.NOT: KNOT, P.AND: KAND, P.OR: KOR, P.IMP: KIMP}
_KIND_OP = {v: k for k, v in _OP_KIND.items()}

NODE_CAP = 4096


class EncodingError(Exception):
    pass


class DecodeError(EncodingError):
    pass


def record_width(m: int) -> int:
    return NKINDS + 2 * m


def encoded_length(m: int) -> int:
    """|Y| for a formula with m nodes."""
    return m * record_width(m) + 1


def nodes_for_length(L: int) -> int | None:
    """The m with encoded_length(m) == L, if any."""
    if L < 1:
        return None
    # 2m^2 + 7m + 1 - L = 0
    m = int((-7 + math.isqrt(49 + 8 * (L - 1))) // 4)
    for c in (m - 1, m, m + 1):
        if c >= 1 and encoded_length(c) == L:
            return c
    return None


def default_atoms(F: P.Prop) -> list:
    """Atoms of F as q1..ql in numeric order; labels must be contiguous from 1
    (or from 0, read as q0..q_{l-1})."""
    found = P.sorted_atoms(F)
    if not found:
        return []
    labels = []
    for a in found:
        if not isinstance(a, P.Named) or not a.label.isdigit():
            raise EncodingError(f"atom {a} is not a numbered q-atom")
        labels.append(int(a.label))
    base = labels[0]
    if base not in (0, 1) or labels != list(range(base, base + len(labels))):
        raise EncodingError("atom labels must be contiguous from q1 (or q0)")
    return found


def canonical_atoms(l: int, base: int = 1) -> list:
    return [P.Named(str(base + j)) for j in range(l)]


def node_records(F: P.Prop, atoms: Sequence | None = None) -> list:
    """(kind, left, right) per node in subformula order."""
    if atoms is None:
        atoms = default_atoms(F)
    aidx = {a: j for j, a in enumerate(atoms)}
    if P.atoms(F) - set(aidx):
        raise EncodingError("formula uses atoms outside the atom list")
    nodes = P.subformulas(F)
    pos = {n.uid: i for i, n in enumerate(nodes)}
    recs = []
    for n in nodes:
        if n.op == P.CONST:
            recs.append((KTRUE if n.value else KFALSE, None, None))
        elif n.op == P.ATOM:
            recs.append((KATOM, aidx[n.value], None))
        elif n.op == P.NOT:
            recs.append((KNOT, pos[n.a.uid], None))
        else:
            recs.append((_OP_KIND[n.op], pos[n.a.uid], pos[n.b.uid]))
    return recs


def encode_records(recs: Sequence) -> list[int]:
    m = len(recs)
    R = record_width(m)
    bits = [0] * (m * R)
    for i, (kind, left, right) in enumerate(recs):
        b = i * R
        bits[b + kind] = 1
        if left is not None:
            if not 0 <= left < m:
                raise EncodingError("field index out of range")
            bits[b + NKINDS + left] = 1
        if right is not None:
            bits[b + NKINDS + m + right] = 1
    return bits


def encode_formula(F: P.Prop, atoms: Sequence | None = None) -> S.StringValue:
    recs = node_records(F, atoms)
    if len(recs) > NODE_CAP:
        raise EncodingError(f"more than {NODE_CAP} nodes")
    if atom_count(recs) > len(recs):
        raise EncodingError("atom index does not fit the node count")
    return S.StringValue.from_payload(encode_records(recs))


def _one_hot(bits, lo, width):
    hits = [j for j in range(width) if bits[lo + j]]
    return hits


def decode_records(Y, strict: bool = True) -> list:
    """Node records of an encoded formula; raises DecodeError if malformed."""
    if isinstance(Y, S.StringValue):
        m = nodes_for_length(Y.length)
        bits = Y.payload()
    else:
        bits = list(Y)
        m = nodes_for_length(len(bits) + 1)
    if m is None:
        raise DecodeError("length is not m*(7+2m)+1")
    R = record_width(m)
    recs = []
    for i in range(m):
        b = i * R
        kinds = _one_hot(bits, b, NKINDS)
        left = _one_hot(bits, b + NKINDS, m)
        right = _one_hot(bits, b + NKINDS + m, m)
        if len(kinds) != 1:
            raise DecodeError(f"node {i}: kind is not one-hot")
        k = kinds[0]
        if k in (KTRUE, KFALSE):
            if left or right:
                raise DecodeError(f"node {i}: constant with fields set")
            recs.append((k, None, None))
        elif k == KATOM:
            if len(left) != 1 or right:
                raise DecodeError(f"node {i}: bad atom field")
            recs.append((k, left[0], None))
        elif k == KNOT:
            if len(left) != 1 or right or left[0] <= i:
                raise DecodeError(f"node {i}: bad negation child")
            recs.append((k, left[0], None))
        else:
            if len(left) != 1 or len(right) != 1 or left[0] <= i or right[0] <= i:
                raise DecodeError(f"node {i}: bad children")
            recs.append((k, left[0], right[0]))
    if strict:
        natoms = 1 + max((r[1] for r in recs if r[0] == KATOM), default=-1)
        if natoms > m:
            raise DecodeError("atom index beyond node count")
    return recs


def atom_count(recs) -> int:
    return 1 + max((r[1] for r in recs if r[0] == KATOM), default=-1)


def records_to_formulas(recs, atoms: Sequence | None = None) -> list:
    """The formula rooted at each node."""
    if atoms is None:
        atoms = canonical_atoms(atom_count(recs))
    out = [None] * len(recs)
    for i in range(len(recs) - 1, -1, -1):
        k, l, r = recs[i]
        if k == KTRUE:
            out[i] = P.TRUE
        elif k == KFALSE:
            out[i] = P.FALSE
        elif k == KATOM:
            out[i] = P.atom(atoms[l])
        elif k == KNOT:
            out[i] = P.neg(out[l])
        else:
            out[i] = P.make(_KIND_OP[k], out[l], out[r])
    return out


def decode_formula(Y, atoms: Sequence | None = None) -> P.Prop:
    return records_to_formulas(decode_records(Y), atoms)[0]


def node_formulas(Y, atoms: Sequence | None = None) -> list:
    return records_to_formulas(decode_records(Y), atoms)


# ---------------------------------------------------------------- assignments and traces

def assignment_string(a: Mapping, atoms: Sequence) -> S.StringValue:
    return S.StringValue.from_payload([int(bool(a[x])) for x in atoms])


def trace_of_records(recs, xbits: Sequence) -> list[int]:
    v = [0] * len(recs)
    for i in range(len(recs) - 1, -1, -1):
        k, l, r = recs[i]
        if k == KTRUE:
            x = 1
        elif k == KFALSE:
            x = 0
        elif k == KATOM:
            x = int(bool(xbits[l])) if l < len(xbits) else 0
        elif k == KNOT:
            x = 1 - v[l]
        elif k == KAND:
            x = v[l] & v[r]
        elif k == KOR:
            x = v[l] | v[r]
        else:
            x = (1 - v[l]) | v[r]
        v[i] = x
    return v


def compute_eval_trace(F: P.Prop, a: Mapping, atoms: Sequence | None = None) -> S.StringValue:
    """Z with Z(i) = value of subformula i under a, plus the sentinel."""
    nodes = P.subformulas(F)
    vals = []
    for n in nodes:
        vals.append(int(P.eval_prop(n, a)))
    return S.StringValue.from_payload(vals)


# ---------------------------------------------------------------- Eval

def _eval_formula() -> S.Formula:
    num = S.numeral
    m, i, c = S.NumVar("m"), S.NumVar("i"), S.NumVar("c")
    seven = num(7)
    b = S.Mul(i, S.Add(S.Add(seven, m), m))

    def ybit(k):
        return S.In("Y", S.Add(b, num(k)))

    def below(x, bound):
        return S.Leq(S.Add(x, S.ONE), bound)

    def field_lookup(offset, target):
        return S.Exists("c", m, S.And(below(c, m), S.And(S.In("Y", S.Add(offset, c)), S.In(target, c))))

    lft = S.Add(b, seven)
    rgt = S.Add(S.Add(b, seven), m)
    LV = field_lookup(lft, "Z")
    RV = field_lookup(rgt, "Z")
    AV = field_lookup(lft, "X")
    zi = S.In("Z", i)
    node = S.conj([
        S.Imp(ybit(KTRUE), zi),
        S.Imp(ybit(KFALSE), S.Not(zi)),
        S.Imp(ybit(KATOM), S.iff(zi, AV)),
        S.Imp(ybit(KNOT), S.iff(zi, S.Not(LV))),
        S.Imp(ybit(KAND), S.iff(zi, S.And(LV, RV))),
        S.Imp(ybit(KOR), S.iff(zi, S.Or(LV, RV))),
        S.Imp(ybit(KIMP), S.iff(zi, S.Imp(LV, RV))),
    ])
    shape = S.Eq(S.Len("Y"), S.Add(S.Mul(m, S.Add(S.Add(seven, m), m)), S.ONE))
    zlen = S.Eq(S.Len("Z"), S.Add(m, S.ONE))
    body = S.Forall("i", m, S.Imp(below(i, m), node))
    return S.Exists("m", S.Len("Y"), S.And(shape, S.And(zlen, body)))


@lru_cache(maxsize=None)
def generate_eval() -> S.Formula:
    """The fixed formula Eval(X, Y, Z)."""
    return _eval_formula()


def eval_profile(m: int, l: int) -> LengthProfile:
    return LengthProfile({"X": l + 1, "Y": encoded_length(m), "Z": m + 1})


def eval_prime_source(Y: S.StringValue, l: int) -> P.Prop:
    """Translation of Eval with Y fixed: a conjunction over nodes, atoms pX.j and pZ.i."""
    m = nodes_for_length(Y.length)
    if m is None:
        raise DecodeError("not an encoded formula")
    return translate(generate_eval(), eval_profile(m, l), strings={"Y": Y})


def eval_substitution(Y: S.StringValue, atoms: Sequence) -> dict:
    """pX.j -> atoms[j], pZ.i -> formula at node i."""
    forms = node_formulas(Y, atoms)
    sigma = {P.StringBit("X", j): P.atom(a) for j, a in enumerate(atoms)}
    for i, B in enumerate(forms):
        sigma[P.StringBit("Z", i)] = B
    return sigma


def eval_prime(Y: S.StringValue, atoms: Sequence) -> P.Prop:
    return P.substitute(eval_prime_source(Y, len(atoms)), eval_substitution(Y, atoms))


def prove_conjunctive(b: ProofBuilder, F: P.Prop) -> int:
    """Prove a conjunction of self-evident pieces: x > x, T, ~F, small tautologies."""
    memo: dict[int, int] = {}
    for n in _conj_postorder(F):
        if n.uid in memo:
            continue
        if n.op == P.AND:
            memo[n.uid] = b.conj_intro(memo[n.a.uid], memo[n.b.uid])
        elif n.op == P.IMP and n.a is n.b:
            memo[n.uid] = b.id_(n.a)
        elif n is P.TRUE:
            memo[n.uid] = b.top()
        elif n.op == P.NOT and n.a is P.FALSE:
            memo[n.uid] = b.not_bot()
        elif P.is_closed(n):
            memo[n.uid] = b.closed(n)
        else:
            memo[n.uid] = b.tautology(n)
    return memo[F.uid]


def _conj_postorder(F):
    """Postorder that only descends through conjunctions."""
    out, seen, stack = [], set(), [(F, False)]
    while stack:
        n, done = stack.pop()
        if done:
            out.append(n)
            continue
        if n.uid in seen:
            continue
        seen.add(n.uid)
        stack.append((n, True))
        if n.op == P.AND:
            stack.append((n.b, False))
            stack.append((n.a, False))
    return out


def prove_eval_prime(A: P.Prop, atoms: Sequence | None = None, Y: S.StringValue | None = None) -> Proof:
    """Frege proof of Eval' for A (or for the encoded formula Y)."""
    if atoms is None:
        atoms = default_atoms(A) if Y is None else canonical_atoms(atom_count(decode_records(Y)))
    if Y is None:
        Y = encode_formula(A, atoms)
    if nodes_for_length(Y.length) > NODE_CAP:
        raise EncodingError("node cap exceeded")
    E = eval_prime(Y, atoms)
    b = ProofBuilder()
    return b.proof(prove_conjunctive(b, E))
