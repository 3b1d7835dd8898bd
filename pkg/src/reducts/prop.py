"""Hash-consed propositional formulas.

Every structurally distinct formula is represented by exactly one node, so
identity (`is`) is structural equality.  Nodes live in a weak intern table
guarded by a lock; concurrent builders therefore agree on node identity.
"""

from __future__ import annotations

import itertools
import re
import threading
import weakref
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

CONST, ATOM, NOT, AND, OR, IMP = range(6)
BINARY = (AND, OR, IMP)
_SYMBOL = {NOT: "~", AND: "&", OR: "|", IMP: ">"}
_PRETTY = {AND: "∧", OR: "∨", IMP: "⊃"}


class PropError(Exception):
    pass


class MissingAtom(PropError):
    pass


@dataclass(frozen=True, order=True)
class StringBit:
    """Bit `index` of string variable `var` (written pX.i)."""
    var: str
    index: int

    def __str__(self):
        return f"p{self.var}.{self.index}"


@dataclass(frozen=True, order=True)
class Named:
    """A free-standing atom q<label>."""
    label: str

    def __str__(self):
        return f"q{self.label}"


PropAtom = StringBit | Named


def atom_sort_key(a):
    if isinstance(a, Named):
        lab = a.label
        return (0, "", int(lab) if lab.isdigit() else -1, lab)
    return (1, a.var, a.index, "")


class Prop:
    __slots__ = ("op", "a", "b", "value", "uid", "size", "__weakref__")

    def __repr__(self):
        text = to_text(self)
        if len(text) > 80:
            text = text[:77] + "..."
        return f"<Prop {text}>"

    def __str__(self):
        return to_text(self)

    def __reduce__(self):
        return (from_text, (to_text(self),))

    @property
    def children(self):
        if self.op == NOT:
            return (self.a,)
        if self.op in BINARY:
            return (self.a, self.b)
        return ()


_table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()
_lock = threading.Lock()
_uids = itertools.count()


def _mk(op, a=None, b=None, value=None):
    if op == CONST:
        key = (CONST, value)
    elif op == ATOM:
        key = (ATOM, value)
    elif op == NOT:
        key = (NOT, a.uid)
    else:
        key = (op, a.uid, b.uid)
    node = _table.get(key)
    if node is not None:
        return node
    with _lock:
        node = _table.get(key)
        if node is not None:
            return node
        node = Prop()
        node.op, node.a, node.b, node.value = op, a, b, value
        node.uid = next(_uids)
        if op in (CONST, ATOM):
            node.size = 1
        elif op == NOT:
            node.size = 1 + a.size
        else:
            node.size = 1 + a.size + b.size
        _table[key] = node
        return node


TRUE = _mk(CONST, value=True)
FALSE = _mk(CONST, value=False)


def const(v: bool) -> Prop:
    return TRUE if v else FALSE


def atom(a) -> Prop:
    if isinstance(a, str):
        a = parse_atom(a)
    if not isinstance(a, (StringBit, Named)):
        raise TypeError(f"not an atom: {a!r}")
    return _mk(ATOM, value=a)


def q(label) -> Prop:
    return atom(Named(str(label)))


def p(var: str, index: int) -> Prop:
    return atom(StringBit(var, index))


def neg(x: Prop) -> Prop:
    return _mk(NOT, x)


def conj(x: Prop, y: Prop) -> Prop:
    return _mk(AND, x, y)


def disj(x: Prop, y: Prop) -> Prop:
    return _mk(OR, x, y)


def imp(x: Prop, y: Prop) -> Prop:
    return _mk(IMP, x, y)


def make(op, a=None, b=None):
    return _mk(op, a, b) if op in (NOT, AND, OR, IMP) else a


# Folding constructors: absorb constants, nothing else.  The result depends
# only on the (already folded or not) children, which keeps folding
# compositional: fold(substitute(F, consts)) equals rebuilding F with the
# constants in place.

def fneg(x):
    if x is TRUE:
        return FALSE
    if x is FALSE:
        return TRUE
    return _mk(NOT, x)


def fconj(x, y):
    if x is FALSE or y is FALSE:
        return FALSE
    if x is TRUE:
        return y
    if y is TRUE:
        return x
    return _mk(AND, x, y)


def fdisj(x, y):
    if x is TRUE or y is TRUE:
        return TRUE
    if x is FALSE:
        return y
    if y is FALSE:
        return x
    return _mk(OR, x, y)


def fimp(x, y):
    if x is TRUE:
        return y
    if x is FALSE:
        return TRUE
    if y is TRUE:
        return TRUE
    if y is FALSE:
        return fneg(x)
    return _mk(IMP, x, y)


FOLD = {NOT: lambda a, b: fneg(a), AND: fconj, OR: fdisj, IMP: fimp}
RAW = {NOT: lambda a, b: neg(a), AND: conj, OR: disj, IMP: imp}


def balanced(op, items, fold=True):
    """Balanced AND/OR tree over items, combined pairwise."""
    items = list(items)
    if not items:
        return TRUE if op == AND else FALSE
    comb = (FOLD if fold else RAW)[op]

    def go(lo, hi):
        if hi - lo == 1:
            return items[lo]
        mid = (lo + hi) // 2
        return comb(go(lo, mid), go(mid, hi))
    return go(0, len(items))


# ---------------------------------------------------------------- traversal

def postorder(root: Prop) -> list:
    """Distinct nodes of root, children before parents (left child first)."""
    out = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        if node.uid in seen:
            continue
        seen.add(node.uid)
        stack.append((node, True))
        if node.op == NOT:
            stack.append((node.a, False))
        elif node.op in BINARY:
            stack.append((node.b, False))
            stack.append((node.a, False))
    return out


def subformulas(F: Prop) -> list:
    """Distinct subformulas with F at index 0 and every node before its children.

    On trees this is plain left-to-right preorder.  Shared subformulas are
    placed after all of their parents (reverse of a right-to-left postorder).
    """
    out = []
    seen = set()
    stack = [(F, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        if node.uid in seen:
            continue
        seen.add(node.uid)
        stack.append((node, True))
        if node.op == NOT:
            stack.append((node.a, False))
        elif node.op in BINARY:
            stack.append((node.a, False))
            stack.append((node.b, False))
    out.reverse()
    return out


def atoms(F: Prop) -> set:
    return {n.value for n in postorder(F) if n.op == ATOM}


def sorted_atoms(F: Prop) -> list:
    return sorted(atoms(F), key=atom_sort_key)


def symbol_size(F: Prop) -> int:
    return F.size


def node_count(F: Prop) -> int:
    return len(postorder(F))


def depth(F: Prop) -> int:
    d = {}
    for n in postorder(F):
        d[n.uid] = 1 + max((d[c.uid] for c in n.children), default=0)
    return d[F.uid]


def is_closed(F: Prop) -> bool:
    return not atoms(F)


# ---------------------------------------------------------------- semantics

def eval_prop(F: Prop, assignment: Mapping) -> bool:
    val = {}
    for n in postorder(F):
        op = n.op
        if op == CONST:
            v = n.value
        elif op == ATOM:
            try:
                v = bool(assignment[n.value])
            except KeyError:
                raise MissingAtom(f"assignment lacks {n.value}") from None
        elif op == NOT:
            v = not val[n.a.uid]
        elif op == AND:
            v = val[n.a.uid] and val[n.b.uid]
        elif op == OR:
            v = val[n.a.uid] or val[n.b.uid]
        else:
            v = (not val[n.a.uid]) or val[n.b.uid]
        val[n.uid] = v
    return val[F.uid]


class Substitution:
    """Simultaneous substitution of atoms, memoised across calls."""

    def __init__(self, sigma: Mapping):
        self.sigma = {}
        for k, v in sigma.items():
            if isinstance(k, Prop):
                if k.op != ATOM:
                    raise PropError("substitution keys must be atoms")
                k = k.value
            self.sigma[k] = v
        self.memo = {}

    def __call__(self, F: Prop) -> Prop:
        memo = self.memo
        hit = memo.get(F.uid)
        if hit is not None:
            return hit
        sigma = self.sigma
        for n in postorder(F):
            if n.uid in memo:
                continue
            op = n.op
            if op == ATOM:
                r = sigma.get(n.value, n)
            elif op == CONST:
                r = n
            elif op == NOT:
                a = memo[n.a.uid]
                r = n if a is n.a else _mk(NOT, a)
            else:
                a, b = memo[n.a.uid], memo[n.b.uid]
                r = n if (a is n.a and b is n.b) else _mk(op, a, b)
            memo[n.uid] = r
        return memo[F.uid]


def substitute(F: Prop, sigma: Mapping) -> Prop:
    """Simultaneous substitution; atoms absent from sigma stay put."""
    return Substitution(sigma)(F)


def fold(F: Prop) -> Prop:
    """Rebuild F with the constant-absorbing constructors."""
    memo = {}
    for n in postorder(F):
        op = n.op
        if op in (CONST, ATOM):
            r = n
        elif op == NOT:
            r = fneg(memo[n.a.uid])
        else:
            r = FOLD[op](memo[n.a.uid], memo[n.b.uid])
        memo[n.uid] = r
    return memo[F.uid]


# ---------------------------------------------------------------- text

_ATOM_RE = re.compile(r"q([A-Za-z0-9_]+)\Z|p([A-Z][A-Za-z0-9_]*)\.(\d+)\Z")


def parse_atom(tok: str):
    m = _ATOM_RE.match(tok)
    if not m:
        raise PropError(f"bad atom {tok!r}")
    if m.group(1) is not None:
        return Named(m.group(1))
    return StringBit(m.group(2), int(m.group(3)))


def to_text(F: Prop) -> str:
    out = []
    stack = [F]
    while stack:
        n = stack.pop()
        if isinstance(n, str):
            out.append(n)
            continue
        op = n.op
        if op == CONST:
            out.append("T" if n.value else "F")
        elif op == ATOM:
            out.append(str(n.value))
        elif op == NOT:
            out.append("(~ ")
            stack.append(")")
            stack.append(n.a)
        else:
            out.append(f"({_SYMBOL[op]} ")
            stack.append(")")
            stack.append(n.b)
            stack.append(" ")
            stack.append(n.a)
    return "".join(out)


_PTOK = re.compile(r"\s*(\(|\)|[^\s();{}]+)")
_OPS = {"~": NOT, "&": AND, "|": OR, ">": IMP}


def read_formula(text: str, pos: int = 0):
    """Parse one formula starting at pos; returns (formula, end position)."""
    stack = []
    result = None
    while True:
        m = _PTOK.match(text, pos)
        if not m:
            raise PropError(f"unexpected end of formula at {pos}")
        tok = m.group(1)
        tpos = m.start(1)
        pos = m.end()
        if tok == "(":
            m2 = _PTOK.match(text, pos)
            if not m2 or m2.group(1) not in _OPS:
                raise PropError(f"expected connective at {pos}")
            stack.append((_OPS[m2.group(1)], []))
            pos = m2.end()
            continue
        if tok == ")":
            if not stack:
                raise PropError(f"unbalanced ')' at {tpos}")
            op, args = stack.pop()
            if len(args) != (1 if op == NOT else 2):
                raise PropError(f"wrong arity at {tpos}")
            node = _mk(op, *args)
        elif tok == "T":
            node = TRUE
        elif tok == "F":
            node = FALSE
        else:
            try:
                node = atom(parse_atom(tok))
            except PropError:
                raise PropError(f"bad token {tok!r} at {tpos}") from None
        if not stack:
            return node, pos
        stack[-1][1].append(node)
        if len(stack[-1][1]) > 2:
            raise PropError(f"too many arguments at {tpos}")


def from_text(text: str) -> Prop:
    F, end = read_formula(text)
    if text[end:].strip():
        raise PropError(f"trailing input at {end}")
    return F


def pretty(F: Prop) -> str:
    if F.op == CONST:
        return "⊤" if F.value else "⊥"
    if F.op == ATOM:
        a = F.value
        return f"q{a.label}" if isinstance(a, Named) else f"p^{a.var}_{a.index}"
    if F.op == NOT:
        return "¬" + pretty(F.a)
    return f"({pretty(F.a)} {_PRETTY[F.op]} {pretty(F.b)})"


def iter_assignments(atom_list) -> Iterator[dict]:
    atom_list = list(atom_list)
    for r in range(1 << len(atom_list)):
        yield {a: bool(r >> j & 1) for j, a in enumerate(atom_list)}
