"""Two-sorted bounded formulas: syntax, S-expression parser, semantics.

Number terms are built from 0, 1, +, * and string lengths |X|.  Formulas
use =, <=, membership X(t), the propositional connectives and number
quantifiers whose bound is an explicit term.  String variables are free
only; there are no string quantifiers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Union


class SigmaError(Exception):
    pass


class ParseError(SigmaError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class DisciplineError(ParseError):
    """Raised for constructs outside the bounded, number-quantifier fragment."""


class UnboundVariable(SigmaError):
    pass


# ---------------------------------------------------------------- strings

@dataclass(frozen=True)
class StringValue:
    """A finite set of naturals read as a bit string.

    The length is one plus the largest element, so the top bit of every
    non-empty string is set.
    """

    elements: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.elements, frozenset):
            object.__setattr__(self, "elements", frozenset(self.elements))
        if any((not isinstance(e, int)) or e < 0 for e in self.elements):
            raise ValueError("string elements must be naturals")

    @property
    def length(self) -> int:
        return max(self.elements) + 1 if self.elements else 0

    def bit(self, t: int) -> bool:
        return t in self.elements

    def payload(self) -> list[int]:
        """Bits below the forced top bit."""
        return [int(i in self.elements) for i in range(max(self.length - 1, 0))]

    @classmethod
    def from_payload(cls, bits: Iterable[int]) -> "StringValue":
        bits = list(bits)
        elems = {i for i, b in enumerate(bits) if b}
        elems.add(len(bits))
        return cls(frozenset(elems))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "StringValue":
        return cls(frozenset(i for i, b in enumerate(bits) if b))

    def __repr__(self):
        return f"StringValue({sorted(self.elements)})"


def strings_of_length(n: int):
    """All strings with |X| = n."""
    if n == 0:
        yield StringValue()
        return
    for mask in range(1 << (n - 1)):
        yield StringValue(frozenset([i for i in range(n - 1) if mask >> i & 1] + [n - 1]))


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class NumVar:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Len:
    var: str


Term = Union[Zero, One, NumVar, Add, Mul, Len]

ZERO = Zero()
ONE = One()


@lru_cache(maxsize=None)
@lru_cache(maxsize=1 << 16)
def numeral(k: int) -> Term:
    """A closed term denoting k, built by binary Horner expansion."""
    if k < 0:
        raise ValueError("numerals are naturals")
    if k == 0:
        return ZERO
    if k == 1:
        return ONE
    half = Mul(numeral(k // 2), Add(ONE, ONE))
    return Add(half, ONE) if k % 2 else half


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Leq:
    left: Term
    right: Term


@dataclass(frozen=True)
class In:
    var: str
    term: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    bound: Term
    body: "Formula"

    def __post_init__(self):
        _check_binder(self.var, self.bound)


@dataclass(frozen=True)
class Exists:
    var: str
    bound: Term
    body: "Formula"

    def __post_init__(self):
        _check_binder(self.var, self.bound)


Formula = Union[Eq, Leq, In, Not, And, Or, Imp, Forall, Exists]

_NUMVAR = re.compile(r"[a-z][a-z0-9_]*\Z")
_STRVAR = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
_RESERVED = {"len", "in", "not", "and", "or", "imp", "all", "ex"}


def _check_binder(var, bound):
    if not isinstance(var, str) or not _NUMVAR.match(var) or var in _RESERVED:
        raise DisciplineError(f"quantified variable {var!r} is not a number variable", 0)
    if var in term_variables(bound)[0]:
        raise DisciplineError(f"bound term mentions its own variable {var}", 0)


def conj(items: Iterable[Formula]) -> Formula:
    """Balanced conjunction; the empty conjunction is 0 = 0."""
    items = list(items)
    if not items:
        return Eq(ZERO, ZERO)
    return _balanced(And, items, 0, len(items))


def disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return Eq(ZERO, ONE)
    return _balanced(Or, items, 0, len(items))


def _balanced(cls, items, lo, hi):
    if hi - lo == 1:
        return items[lo]
    mid = (lo + hi) // 2
    return cls(_balanced(cls, items, lo, mid), _balanced(cls, items, mid, hi))


def iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def lt(a: Term, b: Term) -> Formula:
    return Leq(Add(a, ONE), b)


# ---------------------------------------------------------------- variables

# Terms are immutable and numerals are shared, so per-object memos pay off
# on the long gate-by-gate formulas.  Entries keep their key object alive.
_TERM_MEMO: dict = {}
_MEMO_LIMIT = 1 << 20
_NONE = (frozenset(), frozenset())


def _memo(t, slot, fn):
    hit = _TERM_MEMO.get((id(t), slot))
    if hit is not None and hit[0] is t:
        return hit[1]
    v = fn(t)
    if len(_TERM_MEMO) > _MEMO_LIMIT:
        _TERM_MEMO.clear()
    _TERM_MEMO[(id(t), slot)] = (t, v)
    return v


def _term_vars(t):
    if isinstance(t, NumVar):
        return frozenset([t.name]), frozenset()
    if isinstance(t, Len):
        return frozenset(), frozenset([t.var])
    if isinstance(t, (Add, Mul)):
        a, b = term_variables(t.left), term_variables(t.right)
        if a is _NONE:
            return b
        if b is _NONE:
            return a
        return a[0] | b[0], a[1] | b[1]
    return _NONE


def term_variables(t: Term) -> tuple[frozenset, frozenset]:
    if isinstance(t, (Add, Mul)):
        return _memo(t, 0, _term_vars)
    return _term_vars(t)


def free_variables(phi: Formula) -> tuple[set, set]:
    """(free number variables, free string variables) of phi."""
    if isinstance(phi, (Eq, Leq)):
        a, b = term_variables(phi.left), term_variables(phi.right)
        return a[0] | b[0], a[1] | b[1]
    if isinstance(phi, In):
        n, s = term_variables(phi.term)
        return n, s | {phi.var}
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, (And, Or, Imp)):
        a, b = free_variables(phi.left), free_variables(phi.right)
        return a[0] | b[0], a[1] | b[1]
    if isinstance(phi, (Forall, Exists)):
        bn, bs = term_variables(phi.bound)
        n, s = free_variables(phi.body)
        return (n - {phi.var}) | bn, s | bs
    raise TypeError(f"not a formula: {phi!r}")


def quantifier_depth(phi: Formula) -> int:
    if isinstance(phi, Not):
        return quantifier_depth(phi.body)
    if isinstance(phi, (And, Or, Imp)):
        return max(quantifier_depth(phi.left), quantifier_depth(phi.right))
    if isinstance(phi, (Forall, Exists)):
        return 1 + quantifier_depth(phi.body)
    return 0


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if rest.strip():
                raise ParseError("unexpected character", pos)
            return out
        start = m.start(m.lastindex)
        out.append((m.group(m.lastindex), start))
        pos = m.end()


def _read_sexp(tokens, i):
    tok, pos = tokens[i]
    if tok == "(":
        items = []
        i += 1
        while True:
            if i >= len(tokens):
                raise ParseError("unclosed parenthesis", pos)
            if tokens[i][0] == ")":
                return (items, pos), i + 1
            item, i = _read_sexp(tokens, i)
            items.append(item)
    if tok == ")":
        raise ParseError("unbalanced ')'", pos)
    return (tok, pos), i + 1


def _sexp(text):
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 0)
    node, i = _read_sexp(tokens, 0)
    if i != len(tokens):
        raise ParseError("trailing input", tokens[i][1])
    return node


def _term(node) -> Term:
    val, pos = node
    if isinstance(val, str):
        if val == "0":
            return ZERO
        if val == "1":
            return ONE
        if _NUMVAR.match(val) and val not in _RESERVED:
            return NumVar(val)
        if _STRVAR.match(val):
            raise ParseError(f"string variable {val} used as a number term", pos)
        raise ParseError(f"bad term {val!r}", pos)
    if not val or not isinstance(val[0][0], str):
        raise ParseError("expected operator", pos)
    head = val[0][0]
    args = val[1:]
    if head in ("+", "*"):
        if len(args) != 2:
            raise ParseError(f"'{head}' takes two terms", pos)
        cls = Add if head == "+" else Mul
        return cls(_term(args[0]), _term(args[1]))
    if head == "len":
        if len(args) != 1 or not isinstance(args[0][0], str) or not _STRVAR.match(args[0][0]):
            raise ParseError("'len' takes one string variable", pos)
        return Len(args[0][0])
    raise ParseError(f"unknown term operator {head!r}", pos)


def _formula(node) -> Formula:
    val, pos = node
    if isinstance(val, str) or not val or not isinstance(val[0][0], str):
        raise ParseError("expected a formula", pos)
    head = val[0][0]
    args = val[1:]

    def arity(k):
        if len(args) != k:
            raise ParseError(f"'{head}' takes {k} arguments", pos)

    if head in ("=", "<="):
        arity(2)
        cls = Eq if head == "=" else Leq
        return cls(_term(args[0]), _term(args[1]))
    if head == "in":
        arity(2)
        var = args[0][0]
        if not isinstance(var, str) or not _STRVAR.match(var):
            raise ParseError("'in' expects a string variable", args[0][1])
        return In(var, _term(args[1]))
    if head == "not":
        arity(1)
        return Not(_formula(args[0]))
    if head in ("and", "or", "imp"):
        arity(2)
        cls = {"and": And, "or": Or, "imp": Imp}[head]
        return cls(_formula(args[0]), _formula(args[1]))
    if head in ("all", "ex"):
        arity(3)
        var, vpos = args[0]
        if isinstance(var, str) and _STRVAR.match(var):
            raise DisciplineError("string quantifier not Σ^B_0", vpos)
        if not isinstance(var, str) or not _NUMVAR.match(var) or var in _RESERVED:
            raise ParseError("quantifier expects a number variable", vpos)
        bound = _term(args[1])
        if var in term_variables(bound)[0]:
            raise DisciplineError(f"bound term mentions its own variable {var}", args[1][1])
        cls = Forall if head == "all" else Exists
        return cls(var, bound, _formula(args[2]))
    raise ParseError(f"unknown connective {head!r}", pos)


def parse_formula(text: str) -> Formula:
    return _formula(_sexp(text))


def parse_term(text: str) -> Term:
    return _term(_sexp(text))


# ---------------------------------------------------------------- rendering

def render_term(t: Term) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, NumVar):
        return t.name
    if isinstance(t, Len):
        return f"(len {t.var})"
    op = "+" if isinstance(t, Add) else "*"
    return f"({op} {render_term(t.left)} {render_term(t.right)})"


_HEADS = {Eq: "=", Leq: "<=", And: "and", Or: "or", Imp: "imp"}


def render(phi: Formula) -> str:
    """S-expression text; parse_formula(render(phi)) == phi."""
    if isinstance(phi, (Eq, Leq)):
        return f"({_HEADS[type(phi)]} {render_term(phi.left)} {render_term(phi.right)})"
    if isinstance(phi, In):
        return f"(in {phi.var} {render_term(phi.term)})"
    if isinstance(phi, Not):
        return f"(not {render(phi.body)})"
    if isinstance(phi, (And, Or, Imp)):
        return f"({_HEADS[type(phi)]} {render(phi.left)} {render(phi.right)})"
    head = "all" if isinstance(phi, Forall) else "ex"
    return f"({head} {phi.var} {render_term(phi.bound)} {render(phi.body)})"


def _closed_value(t: Term):
    nums, strs = term_variables(t)
    if nums or strs:
        return None
    return _value(t)


def _value_of(t):
    a, b = _value(t.left), _value(t.right)
    return a + b if isinstance(t, Add) else a * b


def _value(t):
    if isinstance(t, Zero):
        return 0
    if isinstance(t, One):
        return 1
    return _memo(t, 1, _value_of)


def pretty_term(t: Term) -> str:
    v = _closed_value(t)
    if v is not None:
        return str(v)
    if isinstance(t, NumVar):
        return t.name
    if isinstance(t, Len):
        return f"|{t.var}|"
    op = "+" if isinstance(t, Add) else "·"
    return f"({pretty_term(t.left)} {op} {pretty_term(t.right)})"


def pretty(phi: Formula) -> str:
    """Infix rendering for humans; not parsed back."""
    if isinstance(phi, Eq):
        return f"{pretty_term(phi.left)} = {pretty_term(phi.right)}"
    if isinstance(phi, Leq):
        return f"{pretty_term(phi.left)} ≤ {pretty_term(phi.right)}"
    if isinstance(phi, In):
        return f"{phi.var}({pretty_term(phi.term)})"
    if isinstance(phi, Not):
        return f"¬{pretty(phi.body)}"
    if isinstance(phi, (And, Or, Imp)):
        sym = {And: "∧", Or: "∨", Imp: "⊃"}[type(phi)]
        return f"({pretty(phi.left)} {sym} {pretty(phi.right)})"
    q = "∀" if isinstance(phi, Forall) else "∃"
    return f"{q}{phi.var}≤{pretty_term(phi.bound)} {pretty(phi.body)}"


# ---------------------------------------------------------------- semantics

@dataclass
class Environment:
    numvals: dict = None
    strvals: dict = None

    def __post_init__(self):
        self.numvals = dict(self.numvals or {})
        self.strvals = {k: v if isinstance(v, StringValue) else StringValue(frozenset(v))
                        for k, v in (self.strvals or {}).items()}


def _compile_term(t: Term) -> Callable:
    v = _closed_value(t)
    if v is not None:
        return lambda nums, strs: v
    if isinstance(t, NumVar):
        name = t.name

        def f(nums, strs):
            try:
                return nums[name]
            except KeyError:
                raise UnboundVariable(f"unbound number variable {name}") from None
        return f
    if isinstance(t, Len):
        var = t.var

        def f(nums, strs):
            try:
                return strs[var].length
            except KeyError:
                raise UnboundVariable(f"unbound string variable {var}") from None
        return f
    a, b = _compile_term(t.left), _compile_term(t.right)
    if isinstance(t, Add):
        return lambda nums, strs: a(nums, strs) + b(nums, strs)
    return lambda nums, strs: a(nums, strs) * b(nums, strs)


def compile_formula(phi: Formula) -> Callable:
    """Compile phi into fn(numvals, strvals) -> bool.

    numvals is mutated while quantifiers run and restored on return; string
    values must be StringValue instances.
    """
    if isinstance(phi, Eq):
        a, b = _compile_term(phi.left), _compile_term(phi.right)
        return lambda nums, strs: a(nums, strs) == b(nums, strs)
    if isinstance(phi, Leq):
        a, b = _compile_term(phi.left), _compile_term(phi.right)
        return lambda nums, strs: a(nums, strs) <= b(nums, strs)
    if isinstance(phi, In):
        var, t = phi.var, _compile_term(phi.term)

        def f(nums, strs):
            try:
                s = strs[var]
            except KeyError:
                raise UnboundVariable(f"unbound string variable {var}") from None
            return t(nums, strs) in s.elements
        return f
    if isinstance(phi, Not):
        g = compile_formula(phi.body)
        return lambda nums, strs: not g(nums, strs)
    if isinstance(phi, And):
        a, b = compile_formula(phi.left), compile_formula(phi.right)
        return lambda nums, strs: a(nums, strs) and b(nums, strs)
    if isinstance(phi, Or):
        a, b = compile_formula(phi.left), compile_formula(phi.right)
        return lambda nums, strs: a(nums, strs) or b(nums, strs)
    if isinstance(phi, Imp):
        a, b = compile_formula(phi.left), compile_formula(phi.right)
        return lambda nums, strs: (not a(nums, strs)) or b(nums, strs)
    if isinstance(phi, (Forall, Exists)):
        var, bound, body = phi.var, _compile_term(phi.bound), compile_formula(phi.body)
        want = isinstance(phi, Exists)
        missing = object()

        def q(nums, strs):
            top = bound(nums, strs)
            saved = nums.get(var, missing)
            try:
                for v in range(top + 1):
                    nums[var] = v
                    if body(nums, strs) == want:
                        return want
                return not want
            finally:
                if saved is missing:
                    nums.pop(var, None)
                else:
                    nums[var] = saved
        return q
    raise TypeError(f"not a formula: {phi!r}")


def eval_term(t: Term, env: Environment) -> int:
    return _compile_term(t)(dict(env.numvals), env.strvals)


def eval_formula(phi: Formula, env: Environment | Mapping) -> bool:
    if not isinstance(env, Environment):
        env = Environment(strvals=env)
    return compile_formula(phi)(dict(env.numvals), env.strvals)
