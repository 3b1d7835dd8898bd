"""Propositional translation of bounded formulas at fixed string lengths.

A string X of length n contributes atoms pX.0 .. pX.(n-2); its top bit is
forced true and everything above it is false.  Bounded quantifiers expand
into balanced conjunctions and disjunctions.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping

from . import prop as P
from . import sigma as S


class TranslationError(Exception):
    pass


class LengthMismatch(TranslationError):
    pass


@dataclass(frozen=True)
class LengthProfile:
    lengths: dict = field(default_factory=dict)
    numvals: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lengths", dict(self.lengths))
        object.__setattr__(self, "numvals", dict(self.numvals))
        for k, v in list(self.lengths.items()) + list(self.numvals.items()):
            if not isinstance(v, int) or v < 0:
                raise TranslationError(f"{k} must map to a natural, got {v!r}")

    def __str__(self):
        s = ",".join(f"{k}={v}" for k, v in sorted(self.lengths.items()))
        if self.numvals:
            s += ";" + ",".join(f"{k}={v}" for k, v in sorted(self.numvals.items()))
        return s

    def __hash__(self):
        return hash((tuple(sorted(self.lengths.items())), tuple(sorted(self.numvals.items()))))


_ITEM = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*=\s*(\d+)\s*\Z")


def parse_profile(text: str) -> LengthProfile:
    """Parse `X=3,Y=5;x=2` (string lengths, then optional number values)."""
    strs, _, nums = text.partition(";")
    lengths, numvals = {}, {}
    for part, target, upper in ((strs, lengths, True), (nums, numvals, False)):
        for item in filter(None, (s.strip() for s in part.split(","))):
            m = _ITEM.match(item)
            if not m:
                raise TranslationError(f"bad profile entry {item!r}")
            name = m.group(1)
            if name[0].isupper() != upper:
                kind = "string" if upper else "number"
                raise TranslationError(f"{name!r} is not a {kind} variable")
            target[name] = int(m.group(2))
    return LengthProfile(lengths, numvals)


class _Len:
    __slots__ = ("length",)

    def __init__(self, n):
        self.length = n


def _check_profile(phi, prof: LengthProfile, strings):
    nums, strs = S.free_variables(phi)
    missing = sorted((nums - set(prof.numvals)) | (strs - set(prof.lengths)))
    if missing:
        raise TranslationError(f"profile does not cover free variable(s) {', '.join(missing)}")
    for var, sv in (strings or {}).items():
        n = prof.lengths.get(var)
        if n is not None and sv.length != n:
            raise LengthMismatch(f"|{var}| = {sv.length} but profile says {n}")


def _compile(phi, lengths: Mapping, strings: Mapping, fold: bool):
    """Compile phi into fn(nums) -> Prop."""
    lens = {k: _Len(v) for k, v in lengths.items()}
    T, F = P.TRUE, P.FALSE
    ops = P.FOLD if fold else P.RAW

    def term(t):
        f = S._compile_term(t)
        return lambda nums: f(nums, lens)

    def go(phi):
        if isinstance(phi, (S.Eq, S.Leq)):
            a, b = term(phi.left), term(phi.right)
            if isinstance(phi, S.Eq):
                return lambda nums: T if a(nums) == b(nums) else F
            return lambda nums: T if a(nums) <= b(nums) else F
        if isinstance(phi, S.In):
            var, t = phi.var, term(phi.term)
            n = lengths[var]
            known = strings.get(var)
            if known is not None:
                elems = known.elements
                return lambda nums: T if t(nums) in elems else F

            def member(nums):
                j = t(nums)
                if j >= n:
                    return F
                if j == n - 1:
                    return T
                return P.p(var, j)
            return member
        if isinstance(phi, S.Not):
            g, neg = go(phi.body), ops[P.NOT]
            return lambda nums: neg(g(nums), None)
        if isinstance(phi, (S.And, S.Or, S.Imp)):
            a, b = go(phi.left), go(phi.right)
            if isinstance(phi, S.And):
                op, stop, res = ops[P.AND], F, F
            elif isinstance(phi, S.Or):
                op, stop, res = ops[P.OR], T, T
            else:
                op, stop, res = ops[P.IMP], F, T
            if not fold:
                return lambda nums: op(a(nums), b(nums))

            def bin_(nums):
                x = a(nums)
                if x is stop:
                    return res
                return op(x, b(nums))
            return bin_
        if isinstance(phi, (S.Forall, S.Exists)):
            var, bound, body = phi.var, term(phi.bound), go(phi.body)
            is_all = isinstance(phi, S.Forall)
            kind = P.AND if is_all else P.OR
            absorbing = F if is_all else T
            missing = object()

            def quant(nums):
                top = bound(nums)
                saved = nums.get(var, missing)
                items = []
                try:
                    for v in range(top + 1):
                        nums[var] = v
                        x = body(nums)
                        if fold and x is absorbing:
                            return absorbing
                        items.append(x)
                finally:
                    if saved is missing:
                        nums.pop(var, None)
                    else:
                        nums[var] = saved
                return P.balanced(kind, items, fold=fold)
            return quant
        raise TypeError(f"not a formula: {phi!r}")

    return go(phi)


def translate(phi, prof: LengthProfile, fold: bool = True, strings: Mapping | None = None) -> P.Prop:
    """The propositional translation of phi at the lengths in prof.

    With `strings`, those variables are fixed to the given values and their
    bits become constants; the result equals substituting the constants into
    the plain translation and then folding.
    """
    strings = {k: v if isinstance(v, S.StringValue) else S.StringValue(frozenset(v))
               for k, v in (strings or {}).items()}
    _check_profile(phi, prof, strings)
    lengths = dict(prof.lengths)
    for var, sv in strings.items():
        lengths.setdefault(var, sv.length)
    fn = _compile(phi, lengths, strings, fold)
    return fn(dict(prof.numvals))


def string_atoms(prof: LengthProfile) -> list:
    """All atoms a translation at prof may use, in canonical order."""
    return [P.StringBit(v, j) for v in sorted(prof.lengths) for j in range(max(prof.lengths[v] - 1, 0))]


def assignment_of_strings(prof: LengthProfile, strings: Mapping) -> dict:
    out = {}
    for var, sv in strings.items():
        if not isinstance(sv, S.StringValue):
            sv = S.StringValue(frozenset(sv))
        n = prof.lengths.get(var)
        if n is None:
            raise TranslationError(f"no length for {var}")
        if sv.length != n:
            raise LengthMismatch(f"|{var}| = {sv.length}, expected {n}")
        for j in range(n - 1):
            out[P.StringBit(var, j)] = sv.bit(j)
    return out


def constant_substitution(strings: Mapping) -> dict:
    """Map each payload atom of the given strings to its bit constant."""
    out = {}
    for var, sv in strings.items():
        for j in range(max(sv.length - 1, 0)):
            out[P.StringBit(var, j)] = P.const(sv.bit(j))
    return out


def semantically_valid(phi, prof: LengthProfile) -> bool:
    """Whether phi holds for every choice of strings of exactly the profile's lengths."""
    _check_profile(phi, prof, None)
    fn = S.compile_formula(phi)
    names = sorted(prof.lengths)
    pools = [list(S.strings_of_length(prof.lengths[v])) for v in names]
    for combo in itertools.product(*pools):
        if not fn(dict(prof.numvals), dict(zip(names, combo))):
            return False
    return True
