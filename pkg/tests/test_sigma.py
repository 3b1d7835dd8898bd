import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from reducts import sigma as S
from reducts.corpus import load_corpus


def sv(*xs):
    return S.StringValue(frozenset(xs))


@pytest.mark.parametrize("elems,length", [((), 0), ((0, 3), 4), ((0,), 1), ((7,), 8)])
def test_length(elems, length):
    assert sv(*elems).length == length


def test_bit_is_total():
    x = sv(1, 4)
    assert x.bit(1) and x.bit(4)
    assert not any(x.bit(t) for t in (0, 2, 3, 5, 100))


def test_payload_round_trip():
    x = S.StringValue.from_payload([1, 0, 1])
    assert x.elements == {0, 2, 3} and x.payload() == [1, 0, 1]


@given(st.frozensets(st.integers(0, 30)), st.integers(0, 40))
def test_length_monotone(elems, e):
    x = S.StringValue(elems)
    y = S.StringValue(elems | {e})
    assert y.length >= x.length
    assert (y.length == x.length) == (e < x.length)


def test_strings_of_length():
    got = list(S.strings_of_length(3))
    assert len(got) == 4 and all(s.length == 3 for s in got)
    assert [s.length for s in S.strings_of_length(0)] == [0]


def test_parse_examples():
    assert S.parse_formula("(in X 0)") == S.In("X", S.ZERO)
    assert S.parse_formula("(all x (len X) (in X x))") == S.Forall("x", S.Len("X"), S.In("X", S.NumVar("x")))


def test_string_quantifier_rejected():
    with pytest.raises(S.DisciplineError, match="string quantifier"):
        S.parse_formula("(ex Y 1 (in Y 0))")


@pytest.mark.parametrize("text", ["(in X", "(in x 0)", "(foo 1 2)", "(all x x (= x 0))", "(= 2 0)", ")"])
def test_parse_errors(text):
    with pytest.raises(S.ParseError):
        S.parse_formula(text)


def test_parse_error_position():
    with pytest.raises(S.ParseError) as info:
        S.parse_formula("(and (= 0 0) (bogus))")
    assert info.value.pos > 0


@pytest.mark.parametrize("term,strs,value", [
    ("(len X)", {"X": sv()}, 0),
    ("(len X)", {"X": sv(0, 3)}, 4),
    ("(+ 1 (* 1 1))", {}, 2),
])
def test_eval_term(term, strs, value):
    assert S.eval_term(S.parse_term(term), S.Environment(strvals=strs)) == value


def test_unbound():
    with pytest.raises(S.UnboundVariable):
        S.eval_formula(S.parse_formula("(in X 0)"), {})
    with pytest.raises(S.UnboundVariable):
        S.eval_term(S.NumVar("y"), S.Environment())


@pytest.mark.parametrize("text,strs,expected", [
    ("(in X (+ 1 1))", {"X": sv(2)}, True),
    ("(all x (len X) (imp (in X x) (<= x (len X))))", {"X": sv(0, 5)}, True),
    ("(ex x (+ 1 (+ 1 1)) (in X x))", {"X": sv(5)}, False),
    ("(ex x (+ 1 (+ 1 1)) (in X x))", {"X": sv(3)}, True),
])
def test_eval_formula(text, strs, expected):
    assert S.eval_formula(S.parse_formula(text), strs) is expected


@pytest.mark.parametrize("text,nums,strs", [
    ("(all x (len X) (in X x))", set(), {"X"}),
    ("(in X y)", {"y"}, {"X"}),
    ("(ex x y (in X x))", {"y"}, {"X"}),
    ("(and (= x 0) (all x 1 (= x x)))", {"x"}, set()),
])
def test_free_variables(text, nums, strs):
    assert S.free_variables(S.parse_formula(text)) == (nums, strs)


def test_numeral_values():
    for k in range(200):
        assert S.eval_term(S.numeral(k), S.Environment()) == k


# a reference evaluator written independently: table driven over tuples
def _ref_term(t, nums, strs):
    kind = type(t).__name__
    table = {
        "Zero": lambda: 0, "One": lambda: 1,
        "NumVar": lambda: nums[t.name],
        "Len": lambda: (max(strs[t.var]) + 1) if strs[t.var] else 0,
        "Add": lambda: _ref_term(t.left, nums, strs) + _ref_term(t.right, nums, strs),
        "Mul": lambda: _ref_term(t.left, nums, strs) * _ref_term(t.right, nums, strs),
    }
    return table[kind]()


def _ref(phi, nums, strs):
    kind = type(phi).__name__
    if kind in ("Forall", "Exists"):
        top = _ref_term(phi.bound, nums, strs)
        vals = [_ref(phi.body, {**nums, phi.var: v}, strs) for v in range(top + 1)]
        return all(vals) if kind == "Forall" else any(vals)
    table = {
        "Eq": lambda: _ref_term(phi.left, nums, strs) == _ref_term(phi.right, nums, strs),
        "Leq": lambda: _ref_term(phi.left, nums, strs) <= _ref_term(phi.right, nums, strs),
        "In": lambda: _ref_term(phi.term, nums, strs) in strs[phi.var],
        "Not": lambda: not _ref(phi.body, nums, strs),
        "And": lambda: _ref(phi.left, nums, strs) and _ref(phi.right, nums, strs),
        "Or": lambda: _ref(phi.left, nums, strs) or _ref(phi.right, nums, strs),
        "Imp": lambda: (not _ref(phi.left, nums, strs)) or _ref(phi.right, nums, strs),
    }
    return table[kind]()


def random_term(rng, bound_vars, depth):
    r = rng.random()
    if depth == 0 or r < 0.4:
        return rng.choice([S.ZERO, S.ONE, S.Len("X"), S.Len("Y")] + [S.NumVar(v) for v in bound_vars])
    cls = S.Add if rng.random() < 0.7 else S.Mul
    return cls(random_term(rng, bound_vars, depth - 1), random_term(rng, bound_vars, depth - 1))


def random_formula(rng, depth, bound_vars=()):
    r = rng.random()
    if depth == 0 or r < 0.25:
        k = rng.randint(0, 2)
        t = random_term(rng, bound_vars, 2)
        if k == 0:
            return S.In(rng.choice("XY"), t)
        u = random_term(rng, bound_vars, 2)
        return S.Eq(t, u) if k == 1 else S.Leq(t, u)
    if r < 0.4:
        return S.Not(random_formula(rng, depth - 1, bound_vars))
    if r < 0.75:
        cls = rng.choice([S.And, S.Or, S.Imp])
        return cls(random_formula(rng, depth - 1, bound_vars), random_formula(rng, depth - 1, bound_vars))
    v = "xyz"[len(bound_vars) % 3] + str(len(bound_vars))
    cls = S.Forall if rng.random() < 0.5 else S.Exists
    bound = random_term(rng, bound_vars, 1)
    return cls(v, bound, random_formula(rng, depth - 1, bound_vars + (v,)))


def test_against_reference_evaluator():
    rng = random.Random(5)
    strings = [frozenset(s) for s in ([], [0], [1], [0, 2], [3])]
    for _ in range(300):
        phi = random_formula(rng, 4)
        for X, Y in itertools.product(strings, repeat=2):
            got = S.eval_formula(phi, {"X": S.StringValue(X), "Y": S.StringValue(Y)})
            assert got == _ref(phi, {}, {"X": X, "Y": Y})


def test_render_round_trip():
    rng = random.Random(9)
    forms = [e.formula for e in load_corpus()]
    forms += [random_formula(rng, 4) for _ in range(100 - len(forms))]
    assert len(forms) == 100
    for phi in forms:
        assert S.parse_formula(S.render(phi)) == phi


def test_pretty_is_infix():
    assert S.pretty(S.parse_formula("(all x (len X) (in X x))")) == "∀x≤|X| X(x)"


@settings(max_examples=50)
@given(st.integers(0, 6), st.integers(0, 6))
def test_quantifier_range_inclusive(a, b):
    phi = S.Exists("x", S.numeral(a), S.Eq(S.NumVar("x"), S.numeral(b)))
    assert S.eval_formula(phi, {}) == (b <= a)
