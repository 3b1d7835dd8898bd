import itertools
import math
import random

import pytest

from reducts import oracle as O
from reducts import prop as P
from reducts import sigma as S
from reducts.corpus import load_corpus
from reducts.translation import (LengthMismatch, LengthProfile, TranslationError, assignment_of_strings,
                                 constant_substitution, parse_profile, semantically_valid, string_atoms,
                                 translate)
from test_sigma import random_formula

f = S.parse_formula


def prof(**lengths):
    return LengthProfile(lengths)


def test_examples():
    assert translate(f("(in X 0)"), prof(X=1)) is P.TRUE
    assert translate(f("(in X (+ 1 (+ 1 (+ 1 (+ 1 1)))))"), prof(X=3)) is P.FALSE
    assert translate(f("(= (len X) 0)"), prof(X=0)) is P.TRUE


def test_exists_unfolded():
    phi = f("(ex x (len X) (in X x))")
    raw = translate(phi, prof(X=3), fold=False)
    x0, x1 = P.p("X", 0), P.p("X", 1)
    assert set(P.atoms(raw)) == {x0.value, x1.value}
    assert O.is_tautology_bruteforce(raw)
    assert translate(phi, prof(X=3)) is P.TRUE


@pytest.mark.parametrize("n", [0, 1])
def test_degenerate_lengths(n):
    assert P.atoms(translate(f("(all x 1 (in X x))"), prof(X=n))) == set()
    assert translate(f("(in X 0)"), prof(X=n)) is (P.TRUE if n == 1 else P.FALSE)
    assert translate(f("(= (len X) 1)"), prof(X=n)) is (P.TRUE if n == 1 else P.FALSE)


def test_uncovered_variable():
    with pytest.raises(TranslationError):
        translate(f("(in X y)"), prof(X=3))
    assert translate(f("(in X y)"), LengthProfile({"X": 3}, {"y": 1})) is P.p("X", 1)


def test_parse_profile():
    p = parse_profile("X=3,Y=5;x=2")
    assert p.lengths == {"X": 3, "Y": 5} and p.numvals == {"x": 2}
    assert str(p) == "X=3,Y=5;x=2"
    for bad in ("X=3,x=2", "X=-1", "X", "X=3;Y=1"):
        with pytest.raises(TranslationError):
            parse_profile(bad)


def test_assignment_of_strings():
    p = prof(X=3)
    X = P.StringBit("X", 0), P.StringBit("X", 1)
    assert assignment_of_strings(p, {"X": S.StringValue({2})}) == {X[0]: False, X[1]: False}
    assert assignment_of_strings(p, {"X": S.StringValue({0, 2})}) == {X[0]: True, X[1]: False}
    with pytest.raises(LengthMismatch):
        assignment_of_strings(p, {"X": S.StringValue({1})})


def test_bit_faithfulness_and_hygiene():
    rng = random.Random(3)
    for _ in range(150):
        phi = random_formula(rng, 3)
        ns = (rng.randint(0, 4), rng.randint(0, 4))
        p = prof(X=ns[0], Y=ns[1])
        allowed = set(string_atoms(p))
        for fold in (True, False):
            F = translate(phi, p, fold=fold)
            assert P.atoms(F) <= allowed
            for X in S.strings_of_length(ns[0]):
                for Y in S.strings_of_length(ns[1]):
                    strs = {"X": X, "Y": Y}
                    a = assignment_of_strings(p, strs)
                    assert P.eval_prop(F, a) == S.eval_formula(phi, strs)


def test_known_strings_equal_substitute_then_fold():
    rng = random.Random(4)
    for _ in range(100):
        phi = random_formula(rng, 3)
        p = prof(X=rng.randint(0, 4), Y=rng.randint(0, 4))
        for Y in S.strings_of_length(p.lengths["Y"]):
            plain = translate(phi, p)
            fixed = translate(phi, p, strings={"Y": Y})
            assert fixed is P.fold(P.substitute(plain, constant_substitution({"Y": Y})))


def test_fold_and_raw_agree_semantically():
    for e in load_corpus():
        vs = e.string_vars
        for ns in itertools.product(range(5), repeat=len(vs)):
            p = LengthProfile(dict(zip(vs, ns)))
            a, b = translate(e.formula, p), translate(e.formula, p, fold=False)
            assert O.is_tautology_bruteforce(P.imp(a, b)) and O.is_tautology_bruteforce(P.imp(b, a))


def test_size_growth_polynomial():
    phi = f("(all x (len X) (all y (len X) (imp (in X x) (or (in X y) (<= y x)))))")
    ns = list(range(2, 11))
    sizes = [translate(phi, prof(X=n), fold=False).size for n in ns]
    lx = [math.log(n + 1) for n in ns]
    ly = [math.log(s) for s in sizes]
    import statistics
    slope, _ = statistics.linear_regression(lx, ly)
    assert slope <= S.quantifier_depth(phi) + 1


def test_semantic_validity_matches_oracle_small():
    for e in load_corpus()[:6]:
        for n in range(5):
            p = LengthProfile({v: n for v in e.string_vars})
            assert semantically_valid(e.formula, p) == O.is_tautology_bruteforce(translate(e.formula, p))
