import random
from pathlib import Path

import pytest

from reducts import prop as P

FIXTURES = Path(__file__).parent / "fixtures"


def random_prop(rng: random.Random, atoms, nodes: int, consts: bool = True) -> P.Prop:
    """Random formula with roughly `nodes` connectives over the given atoms."""
    if nodes <= 0 or rng.random() < 0.15:
        if consts and rng.random() < 0.1:
            return rng.choice([P.TRUE, P.FALSE])
        return P.atom(rng.choice(atoms))
    op = rng.choice([P.NOT, P.AND, P.OR, P.IMP])
    if op == P.NOT:
        return P.neg(random_prop(rng, atoms, nodes - 1, consts))
    k = rng.randint(0, nodes - 1)
    return P.make(op, random_prop(rng, atoms, k, consts), random_prop(rng, atoms, nodes - 1 - k, consts))


def qatoms(n, base=1):
    return [P.Named(str(i)) for i in range(base, base + n)]


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def lem_proof():
    from reducts.proofs import parse_proof
    return parse_proof((FIXTURES / "excluded_middle.proof").read_text())
