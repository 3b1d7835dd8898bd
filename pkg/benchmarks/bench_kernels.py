"""Compiled vs pure-Python truth-table kernel.

    python benchmarks/bench_kernels.py [--atoms 10,14,18] [--repeat 3]

Prints a CSV of best-of-N wall times per formula size and backend.
"""

import argparse
import random
import sys
import timeit

from reducts import oracle
from reducts import prop as P


def chain(n: int, rng: random.Random) -> P.Prop:
    """A tautology over n atoms that forces the full 2^n sweep."""
    qs = [P.q(j) for j in range(1, n + 1)]
    rng.shuffle(qs)
    body = qs[0]
    for a in qs[1:]:
        body = P.make(rng.choice([P.AND, P.OR]), body, a)
    return P.disj(body, P.neg(body))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--atoms", default="8,12,16,20,22")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    backends = {"python": oracle.python_backend}
    if oracle.BACKEND == "cython":
        backends["cython"] = None
    else:
        print("# compiled kernel unavailable; timing the fallback only", file=sys.stderr)
    print("atoms,nodes,backend,seconds,speedup")
    for n in (int(x) for x in args.atoms.split(",")):
        F = chain(n, rng)
        times = {}
        for name, kern in backends.items():
            assert oracle.is_tautology_bruteforce(F, cap=64, backend=kern)
            times[name] = min(timeit.repeat(
                lambda: oracle.is_tautology_bruteforce(F, cap=64, backend=kern), number=1, repeat=args.repeat))
        for name, t in times.items():
            print(f"{n},{P.node_count(F)},{name},{t:.6f},{times['python'] / t:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
