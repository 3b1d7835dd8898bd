"""Brute-force tautology oracle.

The inner loop lives in a compiled extension when it is available and
falls back to a bit-parallel pure-Python kernel otherwise.  Set
REDUCT_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

from . import prop as P

if os.environ.get("REDUCT_PURE_PYTHON"):
    from . import _kernels_py as _kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _kernels
        BACKEND = "python"

from . import _kernels_py

DEFAULT_ATOM_CAP = 20


class AtomCapExceeded(Exception):
    pass


def atom_cap() -> int:
    try:
        return int(os.environ.get("REDUCT_ATOM_CAP", DEFAULT_ATOM_CAP))
    except ValueError:
        return DEFAULT_ATOM_CAP


def compile_program(F: P.Prop, atom_order=None):
    """Flatten F into (ops, left, right, atoms) for the kernels."""
    if atom_order is None:
        atom_order = P.sorted_atoms(F)
    index = {a: j for j, a in enumerate(atom_order)}
    ops, left, right = [], [], []
    pos = {}
    for n in P.postorder(F):
        op = n.op
        if op == P.CONST:
            ops.append(1 if n.value else 0)
            left.append(0)
            right.append(0)
        elif op == P.ATOM:
            ops.append(2)
            left.append(index[n.value])
            right.append(0)
        elif op == P.NOT:
            ops.append(3)
            left.append(pos[n.a.uid])
            right.append(0)
        else:
            ops.append({P.AND: 4, P.OR: 5, P.IMP: 6}[op])
            left.append(pos[n.a.uid])
            right.append(pos[n.b.uid])
        pos[n.uid] = len(ops) - 1
    return ops, left, right, list(atom_order)


def _prepare(F, cap, atom_order):
    cap = atom_cap() if cap is None else cap
    ops, left, right, order = compile_program(F, atom_order)
    if len(order) > cap:
        raise AtomCapExceeded(f"{len(order)} atoms exceeds the oracle cap of {cap}")
    return ops, left, right, order


def counterexample(F: P.Prop, cap: int | None = None, backend=None):
    """A falsifying assignment of F, or None if F is a tautology."""
    ops, left, right, order = _prepare(F, cap, None)
    kern = backend or _kernels
    r = kern.first_false(ops, left, right, len(order))
    if r < 0:
        return None
    return {a: bool(r >> j & 1) for j, a in enumerate(order)}


def is_tautology_bruteforce(F: P.Prop, cap: int | None = None, backend=None) -> bool:
    ops, left, right, order = _prepare(F, cap, None)
    kern = backend or _kernels
    return kern.first_false(ops, left, right, len(order)) < 0


def truth_column(F: P.Prop, atom_order, cap: int | None = None, backend=None) -> int:
    """Integer whose bit r is F's value when atom j takes bit j of r."""
    ops, left, right, order = _prepare(F, cap, atom_order)
    kern = backend or _kernels
    return kern.truth_column(ops, left, right, len(order))


python_backend = _kernels_py
