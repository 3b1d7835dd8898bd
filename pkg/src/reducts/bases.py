"""Base proof systems whose proofs may be imported into f+ derivations.

`truth_table_base` accepts a formula together with its all-ones truth table
(re-checked by brute force, so only small formulas qualify).
`reflection_base` accepts a soundness statement Sound_g at given lengths for a
registered system g, rebuilding the translation itself.  Its correctness is
the universal truth of Sound_g, which the test suite checks exhaustively at
small lengths.
"""

from __future__ import annotations

import json

from . import circuits as C
from . import oracle
from . import prop as P
from . import sigma as S
from .proofs import BaseSystemHandle

TT_MAGIC = b"TT\n"
RFN_MAGIC = b"RFN\n"


# ---------------------------------------------------------------- truth tables

def truth_table_payload(F: P.Prop, cap: int | None = None) -> bytes:
    """Base proof of F: its text and its truth column (which must be all ones)."""
    n = len(P.atoms(F))
    if oracle.truth_column(F, P.sorted_atoms(F), cap=cap) != (1 << (1 << n)) - 1:
        raise ValueError("not a tautology")
    return TT_MAGIC + P.to_text(F).encode() + b"\n" + b"1" * (1 << n)


def _verify_tt(payload: bytes, cap):
    body = payload[len(TT_MAGIC):].decode()
    text, _, table = body.rpartition("\n")
    F = P.from_text(text)
    n = len(P.atoms(F))
    if table != "1" * (1 << n):
        return None
    full = (1 << (1 << n)) - 1
    return F if oracle.truth_column(F, P.sorted_atoms(F), cap=cap) == full else None


def truth_table_base(cap: int | None = None) -> BaseSystemHandle:
    def verify(payload: bytes):
        if not payload.startswith(TT_MAGIC):
            return None
        return _verify_tt(payload, cap)
    return BaseSystemHandle("truth-table", verify)


# ---------------------------------------------------------------- reflection

_SYSTEMS: dict = {}


def system_descriptor(spec: C.ProofSystemSpec) -> dict:
    if isinstance(spec, C.FormulaSystem):
        return {"system": "formula", "phi": S.render(spec.phi), "shape": list(spec.shape),
                "numvals": dict(sorted(spec.numvals.items()))}
    if spec is C.truth_table_system():
        return {"system": "truth-table"}
    raise ValueError(f"no descriptor for {spec!r}")


def system_from_descriptor(d: dict) -> C.ProofSystemSpec:
    key = json.dumps(d, sort_keys=True)
    spec = _SYSTEMS.get(key)
    if spec is None:
        if d.get("system") == "truth-table":
            spec = C.truth_table_system()
        elif d.get("system") == "formula":
            spec = C.make_formula_system(S.parse_formula(d["phi"]), d["shape"], d.get("numvals") or {})
        else:
            raise ValueError(f"unknown system {d.get('system')!r}")
        _SYSTEMS[key] = spec
    return spec


def reflection_payload(spec: C.ProofSystemSpec, prof: C.SoundProfile) -> bytes:
    doc = dict(system_descriptor(spec), profile=prof.as_dict())
    return RFN_MAGIC + json.dumps(doc, sort_keys=True).encode()


def _verify_rfn(payload: bytes):
    doc = json.loads(payload[len(RFN_MAGIC):].decode())
    prof = doc.pop("profile")
    spec = system_from_descriptor(doc)
    sp = C.SoundProfile(prof["U"], prof["Y"], prof["X"], prof["Z"], prof["W"])
    return C.sound_g_translation(spec, sp)


def reflection_base() -> BaseSystemHandle:
    def verify(payload: bytes):
        if not payload.startswith(RFN_MAGIC):
            return None
        return _verify_rfn(payload)
    return BaseSystemHandle("reflection", verify)


def oracle_base(cap: int | None = None, reflection: bool = True) -> BaseSystemHandle:
    """Truth tables, and (unless disabled) soundness statements of known systems."""
    tt = truth_table_base(cap)
    rfn = reflection_base()

    def verify(payload: bytes):
        if payload.startswith(TT_MAGIC):
            return tt.verify(payload)
        if reflection and payload.startswith(RFN_MAGIC):
            return rfn.verify(payload)
        return None
    return BaseSystemHandle("oracle+reflection" if reflection else "oracle", verify)


BASES = {
    "truth-table": truth_table_base,
    "reflection": lambda cap=None: reflection_base(),
    "oracle": oracle_base,
}
