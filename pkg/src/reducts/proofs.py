"""Frege, substitution-Frege and f+ proofs: data, checker, file format.

A proof is a list of lines.  Each line carries a formula and the rule that
justifies it: an axiom-schema instance, modus ponens, substitution into an
earlier line, a declared premise, or an imported tautology.  An f+ proof
adds imports, each a tautology together with a proof of it in some base
system.
"""

from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import prop as P

# ---------------------------------------------------------------- schemas

_p, _q, _r = P.q("p"), P.q("q"), P.q("r")
_I, _A, _O, _N = P.imp, P.conj, P.disj, P.neg

SCHEMAS = {
    "K": _I(_p, _I(_q, _p)),
    "S": _I(_I(_p, _I(_q, _r)), _I(_I(_p, _q), _I(_p, _r))),
    "AND_I": _I(_p, _I(_q, _A(_p, _q))),
    "AND_E1": _I(_A(_p, _q), _p),
    "AND_E2": _I(_A(_p, _q), _q),
    "OR_I1": _I(_p, _O(_p, _q)),
    "OR_I2": _I(_q, _O(_p, _q)),
    "OR_E": _I(_I(_p, _r), _I(_I(_q, _r), _I(_O(_p, _q), _r))),
    "NOT_I": _I(_I(_p, _q), _I(_I(_p, _N(_q)), _N(_p))),
    "NOT_E": _I(_N(_N(_p)), _p),
    "TOP": P.TRUE,
    "NOT_BOT": _N(P.FALSE),
    "EFQ": _I(_p, _I(_N(_p), _q)),
}


def match_schema(sid: str, F: P.Prop):
    """Binding of the schema's metavariables making it F, or None."""
    pat = SCHEMAS[sid]
    binding = {}
    stack = [(pat, F)]
    while stack:
        x, y = stack.pop()
        if x.op == P.ATOM:
            seen = binding.get(x.value)
            if seen is None:
                binding[x.value] = y
            elif seen is not y:
                return None
            continue
        if x.op != y.op:
            return None
        if x.op == P.CONST:
            if x is not y:
                return None
        elif x.op == P.NOT:
            stack.append((x.a, y.a))
        else:
            stack.append((x.a, y.a))
            stack.append((x.b, y.b))
    return binding


def instance(sid: str, p=None, q=None, r=None) -> P.Prop:
    """The schema instance with the given metavariable values."""
    sigma = {k.value: v for k, v in ((_p, p), (_q, q), (_r, r)) if v is not None}
    return P.substitute(SCHEMAS[sid], sigma)


# ---------------------------------------------------------------- data

RULES = ("AX", "MP", "SUB", "PREM", "IMPORT")


@dataclass(frozen=True)
class ProofLine:
    """args: AX (schema,), MP (i, j), SUB (i, sigma-items), PREM (k,), IMPORT (k,)."""
    id: int
    formula: P.Prop
    rule: str
    args: tuple

    @property
    def sigma(self) -> dict:
        return dict(self.args[1]) if self.rule == "SUB" else {}


@dataclass
class Proof:
    lines: list = field(default_factory=list)
    premises: list = field(default_factory=list)
    comments: dict = field(default_factory=dict)  # line index -> comment strings before it

    @property
    def conclusion(self):
        return self.lines[-1].formula if self.lines else None

    def __len__(self):
        return len(self.lines)


@dataclass
class FPlusProof:
    imports: list = field(default_factory=list)  # (tautology, base proof bytes)
    derivation: Proof = field(default_factory=Proof)

    @property
    def conclusion(self):
        return self.derivation.conclusion


@dataclass(frozen=True)
class BaseSystemHandle:
    """A base proof system: verify(bytes) returns the proved formula or None."""
    name: str
    verify: Callable[[bytes], "P.Prop | None"]


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    line: int | None = None
    reason: str | None = None
    detail: str = ""
    where: str = "derivation"  # or "import"

    def __bool__(self):
        return self.accepted

    def __str__(self):
        if self.accepted:
            return "accepted"
        loc = f"import {self.line}" if self.where == "import" else f"line {self.line}"
        extra = f": {self.detail}" if self.detail else ""
        return f"rejected({loc}, {self.reason}){extra}"


ACCEPTED = Verdict(True)


# ---------------------------------------------------------------- checking

def check_line(line: ProofLine, formulas: dict, premises: Sequence, imports) -> str | None:
    """Reason code if the line is locally wrong, else None."""
    F, rule, args = line.formula, line.rule, line.args
    if rule == "AX":
        sid = args[0]
        if sid not in SCHEMAS:
            return "unknown-schema"
        return None if match_schema(sid, F) is not None else "schema-mismatch"
    if rule == "MP":
        i, j = args
        if i not in formulas or j not in formulas:
            return "bad-reference"
        fi, fj = formulas[i], formulas[j]
        if fj.op != P.IMP or fj.a is not fi or fj.b is not F:
            return "mp-shape"
        return None
    if rule == "SUB":
        i, items = args
        if i not in formulas:
            return "bad-reference"
        for k, _ in items:
            if not isinstance(k, (P.StringBit, P.Named)):
                return "sub-mismatch"
        return None if P.substitute(formulas[i], dict(items)) is F else "sub-mismatch"
    if rule == "PREM":
        k = args[0]
        if not 0 <= k < len(premises) or premises[k] is not F:
            return "premise-mismatch"
        return None
    if rule == "IMPORT":
        if not imports:
            return "no-imports"
        k = args[0]
        if not 0 <= k < len(imports) or imports[k] is not F:
            return "import-mismatch"
        return None
    return "unknown-rule"


def check_proof(proof: Proof, allowed_premises: Iterable = (), imports: Sequence | None = None,
                strict: bool = False) -> Verdict:
    """Check every line.  In strict mode a substitution may only target a line
    that depends on an import or premise."""
    allowed = {F.uid for F in allowed_premises}
    for k, F in enumerate(proof.premises):
        if F.uid not in allowed:
            return Verdict(False, 0, "premise-not-allowed", f"premise {k} not allowed")
    formulas: dict = {}
    tainted: dict = {}
    if not proof.lines:
        return Verdict(False, 0, "empty-proof")
    for line in proof.lines:
        if line.id in formulas or line.id < 1:
            return Verdict(False, line.id, "bad-id")
        reason = check_line(line, formulas, proof.premises, imports)
        if reason:
            return Verdict(False, line.id, reason)
        if strict:
            rule, args = line.rule, line.args
            if rule in ("PREM", "IMPORT"):
                t = True
            elif rule == "MP":
                t = tainted[args[0]] or tainted[args[1]]
            elif rule == "SUB":
                t = tainted[args[0]]
                if not t:
                    return Verdict(False, line.id, "strict-sub", "substitution target does not rest on an import")
            else:
                t = False
            tainted[line.id] = t
        formulas[line.id] = line.formula
    return ACCEPTED


def check_fplus(fp: FPlusProof, base: BaseSystemHandle, strict: bool = False) -> Verdict:
    for k, (taut, payload) in enumerate(fp.imports):
        try:
            got = base.verify(payload)
        except Exception as exc:  # a verifier crash is a rejection of that import
            return Verdict(False, k, "import-rejected", str(exc), where="import")
        if got is None:
            return Verdict(False, k, "import-rejected", f"{base.name} rejects the base proof", where="import")
        if got is not taut:
            return Verdict(False, k, "import-mismatch", "base proof proves a different formula", where="import")
    return check_proof(fp.derivation, (), [t for t, _ in fp.imports], strict=strict)


def proof_size(p) -> int:
    """Symbols in all line formulas and substitution maps, plus import payloads."""
    if isinstance(p, FPlusProof):
        extra = sum(t.size + len(b) for t, b in p.imports)
        return extra + proof_size(p.derivation)
    total = sum(F.size for F in p.premises)
    for line in p.lines:
        total += line.formula.size
        if line.rule == "SUB":
            total += sum(1 + v.size for _, v in line.args[1])
    return total


def substitute_proof(proof: Proof, sigma) -> Proof:
    """Apply sigma to every line (and premise) of a proof without SUB lines."""
    sub = P.Substitution(sigma)
    lines = []
    for line in proof.lines:
        if line.rule == "SUB":
            raise ValueError("substitution lines do not commute with a global substitution")
        lines.append(ProofLine(line.id, sub(line.formula), line.rule, line.args))
    return Proof(lines, [sub(F) for F in proof.premises], dict(proof.comments))


# ---------------------------------------------------------------- file format

class ProofFormatError(Exception):
    pass


def _sigma_text(items) -> str:
    return "{" + ";".join(f"{k}:={P.to_text(v)}" for k, v in items) + "}"


def line_text(line: ProofLine) -> str:
    head = f"LINE {line.id} {P.to_text(line.formula)} {line.rule}"
    if line.rule == "SUB":
        return f"{head} {line.args[0]} {_sigma_text(line.args[1])}"
    return head + "".join(f" {a}" for a in line.args)


def iter_proof_text(proof: Proof, imports: Sequence = ()):
    for k, F in enumerate(proof.premises):
        yield f"PREMISE {k} {P.to_text(F)}\n"
    for k, (F, payload) in enumerate(imports):
        yield f"IMPORT {k} {P.to_text(F)} BASEPROOF {base64.b64encode(payload).decode('ascii')}\n"
    for idx, line in enumerate(proof.lines):
        for c in proof.comments.get(idx, ()):
            yield f"# {c}\n"
        yield line_text(line) + "\n"


def dump_proof(p, fh) -> None:
    if isinstance(p, FPlusProof):
        chunks = iter_proof_text(p.derivation, p.imports)
    else:
        chunks = iter_proof_text(p)
    for chunk in chunks:
        fh.write(chunk)


def dumps_proof(p) -> str:
    if isinstance(p, FPlusProof):
        return "".join(iter_proof_text(p.derivation, p.imports))
    return "".join(iter_proof_text(p))


def _int(tok: str, what: str) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ProofFormatError(f"expected {what}, got {tok!r}") from None
    if v < 0:
        raise ProofFormatError(f"negative {what}")
    return v


def _formula_at(text: str, pos: int):
    try:
        return P.read_formula(text, pos)
    except P.PropError as exc:
        raise ProofFormatError(str(exc)) from None


def _parse_sigma(text: str):
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ProofFormatError("substitution must be written {atom:=formula;...}")
    body = text[1:-1]
    items = []
    pos = 0
    while pos < len(body):
        sep = body.find(":=", pos)
        if sep < 0:
            raise ProofFormatError("missing ':=' in substitution")
        try:
            a = P.parse_atom(body[pos:sep].strip())
        except P.PropError as exc:
            raise ProofFormatError(str(exc)) from None
        F, end = _formula_at(body, sep + 2)
        items.append((a, F))
        rest = body[end:].lstrip()
        if not rest:
            break
        if rest[0] != ";":
            raise ProofFormatError("expected ';' between substitution entries")
        pos = len(body) - len(rest) + 1
    return tuple(items)


def parse_proof(text: str):
    """Parse a proof file; returns a Proof, or an FPlusProof if it has imports."""
    premises: dict = {}
    imports: dict = {}
    lines: list = []
    comments: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            comments.setdefault(len(lines), []).append(s[1:].strip())
            continue
        try:
            kw, rest = s.split(None, 1)
            num, rest = rest.split(None, 1)
        except ValueError:
            raise ProofFormatError(f"line {lineno}: truncated record") from None
        k = _int(num, "index")
        F, end = _formula_at(rest, 0)
        tail = rest[end:].split(None, 1)
        if kw == "PREMISE":
            if tail:
                raise ProofFormatError(f"line {lineno}: trailing text after premise")
            premises[k] = F
        elif kw == "IMPORT":
            if len(tail) != 2 or tail[0] != "BASEPROOF":
                raise ProofFormatError(f"line {lineno}: import needs BASEPROOF")
            try:
                payload = base64.b64decode(tail[1].strip(), validate=True)
            except (binascii.Error, ValueError):
                raise ProofFormatError(f"line {lineno}: bad base64") from None
            imports[k] = (F, payload)
        elif kw == "LINE":
            if not tail:
                raise ProofFormatError(f"line {lineno}: missing rule")
            rule = tail[0]
            argtext = tail[1] if len(tail) > 1 else ""
            if rule == "AX":
                args = tuple(argtext.split())
                if len(args) != 1:
                    raise ProofFormatError(f"line {lineno}: AX takes one schema id")
            elif rule == "MP":
                parts = argtext.split()
                if len(parts) != 2:
                    raise ProofFormatError(f"line {lineno}: MP takes two line ids")
                args = (_int(parts[0], "line id"), _int(parts[1], "line id"))
            elif rule == "SUB":
                parts = argtext.split(None, 1)
                if len(parts) != 2:
                    raise ProofFormatError(f"line {lineno}: SUB takes a line id and a map")
                args = (_int(parts[0], "line id"), _parse_sigma(parts[1]))
            elif rule in ("PREM", "IMPORT"):
                parts = argtext.split()
                if len(parts) != 1:
                    raise ProofFormatError(f"line {lineno}: {rule} takes one index")
                args = (_int(parts[0], "index"),)
            else:
                raise ProofFormatError(f"line {lineno}: unknown rule {rule!r}")
            lines.append(ProofLine(k, F, rule, args))
        else:
            raise ProofFormatError(f"line {lineno}: unknown record {kw!r}")
    for name, table in (("premise", premises), ("import", imports)):
        if sorted(table) != list(range(len(table))):
            raise ProofFormatError(f"{name} indices must be 0..n-1")
    proof = Proof(lines, [premises[k] for k in range(len(premises))], comments)
    if imports:
        return FPlusProof([imports[k] for k in range(len(imports))], proof)
    return proof
