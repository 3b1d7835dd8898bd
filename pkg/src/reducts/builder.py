"""Constructing Frege proofs.

ProofBuilder appends checked-by-construction lines and deduplicates them by
formula.  On top of it sit small derived rules (identity, transitivity,
pairing, contraposition, ...), the deduction theorem, a constant-evaluation
prover for closed formulas, proofs that constant folding preserves meaning,
and a Kalmár-style prover for small tautologies.
"""

from __future__ import annotations

import threading
from typing import Callable, Iterable, Mapping

from . import prop as P
from .proofs import SCHEMAS, Proof, ProofLine, instance, match_schema

T_, F_ = P.TRUE, P.FALSE
imp, conj, disj, neg = P.imp, P.conj, P.disj, P.neg


class BuilderError(Exception):
    pass


class ProofBuilder:
    def __init__(self):
        self.lines: list[ProofLine] = []
        self.index: dict[int, int] = {}
        self.premises: list = []
        self._prem_index: dict[int, int] = {}
        self.comments: dict[int, list] = {}
        self._forms: dict[int, P.Prop] = {}
        self._fold_memo: dict = {}
        self._fold_cache: dict = {}

    # ------------------------------------------------------------ raw lines

    def formula(self, i: int) -> P.Prop:
        return self._forms[i]

    def has(self, F: P.Prop):
        return self.index.get(F.uid)

    def _emit(self, F, rule, args) -> int:
        hit = self.index.get(F.uid)
        if hit is not None:
            return hit
        lid = len(self.lines) + 1
        self.lines.append(ProofLine(lid, F, rule, args))
        self.index[F.uid] = lid
        self._forms[lid] = F
        return lid

    def axiom(self, sid: str, p=None, q=None, r=None) -> int:
        return self._emit(instance(sid, p, q, r), "AX", (sid,))

    def ax(self, F: P.Prop, sid: str) -> int:
        if match_schema(sid, F) is None:
            raise BuilderError(f"{F} is not an instance of {sid}")
        return self._emit(F, "AX", (sid,))

    def mp(self, minor: int, major: int) -> int:
        fi, fj = self._forms[minor], self._forms[major]
        if fj.op != P.IMP or fj.a is not fi:
            raise BuilderError("modus ponens shape mismatch")
        return self._emit(fj.b, "MP", (minor, major))

    def premise(self, F: P.Prop) -> int:
        hit = self.index.get(F.uid)
        if hit is not None:
            return hit
        k = self._prem_index.get(F.uid)
        if k is None:
            k = len(self.premises)
            self.premises.append(F)
            self._prem_index[F.uid] = k
        return self._emit(F, "PREM", (k,))

    def import_(self, k: int, F: P.Prop) -> int:
        return self._emit(F, "IMPORT", (k,))

    def sub(self, i: int, sigma: Mapping) -> int:
        items = []
        for a, v in sigma.items():
            if isinstance(a, P.Prop):
                a = a.value
            items.append((a, v))
        items.sort(key=lambda kv: P.atom_sort_key(kv[0]))
        F = P.substitute(self._forms[i], dict(items))
        if F.uid in self.index:
            return self.index[F.uid]
        lid = len(self.lines) + 1
        self.lines.append(ProofLine(lid, F, "SUB", (i, tuple(items))))
        self.index[F.uid] = lid
        self._forms[lid] = F
        return lid

    def mark(self, text: str) -> None:
        self.comments.setdefault(len(self.lines), []).append(text)

    def proof(self, conclusion: int | None = None) -> Proof:
        """Snapshot as a Proof; the conclusion is restated last if needed."""
        lines = list(self.lines)
        if conclusion is not None and lines and lines[-1].id != conclusion:
            lines += _restate(len(lines) + 1, self._forms[conclusion], conclusion)
        return Proof(lines, list(self.premises), {k: list(v) for k, v in self.comments.items()})

    def splice(self, proof: Proof, premise_ids: Mapping | None = None,
               sigma: Mapping | None = None) -> dict:
        """Copy proof's lines in, optionally instantiating atoms by sigma.

        Premise k maps to premise_ids[k] when given, else to an existing line
        with the same formula, else becomes a premise here.  Returns the map
        from old to new line ids.
        """
        premise_ids = premise_ids or {}
        subst = P.Substitution(sigma) if sigma else (lambda F: F)
        remap: dict[int, int] = {}
        for line in proof.lines:
            F = subst(line.formula)
            rule, args = line.rule, line.args
            if rule == "AX":
                nid = self._emit(F, "AX", args)
            elif rule == "MP":
                nid = self.mp(remap[args[0]], remap[args[1]])
            elif rule == "SUB":
                if sigma:
                    raise BuilderError("cannot instantiate a proof that uses substitution")
                nid = self.sub(remap[args[0]], dict(args[1]))
            elif rule == "PREM":
                k = args[0]
                if k in premise_ids:
                    nid = premise_ids[k]
                    if self._forms[nid] is not F:
                        raise BuilderError("premise id does not prove the premise")
                elif F.uid in self.index:
                    nid = self.index[F.uid]
                else:
                    nid = self.premise(F)
            else:
                nid = self.import_(args[0], F)
            remap[line.id] = nid
        return remap

    # ------------------------------------------------------------ derived rules

    def id_(self, a: P.Prop) -> int:
        """a > a in five lines."""
        hit = self.has(imp(a, a))
        if hit is not None:
            return hit
        aa = imp(a, a)
        s = self.axiom("S", a, aa, a)
        k1 = self.axiom("K", a, aa)
        m1 = self.mp(k1, s)
        k2 = self.axiom("K", a, a)
        return self.mp(k2, m1)

    def lift(self, x: int, h: P.Prop) -> int:
        """From x derive h > x."""
        X = self._forms[x]
        hit = self.has(imp(h, X))
        if hit is not None:
            return hit
        return self.mp(x, self.axiom("K", X, h))

    def app(self, hxy: int, hx: int) -> int:
        """From h > (x > y) and h > x derive h > y."""
        f1, f2 = self._forms[hxy], self._forms[hx]
        h, x, y = f1.a, f1.b.a, f1.b.b
        if f2.a is not h or f2.b is not x:
            raise BuilderError("app: hypotheses do not line up")
        hit = self.has(imp(h, y))
        if hit is not None:
            return hit
        s = self.axiom("S", h, x, y)
        return self.mp(hx, self.mp(hxy, s))

    def trans(self, ab: int, bc: int) -> int:
        """From a > b and b > c derive a > c."""
        a = self._forms[ab].a
        return self.app(self.lift(bc, a), ab)

    def pair(self, hx: int, hy: int) -> int:
        """From h > x and h > y derive h > (x & y)."""
        h, x = self._forms[hx].a, self._forms[hx].b
        y = self._forms[hy].b
        hit = self.has(imp(h, conj(x, y)))
        if hit is not None:
            return hit
        ai = self.lift(self.axiom("AND_I", x, y), h)
        return self.app(self.app(ai, hx), hy)

    def conj_intro(self, x: int, y: int) -> int:
        X, Y = self._forms[x], self._forms[y]
        hit = self.has(conj(X, Y))
        if hit is not None:
            return hit
        return self.mp(y, self.mp(x, self.axiom("AND_I", X, Y)))

    def top(self) -> int:
        return self.axiom("TOP")

    def not_bot(self) -> int:
        return self.axiom("NOT_BOT")

    def neg_intro(self, ab: int, anb: int) -> int:
        """From a > b and a > ~b derive ~a."""
        a, b = self._forms[ab].a, self._forms[ab].b
        ni = self.axiom("NOT_I", a, b)
        return self.mp(anb, self.mp(ab, ni))

    def dni(self, x: int) -> int:
        """From x derive ~~x."""
        X = self._forms[x]
        nx_x = self.lift(x, neg(X))
        return self.neg_intro(nx_x, self.id_(neg(X)))

    def imp_from_neg(self, nx: int, y: P.Prop) -> int:
        """From ~x derive x > y."""
        X = self._forms[nx].a
        hit = self.has(imp(X, y))
        if hit is not None:
            return hit
        efq = self.axiom("EFQ", X, y)
        return self.app(efq, self.lift(nx, X))

    def bot_imp(self, x: P.Prop) -> int:
        """Bottom implies anything."""
        return self.imp_from_neg(self.not_bot(), x)

    def not_and_l(self, nx: int, y: P.Prop) -> int:
        X = self._forms[nx].a
        G = conj(X, y)
        return self.neg_intro(self.axiom("AND_E1", X, y), self.lift(nx, G))

    def not_and_r(self, x: P.Prop, ny: int) -> int:
        Y = self._forms[ny].a
        G = conj(x, Y)
        return self.neg_intro(self.axiom("AND_E2", x, Y), self.lift(ny, G))

    def not_or(self, nx: int, ny: int) -> int:
        X, Y = self._forms[nx].a, self._forms[ny].a
        D = disj(X, Y)
        ore = self.axiom("OR_E", X, Y, X)
        d_x = self.mp(self.imp_from_neg(ny, X), self.mp(self.id_(X), ore))
        return self.neg_intro(d_x, self.lift(nx, D))

    def not_imp(self, x: int, ny: int) -> int:
        X, Y = self._forms[x], self._forms[ny].a
        G = imp(X, Y)
        g_y = self.app(self.id_(G), self.lift(x, G))
        return self.neg_intro(g_y, self.lift(ny, G))

    def under(self, hyps: Iterable[P.Prop], body: Callable) -> int:
        """Prove h1 > (h2 > ... > C) where body(sub, *hyp_ids) derives C.

        The sub-builder may cite lines of this builder by calling
        sub.premise(formula); such premises are resolved on splicing.
        """
        hyps = list(hyps)
        sub = ProofBuilder()
        ids = [sub.premise(h) for h in hyps]
        concl = body(sub, *ids)
        target = sub.formula(concl)
        proof = Proof(sub.lines, list(sub.premises))
        for h in reversed(hyps):
            proof, target = deduce(proof, h, target)
        self.splice(proof)
        return self.index[target.uid]

    def contra(self, xy: int) -> int:
        """From x > y derive ~y > ~x."""
        X, Y = self._forms[xy].a, self._forms[xy].b

        def body(s, ny):
            fact = s.premise(imp(X, Y))
            return s.neg_intro(fact, s.lift(ny, X))
        return self.under([neg(Y)], body)

    def lem(self, a: P.Prop) -> int:
        """a | ~a."""
        D = disj(a, neg(a))
        hit = self.has(D)
        if hit is not None:
            return hit
        c1 = self.contra(self.axiom("OR_I1", a, neg(a)))        # ~D > ~a
        c2 = self.contra(self.axiom("OR_I2", a, neg(a)))        # ~D > ~~a
        nnd = self.neg_intro(c1, c2)
        return self.mp(nnd, self.axiom("NOT_E", D))

    def cases(self, a: P.Prop, pos: int, negc: int) -> int:
        """From a > C and ~a > C derive C."""
        C = self._forms[pos].b
        ore = self.axiom("OR_E", a, neg(a), C)
        return self.mp(self.lem(a), self.mp(negc, self.mp(pos, ore)))

    def fact_of(self, a_imp_b: int, a: int) -> int:
        return self.mp(a, a_imp_b)

    # ------------------------------------------------------------ constants

    def value(self, F: P.Prop, lits: Mapping | None = None, memo: dict | None = None):
        """Return (v, line) where line proves F if v is true and ~F otherwise.

        Atoms must appear in lits as atom -> (bool, line proving the literal).
        """
        lits = lits or {}
        memo = {} if memo is None else memo
        for n in P.postorder(F):
            if n.uid in memo:
                continue
            op = n.op
            if op == P.CONST:
                r = (True, self.top()) if n.value else (False, self.not_bot())
            elif op == P.ATOM:
                if n.value not in lits:
                    raise BuilderError(f"no literal for atom {n.value}")
                r = lits[n.value]
            elif op == P.NOT:
                v, i = memo[n.a.uid]
                r = (True, i) if not v else (False, self.dni(i))
            else:
                (va, ia), (vb, ib) = memo[n.a.uid], memo[n.b.uid]
                if op == P.AND:
                    if va and vb:
                        r = (True, self.conj_intro(ia, ib))
                    elif not va:
                        r = (False, self.not_and_l(ia, n.b))
                    else:
                        r = (False, self.not_and_r(n.a, ib))
                elif op == P.OR:
                    if va:
                        r = (True, self.mp(ia, self.axiom("OR_I1", n.a, n.b)))
                    elif vb:
                        r = (True, self.mp(ib, self.axiom("OR_I2", n.a, n.b)))
                    else:
                        r = (False, self.not_or(ia, ib))
                else:
                    if vb:
                        r = (True, self.lift(ib, n.a))
                    elif not va:
                        r = (True, self.imp_from_neg(ia, n.b))
                    else:
                        r = (False, self.not_imp(ia, ib))
            memo[n.uid] = r
        return memo[F.uid]

    def closed(self, F: P.Prop, memo: dict | None = None) -> int:
        """Line proving the closed true formula F."""
        if not P.is_closed(F):
            raise BuilderError("formula has atoms")
        v, i = self.value(F, memo=memo)
        if not v:
            raise BuilderError("closed formula is false")
        return i

    # ------------------------------------------------------------ folding

    def _fold(self, G: P.Prop) -> P.Prop:
        memo = self._fold_memo
        hit = memo.get(G.uid)
        if hit is not None:
            return hit
        for n in P.postorder(G):
            if n.uid in memo:
                continue
            if n.op in (P.CONST, P.ATOM):
                r = n
            elif n.op == P.NOT:
                r = P.fneg(memo[n.a.uid])
            else:
                r = P.FOLD[n.op](memo[n.a.uid], memo[n.b.uid])
            memo[n.uid] = r
        return memo[G.uid]

    def _ensure(self, G: P.Prop):
        """Populate the fold memo for all of G's nodes."""
        self._fold(G)

    def fold_proof(self, G: P.Prop, up: bool) -> int:
        """Line proving fold(G) > G when up, else G > fold(G)."""
        self._ensure(G)
        key = (G.uid, up)
        hit = self._fold_cache.get(key)
        if hit is not None:
            return hit
        # explicit stack: a frame is revisited once the child proofs it needs exist
        stack = [(G, up)]
        while stack:
            g, u = stack[-1]
            k = (g.uid, u)
            if k in self._fold_cache:
                stack.pop()
                continue
            need = self._fold_step(g, u)
            if isinstance(need, list):
                stack.extend(need)
                continue
            self._fold_cache[k] = need
            stack.pop()
        return self._fold_cache[key]

    def _fp(self, g, u):
        return self._fold_cache.get((g.uid, u))

    def _fold_step(self, G: P.Prop, up: bool):
        """One node of fold_proof; returns a line id or the child goals still missing."""
        f = self._fold_memo
        r = f[G.uid]
        if r is G:
            return self.id_(G)
        op = G.op
        if op == P.NOT:
            a = G.a
            a1 = f[a.uid]
            if up:
                if a1 is T_:
                    return self.bot_imp(G)
                na = self._fp(a, False)
                if na is None:
                    return [(a, False)]
                if a1 is F_:
                    return self.lift(self.neg_intro(na, self.lift(self.not_bot(), a)), T_)
                return self.contra(na)
            if a1 is F_:
                return self.lift(self.top(), G)
            pa = self._fp(a, True)
            if pa is None:
                return [(a, True)]
            if a1 is T_:
                return self.mp(self.mp(self.top(), pa), self.axiom("EFQ", a, F_))
            return self.contra(pa)

        a, b = G.a, G.b
        a1, b1 = f[a.uid], f[b.uid]
        if op == P.AND:
            if up:
                if a1 is F_ or b1 is F_:
                    return self.bot_imp(G)
                want = [(x, True) for x in (a, b) if self._fp(x, True) is None]
                if want:
                    return want
                pa, pb = self._fp(a, True), self._fp(b, True)
                if a1 is T_:
                    fa = self.mp(self.top(), pa)
                    return self.pair(self.lift(fa, b1), pb)
                if b1 is T_:
                    fb = self.mp(self.top(), pb)
                    return self.pair(pa, self.lift(fb, a1))
                return self.pair(self.trans(self.axiom("AND_E1", a1, b1), pa),
                                 self.trans(self.axiom("AND_E2", a1, b1), pb))
            if a1 is F_:
                na = self._fp(a, False)
                return [(a, False)] if na is None else self.trans(self.axiom("AND_E1", a, b), na)
            if b1 is F_:
                nb = self._fp(b, False)
                return [(b, False)] if nb is None else self.trans(self.axiom("AND_E2", a, b), nb)
            if a1 is T_:
                nb = self._fp(b, False)
                return [(b, False)] if nb is None else self.trans(self.axiom("AND_E2", a, b), nb)
            if b1 is T_:
                na = self._fp(a, False)
                return [(a, False)] if na is None else self.trans(self.axiom("AND_E1", a, b), na)
            want = [(x, False) for x in (a, b) if self._fp(x, False) is None]
            if want:
                return want
            na, nb = self._fp(a, False), self._fp(b, False)
            e1 = self.trans(self.axiom("AND_E1", a, b), na)
            e2 = self.trans(self.axiom("AND_E2", a, b), nb)
            return self.pair(e1, e2)

        if op == P.OR:
            if up:
                if a1 is T_:
                    pa = self._fp(a, True)
                    if pa is None:
                        return [(a, True)]
                    return self.lift(self.mp(self.mp(self.top(), pa), self.axiom("OR_I1", a, b)), T_)
                if b1 is T_:
                    pb = self._fp(b, True)
                    if pb is None:
                        return [(b, True)]
                    return self.lift(self.mp(self.mp(self.top(), pb), self.axiom("OR_I2", a, b)), T_)
                if a1 is F_:
                    pb = self._fp(b, True)
                    return [(b, True)] if pb is None else self.trans(pb, self.axiom("OR_I2", a, b))
                if b1 is F_:
                    pa = self._fp(a, True)
                    return [(a, True)] if pa is None else self.trans(pa, self.axiom("OR_I1", a, b))
                want = [(x, True) for x in (a, b) if self._fp(x, True) is None]
                if want:
                    return want
                pa, pb = self._fp(a, True), self._fp(b, True)
                ore = self.axiom("OR_E", a1, b1, G)
                x = self.trans(pa, self.axiom("OR_I1", a, b))
                y = self.trans(pb, self.axiom("OR_I2", a, b))
                return self.mp(y, self.mp(x, ore))
            if a1 is T_ or b1 is T_:
                return self.lift(self.top(), G)
            want = [(x, False) for x in (a, b) if self._fp(x, False) is None]
            if want:
                return want
            na, nb = self._fp(a, False), self._fp(b, False)
            if a1 is F_:
                x, y = self.trans(na, self.bot_imp(r)), nb
            elif b1 is F_:
                x, y = na, self.trans(nb, self.bot_imp(r))
            else:
                x = self.trans(na, self.axiom("OR_I1", a1, b1))
                y = self.trans(nb, self.axiom("OR_I2", a1, b1))
            ore = self.axiom("OR_E", a, b, r)
            return self.mp(y, self.mp(x, ore))

        # implication
        if up:
            if a1 is T_:
                pb = self._fp(b, True)
                return [(b, True)] if pb is None else self.trans(pb, self.axiom("K", b, a))
            if a1 is F_:
                na = self._fp(a, False)
                if na is None:
                    return [(a, False)]
                return self.lift(self.trans(na, self.bot_imp(b)), T_)
            if b1 is T_:
                pb = self._fp(b, True)
                if pb is None:
                    return [(b, True)]
                return self.lift(self.mp(self.mp(self.top(), pb), self.axiom("K", b, a)), T_)
            if b1 is F_:
                na = self._fp(a, False)
                if na is None:
                    return [(a, False)]
                return self.under([r], lambda s, h: _neg_a_imp(s, h, s.premise(self._forms[na]), a, b))
            want = [g for g in ((a, False), (b, True)) if self._fp(*g) is None]
            if want:
                return want
            na = self._fp(a, False)
            pb = self._fp(b, True)

            def body(s, h):
                def inner(t, ha):
                    x1 = t.mp(ha, t.premise(self._forms[na]))
                    y1 = t.mp(x1, t.premise(s.formula(h)))
                    return t.mp(y1, t.premise(self._forms[pb]))
                return s.under([a], inner)
            return self.under([r], body)
        if a1 is F_ or b1 is T_:
            return self.lift(self.top(), G)
        if a1 is T_:
            want = [g for g in ((a, True), (b, False)) if self._fp(*g) is None]
            if want:
                return want
            fa = self.mp(self.top(), self._fp(a, True))
            nb = self._fp(b, False)

            def body(s, h):
                y1 = s.mp(s.premise(self._forms[fa]), h)
                return s.mp(y1, s.premise(self._forms[nb]))
            return self.under([G], body)
        want = [g for g in ((a, True), (b, False)) if self._fp(*g) is None]
        if want:
            return want
        pa, nb = self._fp(a, True), self._fp(b, False)
        if b1 is F_:
            # (a > b) > ~a1
            def body(s, h):
                a1_b = s.trans(s.premise(self._forms[pa]), h)
                a1_bot = s.trans(a1_b, s.premise(self._forms[nb]))
                return s.neg_intro(a1_bot, s.lift(s.not_bot(), a1))
            return self.under([G], body)

        def body(s, h):
            def inner(t, ha1):
                x1 = t.mp(ha1, t.premise(self._forms[pa]))
                y1 = t.mp(x1, t.premise(s.formula(h)))
                return t.mp(y1, t.premise(self._forms[nb]))
            return s.under([a1], inner)
        return self.under([G], body)

    def fold_equiv(self, G: P.Prop):
        """(line of G > fold(G), line of fold(G) > G)."""
        return self.fold_proof(G, False), self.fold_proof(G, True)

    # ------------------------------------------------------------ tautologies

    def tautology(self, F: P.Prop) -> int:
        """Line proving a small tautology F (Kalmár's construction, cached)."""
        hit = self.has(F)
        if hit is not None:
            return hit
        order = P.sorted_atoms(F)
        canon = [P.Named(f"_k{j}") for j in range(len(order))]
        to_canon = {a: P.atom(c) for a, c in zip(order, canon)}
        back = {c: P.atom(a) for a, c in zip(order, canon)}
        C = P.substitute(F, to_canon)
        template = _kalmar_template(C)
        remap = self.splice(template, sigma=back)
        return remap[template.lines[-1].id]


def _neg_a_imp(s: ProofBuilder, h: int, na_s: int, a: P.Prop, b: P.Prop) -> int:
    """Under hypothesis ~a1 (line h) with fact a > a1, derive a > b."""
    n_a = s.mp(h, s.contra(na_s))           # ~a
    return s.imp_from_neg(n_a, b)


def _restate(lid: int, F: P.Prop, conclusion: int) -> list:
    """Three lines ending in F so that F is the final line."""
    return [
        ProofLine(lid, imp(F, imp(F, F)), "AX", ("K",)),
        ProofLine(lid + 1, imp(F, F), "MP", (conclusion, lid)),
        ProofLine(lid + 2, F, "MP", (conclusion, lid + 1)),
    ]


# ---------------------------------------------------------------- deduction

def deduce(proof: Proof, h: P.Prop, target: P.Prop):
    """Discharge hypothesis h: returns (proof of h > target, h > target).

    Lines not depending on h are kept; dependent lines are rebuilt under h.
    Substitution into a dependent line is not sound here and raises.
    """
    nb = ProofBuilder()
    plain: dict[int, int] = {}
    under_h: dict[int, int] = {}
    dep: dict[int, bool] = {}

    def as_imp(i):
        if dep[i]:
            return under_h[i]
        return nb.lift(plain[i], h)

    for line in proof.lines:
        rule, args, F = line.rule, line.args, line.formula
        if rule == "PREM" and F is h:
            dep[line.id] = True
            under_h[line.id] = nb.id_(h)
        elif rule == "MP" and (dep[args[0]] or dep[args[1]]):
            dep[line.id] = True
            under_h[line.id] = nb.app(as_imp(args[1]), as_imp(args[0]))
        elif rule == "SUB" and dep[args[0]]:
            raise BuilderError("substitution into a hypothesis-dependent line")
        else:
            dep[line.id] = False
            if rule == "AX":
                plain[line.id] = nb._emit(F, "AX", args)
            elif rule == "MP":
                plain[line.id] = nb.mp(plain[args[0]], plain[args[1]])
            elif rule == "SUB":
                plain[line.id] = nb.sub(plain[args[0]], dict(args[1]))
            elif rule == "PREM":
                plain[line.id] = nb.premise(F)
            else:
                plain[line.id] = nb.import_(args[0], F)
    goal = None
    for line in reversed(proof.lines):
        if line.formula is target:
            goal = as_imp(line.id)
            break
    if goal is None:
        raise BuilderError("target formula not derived")
    new_target = imp(h, target)
    out = nb.proof(goal)
    return out, new_target


# ---------------------------------------------------------------- Kalmár

_kalmar_cache: dict = {}
_kalmar_lock = threading.Lock()


def _kalmar_template(C: P.Prop) -> Proof:
    with _kalmar_lock:
        hit = _kalmar_cache.get(C.uid)
        if hit is not None and hit[0] is C:
            return hit[1]
    atoms = [P.atom(a) for a in P.sorted_atoms(C)]

    def rec(b: ProofBuilder, i: int) -> int:
        if i == len(atoms):
            lits = {}
            for x in atoms:
                for lit, v in ((x, True), (neg(x), False)):
                    lid = b.has(lit)
                    if lid is not None and b.lines[lid - 1].rule == "PREM":
                        lits[x.value] = (v, lid)
            v, lid = b.value(C, lits)
            if not v:
                raise BuilderError(f"not a tautology: {C}")
            return lid
        a = atoms[i]
        prior = [ln.formula for ln in b.lines if ln.rule == "PREM"]

        def branch(lit):
            def body(s, h):
                for f in prior:
                    s.premise(f)
                return rec(s, i + 1)
            return b.under([lit], body)
        return b.cases(a, branch(a), branch(neg(a)))

    b = ProofBuilder()
    top = rec(b, 0)
    proof = b.proof(top)
    with _kalmar_lock:
        _kalmar_cache[C.uid] = (C, proof)
    return proof


# ---------------------------------------------------------------- entry points

def prove_closed(F: P.Prop) -> Proof:
    b = ProofBuilder()
    return b.proof(b.closed(F))


def prove_tautology(F: P.Prop) -> Proof:
    b = ProofBuilder()
    return b.proof(b.tautology(F))


class NotReachable(BuilderError):
    pass


def prove_equiv_chain(A: P.Prop, B: P.Prop) -> Proof:
    """Proof whose last line is (A > B) & (B > A).

    B must agree with A after constant folding of both sides.
    """
    b = ProofBuilder()
    if A is B:
        i = b.id_(A)
        return b.proof(b.conj_intro(i, i))
    fa, fb = P.fold(A), P.fold(B)
    if fa is not fb:
        raise NotReachable("B is not A with constant subformulas folded")
    a_down, a_up = b.fold_equiv(A)       # A > fA, fA > A
    b_down, b_up = b.fold_equiv(B)       # B > fB, fB > B
    ab = b.trans(a_down, b_up)
    ba = b.trans(b_down, a_up)
    return b.proof(b.conj_intro(ab, ba))
