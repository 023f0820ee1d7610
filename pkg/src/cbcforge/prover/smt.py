"""SMT-LIB2 export of proof obligations.

The script encodes sequences as an uninterpreted sort with length, element
and tail functions plus the axioms relating them; `contains` and `element`
are defined on top of those. The hypothesis and negated conclusion go into
a single assert, so `unsat` from a solver means the obligation is valid.

Free variables are constrained to the prover's enumeration domain so that
a solver verdict and checkImplication agree exactly on the bounded
fragment. The one deliberate departure: a quantifier whose range is the
all-int sentinel [-B, B] (B = the configured int bound) is emitted as an
unconstrained Int binder, i.e. it quantifies over all integers.

Output is deterministic: the same obligation and config give a
byte-identical script.
"""

from __future__ import annotations

import re

from ..lang.ast import (
    AndP,
    Atom,
    Binary,
    BoolLit,
    Exists,
    FalseP,
    Forall,
    Implies,
    IntLit,
    IntRange,
    Not,
    NotP,
    OrP,
    Predicate,
    SeqElems,
    SeqIndices,
    SeqLit,
    SeqOp,
    T_BOOL,
    T_INT,
    T_LIST,
    TrueP,
    TypeAtom,
    Var,
)
from .result import Obligation, ProverConfig

__all__ = ["EmitError", "emitSmt"]


class EmitError(Exception):
    """Raised when an obligation has no SMT-LIB rendering."""


# Sort and function names are chosen to avoid the built-in sequence
# theories of common solvers (z3/cvc5 reserve `Seq` and the `seq.*`
# namespace once the logic enables strings).
SEQ_SORT = "SeqVal"

_PREAMBLE = [
    "(declare-sort %s 0)" % SEQ_SORT,
    "(declare-fun seq-len (%s) Int)" % SEQ_SORT,
    "(declare-fun seq-get (%s Int) Int)" % SEQ_SORT,
    "(declare-fun seq-tail (%s) %s)" % (SEQ_SORT, SEQ_SORT),
    "(assert (forall ((s %s)) (>= (seq-len s) 0)))" % SEQ_SORT,
    "(assert (forall ((s %s)) (=> (> (seq-len s) 0)"
    " (= (seq-len (seq-tail s)) (- (seq-len s) 1)))))" % SEQ_SORT,
    "(assert (forall ((s %s) (k Int)) (=> (and (> (seq-len s) 0)"
    " (<= 0 k) (< k (seq-len (seq-tail s))))"
    " (= (seq-get (seq-tail s) k) (seq-get s (+ k 1))))))" % SEQ_SORT,
    "(assert (forall ((s %s) (t %s)) (=> (and (= (seq-len s) (seq-len t))"
    " (forall ((k Int)) (=> (and (<= 0 k) (< k (seq-len s)))"
    " (= (seq-get s k) (seq-get t k))))) (= s t))))" % (SEQ_SORT, SEQ_SORT),
    "(define-fun seq-contains ((s %s) (x Int)) Bool"
    " (exists ((k Int)) (and (<= 0 k) (< k (seq-len s))"
    " (= (seq-get s k) x))))" % SEQ_SORT,
    "(define-fun seq-element ((s %s)) Int (seq-get s 0))" % SEQ_SORT,
]

_SIMPLE_SYM = re.compile(r"[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*\Z")

# Words that would collide with theory symbols or our own helpers if a
# variable happened to carry the same name.
_RESERVED = {
    "true", "false", "and", "or", "not", "xor", "ite", "let", "distinct",
    "div", "mod", "abs", "forall", "exists", "as", "par",
    "seq-len", "seq-get", "seq-tail", "seq-contains", "seq-element",
    "Int", "Bool", SEQ_SORT,
}


def _sym(name: str, taken: frozenset[str]) -> str:
    """SMT symbol for a source name, quoting or renaming when needed."""

    if name in _RESERVED:
        fresh = name + "!v"
        while fresh in taken:
            fresh += "!v"
        return fresh
    if _SIMPLE_SYM.match(name):
        return name
    if "|" in name or "\\" in name:
        raise EmitError("variable name %r cannot be quoted in SMT-LIB" % name)
    return "|%s|" % name


def _intLit(n: int) -> str:
    return str(n) if n >= 0 else "(- %d)" % -n


class _Emitter:
    def __init__(self, ob: Obligation, cfg: ProverConfig):
        self.ob = ob
        self.cfg = cfg
        taken = frozenset(ob.envTypes)
        self.syms = {name: _sym(name, taken) for name in ob.envTypes}

    def name(self, var: str) -> str:
        sym = self.syms.get(var)
        if sym is None:
            # quantifier binders never collide with env names by
            # construction, but rename defensively all the same
            sym = _sym(var, frozenset(self.ob.envTypes))
        return sym

    def expr(self, e) -> str:
        if isinstance(e, IntLit):
            return _intLit(e.value)
        if isinstance(e, BoolLit):
            return "true" if e.value else "false"
        if isinstance(e, Var):
            return self.name(e.name)
        if isinstance(e, Not):
            return "(not %s)" % self.expr(e.inner)
        if isinstance(e, Binary):
            a, b = self.expr(e.lhs), self.expr(e.rhs)
            if e.op == "div":
                # SMT-LIB div is Euclidean; this ite reproduces floor
                # division for every nonzero divisor
                return "(ite (> %s 0) (div %s %s) (div (- %s) (- %s)))" % (b, a, b, a, b)
            if e.op == "==":
                return "(= %s %s)" % (a, b)
            if e.op == "!=":
                return "(not (= %s %s))" % (a, b)
            return "(%s %s %s)" % (e.op, a, b)
        if isinstance(e, SeqOp):
            recv = self.expr(e.receiver)
            if e.op == "size":
                return "(seq-len %s)" % recv
            if e.op == "get":
                return "(seq-get %s %s)" % (recv, self.expr(e.index))
            if e.op == "contains":
                return "(seq-contains %s %s)" % (recv, self.expr(e.index))
            if e.op == "element":
                return "(seq-element %s)" % recv
            return "(seq-tail %s)" % recv
        if isinstance(e, SeqLit):
            raise EmitError(
                "sequence literals have no SMT encoding; bind the value to a variable first"
            )
        raise EmitError("expression %r is not part of the obligation language" % type(e).__name__)

    def pred(self, p: Predicate) -> str:
        if isinstance(p, TrueP):
            return "true"
        if isinstance(p, FalseP):
            return "false"
        if isinstance(p, Atom):
            return self.expr(p.expr)
        if isinstance(p, TypeAtom):
            # sorts are carried by the declarations, nothing left to say
            return "true"
        if isinstance(p, NotP):
            return "(not %s)" % self.pred(p.inner)
        if isinstance(p, AndP):
            return self._nary("and", p.items)
        if isinstance(p, OrP):
            return self._nary("or", p.items)
        if isinstance(p, Implies):
            return "(=> %s %s)" % (self.pred(p.lhs), self.pred(p.rhs))
        if isinstance(p, (Forall, Exists)):
            return self._quant(p)
        raise EmitError("predicate %r is not part of the obligation language" % type(p).__name__)

    def _nary(self, op: str, items) -> str:
        if not items:
            return "true" if op == "and" else "false"
        if len(items) == 1:
            return self.pred(items[0])
        return "(%s %s)" % (op, " ".join(self.pred(q) for q in items))

    def _quant(self, p) -> str:
        univ = isinstance(p, Forall)
        head = "forall" if univ else "exists"
        v = self.name(p.var)
        d = p.domain
        body = self.pred(p.body)
        if isinstance(d, IntRange):
            b = self.cfg.intBound
            if (d.lo, d.hi) == (-b, b):
                # all-int sentinel: quantify over the full integers
                return "(%s ((%s Int)) %s)" % (head, v, body)
            guard = "(and (<= %s %s) (<= %s %s))" % (_intLit(d.lo), v, v, _intLit(d.hi))
        elif isinstance(d, SeqElems):
            guard = "(seq-contains %s %s)" % (self.expr(d.seq), v)
        elif isinstance(d, SeqIndices):
            s = self.expr(d.seq)
            guard = "(and (<= 0 %s) (< %s (seq-len %s)))" % (v, v, s)
        else:
            raise EmitError("unknown quantifier domain %r" % type(d).__name__)
        if univ:
            return "(forall ((%s Int)) (=> %s %s))" % (v, guard, body)
        return "(exists ((%s Int)) (and %s %s))" % (v, guard, body)


def _varLines(em: _Emitter, out: list[str]) -> None:
    cfg = em.cfg
    opaque: dict[str, list[str]] = {}
    for name in sorted(em.ob.envTypes):
        t = em.ob.envTypes[name]
        if t not in (T_INT, T_BOOL, T_LIST):
            opaque.setdefault(t, []).append(name)

    for t in sorted(opaque):
        sort = _sym(t, frozenset())
        out.append("(declare-sort %s 0)" % sort)
        # the enumeration prover gives opaque class values a two-element
        # carrier; the anchors pin the same cardinality for each variable
        out.append("(declare-const %s!a %s)" % (sort, sort))
        out.append("(declare-const %s!b %s)" % (sort, sort))
        out.append("(assert (distinct %s!a %s!b))" % (sort, sort))

    for name in sorted(em.ob.envTypes):
        t = em.ob.envTypes[name]
        sym = em.syms[name]
        if t == T_INT:
            out.append("(declare-const %s Int)" % sym)
            out.append(
                "(assert (and (<= %s %s) (<= %s %s)))"
                % (_intLit(-cfg.intBound), sym, sym, _intLit(cfg.intBound))
            )
        elif t == T_BOOL:
            out.append("(declare-const %s Bool)" % sym)
        elif t == T_LIST:
            out.append("(declare-const %s %s)" % (sym, SEQ_SORT))
            out.append("(assert (<= (seq-len %s) %d))" % (sym, cfg.maxSeqLen))
            out.append(
                "(assert (forall ((k Int)) (=> (and (<= 0 k) (< k (seq-len %s)))"
                " (and (<= %s (seq-get %s k)) (<= (seq-get %s k) %s)))))"
                % (sym, _intLit(-cfg.seqElemBound), sym, sym, _intLit(cfg.seqElemBound))
            )
        else:
            sort = _sym(t, frozenset())
            out.append("(declare-const %s %s)" % (sym, sort))
            out.append(
                "(assert (or (= %s %s!a) (= %s %s!b)))" % (sym, sort, sym, sort)
            )


def emitSmt(ob: Obligation, cfg: ProverConfig = ProverConfig()) -> str:
    """Render an obligation as a complete SMT-LIB2 script.

    `unsat` means the obligation is valid. Raises EmitError when the
    obligation contains a construct with no encoding (sequence literals).
    """

    em = _Emitter(ob, cfg)
    out = [
        "; obligation: %s" % ob.id.replace("\n", " "),
        "; provenance: %s" % ob.provenance.replace("\n", " "),
        "(set-logic ALL)",
    ]
    out.extend(_PREAMBLE)
    _varLines(em, out)
    hyp = em.pred(ob.hypothesis)
    concl = em.pred(ob.conclusion)
    out.append("(assert (and %s (not %s)))" % (hyp, concl))
    out.append("(check-sat)")
    return "\n".join(out) + "\n"
