"""Independent reference evaluator for obligations.

Deliberately shares no evaluation code with cbcforge.prover: predicates are
interpreted by direct recursion over the AST with plain Python values (int,
bool, tuple-of-int for sequences), and stores come straight from
itertools.product. Used to cross-check the packaged prover.

Semantics mirrored here (the contract both sides implement):
  - &&, ||, ==> and quantifier bodies short-circuit left to right.
  - div is floor division; div by zero, get out of range, element/tail on
    an empty sequence raise EvalError.
  - A hypothesis error at some store, or a conclusion error at a store where
    the hypothesis holds, aborts the scan at that store ("unknown"). A
    falsifying store aborts with "invalid". First offender wins.
  - Variables are enumerated in sorted name order, rightmost varying
    fastest; integers ascend, sequences are shortlex, bools are
    False then True, opaque class values are 0 then 1.
"""

from __future__ import annotations

import itertools

from cbcforge.lang.ast import (
    Atom, AndP, Binary, BoolLit, Exists, FalseP, Forall, Implies, IntLit,
    IntRange, Not, NotP, OrP, SeqElems, SeqIndices, SeqLit, SeqOp, TrueP,
    TypeAtom, Var,
)


class EvalError(Exception):
    pass


def evalExpr(e, store):
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Var):
        return store[e.name]
    if isinstance(e, Binary):
        if e.op == "&&":
            return bool(evalExpr(e.lhs, store)) and bool(evalExpr(e.rhs, store))
        if e.op == "||":
            return bool(evalExpr(e.lhs, store)) or bool(evalExpr(e.rhs, store))
        l = evalExpr(e.lhs, store)
        r = evalExpr(e.rhs, store)
        if e.op == "+":
            return l + r
        if e.op == "-":
            return l - r
        if e.op == "*":
            return l * r
        if e.op == "div":
            if r == 0:
                raise EvalError("division by zero")
            return l // r
        if e.op == "==":
            return l == r
        if e.op == "!=":
            return l != r
        if e.op == "<":
            return l < r
        if e.op == "<=":
            return l <= r
        if e.op == ">":
            return l > r
        if e.op == ">=":
            return l >= r
        raise TypeError("op %r" % e.op)
    if isinstance(e, Not):
        return not evalExpr(e.inner, store)
    if isinstance(e, SeqLit):
        return tuple(evalExpr(x, store) for x in e.elems)
    if isinstance(e, SeqOp):
        s = evalExpr(e.receiver, store)
        if e.op == "size":
            return len(s)
        if e.op == "get":
            i = evalExpr(e.index, store)
            if i < 0 or i >= len(s):
                raise EvalError("get index %d out of range" % i)
            return s[i]
        if e.op == "contains":
            return evalExpr(e.index, store) in s
        if e.op == "element":
            if not s:
                raise EvalError("element of empty sequence")
            return s[0]
        if e.op == "tail":
            if not s:
                raise EvalError("tail of empty sequence")
            return s[1:]
        raise TypeError("seq op %r" % e.op)
    raise TypeError("cannot evaluate %r" % (e,))


def _domainValues(d, store):
    if isinstance(d, IntRange):
        return range(d.lo, d.hi + 1)
    if isinstance(d, SeqElems):
        return evalExpr(d.seq, store)
    if isinstance(d, SeqIndices):
        return range(len(evalExpr(d.seq, store)))
    raise TypeError("domain %r" % (d,))


def evalPred(p, store):
    if isinstance(p, TrueP):
        return True
    if isinstance(p, FalseP):
        return False
    if isinstance(p, Atom):
        return bool(evalExpr(p.expr, store))
    if isinstance(p, TypeAtom):
        return True
    if isinstance(p, NotP):
        return not evalPred(p.inner, store)
    if isinstance(p, AndP):
        for q in p.items:
            if not evalPred(q, store):
                return False
        return True
    if isinstance(p, OrP):
        for q in p.items:
            if evalPred(q, store):
                return True
        return False
    if isinstance(p, Implies):
        if not evalPred(p.lhs, store):
            return True
        return evalPred(p.rhs, store)
    if isinstance(p, Forall):
        for v in _domainValues(p.domain, store):
            inner = dict(store)
            inner[p.var] = v
            if not evalPred(p.body, inner):
                return False
        return True
    if isinstance(p, Exists):
        for v in _domainValues(p.domain, store):
            inner = dict(store)
            inner[p.var] = v
            if evalPred(p.body, inner):
                return True
        return False
    raise TypeError("cannot evaluate %r" % (p,))


def shortlexSeqs(maxLen, elemBound):
    out = []
    for n in range(maxLen + 1):
        out.extend(itertools.product(range(-elemBound, elemBound + 1), repeat=n))
    return out


def varDomain(typeName, cfg):
    if typeName == "int":
        return list(range(-cfg.intBound, cfg.intBound + 1))
    if typeName == "bool":
        return [False, True]
    if typeName == "List":
        return shortlexSeqs(cfg.maxSeqLen, cfg.seqElemBound)
    return [0, 1]  # opaque class values


def naiveCheck(ob, cfg):
    """Returns (verdict, store, where): verdict in {'valid','invalid','unknown'};
    store is the offending assignment for invalid/unknown; where names the side
    that errored for unknown ('hypothesis' or 'conclusion')."""

    names = sorted(ob.envTypes)
    domains = [varDomain(ob.envTypes[n], cfg) for n in names]
    for combo in itertools.product(*domains):
        store = dict(zip(names, combo))
        try:
            h = evalPred(ob.hypothesis, store)
        except EvalError:
            return "unknown", store, "hypothesis"
        if not h:
            continue
        try:
            c = evalPred(ob.conclusion, store)
        except EvalError:
            return "unknown", store, "conclusion"
        if not c:
            return "invalid", store, None
    return "valid", None, None
