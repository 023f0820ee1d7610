"""Canonical text rendering for expressions, predicates, and statements.

The same obligation always prints the same bytes; reports, SMT export
comments, and extracted program text all rely on that.
"""

from __future__ import annotations

from .ast import (
    Abstract,
    AllInts,
    AndP,
    Assign,
    Atom,
    Binary,
    BlockRef,
    BoolLit,
    Call,
    Exists,
    Expr,
    FalseP,
    Forall,
    IfE,
    Implies,
    IntLit,
    IntRange,
    LocalDecl,
    MethodCallStmt,
    New,
    Not,
    NotP,
    Old,
    OrP,
    Predicate,
    Repeat,
    Select,
    SeqElems,
    SeqIndices,
    SeqLit,
    SeqOp,
    SeqStmt,
    Skip,
    Statement,
    TrueP,
    TypeAtom,
    Var,
)

# Expression precedence levels; higher binds tighter.
_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3,
    "!=": 3,
    "<": 3,
    "<=": 3,
    ">": 3,
    ">=": 3,
    "+": 4,
    "-": 4,
    "*": 5,
    "div": 5,
}
_UNARY_PREC = 6
_ATOM_PREC = 7


def exprStr(e: Expr) -> str:
    return _expr(e, 0)


def _expr(e: Expr, parent: int) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Old):
        return "old(%s)" % e.inner.name
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        # Left-associative: the right child needs parens at equal precedence.
        text = "%s %s %s" % (_expr(e.lhs, prec), e.op, _expr(e.rhs, prec + 1))
        return "(%s)" % text if prec < parent else text
    if isinstance(e, Not):
        text = "!%s" % _expr(e.inner, _UNARY_PREC)
        return "(%s)" % text if _UNARY_PREC < parent else text
    if isinstance(e, SeqLit):
        return "[%s]" % ", ".join(_expr(x, 0) for x in e.elems)
    if isinstance(e, SeqOp):
        recv = _expr(e.receiver, _ATOM_PREC)
        if e.index is None:
            return "%s.%s()" % (recv, e.op)
        return "%s.%s(%s)" % (recv, e.op, _expr(e.index, 0))
    if isinstance(e, Call):
        recv = _expr(e.receiver, _ATOM_PREC)
        args = ", ".join(_expr(a, 0) for a in e.args)
        if isinstance(e.receiver, Var) and e.receiver.name == "this":
            return "%s(%s)" % (e.method, args)
        return "%s.%s(%s)" % (recv, e.method, args)
    if isinstance(e, New):
        return "new %s(%s)" % (e.cls, ", ".join(_expr(a, 0) for a in e.args))
    if isinstance(e, IfE):
        parts = ["if (%s) { %s }" % (_expr(e.cond, 0), _expr(e.then, 0))]
        els = e.els
        while isinstance(els, IfE):
            parts.append("elseif (%s) { %s }" % (_expr(els.cond, 0), _expr(els.then, 0)))
            els = els.els
        parts.append("else { %s }" % _expr(els, 0))
        return " ".join(parts)
    raise TypeError("not an expression: %r" % (e,))


# Predicate precedence: ==> (1, right) < || (2) < && (3) < ! (4) < atom (5).


def predStr(p: Predicate) -> str:
    return _pred(p, 0)


def _pred(p: Predicate, parent: int) -> str:
    if isinstance(p, TrueP):
        return "true"
    if isinstance(p, FalseP):
        return "false"
    if isinstance(p, Atom):
        # Comparisons sit at expression precedence 3, above predicate &&;
        # under a predicate negation they need explicit parens.
        return _expr(p.expr, 3 if parent <= 3 else _ATOM_PREC)
    if isinstance(p, TypeAtom):
        return "%s: %s" % (p.var, p.cls)
    if isinstance(p, NotP):
        text = "!%s" % _pred(p.inner, 4)
        return "(%s)" % text if 4 < parent else text
    if isinstance(p, AndP):
        if not p.items:
            return "true"
        text = " && ".join(_pred(q, 3) for q in p.items)
        return "(%s)" % text if 3 < parent else text
    if isinstance(p, OrP):
        if not p.items:
            return "false"
        text = " || ".join(_pred(q, 3) for q in p.items)
        return "(%s)" % text if 2 < parent else text
    if isinstance(p, Implies):
        text = "%s ==> %s" % (_pred(p.lhs, 2), _pred(p.rhs, 1))
        return "(%s)" % text if 1 < parent else text
    if isinstance(p, (Forall, Exists)):
        kind = "forall" if isinstance(p, Forall) else "exists"
        dom = p.domain
        if isinstance(dom, AllInts):
            text = "%s Num %s: %s" % (kind, p.var, _pred(p.body, 0))
            return "(%s)" % text if parent > 0 else text
        if isinstance(dom, IntRange):
            dtext = "[%d, %d]" % (dom.lo, dom.hi)
        elif isinstance(dom, SeqElems):
            dtext = "elems(%s)" % _expr(dom.seq, 0)
        else:
            dtext = "indices(%s)" % _expr(dom.seq, 0)
        text = "%s %s in %s: %s" % (kind, p.var, dtext, _pred(p.body, 0))
        return "(%s)" % text if parent > 0 else text
    raise TypeError("not a predicate: %r" % (p,))


def stmtStr(s: Statement, indent: int = 0) -> str:
    pad = "  " * indent

    if isinstance(s, SeqStmt):
        return "%s\n%s" % (stmtStr(s.first, indent), stmtStr(s.second, indent))
    if isinstance(s, Skip):
        return pad + "skip;"
    if isinstance(s, Assign):
        return "%s%s := %s;" % (pad, s.target, exprStr(s.value))
    if isinstance(s, LocalDecl):
        return "%s%s %s := %s;" % (pad, s.type, s.name, exprStr(s.init))
    if isinstance(s, Abstract):
        return "%s⟨abstract %s⟩" % (pad, s.id)
    if isinstance(s, MethodCallStmt):
        args = ", ".join(exprStr(a) for a in s.args)
        return "%s%s := %s(%s);" % (pad, s.resultTarget, s.method, args)
    if isinstance(s, BlockRef):
        return "%sblock %s requires: %s; ensures: %s;" % (
            pad,
            s.name,
            predStr(s.pre),
            predStr(s.post),
        )
    if isinstance(s, Repeat):
        head = "%swhile (%s)\n%s  invariant: %s;\n%s  variant: %s;\n%s{\n%s\n%s}" % (
            pad,
            exprStr(s.guard),
            pad,
            predStr(s.invariant),
            pad,
            exprStr(s.variant),
            pad,
            stmtStr(s.body, indent + 1),
            pad,
        )
        return head
    if isinstance(s, Select):
        # Recover if/elseif/else shape when the guards follow the desugaring.
        chain = _ifChain(s)
        if chain is not None:
            positive, elseBody = chain
            parts = []
            for k, (g, body) in enumerate(positive):
                kw = pad + "if" if k == 0 else " elseif"
                parts.append(
                    "%s (%s) {\n%s\n%s}" % (kw, exprStr(g), stmtStr(body, indent + 1), pad)
                )
            if not isinstance(elseBody, Skip):
                parts.append(" else {\n%s\n%s}" % (stmtStr(elseBody, indent + 1), pad))
            return "".join(parts)
        lines = [pad + "select {"]
        for g, body in s.branches:
            lines.append("%s  (%s) -> {" % (pad, exprStr(g)))
            lines.append(stmtStr(body, indent + 2))
            lines.append(pad + "  }")
        lines.append(pad + "}")
        return "\n".join(lines)
    raise TypeError("not a statement: %r" % (s,))


def _conjNegs(gs):
    cur = None
    for g in gs:
        neg = Not(g)
        cur = neg if cur is None else Binary("&&", cur, neg)
    return cur


def _ifChain(s: Select):
    """Match the guards the if/elseif/else desugaring produces.

    Branch k carries !g1 && ... && !g(k-1) && gk and the final branch the
    conjunction of all negations. Returns (positive branches, else body),
    or None when the guards differ from that scheme.
    """

    gs: list = []
    bodies: list = []
    n = len(s.branches)
    for k, (g, body) in enumerate(s.branches):
        prefix = _conjNegs(gs)
        if k == n - 1 and prefix is not None and g == prefix:
            return list(zip(gs, bodies)), body
        if prefix is None:
            pos = g
        elif isinstance(g, Binary) and g.op == "&&" and g.lhs == prefix:
            pos = g.rhs
        else:
            return None
        gs.append(pos)
        bodies.append(body)
    return None
