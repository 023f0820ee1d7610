"""Type checking for the guarded-command fragment.

The only value sorts are int, bool, and integer sequences (List). Trait
method bodies have their own typing judgment (module traits); here Call,
New, and conditional expressions are rejected outright.
"""

from __future__ import annotations

from .ast import (
    ARITH_OPS,
    AllInts,
    Atom,
    AndP,
    Binary,
    BoolLit,
    BoundedDomain,
    Call,
    Exists,
    Expr,
    FalseP,
    Forall,
    IfE,
    Implies,
    IntLit,
    IntRange,
    New,
    Not,
    NotP,
    Old,
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


class KernelTypeError(Exception):
    pass


def typeOfExpr(e: Expr, env: dict[str, str]) -> str:
    if isinstance(e, IntLit):
        return T_INT
    if isinstance(e, BoolLit):
        return T_BOOL
    if isinstance(e, Var):
        t = env.get(e.name)
        if t is None:
            raise KernelTypeError("undeclared variable %r" % e.name)
        return t
    if isinstance(e, Old):
        t = env.get(e.inner.name)
        if t is None:
            raise KernelTypeError("undeclared variable %r in old(...)" % e.inner.name)
        return t
    if isinstance(e, Binary):
        lt = typeOfExpr(e.lhs, env)
        rt = typeOfExpr(e.rhs, env)
        if e.op in ARITH_OPS:
            _want(e.op, T_INT, lt, rt)
            return T_INT
        if e.op in ("&&", "||"):
            _want(e.op, T_BOOL, lt, rt)
            return T_BOOL
        if e.op in ("==", "!="):
            if lt != rt:
                raise KernelTypeError(
                    "operands of %s have different types (%s vs %s)" % (e.op, lt, rt)
                )
            return T_BOOL
        _want(e.op, T_INT, lt, rt)  # < <= > >=
        return T_BOOL
    if isinstance(e, Not):
        if typeOfExpr(e.inner, env) != T_BOOL:
            raise KernelTypeError("! applied to a non-boolean")
        return T_BOOL
    if isinstance(e, SeqLit):
        for x in e.elems:
            if typeOfExpr(x, env) != T_INT:
                raise KernelTypeError("sequence literals hold integers only")
        return T_LIST
    if isinstance(e, SeqOp):
        if typeOfExpr(e.receiver, env) != T_LIST:
            raise KernelTypeError("%s needs a sequence receiver" % e.op)
        if e.index is not None and typeOfExpr(e.index, env) != T_INT:
            raise KernelTypeError("argument of %s must be an integer" % e.op)
        if e.op == "size":
            return T_INT
        if e.op == "get":
            return T_INT
        if e.op == "contains":
            return T_BOOL
        if e.op == "element":
            return T_INT
        return T_LIST  # tail
    if isinstance(e, (Call, New, IfE)):
        raise KernelTypeError(
            "trait-language expression not allowed here: %r" % type(e).__name__
        )
    raise KernelTypeError("not an expression: %r" % (e,))


def _want(op: str, t: str, lt: str, rt: str):
    if lt != t or rt != t:
        raise KernelTypeError("operands of %s must be %s (got %s, %s)" % (op, t, lt, rt))


def checkDomain(d: BoundedDomain, env: dict[str, str]):
    if isinstance(d, AllInts):
        raise KernelTypeError(
            "Num quantifier not resolved to a bounded window; "
            "trait specifications are bounded at verification time"
        )
    if isinstance(d, IntRange):
        return
    if isinstance(d, (SeqElems, SeqIndices)):
        if typeOfExpr(d.seq, env) != T_LIST:
            raise KernelTypeError("quantifier domain needs a sequence expression")
        return
    raise KernelTypeError("not a bounded domain: %r" % (d,))


def checkPred(p: Predicate, env: dict[str, str]):
    """Raise KernelTypeError unless p is boolean-typed under env."""

    if isinstance(p, (TrueP, FalseP)):
        return
    if isinstance(p, Atom):
        if typeOfExpr(p.expr, env) != T_BOOL:
            raise KernelTypeError("predicate atom is not boolean: %r" % (p.expr,))
        return
    if isinstance(p, TypeAtom):
        if p.var not in env:
            raise KernelTypeError("undeclared variable %r in type assertion" % p.var)
        return
    if isinstance(p, NotP):
        checkPred(p.inner, env)
        return
    if isinstance(p, (AndP, OrP)):
        for q in p.items:
            checkPred(q, env)
        return
    if isinstance(p, Implies):
        checkPred(p.lhs, env)
        checkPred(p.rhs, env)
        return
    if isinstance(p, (Forall, Exists)):
        checkDomain(p.domain, env)
        inner = dict(env)
        inner[p.var] = T_INT  # all bounded domains range over integers
        checkPred(p.body, inner)
        return
    raise KernelTypeError("not a predicate: %r" % (p,))
