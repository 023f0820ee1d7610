"""Small-step interpreter for flattened trait worlds.

Values are integer literals, boolean literals, and constructions whose
arguments are values. Reduction is deterministic, leftmost-innermost:
receiver before arguments, arguments left to right, conditionals reduce
only their guard, && and || short-circuit exactly like the prover does.
Abstract zero-argument methods are the getters; calling one projects the
matching constructor argument. Sequence operations walk Cons/Nil chains.

A term that cannot reduce raises StuckError; running out of fuel raises
FuelExhausted. The two are distinct on purpose: stuckness on a verified
program signals a soundness bug, empty fuel merely says the budget ended.
"""

from __future__ import annotations

from ..lang.ast import Binary, BoolLit, Call, Expr, IfE, IntLit, New, Not, SeqLit, SeqOp, Var
from ..lang.names import substExpr
from .model import TraitError


class StuckError(TraitError):
    """No reduction applies and the term is not a value."""


class FuelExhausted(TraitError):
    """The step budget ran out before a value appeared."""


def isValue(e: Expr) -> bool:
    if isinstance(e, (IntLit, BoolLit)):
        return True
    if isinstance(e, New):
        return all(isValue(a) for a in e.args)
    return False


def seqToCons(elems) -> Expr:
    """[a, b] as new Cons(a, new Cons(b, new Nil()))."""
    out: Expr = New("Nil", ())
    for x in reversed(elems):
        out = New("Cons", (x, out))
    return out


def _chain(v: Expr):
    """Element values of a Nil/Cons chain, or None when malformed."""
    out = []
    while True:
        if isinstance(v, New) and v.cls == "Nil" and not v.args:
            return out
        if isinstance(v, New) and v.cls == "Cons" and len(v.args) == 2:
            out.append(v.args[0])
            v = v.args[1]
            continue
        return None


def _stepInside(parts, rebuild, flat):
    for i, p in enumerate(parts):
        if not isValue(p):
            stepped = list(parts)
            stepped[i] = step(flat, p)
            return rebuild(tuple(stepped))
    return None


def _mcall(flat: dict, e: Call) -> Expr:
    recv = e.receiver
    if not isinstance(recv, New):
        raise StuckError("cannot call %s on a non-object value" % e.method)
    body = flat.get(recv.cls)
    if body is None:
        raise StuckError("value of undeclared class %s" % recv.cls)
    m = body.method(e.method)
    if m is None:
        raise StuckError("method %s not found on %s" % (e.method, recv.cls))
    if len(e.args) != m.arity:
        raise StuckError(
            "%s.%s expects %d argument(s), got %d"
            % (recv.cls, e.method, m.arity, len(e.args))
        )
    if m.isAbstract:
        getters = body.getters()
        for idx, g in enumerate(getters):
            if g.name == e.method:
                if len(recv.args) != len(getters):
                    raise StuckError("malformed %s value" % recv.cls)
                return recv.args[idx]
        raise StuckError("call to abstract method %s.%s" % (recv.cls, e.method))
    sigma = {"this": recv}
    for (_, pn), a in zip(m.params, e.args):
        sigma[pn] = a
    return substExpr(m.body, sigma)


def _deltaSeq(e: SeqOp) -> Expr:
    elems = _chain(e.receiver)
    if elems is None:
        raise StuckError("%s on a non-sequence value" % e.op)
    if e.op == "size":
        return IntLit(len(elems))
    if e.op == "element":
        if not elems:
            raise StuckError("element of an empty sequence")
        return elems[0]
    if e.op == "tail":
        if not elems:
            raise StuckError("tail of an empty sequence")
        return e.receiver.args[1]
    if e.op == "get":
        if not isinstance(e.index, IntLit):
            raise StuckError("get index must be a number")
        i = e.index.value
        if i < 0 or i >= len(elems):
            raise StuckError("get index %d out of range for length %d" % (i, len(elems)))
        return elems[i]
    # contains: structural equality against each element
    return BoolLit(any(e.index == x for x in elems))


def _deltaBin(e: Binary) -> Expr:
    l, r = e.lhs, e.rhs
    if e.op in ("+", "-", "*", "div", "<", "<=", ">", ">="):
        if not isinstance(l, IntLit) or not isinstance(r, IntLit):
            raise StuckError("%s needs numbers" % e.op)
        a, b = l.value, r.value
        if e.op == "+":
            return IntLit(a + b)
        if e.op == "-":
            return IntLit(a - b)
        if e.op == "*":
            return IntLit(a * b)
        if e.op == "div":
            if b == 0:
                raise StuckError("division by zero")
            return IntLit(a // b)
        return BoolLit({"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[e.op])
    if e.op == "==":
        return BoolLit(l == r)
    if e.op == "!=":
        return BoolLit(l != r)
    raise StuckError("operator %r has no runtime meaning" % e.op)


def step(flat: dict, e: Expr) -> Expr:
    """One reduction. Pre: e is not a value."""
    if isinstance(e, Call):
        if not isValue(e.receiver):
            return Call(step(flat, e.receiver), e.method, e.args)
        inner = _stepInside(e.args, lambda a: Call(e.receiver, e.method, a), flat)
        if inner is not None:
            return inner
        return _mcall(flat, e)
    if isinstance(e, New):
        inner = _stepInside(e.args, lambda a: New(e.cls, a), flat)
        if inner is not None:
            return inner
        raise StuckError("step on a value")
    if isinstance(e, SeqOp):
        if not isValue(e.receiver):
            return SeqOp(e.op, step(flat, e.receiver), e.index)
        if e.index is not None and not isValue(e.index):
            return SeqOp(e.op, e.receiver, step(flat, e.index))
        return _deltaSeq(e)
    if isinstance(e, Binary):
        if e.op in ("&&", "||"):
            if not isValue(e.lhs):
                return Binary(e.op, step(flat, e.lhs), e.rhs)
            if not isinstance(e.lhs, BoolLit):
                raise StuckError("%s needs booleans" % e.op)
            if e.op == "&&":
                return e.rhs if e.lhs.value else BoolLit(False)
            return BoolLit(True) if e.lhs.value else e.rhs
        if not isValue(e.lhs):
            return Binary(e.op, step(flat, e.lhs), e.rhs)
        if not isValue(e.rhs):
            return Binary(e.op, e.lhs, step(flat, e.rhs))
        return _deltaBin(e)
    if isinstance(e, Not):
        if not isValue(e.inner):
            return Not(step(flat, e.inner))
        if not isinstance(e.inner, BoolLit):
            raise StuckError("! needs a boolean")
        return BoolLit(not e.inner.value)
    if isinstance(e, IfE):
        if not isValue(e.cond):
            return IfE(step(flat, e.cond), e.then, e.els)
        if not isinstance(e.cond, BoolLit):
            raise StuckError("if condition must be a boolean")
        return e.then if e.cond.value else e.els
    if isinstance(e, SeqLit):
        return seqToCons(e.elems)
    if isinstance(e, Var):
        raise StuckError("free variable %s" % e.name)
    raise StuckError("cannot reduce %s" % type(e).__name__)


def evaluate(flat: dict, e: Expr, fuel: int = 100000) -> Expr:
    """Reduce to a value or raise. Deterministic in e and the world."""
    while not isValue(e):
        if fuel <= 0:
            raise FuelExhausted("no value after the step budget")
        e = step(flat, e)
        fuel -= 1
    return e
