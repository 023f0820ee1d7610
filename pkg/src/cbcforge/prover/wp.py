"""Weakest preconditions for concrete statements.

Loops contribute their invariant to the wp formula; the exit, preservation,
and variant conditions are emitted as separate named Obligations (fresh rigid
variable for the variant snapshot). Method calls and opaque block references
contribute their contracts: the unknown result / havocked assignables are
modeled as fresh rigid variables, which the enumeration prover quantifies
universally for free because they become ordinary obligation variables.

Callers must alpha-rename statements against ambient names first: wp treats
a local declaration as an initializing assignment and does not model
shadowing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..lang.ast import (
    Abstract,
    AndP,
    Assign,
    Atom,
    Binary,
    BlockRef,
    Contract,
    Implies,
    IntLit,
    LocalDecl,
    MethodCallStmt,
    NotP,
    OrP,
    Predicate,
    Repeat,
    RESULT,
    Select,
    SeqStmt,
    Skip,
    Statement,
    Var,
)
from ..lang.names import allNames, freeVars, freshName, resolveOld, stmtNames, substMap, substitute
from .result import Obligation


class WpError(Exception):
    pass


@dataclass(frozen=True)
class MethodSig:
    """Contract-lookup view of a callable method."""

    name: str
    params: tuple  # of (name, typeName)
    returnType: str
    contract: Contract


def envFor(env: Mapping[str, str], *preds: Predicate) -> dict:
    """Restrict env to the variables an obligation actually mentions."""

    free = set()
    for p in preds:
        free |= freeVars(p)
    return {v: env[v] for v in sorted(free)}


class _Wp:
    def __init__(self, methods, blocks, aux, env, taken, idPrefix, provenance):
        self.methods = methods or {}
        self.blocks = blocks or {}
        self.aux = aux
        self.env = env
        self.taken = taken
        self.idPrefix = idPrefix
        self.provenance = provenance
        self.loopCount = 0

    def fresh(self, base: str, typeName: str) -> str:
        name = freshName(base, self.taken)
        self.taken.add(name)
        if self.env is not None:
            self.env[name] = typeName
        return name

    def emit(self, oid: str, what: str, hyp: Predicate, concl: Predicate):
        if self.aux is None:
            raise WpError("statement needs an obligation sink for %s" % what)
        if self.env is None:
            raise WpError("statement needs variable types (env) for %s" % what)
        self.aux.append(
            Obligation(oid, hyp, concl, "%s: %s" % (self.provenance, what), envFor(self.env, hyp, concl))
        )

    def wp(self, s: Statement, q: Predicate) -> Predicate:
        if isinstance(s, Skip):
            return q
        if isinstance(s, Assign):
            if self.env is not None and s.target not in self.env:
                raise WpError("assignment to undeclared variable %r" % s.target)
            return substitute(q, s.target, s.value)
        if isinstance(s, LocalDecl):
            return substitute(q, s.name, s.init)
        if isinstance(s, SeqStmt):
            return self.wp(s.first, self.wp(s.second, q))
        if isinstance(s, Select):
            guards = [Atom(g) for g, _ in s.branches]
            parts: list[Predicate] = [OrP(tuple(guards))]
            for (g, body) in s.branches:
                parts.append(Implies(Atom(g), self.wp(body, q)))
            return AndP(tuple(parts))
        if isinstance(s, Repeat):
            self.loopCount += 1
            oid = "%s.L%d" % (self.idPrefix, self.loopCount)
            inv, guard, variant = s.invariant, Atom(s.guard), s.variant
            self.emit(oid + ".exit", "loop exit", AndP((inv, NotP(guard))), q)
            preserve = self.wp(s.body, inv)
            self.emit(oid + ".preserve", "invariant preserved", AndP((inv, guard)), preserve)
            v0 = self.fresh("v0", "int")
            decrease = AndP(
                (
                    Atom(Binary("<=", IntLit(0), variant)),
                    Atom(Binary("<", variant, Var(v0))),
                )
            )
            self.emit(
                oid + ".variant",
                "variant decreases",
                AndP((inv, guard, Atom(Binary("==", variant, Var(v0))))),
                self.wp(s.body, decrease),
            )
            return inv
        if isinstance(s, MethodCallStmt):
            sig = self.methods.get(s.method)
            if sig is None:
                raise WpError("unknown method %r" % s.method)
            if len(s.args) != len(sig.params):
                raise WpError(
                    "%s expects %d arguments, got %d" % (s.method, len(sig.params), len(s.args))
                )
            argMap = {p: a for (p, _t), a in zip(sig.params, s.args)}
            pre = substMap(sig.contract.pre, argMap)
            rv = self.fresh(s.resultTarget, sig.returnType)
            post = substMap(sig.contract.post, {**argMap, RESULT: Var(rv)})
            post = resolveOld(post, {p: a for p, a in argMap.items()})
            return AndP((pre, Implies(post, substitute(q, s.resultTarget, Var(rv)))))
        if isinstance(s, BlockRef):
            decl = self.blocks.get(s.name)
            if decl is None:
                raise WpError("block %r is not opaque-callable here" % s.name)
            havoc = {}
            for v, t in decl.assignable:
                havoc[v] = Var(self.fresh(v, t))
            post = substMap(decl.contract.post, havoc)
            post = resolveOld(post, {})  # old(v) is the value at the call point
            return AndP((decl.contract.pre, Implies(post, substMap(q, havoc))))
        if isinstance(s, Abstract):
            raise WpError("abstract statement %r has no weakest precondition" % s.id)
        raise WpError("not a statement: %r" % (s,))


def collectLocals(s: Statement) -> dict:
    """Declared local names with their types, across all branches."""

    out: dict[str, str] = {}

    def walk(t: Statement):
        if isinstance(t, LocalDecl):
            if t.name in out and out[t.name] != t.type:
                raise WpError("local %r redeclared with a different type" % t.name)
            out[t.name] = t.type
        elif isinstance(t, SeqStmt):
            walk(t.first)
            walk(t.second)
        elif isinstance(t, Select):
            for _g, body in t.branches:
                walk(body)
        elif isinstance(t, Repeat):
            walk(t.body)

    walk(s)
    return out


def wpConcrete(
    s: Statement,
    q: Predicate,
    methods: Mapping[str, MethodSig] | None = None,
    *,
    blocks=None,
    aux=None,
    env=None,
    idPrefix: str = "wp",
    provenance: str = "wp",
) -> Predicate:
    """Classical weakest precondition of s against q.

    aux receives the loop side obligations (required when s contains a loop);
    env maps variables to types and is extended in place with the fresh rigid
    variables this computation introduces.
    """

    if env is not None:
        for name, t in collectLocals(s).items():
            env.setdefault(name, t)
    taken = set(env or ()) | stmtNames(s) | allNames(q)
    w = _Wp(methods, blocks, aux, env, taken, idPrefix, provenance)
    return w.wp(s, q)
