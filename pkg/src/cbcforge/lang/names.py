"""Syntactic operations every rule depends on: free variables, fresh names,
capture-avoiding substitution, and statement-level alpha-renaming.

Substitution replaces free occurrences of plain variables only; `old(x)`
nodes are pre-state references and are rewritten exclusively through
`resolveOld` (contracts are old-free by the time obligations are built).
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

# ---------------------------------------------------------------------------
# Free variables and name collection


def freeVarsExpr(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Old):
        return {e.inner.name}
    if isinstance(e, (IntLit, BoolLit)):
        return set()
    if isinstance(e, Binary):
        return freeVarsExpr(e.lhs) | freeVarsExpr(e.rhs)
    if isinstance(e, Not):
        return freeVarsExpr(e.inner)
    if isinstance(e, SeqLit):
        out = set()
        for x in e.elems:
            out |= freeVarsExpr(x)
        return out
    if isinstance(e, SeqOp):
        out = freeVarsExpr(e.receiver)
        if e.index is not None:
            out |= freeVarsExpr(e.index)
        return out
    if isinstance(e, Call):
        out = freeVarsExpr(e.receiver)
        for a in e.args:
            out |= freeVarsExpr(a)
        return out
    if isinstance(e, New):
        out = set()
        for a in e.args:
            out |= freeVarsExpr(a)
        return out
    if isinstance(e, IfE):
        return freeVarsExpr(e.cond) | freeVarsExpr(e.then) | freeVarsExpr(e.els)
    raise TypeError("not an expression: %r" % (e,))


def _freeVarsDomain(d: BoundedDomain) -> set[str]:
    if isinstance(d, (IntRange, AllInts)):
        return set()
    return freeVarsExpr(d.seq)


def freeVars(p: Predicate) -> set[str]:
    if isinstance(p, (TrueP, FalseP)):
        return set()
    if isinstance(p, Atom):
        return freeVarsExpr(p.expr)
    if isinstance(p, TypeAtom):
        return {p.var}
    if isinstance(p, NotP):
        return freeVars(p.inner)
    if isinstance(p, (AndP, OrP)):
        out = set()
        for q in p.items:
            out |= freeVars(q)
        return out
    if isinstance(p, Implies):
        return freeVars(p.lhs) | freeVars(p.rhs)
    if isinstance(p, (Forall, Exists)):
        return _freeVarsDomain(p.domain) | (freeVars(p.body) - {p.var})
    raise TypeError("not a predicate: %r" % (p,))


def boundVars(p: Predicate) -> set[str]:
    if isinstance(p, (Forall, Exists)):
        return {p.var} | boundVars(p.body)
    if isinstance(p, NotP):
        return boundVars(p.inner)
    if isinstance(p, (AndP, OrP)):
        out = set()
        for q in p.items:
            out |= boundVars(q)
        return out
    if isinstance(p, Implies):
        return boundVars(p.lhs) | boundVars(p.rhs)
    return set()


def allNames(p: Predicate) -> set[str]:
    return freeVars(p) | boundVars(p)


def freshName(base: str, taken) -> str:
    """`base` if unused, else base'1, base'2, ... — the first gap wins."""

    if base not in taken:
        return base
    k = 1
    while "%s'%d" % (base, k) in taken:
        k += 1
    return "%s'%d" % (base, k)


# ---------------------------------------------------------------------------
# Substitution (capture-avoiding)


def substExpr(e: Expr, mapping: dict[str, Expr]) -> Expr:
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, (IntLit, BoolLit, Old)):
        return e
    if isinstance(e, Binary):
        return Binary(e.op, substExpr(e.lhs, mapping), substExpr(e.rhs, mapping))
    if isinstance(e, Not):
        return Not(substExpr(e.inner, mapping))
    if isinstance(e, SeqLit):
        return SeqLit(tuple(substExpr(x, mapping) for x in e.elems))
    if isinstance(e, SeqOp):
        idx = None if e.index is None else substExpr(e.index, mapping)
        return SeqOp(e.op, substExpr(e.receiver, mapping), idx)
    if isinstance(e, Call):
        return Call(
            substExpr(e.receiver, mapping),
            e.method,
            tuple(substExpr(a, mapping) for a in e.args),
        )
    if isinstance(e, New):
        return New(e.cls, tuple(substExpr(a, mapping) for a in e.args))
    if isinstance(e, IfE):
        return IfE(
            substExpr(e.cond, mapping),
            substExpr(e.then, mapping),
            substExpr(e.els, mapping),
        )
    raise TypeError("not an expression: %r" % (e,))


def _substDomain(d: BoundedDomain, mapping: dict[str, Expr]) -> BoundedDomain:
    if isinstance(d, (IntRange, AllInts)):
        return d
    if isinstance(d, SeqElems):
        return SeqElems(substExpr(d.seq, mapping))
    return SeqIndices(substExpr(d.seq, mapping))


def substMap(p: Predicate, mapping: dict[str, Expr]) -> Predicate:
    """Simultaneous substitution of free variables in a predicate."""

    if not mapping:
        return p
    if isinstance(p, (TrueP, FalseP)):
        return p
    if isinstance(p, Atom):
        return Atom(substExpr(p.expr, mapping))
    if isinstance(p, TypeAtom):
        hit = mapping.get(p.var)
        if hit is None:
            return p
        if isinstance(hit, Var):
            return TypeAtom(hit.name, p.cls)
        raise ValueError(
            "cannot substitute non-variable %r into type assertion %s: %s"
            % (hit, p.var, p.cls)
        )
    if isinstance(p, NotP):
        return NotP(substMap(p.inner, mapping))
    if isinstance(p, AndP):
        return AndP(tuple(substMap(q, mapping) for q in p.items))
    if isinstance(p, OrP):
        return OrP(tuple(substMap(q, mapping) for q in p.items))
    if isinstance(p, Implies):
        return Implies(substMap(p.lhs, mapping), substMap(p.rhs, mapping))
    if isinstance(p, (Forall, Exists)):
        # The domain sits outside the binder's scope.
        dom = _substDomain(p.domain, mapping)
        inner = {k: v for k, v in mapping.items() if k != p.var}
        relevant = {k: v for k, v in inner.items() if k in freeVars(p.body)}
        if not relevant:
            return type(p)(p.var, dom, p.body)
        captured = set()
        for v in relevant.values():
            captured |= freeVarsExpr(v)
        var, body = p.var, p.body
        if var in captured:
            taken = allNames(body) | captured | set(mapping)
            var = freshName(p.var, taken)
            body = substMap(body, {p.var: Var(var)})
        return type(p)(var, dom, substMap(body, relevant))
    raise TypeError("not a predicate: %r" % (p,))


def substitute(p: Predicate, var: str, e: Expr) -> Predicate:
    """Replace every free occurrence of `var` in p by e, avoiding capture."""

    return substMap(p, {var: e})


def resolveOld(p: Predicate, mapping: dict[str, Expr] | None = None) -> Predicate:
    """Rewrite old(x) references: to mapping[x] when given, to x otherwise."""

    mapping = mapping or {}

    def onExpr(e: Expr) -> Expr:
        if isinstance(e, Old):
            return mapping.get(e.inner.name, e.inner)
        if isinstance(e, (Var, IntLit, BoolLit)):
            return e
        if isinstance(e, Binary):
            return Binary(e.op, onExpr(e.lhs), onExpr(e.rhs))
        if isinstance(e, Not):
            return Not(onExpr(e.inner))
        if isinstance(e, SeqLit):
            return SeqLit(tuple(onExpr(x) for x in e.elems))
        if isinstance(e, SeqOp):
            idx = None if e.index is None else onExpr(e.index)
            return SeqOp(e.op, onExpr(e.receiver), idx)
        if isinstance(e, Call):
            return Call(onExpr(e.receiver), e.method, tuple(onExpr(a) for a in e.args))
        if isinstance(e, New):
            return New(e.cls, tuple(onExpr(a) for a in e.args))
        if isinstance(e, IfE):
            return IfE(onExpr(e.cond), onExpr(e.then), onExpr(e.els))
        raise TypeError("not an expression: %r" % (e,))

    def onPred(q: Predicate) -> Predicate:
        if isinstance(q, (TrueP, FalseP, TypeAtom)):
            return q
        if isinstance(q, Atom):
            return Atom(onExpr(q.expr))
        if isinstance(q, NotP):
            return NotP(onPred(q.inner))
        if isinstance(q, AndP):
            return AndP(tuple(onPred(x) for x in q.items))
        if isinstance(q, OrP):
            return OrP(tuple(onPred(x) for x in q.items))
        if isinstance(q, Implies):
            return Implies(onPred(q.lhs), onPred(q.rhs))
        if isinstance(q, (Forall, Exists)):
            dom = q.domain
            if isinstance(dom, SeqElems):
                dom = SeqElems(onExpr(dom.seq))
            elif isinstance(dom, SeqIndices):
                dom = SeqIndices(onExpr(dom.seq))
            return type(q)(q.var, dom, onPred(q.body))
        raise TypeError("not a predicate: %r" % (q,))

    return onPred(p)


# ---------------------------------------------------------------------------
# Quantifier construction (keeps the no-shadowing invariant)


def _renameShadowedBinders(p: Predicate, var: str, taken: set[str]) -> Predicate:
    if isinstance(p, (Forall, Exists)):
        body = _renameShadowedBinders(p.body, var, taken)
        if p.var == var:
            nv = freshName(var, taken)
            taken.add(nv)
            body = substMap(body, {var: Var(nv)})
            return type(p)(nv, p.domain, body)
        return type(p)(p.var, p.domain, body)
    if isinstance(p, NotP):
        return NotP(_renameShadowedBinders(p.inner, var, taken))
    if isinstance(p, AndP):
        return AndP(tuple(_renameShadowedBinders(q, var, taken) for q in p.items))
    if isinstance(p, OrP):
        return OrP(tuple(_renameShadowedBinders(q, var, taken) for q in p.items))
    if isinstance(p, Implies):
        return Implies(
            _renameShadowedBinders(p.lhs, var, taken),
            _renameShadowedBinders(p.rhs, var, taken),
        )
    return p


def forall(var: str, domain: BoundedDomain, body: Predicate) -> Forall:
    body = _renameShadowedBinders(body, var, allNames(body) | {var})
    return Forall(var, domain, body)


def exists(var: str, domain: BoundedDomain, body: Predicate) -> Exists:
    body = _renameShadowedBinders(body, var, allNames(body) | {var})
    return Exists(var, domain, body)


# ---------------------------------------------------------------------------
# Statement-level operations


def renameExpr(e: Expr, env: dict[str, str]) -> Expr:
    mapping = {k: Var(v) for k, v in env.items()}

    def walk(x: Expr) -> Expr:
        if isinstance(x, Old):
            nv = env.get(x.inner.name)
            return Old(Var(nv)) if nv else x
        if isinstance(x, Var):
            return mapping.get(x.name, x)
        if isinstance(x, (IntLit, BoolLit)):
            return x
        if isinstance(x, Binary):
            return Binary(x.op, walk(x.lhs), walk(x.rhs))
        if isinstance(x, Not):
            return Not(walk(x.inner))
        if isinstance(x, SeqLit):
            return SeqLit(tuple(walk(y) for y in x.elems))
        if isinstance(x, SeqOp):
            idx = None if x.index is None else walk(x.index)
            return SeqOp(x.op, walk(x.receiver), idx)
        if isinstance(x, Call):
            return Call(walk(x.receiver), x.method, tuple(walk(a) for a in x.args))
        if isinstance(x, New):
            return New(x.cls, tuple(walk(a) for a in x.args))
        if isinstance(x, IfE):
            return IfE(walk(x.cond), walk(x.then), walk(x.els))
        raise TypeError("not an expression: %r" % (x,))

    return walk(e)


def renamePred(p: Predicate, env: dict[str, str]) -> Predicate:
    if isinstance(p, (TrueP, FalseP)):
        return p
    if isinstance(p, Atom):
        return Atom(renameExpr(p.expr, env))
    if isinstance(p, TypeAtom):
        return TypeAtom(env.get(p.var, p.var), p.cls)
    if isinstance(p, NotP):
        return NotP(renamePred(p.inner, env))
    if isinstance(p, AndP):
        return AndP(tuple(renamePred(q, env) for q in p.items))
    if isinstance(p, OrP):
        return OrP(tuple(renamePred(q, env) for q in p.items))
    if isinstance(p, Implies):
        return Implies(renamePred(p.lhs, env), renamePred(p.rhs, env))
    if isinstance(p, (Forall, Exists)):
        dom = p.domain
        if isinstance(dom, SeqElems):
            dom = SeqElems(renameExpr(dom.seq, env))
        elif isinstance(dom, SeqIndices):
            dom = SeqIndices(renameExpr(dom.seq, env))
        inner = {k: v for k, v in env.items() if k != p.var}
        return type(p)(p.var, dom, renamePred(p.body, inner))
    raise TypeError("not a predicate: %r" % (p,))


def stmtNames(s: Statement) -> set[str]:
    """Every identifier a statement mentions (targets, decls, expressions)."""

    out: set[str] = set()

    def walk(st: Statement):
        if isinstance(st, (Skip, Abstract)):
            return
        if isinstance(st, Assign):
            out.add(st.target)
            out.update(freeVarsExpr(st.value))
        elif isinstance(st, LocalDecl):
            out.add(st.name)
            out.update(freeVarsExpr(st.init))
        elif isinstance(st, SeqStmt):
            walk(st.first)
            walk(st.second)
        elif isinstance(st, Select):
            for g, b in st.branches:
                out.update(freeVarsExpr(g))
                walk(b)
        elif isinstance(st, Repeat):
            out.update(allNames(st.invariant))
            out.update(freeVarsExpr(st.variant))
            out.update(freeVarsExpr(st.guard))
            walk(st.body)
        elif isinstance(st, MethodCallStmt):
            out.add(st.resultTarget)
            for a in st.args:
                out.update(freeVarsExpr(a))
        elif isinstance(st, BlockRef):
            out.update(allNames(st.pre))
            out.update(allNames(st.post))
        else:
            raise TypeError("not a statement: %r" % (st,))

    walk(s)
    return out


def assignedVars(s: Statement) -> set[str]:
    """Variables a statement can write (declared locals included)."""

    if isinstance(s, (Skip, Abstract, BlockRef)):
        return set()
    if isinstance(s, Assign):
        return {s.target}
    if isinstance(s, LocalDecl):
        return {s.name}
    if isinstance(s, SeqStmt):
        return assignedVars(s.first) | assignedVars(s.second)
    if isinstance(s, Select):
        out = set()
        for _, b in s.branches:
            out |= assignedVars(b)
        return out
    if isinstance(s, Repeat):
        return assignedVars(s.body)
    if isinstance(s, MethodCallStmt):
        return {s.resultTarget}
    raise TypeError("not a statement: %r" % (s,))


def declaredLocals(s: Statement) -> list[tuple[str, str]]:
    """(name, type) of every LocalDecl, in textual order."""

    out: list[tuple[str, str]] = []

    def walk(st: Statement):
        if isinstance(st, LocalDecl):
            out.append((st.name, st.type))
        elif isinstance(st, SeqStmt):
            walk(st.first)
            walk(st.second)
        elif isinstance(st, Select):
            for _, b in st.branches:
                walk(b)
        elif isinstance(st, Repeat):
            walk(st.body)

    walk(s)
    return out


def alphaRename(s: Statement, taken) -> tuple[Statement, dict[str, str]]:
    """Rename declared locals that collide with `taken`.

    A declaration's scope is the remainder of its enclosing sequence;
    declarations inside branches or loop bodies do not leak out. The
    returned map records original -> fresh for every renamed declaration.
    """

    taken = set(taken)
    used = set(taken) | stmtNames(s)
    renamed: dict[str, str] = {}

    def walk(st: Statement, env: dict[str, str]) -> tuple[Statement, dict[str, str]]:
        if isinstance(st, (Skip, Abstract)):
            return st, env
        if isinstance(st, Assign):
            return Assign(env.get(st.target, st.target), renameExpr(st.value, env)), env
        if isinstance(st, LocalDecl):
            init = renameExpr(st.init, env)
            name = st.name
            if name in taken:
                nv = freshName(name, used)
                used.add(nv)
                renamed[name] = nv
            else:
                nv = name
            env2 = dict(env)
            env2[name] = nv
            return LocalDecl(nv, st.type, init), env2
        if isinstance(st, SeqStmt):
            first, env1 = walk(st.first, env)
            second, env2 = walk(st.second, env1)
            return SeqStmt(first, second), env2
        if isinstance(st, Select):
            branches = []
            for g, b in st.branches:
                nb, _ = walk(b, env)
                branches.append((renameExpr(g, env), nb))
            return Select(tuple(branches)), env
        if isinstance(st, Repeat):
            body, _ = walk(st.body, env)
            return (
                Repeat(
                    renamePred(st.invariant, env),
                    renameExpr(st.variant, env),
                    renameExpr(st.guard, env),
                    body,
                ),
                env,
            )
        if isinstance(st, MethodCallStmt):
            return (
                MethodCallStmt(
                    st.method,
                    tuple(renameExpr(a, env) for a in st.args),
                    env.get(st.resultTarget, st.resultTarget),
                ),
                env,
            )
        if isinstance(st, BlockRef):
            return BlockRef(st.name, renamePred(st.pre, env), renamePred(st.post, env)), env
        raise TypeError("not a statement: %r" % (st,))

    out, _ = walk(s, {})
    return out, renamed
