"""Expression typing and method verification for trait bodies.

typeExpr gives every body expression a class, a kernel term denoting its
value, and two predicates over the ambient names:

  knowledge   what may be assumed about the value, built from the contracts
              of the methods it calls;
  obligation  what must hold for the expression to be safe: preconditions
              of every call, definedness side conditions of the sequence
              theory and of div, and measure decrease on recursive calls.

Pure theory subexpressions (variables, literals, arithmetic, sequence
operations) are passed through as terms. Only three forms need a fresh
name: a method call (its value is known solely through the callee's
contract), a construction (known through its getter equations), and a
conditional (known per branch). Two occurrences of one call term share one
name; the language is effect-free, so equal call terms denote equal values.

verifyMethod discharges a concrete method by asking the bounded prover for

    typing-of-environment  &  Pre  &  knowledge  |=  obligation  &  Post[result:=term]

Abstract methods are valid with nothing to prove.

Conjunct order is load-bearing: the enumeration engine evaluates && and ==>
left to right with short-circuit, so every partial term (element, tail, get,
div) sits behind its definedness guard, and obligations list a child's
side conditions before any predicate that evaluates the child's term.

Because the bounded prover only speaks the kernel theory, obligations are
lowered before they are built: `forall Num` windows become the configured
integer range, class membership atoms become sequence facts (or drop away),
and calls appearing inside specification text are replaced by fresh names
constrained pairwise by congruence. A call under a quantifier cannot be
named that way; verification then answers Unknown rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..lang.ast import (
    AllInts,
    AndP,
    Atom,
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
    RESULT,
    SeqIndices,
    SeqElems,
    SeqLit,
    SeqOp,
    TrueP,
    TypeAtom,
    Var,
)
from ..lang.names import freeVarsExpr, substExpr, substMap
from ..prover.check import checkImplication
from ..prover.result import (
    Obligation,
    ProofResult,
    ProverConfig,
    T_BOOL,
    T_INT,
    T_LIST,
    Unknown,
    Valid,
)
from .model import (
    BOOL,
    KIND_CLASS,
    LIST,
    Method,
    NUM,
    PRIMITIVES,
    SEQ_CLASSES,
    TraitBody,
    TraitError,
)

OBJ = "Obj"  # the one opaque prover sort shared by all user classes


class VerifyError(TraitError):
    """A body (or spec usage) is ill-typed; verification cannot start."""


class LowerError(TraitError):
    """An obligation uses a construct the bounded theory cannot express."""


@dataclass
class TraitCheck:
    """One discharged (or failed) proof with its place in the world.

    kind: "method", "compose.pre", "compose.post", "interface.pre",
    "interface.post". obligation is None when the check never reached the
    prover (ill-typed body, unbounded construct); result still says why.
    """

    kind: str
    context: str
    method: str
    obligation: Obligation | None
    result: ProofResult
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.result.isValid


def sortOf(cls: str) -> str:
    """Prover sort of a class name. User classes share one opaque sort;
    nothing outside the prelude may implement List, so the sequence sort
    is exactly the prelude family."""
    if cls == NUM:
        return T_INT
    if cls == BOOL:
        return T_BOOL
    if cls in SEQ_CLASSES:
        return T_LIST
    return OBJ


def instanceOf(c1: str, c2: str, interfaces: dict) -> bool:
    """Reflexive-transitive closure of declared interface implementation.
    Primitives only relate to themselves."""
    if c1 == c2:
        return True
    if c1 in PRIMITIVES or c2 in PRIMITIVES:
        return False
    seen = set()
    stack = [c1]
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        for i in interfaces.get(c, ()):
            if i == c2:
                return True
            stack.append(i)
    return False


def conj(items) -> Predicate:
    """Conjunction without the noise: drops true, flattens nesting.
    Order is preserved; see the module note on short-circuit."""
    out = []
    for it in items:
        if isinstance(it, TrueP):
            continue
        if isinstance(it, AndP):
            out.extend(it.items)
        else:
            out.append(it)
    if not out:
        return TrueP()
    if len(out) == 1:
        return out[0]
    return AndP(tuple(out))


def imp(lhs: Predicate, rhs: Predicate) -> Predicate:
    if isinstance(lhs, TrueP):
        return rhs
    if isinstance(rhs, TrueP):
        return TrueP()
    return Implies(lhs, rhs)


def _eq(a: Expr, b: Expr) -> Predicate:
    return Atom(Binary("==", a, b))


def definedTerm(e: Expr) -> Predicate:
    """Side conditions under which a kernel term evaluates: innermost guards
    first, so the resulting conjunction is itself safe to evaluate."""
    parts: list = []

    def walk(t: Expr) -> None:
        if isinstance(t, Binary):
            walk(t.lhs)
            walk(t.rhs)
            if t.op == "div":
                parts.append(Atom(Binary("!=", t.rhs, IntLit(0))))
        elif isinstance(t, Not):
            walk(t.inner)
        elif isinstance(t, SeqOp):
            walk(t.receiver)
            if t.index is not None:
                walk(t.index)
            size = SeqOp("size", t.receiver)
            if t.op in ("element", "tail"):
                parts.append(Atom(Binary(">", size, IntLit(0))))
            elif t.op == "get":
                parts.append(Atom(Binary("<=", IntLit(0), t.index)))
                parts.append(Atom(Binary("<", t.index, size)))
        elif isinstance(t, SeqLit):
            for x in t.elems:
                walk(x)

    walk(e)
    return conj(parts)


_SEQ_RESULT = {"size": NUM, "get": NUM, "contains": BOOL, "element": NUM, "tail": LIST}


class Checker:
    """Types one method body; accumulates fresh names with their classes."""

    def __init__(self, flat: dict, kinds: dict, owner: str, method: Method):
        self.flat = flat
        self.kinds = kinds
        self.owner = owner
        self.method = method
        self.freshEnv: dict = {}
        self._n = 0
        self._taken = {"this", RESULT} | set(method.paramNames())
        self._calls: dict = {}  # (method, recvTerm, argTerms) -> var name

    def fresh(self, cls: str, base: str = "v") -> str:
        while True:
            self._n += 1
            name = "%s'%d" % (base, self._n)
            if name not in self._taken:
                self._taken.add(name)
                self.freshEnv[name] = cls
                return name

    def ifaces(self) -> dict:
        return {n: b.interfaces for n, b in self.flat.items()}

    def _lookup(self, cls: str, name: str) -> Method:
        if cls in PRIMITIVES:
            raise VerifyError("type %s has no methods" % cls)
        body = self.flat.get(cls)
        if body is None:
            raise VerifyError("unknown type %r" % cls)
        m = body.method(name)
        if m is None:
            raise VerifyError("no method %r on %s" % (name, cls))
        return m

    def _want(self, got: str, need: str, what: str) -> None:
        if got != need:
            raise VerifyError("%s must be %s, found %s" % (what, need, got))

    def typeExpr(self, gamma: dict, e: Expr):
        """Returns (class, term, knowledge, obligation)."""
        if isinstance(e, Var):
            if e.name not in gamma:
                raise VerifyError("unknown variable %r" % e.name)
            return gamma[e.name], e, TrueP(), TrueP()

        if isinstance(e, IntLit):
            return NUM, e, TrueP(), TrueP()

        if isinstance(e, BoolLit):
            return BOOL, e, TrueP(), TrueP()

        if isinstance(e, Binary):
            cl, tl, kl, ol = self.typeExpr(gamma, e.lhs)
            cr, tr, kr, orr = self.typeExpr(gamma, e.rhs)
            if e.op in ("+", "-", "*", "div"):
                self._want(cl, NUM, "left operand of %s" % e.op)
                self._want(cr, NUM, "right operand of %s" % e.op)
                retC = NUM
            elif e.op in ("<", "<=", ">", ">="):
                self._want(cl, NUM, "left operand of %s" % e.op)
                self._want(cr, NUM, "right operand of %s" % e.op)
                retC = BOOL
            elif e.op in ("==", "!="):
                if sortOf(cl) != sortOf(cr):
                    raise VerifyError("cannot compare %s with %s" % (cl, cr))
                retC = BOOL
            elif e.op in ("&&", "||"):
                self._want(cl, BOOL, "left operand of %s" % e.op)
                self._want(cr, BOOL, "right operand of %s" % e.op)
                retC = BOOL
            else:
                raise VerifyError("operator %r is not part of the trait surface" % e.op)
            parts = [ol, orr]
            if e.op == "div":
                parts.append(Atom(Binary("!=", tr, IntLit(0))))
            return retC, Binary(e.op, tl, tr), conj((kl, kr)), conj(parts)

        if isinstance(e, Not):
            c, t, k, o = self.typeExpr(gamma, e.inner)
            self._want(c, BOOL, "operand of !")
            return BOOL, Not(t), k, o

        if isinstance(e, SeqOp):
            c0, t0, k0, o0 = self.typeExpr(gamma, e.receiver)
            if sortOf(c0) != T_LIST:
                raise VerifyError("%s needs a List receiver, found %s" % (e.op, c0))
            parts = [o0]
            knows = [k0]
            ti = None
            if e.index is not None:
                c1, ti, k1, o1 = self.typeExpr(gamma, e.index)
                self._want(c1, NUM, "argument of %s" % e.op)
                knows.append(k1)
                parts.append(o1)
            term = SeqOp(e.op, t0, ti)
            size = SeqOp("size", t0)
            if e.op in ("element", "tail"):
                parts.append(Atom(Binary(">", size, IntLit(0))))
            elif e.op == "get":
                parts.append(Atom(Binary("<=", IntLit(0), ti)))
                parts.append(Atom(Binary("<", ti, size)))
            return _SEQ_RESULT[e.op], term, conj(knows), conj(parts)

        if isinstance(e, Call):
            c0, t0, k0, o0 = self.typeExpr(gamma, e.receiver)
            mdef = self._lookup(c0, e.method)
            if len(e.args) != mdef.arity:
                raise VerifyError(
                    "%s.%s takes %d argument(s), got %d"
                    % (c0, e.method, mdef.arity, len(e.args))
                )
            knows = [k0]
            parts = [o0]
            argTerms = []
            ifaces = self.ifaces()
            for a, (pt, pn) in zip(e.args, mdef.params):
                ca, ta, ka, oa = self.typeExpr(gamma, a)
                if not instanceOf(ca, pt, ifaces):
                    raise VerifyError(
                        "argument %r of %s.%s needs %s, found %s"
                        % (pn, c0, e.method, pt, ca)
                    )
                knows.append(ka)
                parts.append(oa)
                argTerms.append(ta)
            sigma = {"this": t0}
            for ta, (_, pn) in zip(argTerms, mdef.params):
                sigma[pn] = ta
            preS = substMap(mdef.spec.pre, sigma)
            key = (e.method, t0, tuple(argTerms))
            if key in self._calls:
                x = self._calls[key]
            else:
                x = self.fresh(mdef.returnType, e.method)
                self._calls[key] = x
            # contract knowledge is re-stated per occurrence: a shared name
            # may first appear under one branch guard and be used under
            # another, where the earlier statement is out of reach
            sigma[RESULT] = Var(x)
            postS = substMap(mdef.spec.post, sigma)
            guard = conj((definedTerm(t0),)
                         + tuple(definedTerm(ta) for ta in argTerms)
                         + (preS,))
            knows.append(conj((TypeAtom(x, mdef.returnType), imp(guard, postS))))
            parts.append(preS)
            if e.method == self.method.name and c0 == self.owner:
                parts.append(self._decrease(t0, argTerms))
            return mdef.returnType, Var(x), conj(knows), conj(parts)

        if isinstance(e, New):
            c = e.cls
            if self.kinds.get(c) != KIND_CLASS:
                raise VerifyError("new needs a class, %r is not one" % c)
            body = self.flat[c]
            bad = [m.name for m in body.abstractMethods() if m.arity > 0]
            if bad:
                raise VerifyError(
                    "cannot instantiate %s: abstract non-getter method %s" % (c, bad[0])
                )
            getters = body.getters()
            if len(e.args) != len(getters):
                raise VerifyError(
                    "new %s takes %d argument(s), got %d" % (c, len(getters), len(e.args))
                )
            ifaces = self.ifaces()
            x = self.fresh(c, c)
            knows = []
            parts = []
            eqs = [TypeAtom(x, c)]
            for a, g in zip(e.args, getters):
                ca, ta, ka, oa = self.typeExpr(gamma, a)
                if not instanceOf(ca, g.returnType, ifaces):
                    raise VerifyError(
                        "field %s of new %s needs %s, found %s"
                        % (g.name, c, g.returnType, ca)
                    )
                knows.append(ka)
                parts.append(oa)
                preG = substMap(g.spec.pre, {"this": Var(x)})
                if sortOf(c) == T_LIST and g.name in ("element", "tail"):
                    read = SeqOp(g.name, Var(x))
                else:
                    read = Call(Var(x), g.name, ())
                eqs.append(imp(conj((definedTerm(ta), preG)), _eq(read, ta)))
                parts.append(preG)
            knows.append(conj(eqs))
            return c, Var(x), conj(knows), conj(parts)

        if isinstance(e, IfE):
            cg, tg, kg, og = self.typeExpr(gamma, e.cond)
            self._want(cg, BOOL, "condition of if")
            ct, tt, kt, ot = self.typeExpr(gamma, e.then)
            ce, te, ke, oe = self.typeExpr(gamma, e.els)
            ifaces = self.ifaces()
            if instanceOf(ct, ce, ifaces):
                join = ce
            elif instanceOf(ce, ct, ifaces):
                join = ct
            else:
                raise VerifyError("if branches have unrelated types %s and %s" % (ct, ce))
            x = self.fresh(join, "ite")
            dg = definedTerm(tg)
            yes = conj((dg, Atom(tg)))
            no = conj((dg, NotP(Atom(tg))))
            know = conj((
                TypeAtom(x, join),
                kg,
                imp(yes, conj((kt, imp(definedTerm(tt), _eq(Var(x), tt))))),
                imp(no, conj((ke, imp(definedTerm(te), _eq(Var(x), te))))),
            ))
            ob = conj((og, imp(yes, ot), imp(no, oe)))
            return join, Var(x), know, ob

        if isinstance(e, SeqLit):
            raise VerifyError(
                "sequence literals are not part of the trait surface; build lists with new Cons(...)"
            )
        if isinstance(e, Old):
            raise VerifyError("old() has no meaning in a trait body")
        raise VerifyError("expression %r is not part of the trait surface" % type(e).__name__)

    def _decrease(self, recvTerm: Expr, argTerms) -> Predicate:
        """0 <= M[args] < M at a direct recursive call site. Measures are
        call-free, so substituting terms keeps them in the kernel theory."""
        m = self.method
        if m.measure is None:
            raise VerifyError(
                "directly recursive method %s.%s needs a @Measure annotation"
                % (self.owner, m.name)
            )
        sigma = {"this": recvTerm}
        for (_, pn), ta in zip(m.params, argTerms):
            sigma[pn] = ta
        at = substExpr(m.measure, sigma)
        return conj((
            definedTerm(at),
            Atom(Binary("<=", IntLit(0), at)),
            Atom(Binary("<", at, m.measure)),
        ))


# ---------------------------------------------------------------------------
# Lowering to the kernel theory


def _rewriteTypeNodes(p: Predicate, classEnv: dict, cfg: ProverConfig) -> Predicate:
    """Erase TypeAtoms (Nil/Cons become size facts) and pin `forall Num`
    windows to the configured bound."""

    def dom(d: BoundedDomain) -> BoundedDomain:
        if isinstance(d, AllInts):
            return IntRange(-cfg.intBound, cfg.intBound)
        return d

    def walk(q: Predicate) -> Predicate:
        if isinstance(q, TypeAtom):
            if sortOf(classEnv.get(q.var, "")) == T_LIST:
                size = SeqOp("size", Var(q.var))
                if q.cls == "Nil":
                    return Atom(Binary("==", size, IntLit(0)))
                if q.cls == "Cons":
                    return Atom(Binary(">", size, IntLit(0)))
            return TrueP()
        if isinstance(q, (TrueP, FalseP, Atom)):
            return q
        if isinstance(q, NotP):
            return NotP(walk(q.inner))
        if isinstance(q, AndP):
            return AndP(tuple(walk(i) for i in q.items))
        if isinstance(q, OrP):
            return OrP(tuple(walk(i) for i in q.items))
        if isinstance(q, Implies):
            return Implies(walk(q.lhs), walk(q.rhs))
        if isinstance(q, Forall):
            return Forall(q.var, dom(q.domain), walk(q.body))
        if isinstance(q, Exists):
            return Exists(q.var, dom(q.domain), walk(q.body))
        raise LowerError("cannot lower predicate node %r" % type(q).__name__)

    return walk(p)


class _AckTable:
    """Names every distinct call term appearing in specification text; same
    term, same name. Congruence axioms re-link distinct terms of one method
    at matching sorts."""

    def __init__(self, classEnv: dict, flat: dict):
        self.classEnv = classEnv
        self.flat = flat
        self.entries = []  # (callNode, varName, returnCls | None, sort)
        self._byNode = {}
        self._n = 0

    def expr(self, e: Expr, bound: frozenset) -> Expr:
        if isinstance(e, (IntLit, BoolLit, Var)):
            return e
        if isinstance(e, Binary):
            return Binary(e.op, self.expr(e.lhs, bound), self.expr(e.rhs, bound))
        if isinstance(e, Not):
            return Not(self.expr(e.inner, bound))
        if isinstance(e, SeqOp):
            idx = None if e.index is None else self.expr(e.index, bound)
            return SeqOp(e.op, self.expr(e.receiver, bound), idx)
        if isinstance(e, SeqLit):
            return SeqLit(tuple(self.expr(x, bound) for x in e.elems))
        if isinstance(e, Call):
            recv = self.expr(e.receiver, bound)
            args = tuple(self.expr(a, bound) for a in e.args)
            node = Call(recv, e.method, args)
            touched = freeVarsExpr(node) & bound
            if touched:
                raise LowerError(
                    "call to %s under a quantifier binding %s cannot be bounded"
                    % (e.method, ", ".join(sorted(touched)))
                )
            if node in self._byNode:
                return Var(self._byNode[node])
            cls = self._returnClass(recv, e.method)
            self._n += 1
            name = "call'%d" % self._n
            self._byNode[node] = name
            sort = sortOf(cls) if cls else self._scanSort(e.method)
            self.entries.append((node, name, cls, sort))
            return Var(name)
        if isinstance(e, New):
            raise LowerError("new expressions cannot appear in specifications")
        if isinstance(e, IfE):
            raise LowerError("conditional expressions cannot appear in specifications")
        raise LowerError("cannot lower expression node %r" % type(e).__name__)

    def _returnClass(self, recv: Expr, method: str) -> str | None:
        cls = None
        if isinstance(recv, Var):
            cls = self.classEnv.get(recv.name)
            if cls is None:
                for _, name, c, _ in self.entries:
                    if name == recv.name:
                        cls = c
                        break
        if cls is None:
            return None
        body = self.flat.get(cls)
        if body is None:
            return None
        m = body.method(method)
        return m.returnType if m else None

    def _scanSort(self, method: str) -> str:
        sorts = set()
        for body in self.flat.values():
            m = body.method(method)
            if m is not None:
                sorts.add(sortOf(m.returnType))
        if not sorts:
            raise LowerError("no declaration of method %r anywhere in the world" % method)
        if len(sorts) > 1:
            raise LowerError(
                "method name %r returns different sorts in different classes; "
                "cannot name its calls uniformly" % method
            )
        return sorts.pop()

    def pred(self, p: Predicate, bound: frozenset = frozenset()) -> Predicate:
        if isinstance(p, (TrueP, FalseP, TypeAtom)):
            return p
        if isinstance(p, Atom):
            return Atom(self.expr(p.expr, bound))
        if isinstance(p, NotP):
            return NotP(self.pred(p.inner, bound))
        if isinstance(p, AndP):
            return AndP(tuple(self.pred(i, bound) for i in p.items))
        if isinstance(p, OrP):
            return OrP(tuple(self.pred(i, bound) for i in p.items))
        if isinstance(p, Implies):
            return Implies(self.pred(p.lhs, bound), self.pred(p.rhs, bound))
        if isinstance(p, (Forall, Exists)):
            d = p.domain
            if isinstance(d, (SeqElems, SeqIndices)):
                d = type(d)(self.expr(d.seq, bound))
            inner = self.pred(p.body, bound | {p.var})
            return type(p)(p.var, d, inner)
        raise LowerError("cannot lower predicate node %r" % type(p).__name__)

    def _sortOfExpr(self, e: Expr, envTypes: dict) -> str | None:
        if isinstance(e, Var):
            return envTypes.get(e.name)
        if isinstance(e, IntLit):
            return T_INT
        if isinstance(e, BoolLit):
            return T_BOOL
        if isinstance(e, SeqLit):
            return T_LIST
        if isinstance(e, SeqOp):
            return T_LIST if e.op == "tail" else (T_BOOL if e.op == "contains" else T_INT)
        if isinstance(e, Binary):
            return T_INT if e.op in ("+", "-", "*", "div") else T_BOOL
        if isinstance(e, Not):
            return T_BOOL
        return None

    def congruence(self, envTypes: dict) -> list:
        """For every pair of named calls to one method: equal receivers and
        equal arguments force equal results."""
        out = []
        for i in range(len(self.entries)):
            ni, vi, _, _ = self.entries[i]
            for j in range(i + 1, len(self.entries)):
                nj, vj, _, _ = self.entries[j]
                if ni.method != nj.method or len(ni.args) != len(nj.args):
                    continue
                sides = [(ni.receiver, nj.receiver)] + list(zip(ni.args, nj.args))
                eqs = []
                mismatch = False
                for a, b in sides:
                    sa = self._sortOfExpr(a, envTypes)
                    sb = self._sortOfExpr(b, envTypes)
                    if sa is None or sb is None or sa != sb:
                        mismatch = True
                        break
                    eqs.append(_eq(a, b))
                if mismatch:
                    continue
                out.append(imp(conj(eqs), _eq(Var(vi), Var(vj))))
        return out


def lowerObligation(hyp: Predicate, concl: Predicate, classEnv: dict,
                    cfg: ProverConfig, flat: dict):
    """Rewrite both sides into the kernel theory. Returns the rewritten
    predicates plus an envTypes map covering exactly the free variables."""
    from ..lang.names import freeVars

    tab = _AckTable(classEnv, flat)
    hyp = tab.pred(_rewriteTypeNodes(hyp, classEnv, cfg))
    concl = tab.pred(_rewriteTypeNodes(concl, classEnv, cfg))
    envTypes = {v: sortOf(c) for v, c in classEnv.items()}
    for _, name, _, sort in tab.entries:
        envTypes[name] = sort
    axioms = tab.congruence(envTypes)
    if axioms:
        hyp = conj([hyp] + axioms)
    used = freeVars(hyp) | freeVars(concl)
    envTypes = {v: s for v, s in envTypes.items() if v in used}
    return hyp, concl, envTypes


# ---------------------------------------------------------------------------
# Method verification


def verifyMethod(flat: dict, kinds: dict, owner: str, m: Method,
                 cfg: ProverConfig, *, backend=None):
    """Returns (Obligation | None, ProofResult). Abstract methods are valid
    by construction and produce no obligation."""
    if m.isAbstract:
        return None, Valid()
    gamma = {"this": owner}
    for t, n in m.params:
        gamma[n] = t
    ck = Checker(flat, kinds, owner, m)
    try:
        c, term, know, ob = ck.typeExpr(gamma, m.body)
        if not instanceOf(c, m.returnType, ck.ifaces()):
            raise VerifyError(
                "body of %s.%s has type %s, not %s" % (owner, m.name, c, m.returnType)
            )
        if m.measure is not None:
            cM, tM, knowM, obM = ck.typeExpr(gamma, m.measure)
            ck._want(cM, NUM, "measure of %s.%s" % (owner, m.name))
            know = conj((know, knowM))
            ob = conj((obM, ob))
    except VerifyError as ex:
        return None, Unknown(str(ex))
    gammaAtoms = conj(tuple(TypeAtom(n, cn) for n, cn in gamma.items()))
    hyp = conj((gammaAtoms, m.spec.pre, know))
    concl = conj((ob, substMap(m.spec.post, {RESULT: term})))
    classEnv = dict(gamma)
    classEnv.update(ck.freshEnv)
    try:
        hyp2, concl2, envTypes = lowerObligation(hyp, concl, classEnv, cfg, flat)
    except LowerError as ex:
        return None, Unknown(str(ex))
    obg = Obligation(
        id="method.%s.%s" % (owner, m.name),
        hypothesis=hyp2,
        conclusion=concl2,
        provenance="method %s.%s: body meets its contract" % (owner, m.name),
        envTypes=envTypes,
    )
    return obg, checkImplication(obg, cfg, backend=backend)


def checkBody(flat: dict, kinds: dict, owner: str, body: TraitBody,
              cfg: ProverConfig, *, backend=None) -> list:
    """Verify every concrete method of one body literal against the
    completed world. Abstract methods are valid without a proof and are
    skipped in the record."""
    checks = []
    for m in body.methods:
        if m.isAbstract:
            continue
        ob, res = verifyMethod(flat, kinds, owner, m, cfg, backend=backend)
        checks.append(TraitCheck("method", owner, m.name, ob, res))
    return checks


def checkSpecImplication(kind: str, context: str, method: str, ident: str,
                         hyp: Predicate, concl: Predicate, classEnv: dict,
                         flat: dict, cfg: ProverConfig, *, backend=None,
                         note: str = "") -> TraitCheck:
    """One pre- or post-condition implication between two specs, lowered and
    discharged. Used by composition and interface respect."""
    try:
        hyp2, concl2, envTypes = lowerObligation(hyp, concl, classEnv, cfg, flat)
    except LowerError as ex:
        return TraitCheck(kind, context, method, None, Unknown(str(ex)), note)
    ob = Obligation(
        id=ident,
        hypothesis=hyp2,
        conclusion=concl2,
        provenance=note or ident,
        envTypes=envTypes,
    )
    return TraitCheck(kind, context, method, ob, checkImplication(ob, cfg, backend=backend), note)
