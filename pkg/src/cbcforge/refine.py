"""Stepwise refinement of guarded-command methods.

A MethodUnit reifies one derivation: a tree of Hoare triples rooted at the
method contract. Each apply operation fills one open (abstract) node with
a construct, records the side-condition obligations Def.-1 style, and
returns a new tree; nothing discharges proofs until checkTree runs.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .lang.ast import (
    Abstract,
    AndP,
    Assign,
    Atom,
    Binary,
    BlockRef,
    Expr,
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
    T_BOOL,
    T_INT,
    Var,
)
from .lang.names import freeVars, freeVarsExpr, freshName, resolveOld, stmtNames, substMap, substitute
from .lang.types import KernelTypeError, checkPred, typeOfExpr
from .prover.check import checkImplication
from .prover.result import Obligation, ProverConfig, Valid
from .prover.wp import MethodSig, envFor, wpConcrete

__all__ = [
    "OPEN",
    "PROVEN",
    "FAILED",
    "RefineError",
    "RefinementNode",
    "MethodUnit",
    "newMethodUnit",
    "findNode",
    "applySkip",
    "applyAssignment",
    "applyComposition",
    "applySelection",
    "applyRepetition",
    "applyWeakenPre",
    "applyStrengthenPost",
    "applyMethodCall",
    "checkTree",
    "extractProgram",
    "posthocCheck",
    "methodSig",
]

OPEN = "Open"
PROVEN = "Proven"
FAILED = "Failed"


class RefineError(Exception):
    pass


@dataclass
class RefinementNode:
    """One triple {pre} S {post} of the derivation."""

    id: str
    pre: Predicate
    post: Predicate
    rule: str | None = None
    concrete: Statement | None = None  # leaf rules store their statement here
    guards: tuple[Expr, ...] | None = None
    loop: tuple | None = None  # (invariant, variant, guard)
    children: list["RefinementNode"] = field(default_factory=list)
    obligations: list[Obligation] = field(default_factory=list)
    status: str = OPEN

    @property
    def stmt(self) -> Statement:
        """Current statement of this subtree; open leaves are Abstract."""

        if self.rule is None:
            return Abstract(self.id)
        if self.rule == "composition":
            return SeqStmt(self.children[0].stmt, self.children[1].stmt)
        if self.rule == "selection":
            return Select(tuple(zip(self.guards, (c.stmt for c in self.children))))
        if self.rule == "repetition":
            inv, variant, guard = self.loop
            return Repeat(inv, variant, guard, self.children[0].stmt)
        if self.rule in ("weakenPre", "strengthenPost"):
            return self.children[0].stmt
        return self.concrete


@dataclass
class MethodUnit:
    name: str
    params: tuple  # of (name, typeName)
    returnType: str
    contract: Contract
    locals: dict  # name -> typeName, declared in the script header
    root: RefinementNode
    counter: int = 1

    def env(self) -> dict:
        out = {n: t for n, t in self.params}
        out[RESULT] = self.returnType
        out.update(self.locals)
        return out


def newMethodUnit(name, params, returnType, contract, locals=None) -> MethodUnit:
    locals = dict(locals or {})
    paramEnv = {n: t for n, t in params}
    if len(paramEnv) != len(params):
        raise RefineError("duplicate parameter name in %s" % name)
    for bad in set(paramEnv) & set(locals) | {RESULT} & (set(paramEnv) | set(locals)):
        raise RefineError("name %r declared twice in %s" % (bad, name))
    try:
        checkPred(contract.pre, paramEnv)
        checkPred(contract.post, {**paramEnv, RESULT: returnType})
    except KernelTypeError as e:
        raise RefineError("contract of %s: %s" % (name, e)) from e
    root = RefinementNode("A0", contract.pre, contract.post)
    return MethodUnit(name, tuple(params), returnType, contract, locals, root)


def methodSig(unit: MethodUnit) -> MethodSig:
    return MethodSig(unit.name, unit.params, unit.returnType, unit.contract)


def findNode(unit: MethodUnit, nodeId: str) -> RefinementNode | None:
    stack = [unit.root]
    while stack:
        n = stack.pop()
        if n.id == nodeId:
            return n
        stack.extend(n.children)
    return None


def _begin(unit: MethodUnit, nodeId: str):
    """Copy the tree and locate the open abstract node to fill."""

    unit = copy.deepcopy(unit)
    node = findNode(unit, nodeId)
    if node is None:
        raise RefineError("no node %s in %s" % (nodeId, unit.name))
    if node.rule is not None:
        raise RefineError("node %s already refined by %s" % (nodeId, node.rule))
    return unit, node


def _child(unit: MethodUnit, pre: Predicate, post: Predicate) -> RefinementNode:
    node = RefinementNode("A%d" % unit.counter, pre, post)
    unit.counter += 1
    return node


def _oblige(unit, node, kind, hyp, concl, extraEnv=None) -> Obligation:
    env = unit.env()
    if extraEnv:
        env.update(extraEnv)
    return Obligation(
        "%s.%s.%s" % (unit.name, node.id, kind),
        hyp,
        concl,
        "%s %s: %s" % (unit.name, node.id, kind),
        envFor(env, hyp, concl),
    )


def _checkExpr(unit, e: Expr, want: str, what: str) -> None:
    try:
        got = typeOfExpr(e, unit.env())
    except KernelTypeError as err:
        raise RefineError("%s: %s" % (what, err)) from err
    if got != want:
        raise RefineError("%s has type %s, expected %s" % (what, got, want))


def _checkPred(unit, p: Predicate, what: str, extraEnv=None) -> None:
    env = unit.env()
    if extraEnv:
        env.update(extraEnv)
    try:
        checkPred(p, env)
    except KernelTypeError as err:
        raise RefineError("%s: %s" % (what, err)) from err


def _assignable(unit, target: str, what: str) -> None:
    if target == RESULT or target in unit.locals:
        return
    if any(target == n for n, _t in unit.params):
        raise RefineError("%s: parameters are immutable, cannot assign %r" % (what, target))
    raise RefineError("%s: %r is not declared" % (what, target))


# ---------------------------------------------------------------------------
# The eight refinement rules


def applySkip(unit: MethodUnit, nodeId: str) -> MethodUnit:
    unit, node = _begin(unit, nodeId)
    node.rule = "skip"
    node.concrete = Skip()
    node.obligations.append(_oblige(unit, node, "skip", node.pre, node.post))
    return unit


def applyAssignment(unit: MethodUnit, nodeId: str, target: str, e: Expr, declare: str | None = None) -> MethodUnit:
    """x := e, or the declare-then-assign form `T x := e` when declare=T.

    The declared type must match the script-header locals entry; local
    scopes are fixed up front so mid conditions may mention the name
    before its declaration point.
    """

    unit, node = _begin(unit, nodeId)
    if declare is not None:
        if unit.locals.get(target) != declare:
            raise RefineError(
                "assignment at %s declares %s %s, but the header says %s"
                % (nodeId, declare, target, unit.locals.get(target, "nothing"))
            )
    else:
        _assignable(unit, target, "assignment at %s" % nodeId)
    _checkExpr(unit, e, unit.env()[target], "assignment at %s" % nodeId)
    node.rule = "assignment"
    node.concrete = LocalDecl(target, declare, e) if declare else Assign(target, e)
    node.obligations.append(
        _oblige(unit, node, "assign", node.pre, substitute(node.post, target, e))
    )
    return unit


def applyComposition(unit: MethodUnit, nodeId: str, mid: Predicate) -> MethodUnit:
    unit, node = _begin(unit, nodeId)
    _checkPred(unit, mid, "mid condition at %s" % nodeId)
    node.rule = "composition"
    node.children = [_child(unit, node.pre, mid), _child(unit, mid, node.post)]
    return unit


def applySelection(unit: MethodUnit, nodeId: str, guards) -> MethodUnit:
    unit, node = _begin(unit, nodeId)
    guards = tuple(guards)
    if not guards:
        raise RefineError("selection at %s needs at least one guard" % nodeId)
    for g in guards:
        _checkExpr(unit, g, T_BOOL, "selection guard at %s" % nodeId)
    node.rule = "selection"
    node.guards = guards
    node.obligations.append(
        _oblige(unit, node, "coverage", node.pre, OrP(tuple(Atom(g) for g in guards)))
    )
    node.children = [_child(unit, AndP((node.pre, Atom(g))), node.post) for g in guards]
    return unit


def applyRepetition(unit: MethodUnit, nodeId: str, inv: Predicate, variant: Expr, guard: Expr) -> MethodUnit:
    unit, node = _begin(unit, nodeId)
    _checkPred(unit, inv, "invariant at %s" % nodeId)
    _checkExpr(unit, variant, T_INT, "variant at %s" % nodeId)
    _checkExpr(unit, guard, T_BOOL, "loop guard at %s" % nodeId)
    node.rule = "repetition"
    node.loop = (inv, variant, guard)
    node.obligations.append(_oblige(unit, node, "entry", node.pre, inv))
    node.obligations.append(
        _oblige(unit, node, "exit", AndP((inv, NotP(Atom(guard)))), node.post)
    )
    node.children = [_child(unit, AndP((inv, Atom(guard))), inv)]
    return unit


def applyWeakenPre(unit: MethodUnit, nodeId: str, pre2: Predicate) -> MethodUnit:
    unit, node = _begin(unit, nodeId)
    _checkPred(unit, pre2, "weakened precondition at %s" % nodeId)
    node.rule = "weakenPre"
    node.obligations.append(_oblige(unit, node, "weaken", node.pre, pre2))
    node.children = [_child(unit, pre2, node.post)]
    return unit


def applyStrengthenPost(unit: MethodUnit, nodeId: str, post2: Predicate) -> MethodUnit:
    unit, node = _begin(unit, nodeId)
    _checkPred(unit, post2, "strengthened postcondition at %s" % nodeId)
    node.rule = "strengthenPost"
    node.obligations.append(_oblige(unit, node, "strengthen", post2, node.post))
    node.children = [_child(unit, node.pre, post2)]
    return unit


def applyMethodCall(unit: MethodUnit, nodeId: str, callee: MethodSig, args, target: str) -> MethodUnit:
    """target := callee(args) against the callee's contract.

    Arguments are pre-state expressions, so old(p) and bare p in the
    callee postcondition both substitute to the argument itself; mixing
    states is ruled out by refusing a target that occurs in an argument.
    """

    unit, node = _begin(unit, nodeId)
    args = tuple(args)
    if len(args) != len(callee.params):
        raise RefineError(
            "call at %s: %s takes %d arguments, got %d"
            % (nodeId, callee.name, len(callee.params), len(args))
        )
    for a, (p, t) in zip(args, callee.params):
        _checkExpr(unit, a, t, "argument %s of call at %s" % (p, nodeId))
    _assignable(unit, target, "call at %s" % nodeId)
    if unit.env()[target] != callee.returnType:
        raise RefineError(
            "call at %s: target %s has type %s, callee returns %s"
            % (nodeId, target, unit.env()[target], callee.returnType)
        )
    for a in args:
        if target in freeVarsExpr(a):
            raise RefineError(
                "call at %s: target %s occurs in an argument; the two-state"
                " substitution rule does not cover that" % (nodeId, target)
            )
    argMap = {p: a for (p, _t), a in zip(callee.params, args)}
    node.rule = "methodCall"
    node.concrete = MethodCallStmt(callee.name, args, target)
    node.obligations.append(
        _oblige(unit, node, "call.pre", node.pre, substMap(callee.contract.pre, argMap))
    )
    post = resolveOld(callee.contract.post, argMap)
    post = substMap(post, {**argMap, RESULT: Var(target)})
    node.obligations.append(_oblige(unit, node, "call.post", post, node.post))
    return unit


# ---------------------------------------------------------------------------
# Discharge, status and extraction


def _variantObligations(unit, node, methods, blocks) -> list[Obligation]:
    """Def. 1's {I & G & V==V0} S {0 <= V < V0}, once the body is concrete."""

    inv, variant, guard = node.loop
    body = node.children[0].stmt
    if _hasAbstract(body):
        return []
    env = unit.env()
    taken = set(env) | stmtNames(body) | freeVars(inv) | freeVarsExpr(variant) | freeVarsExpr(guard)
    v0 = freshName("v0", taken)
    env[v0] = T_INT
    aux: list[Obligation] = []
    post = AndP((
        Atom(Binary("<=", IntLit(0), variant)),
        Atom(Binary("<", variant, Var(v0))),
    ))
    w = wpConcrete(
        body,
        post,
        methods,
        blocks=blocks,
        aux=aux,
        env=env,
        idPrefix="%s.%s.variant" % (unit.name, node.id),
        provenance="%s %s: variant" % (unit.name, node.id),
    )
    hyp = AndP((inv, Atom(guard), Atom(Binary("==", variant, Var(v0)))))
    main = Obligation(
        "%s.%s.variant" % (unit.name, node.id),
        hyp,
        w,
        "%s %s: variant" % (unit.name, node.id),
        envFor(env, hyp, w),
    )
    return [main] + aux


def _hasAbstract(s: Statement) -> bool:
    if isinstance(s, Abstract):
        return True
    if isinstance(s, SeqStmt):
        return _hasAbstract(s.first) or _hasAbstract(s.second)
    if isinstance(s, Select):
        return any(_hasAbstract(b) for _g, b in s.branches)
    if isinstance(s, Repeat):
        return _hasAbstract(s.body)
    return False


def checkTree(
    unit: MethodUnit,
    cfg: ProverConfig = ProverConfig(),
    *,
    methods=None,
    blocks=None,
    backend=None,
) -> list:
    """Discharge every obligation and recompute statuses bottom-up.

    Returns [(Obligation, ProofResult)] in tree order. Repetition nodes
    with a fully concrete body contribute their variant obligations here;
    a node that delegates to a block is proven only when the block's own
    status (decided by the block registry check) is Proven.
    """

    items: list = []

    def visit(node: RefinementNode) -> str:
        results = []
        for ob in node.obligations:
            res = checkImplication(ob, cfg, backend=backend)
            items.append((ob, res))
            results.append(res)
        if node.rule == "repetition":
            for ob in _variantObligations(unit, node, methods, blocks):
                res = checkImplication(ob, cfg, backend=backend)
                items.append((ob, res))
                results.append(res)
        childStatus = [visit(c) for c in node.children]
        if node.rule is None:
            node.status = OPEN
        elif any(not isinstance(r, Valid) for r in results) or FAILED in childStatus:
            node.status = FAILED
        elif OPEN in childStatus:
            node.status = OPEN
        elif node.rule == "block":
            decl = (blocks or {}).get(node.concrete.name)
            node.status = decl.status if decl is not None else OPEN
        else:
            node.status = PROVEN
        return node.status

    visit(unit.root)
    return items


def extractProgram(unit: MethodUnit, blocks=None) -> Statement:
    """The refined statement tree, blocks recursively inlined.

    Partial derivations keep Abstract placeholders; a block without an
    instantiation stays a BlockRef line. Instantiations splice in
    directly: their locals were renamed away from every ambient name
    when the instantiation was recorded.
    """

    def inline(s: Statement) -> Statement:
        if isinstance(s, SeqStmt):
            return SeqStmt(inline(s.first), inline(s.second))
        if isinstance(s, Select):
            return Select(tuple((g, inline(b)) for g, b in s.branches))
        if isinstance(s, Repeat):
            return Repeat(s.invariant, s.variant, s.guard, inline(s.body))
        if isinstance(s, BlockRef):
            decl = (blocks or {}).get(s.name)
            if decl is None or decl.instantiation is None:
                return s
            return inline(decl.instantiation)
        return s

    return inline(unit.root.stmt)


def posthocCheck(
    unit: MethodUnit,
    cfg: ProverConfig = ProverConfig(),
    *,
    methods=None,
    blocks=None,
    backend=None,
) -> list:
    """Independent VC for the extracted program: pre => wp(program, post).

    This recomputes correctness from scratch, without trusting any rule
    application. Returns [(Obligation, ProofResult)]: the main implication
    plus the loop obligations wp emits along the way.
    """

    program = extractProgram(unit, blocks)
    if _hasAbstractDeep(program):
        raise RefineError("%s still has abstract holes" % unit.name)
    env = unit.env()
    aux: list[Obligation] = []
    w = wpConcrete(
        program,
        unit.contract.post,
        methods,
        blocks=blocks,
        aux=aux,
        env=env,
        idPrefix="%s.posthoc" % unit.name,
        provenance="%s: post-hoc check" % unit.name,
    )
    main = Obligation(
        "%s.posthoc" % unit.name,
        unit.contract.pre,
        w,
        "%s: post-hoc check" % unit.name,
        envFor(env, unit.contract.pre, w),
    )
    out = []
    for ob in [main] + aux:
        out.append((ob, checkImplication(ob, cfg, backend=backend)))
    return out


def _hasAbstractDeep(s: Statement) -> bool:
    # unlike _hasAbstract this is only reached after inlining, where a
    # BlockRef means a block that never got an instantiation
    if isinstance(s, BlockRef):
        return True
    return _hasAbstract(s)
