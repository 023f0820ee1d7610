"""Named, specified statement blocks and their two rules.

introduceBlock fills an open refinement node with a reference to a fresh
block contract; instantiateBlock later supplies the statements and proves
them against that contract by the block-to-method reading: accessible
variables act as immutable parameters, assignable ones as ambient mutable
state, and nested block references stay opaque behind their own contracts.

Renaming discipline: an instantiation's locals are renamed away from every
name of the enclosing frames the moment the instantiation is recorded, and
any nested block sites are rewritten through the same renaming. After
that, the whole registry shares one coordinate system and program
extraction can splice bodies verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lang.ast import (
    Abstract,
    AndP,
    Assign,
    Atom,
    Binary,
    BlockRef,
    Contract,
    LocalDecl,
    MethodCallStmt,
    Old,
    Repeat,
    RESULT,
    Select,
    Statement,
    Var,
    iterExprTree,
)
from .lang.names import (
    alphaRename,
    assignedVars,
    freeVars,
    freeVarsExpr,
    freshName,
    resolveOld,
    stmtNames,
    substMap,
)
from .lang.parser import BlockSite
from .lang.types import KernelTypeError, checkPred
from .prover.check import checkImplication
from .prover.result import Obligation, ProverConfig, Valid
from .prover.wp import collectLocals, envFor, wpConcrete
from . import refine as _refine
from .refine import FAILED, OPEN, PROVEN

__all__ = [
    "BlockError",
    "BlockDecl",
    "introduceBlock",
    "instantiateBlock",
    "blockToMethod",
    "BlockMethod",
    "checkBlocks",
]


class BlockError(Exception):
    pass


@dataclass
class BlockDecl:
    """One named block: contract, frame, and eventually its statements."""

    name: str
    contract: Contract
    accessible: tuple  # of (name, typeName), read-only inside the block
    assignable: tuple  # of (name, typeName), the block's mutable state
    scopeTypes: dict  # every variable visible where the block sits
    ambient: frozenset  # every name taken by enclosing frames
    instantiation: Statement | None = None
    nested: tuple = ()
    obligations: list = field(default_factory=list)
    status: str = OPEN

    def frameNames(self) -> set:
        return {n for n, _t in self.accessible} | {n for n, _t in self.assignable}

    def frameTypes(self) -> dict:
        out = {n: t for n, t in self.accessible}
        out.update({n: t for n, t in self.assignable})
        return out


def _typedFrame(names, env, what):
    out = []
    for n in names:
        if n not in env:
            raise BlockError("%s lists %r, which is not in scope" % (what, n))
        out.append((n, env[n]))
    return tuple(out)


def _checkContract(decl: BlockDecl) -> None:
    frame = decl.frameTypes()
    stray = (freeVars(decl.contract.pre) | freeVars(decl.contract.post)) - set(frame)
    if stray:
        raise BlockError(
            "contract of block %s mentions %s, outside accessible+assignable"
            % (decl.name, ", ".join(sorted(stray)))
        )
    try:
        checkPred(decl.contract.pre, frame)
        checkPred(decl.contract.post, frame)
    except KernelTypeError as e:
        raise BlockError("contract of block %s: %s" % (decl.name, e)) from e


def introduceBlock(unit, nodeId, name, pre2, post2, accessible, assignable, registry):
    """Fill an open node with {pre2} Block name {post2}.

    Side obligations pre=>pre2 and post2=>post are recorded on the node;
    the new BlockDecl lands in `registry` with status Open.
    """

    if name in registry:
        raise BlockError("block name %s already in use" % name)
    unit, node = _refine._begin(unit, nodeId)
    env = unit.env()
    acc = _typedFrame(accessible, env, "accessible of %s" % name)
    asn = []
    for n in assignable:
        if n == RESULT:
            raise BlockError(
                "block %s cannot assign result: return is excluded inside blocks" % name
            )
        if any(n == p for p, _t in unit.params):
            raise BlockError("block %s cannot assign parameter %r" % (name, n))
        if n not in unit.locals:
            raise BlockError("assignable of %s lists %r, which is not a local" % (name, n))
        asn.append((n, env[n]))
    decl = BlockDecl(name, Contract(pre2, post2), acc, tuple(asn), dict(env), frozenset(env))
    _checkContract(decl)
    node.rule = "block"
    node.concrete = BlockRef(name, pre2, post2)
    node.obligations.append(_refine._oblige(unit, node, "block.pre", node.pre, pre2))
    node.obligations.append(_refine._oblige(unit, node, "block.post", post2, node.post))
    registry[name] = decl
    return unit


def _renameSites(sites, renaming) -> list:
    if not renaming:
        return list(sites)
    sub = {k: Var(v) for k, v in renaming.items()}
    out = []
    for s in sites:
        out.append(
            BlockSite(
                s.name,
                substMap(s.pre, sub),
                substMap(s.post, sub),
                None if s.accessible is None else tuple(renaming.get(n, n) for n in s.accessible),
                None if s.assignable is None else tuple(renaming.get(n, n) for n in s.assignable),
                s.line,
            )
        )
    return out


def _oldSnapshots(decl, env, taken):
    """old(x) in the block post: parameters resolve to themselves, mutable
    state to a rigid entry snapshot conjoined into the hypothesis."""

    oldVars = {
        n.inner.name if isinstance(n.inner, Var) else None
        for n in iterExprTree(decl.contract.post)
        if isinstance(n, Old)
    } - {None}
    accNames = {n for n, _t in decl.accessible}
    snap = {}
    eqs = []
    for v in sorted(oldVars):
        if v in accNames:
            snap[v] = Var(v)
        else:
            rigid = freshName(v + "0", taken)
            taken.add(rigid)
            env[rigid] = env[v]
            snap[v] = Var(rigid)
            eqs.append(Atom(Binary("==", Var(v), Var(rigid))))
    return resolveOld(decl.contract.post, snap), eqs


def instantiateBlock(registry, name, stmts, sites, methods=None) -> None:
    """Record `stmts` as the block's body and build its obligation.

    `sites` are the nested block statements found while parsing `stmts`;
    each spawns its own Open BlockDecl. The obligation is
    contract.pre => wp(stmts', contract.post) with nested references kept
    opaque behind their contracts.
    """

    decl = registry.get(name)
    if decl is None:
        raise BlockError("no block named %s" % name)
    if decl.instantiation is not None:
        raise BlockError("block %s already instantiated" % name)
    for s in _walk(stmts):
        if isinstance(s, Abstract):
            raise BlockError("block %s instantiation contains an abstract hole" % name)

    body, renaming = alphaRename(stmts, decl.ambient)
    sites = _renameSites(sites, renaming)
    locals_ = collectLocals(body)
    visible = decl.frameTypes()
    shadow = set(locals_) & set(visible)
    if shadow:
        raise BlockError(
            "block %s locals shadow its own frame: %s" % (name, ", ".join(sorted(shadow)))
        )

    env = dict(visible)
    env.update(locals_)

    mutable = {n for n, _t in decl.assignable} | set(locals_)
    assigned = set(assignedVars(body))
    for s in sites:
        assigned |= set(s.assignable or ())
    bad = assigned - mutable
    if bad:
        raise BlockError(
            "block %s assigns %s, not assignable and not locally declared"
            % (name, ", ".join(sorted(bad)))
        )
    stray = _freeNames(body) - set(env)
    if stray:
        raise BlockError(
            "block %s mentions %s, outside accessible+assignable+locals"
            % (name, ", ".join(sorted(stray)))
        )

    for site in sites:
        if site.name in registry:
            raise BlockError("block name %s already in use" % site.name)
        accN = site.accessible if site.accessible is not None else tuple(sorted(env))
        asnN = site.assignable if site.assignable is not None else ()
        sub = BlockDecl(
            site.name,
            Contract(site.pre, site.post),
            _typedFrame(accN, env, "accessible of %s" % site.name),
            _typedFrame(asnN, env, "assignable of %s" % site.name),
            dict(env),
            decl.ambient | set(env),
        )
        _checkContract(sub)
        registry[site.name] = sub

    taken = set(env) | decl.ambient | stmtNames(body)
    post, snapEqs = _oldSnapshots(decl, env, taken)
    aux: list = []
    w = wpConcrete(
        body,
        post,
        methods,
        blocks=registry,
        aux=aux,
        env=env,
        idPrefix="block.%s" % name,
        provenance="block %s instantiation" % name,
    )
    hyp = decl.contract.pre if not snapEqs else AndP(tuple([decl.contract.pre] + snapEqs))
    main = Obligation(
        "block.%s.inst" % name,
        hyp,
        w,
        "block %s instantiation" % name,
        envFor(env, hyp, w),
    )
    decl.instantiation = body
    decl.nested = tuple(s.name for s in sites)
    decl.obligations = [main] + aux


def _walk(s: Statement):
    yield s
    for attr in ("first", "second", "body"):
        child = getattr(s, attr, None)
        if isinstance(child, Statement):
            yield from _walk(child)
    for pair in getattr(s, "branches", ()):
        yield from _walk(pair[1])


def _freeNames(s: Statement) -> set:
    """Variables a statement reads or writes, minus its own locals.

    Quantifier binders never surface here: freeVars already scopes them.
    Not scope-ordered (a use before the declaration still counts as
    local); wp and Obligation validation stay the precise guards.
    """

    out: set = set()
    for st in _walk(s):
        if isinstance(st, Assign):
            out.add(st.target)
            out |= freeVarsExpr(st.value)
        elif isinstance(st, LocalDecl):
            out |= freeVarsExpr(st.init)
        elif isinstance(st, Select):
            for g, _b in st.branches:
                out |= freeVarsExpr(g)
        elif isinstance(st, Repeat):
            out |= freeVars(st.invariant) | freeVarsExpr(st.variant) | freeVarsExpr(st.guard)
        elif isinstance(st, MethodCallStmt):
            out.add(st.resultTarget)
            for a in st.args:
                out |= freeVarsExpr(a)
        elif isinstance(st, BlockRef):
            out |= freeVars(st.pre) | freeVars(st.post)
    return out - set(collectLocals(s))


@dataclass(frozen=True)
class BlockMethod:
    """The block-to-method reading of an instantiated block."""

    name: str
    params: tuple  # accessible variables
    state: tuple  # assignable variables, the unit's ambient mutable slots
    returnType: str  # blocks return nothing
    contract: Contract
    body: Statement


def blockToMethod(decl: BlockDecl) -> BlockMethod:
    """Repackage an instantiated block as a standalone verification unit.

    The body is already alpha-renamed against the enclosing frames;
    old(...) on parameters collapses to the parameter itself since the
    unit never writes them.
    """

    if decl.instantiation is None:
        raise BlockError("block %s has no instantiation" % decl.name)
    post = resolveOld(decl.contract.post, {n: Var(n) for n, _t in decl.accessible})
    return BlockMethod(
        decl.name,
        decl.accessible,
        decl.assignable,
        "void",
        Contract(decl.contract.pre, post),
        decl.instantiation,
    )


def checkBlocks(registry, cfg: ProverConfig = ProverConfig(), *, backend=None) -> list:
    """Discharge every block obligation; set statuses; return the items."""

    items = []
    results: dict[str, list] = {}
    for name, decl in registry.items():
        results[name] = []
        for ob in decl.obligations:
            res = checkImplication(ob, cfg, backend=backend)
            items.append((ob, res))
            results[name].append(res)

    done: dict[str, str] = {}

    def status(name: str) -> str:
        if name in done:
            return done[name]
        decl = registry[name]
        if decl.instantiation is None:
            st = OPEN
        elif any(not isinstance(r, Valid) for r in results[name]):
            st = FAILED
        else:
            nested = [status(n) for n in decl.nested]
            if FAILED in nested:
                st = FAILED
            elif OPEN in nested:
                st = OPEN
            else:
                st = PROVEN
        done[name] = st
        decl.status = st
        return st

    for name in registry:
        status(name)
    return items
