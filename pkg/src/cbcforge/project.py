"""Project loading and replay of `.cbc` refinement scripts.

A script is a sequence of method headers, `refine <node> <rule> ...;`
commands bound to the most recent header, and `block B { <contract> } is
{ <statements> }` instantiations.  Node ids are assigned A0, A1, ... in
creation order by the refinement kernel, so scripts address nodes by the
ids a previous `check` run printed.

Instantiations are replayed in a second pass, after every method in the
project has been refined, so a block declared in one file can be filled
in from another.  The declaration's contract is authoritative; when an
instantiation restates it between braces, the restatement must match the
declaration exactly (nested blocks registered from a renamed enclosing
body must be restated with the renamed variables).
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .blocks import BlockError, instantiateBlock, introduceBlock
from .lang.ast import Assign, Contract, LocalDecl, MethodCallStmt, Statement
from .lang.parser import (
    ParseError,
    TokenStream,
    _parseBlockStmt,
    _parseStmt,
    asExpr,
    parsePred,
    parsePredHere,
    parseStatements,
)
from .prover.result import ProverConfig
from .refine import (
    MethodUnit,
    RefineError,
    applyAssignment,
    applyComposition,
    applyMethodCall,
    applyRepetition,
    applySelection,
    applySkip,
    applyStrengthenPost,
    applyWeakenPre,
    methodSig,
    newMethodUnit,
)


class ProjectError(Exception):
    """A script or project-layout problem, reported with file and line."""


@dataclasses.dataclass
class PendingInstantiation:
    name: str
    contract: Contract | None
    body: Statement
    sites: list
    fileName: str
    line: int


@dataclasses.dataclass
class Project:
    root: Path
    methods: dict  # method name -> MethodUnit, replayed but not yet checked
    registry: dict  # block name -> BlockDecl
    sigs: dict  # method name -> MethodSig
    traitTable: object | None
    compositions: list
    config: ProverConfig


def replayScript(text: str, *, registry, sigs, fileName: str = "<script>"):
    """Run one script's headers and refine commands.

    Returns (units, pending) where pending holds the parsed block
    instantiations for :func:`runInstantiations`.  `registry` and `sigs`
    are shared across all scripts of a project and are mutated here.
    """

    ts = TokenStream(text)
    units: dict[str, MethodUnit] = {}
    pending: list[PendingInstantiation] = []
    current: str | None = None
    try:
        while ts.peek().kind != "eof":
            tok = ts.peek()
            if ts.at("method"):
                unit = _parseMethodHeader(ts, fileName)
                if unit.name in sigs:
                    raise ProjectError(
                        "%s: line %d: duplicate method %r" % (fileName, tok.line, unit.name)
                    )
                units[unit.name] = unit
                sigs[unit.name] = methodSig(unit)
                current = unit.name
            elif ts.at("refine"):
                if current is None:
                    raise ProjectError(
                        "%s: line %d: refine before any method header" % (fileName, tok.line)
                    )
                units[current] = _runRefine(ts, units[current], registry, sigs, fileName)
            elif ts.at("block"):
                pending.append(_parseInstantiation(ts, fileName))
            else:
                raise ParseError(
    "expected 'method', 'refine' or 'block', found %r" % (tok.text or "end of input"),
                    tok.line,
                )
    except ParseError as exc:
        raise ProjectError("%s: %s" % (fileName, exc)) from exc
    return units, pending


def _parseMethodHeader(ts: TokenStream, fileName: str) -> MethodUnit:
    tok = ts.expect("method")
    name = ts.expectIdent("method name")
    ts.expect("(")
    params = []
    if not ts.at(")"):
        while True:
            pname = ts.expectIdent("parameter name")
            ts.expect(":")
            params.append((pname, ts.expectIdent("parameter type")))
            if not ts.accept(","):
                break
    ts.expect(")")
    ts.expect("returns")
    returnType = ts.expectIdent("return type")
    ts.expect("requires")
    ts.expect(":")
    pre = parsePredHere(ts)
    ts.expect(";")
    ts.expect("ensures")
    ts.expect(":")
    post = parsePredHere(ts)
    ts.expect(";")
    locals_: dict[str, str] = {}
    if ts.at("locals"):
        ts.next()
        ts.expect(":")
        while True:
            lname = ts.expectIdent("local name")
            ts.expect(":")
            ltype = ts.expectIdent("local type")
            if lname in locals_:
                raise ParseError("duplicate local %r" % lname, tok.line)
            locals_[lname] = ltype
            if not ts.accept(","):
                break
        ts.expect(";")
    try:
        return newMethodUnit(name, tuple(params), returnType, Contract(pre, post), locals_)
    except (RefineError, ValueError) as exc:
        raise ProjectError("%s: line %d: %s" % (fileName, tok.line, exc)) from exc


def _runRefine(ts: TokenStream, unit: MethodUnit, registry, sigs, fileName: str) -> MethodUnit:
    tok = ts.expect("refine")
    nodeId = ts.expectIdent("node id")
    rule = ts.peek()
    try:
        if ts.accept("skip"):
            ts.expect(";")
            return applySkip(unit, nodeId)
        if ts.accept("composition"):
            ts.expect("mid")
            ts.expect(":")
            mid = parsePredHere(ts)
            ts.expect(";")
            return applyComposition(unit, nodeId, mid)
        if ts.accept("selection"):
            ts.expect("guards")
            ts.expect(":")
            guards = [asExpr(parsePred(ts), ts)]
            while ts.accept(","):
                guards.append(asExpr(parsePred(ts), ts))
            ts.expect(";")
            return applySelection(unit, nodeId, tuple(guards))
        if ts.accept("repetition"):
            ts.expect("invariant")
            ts.expect(":")
            inv = parsePredHere(ts)
            ts.expect(";")
            ts.expect("variant")
            ts.expect(":")
            variant = asExpr(parsePred(ts), ts)
            ts.expect(";")
            ts.expect("guard")
            ts.expect(":")
            guard = asExpr(parsePred(ts), ts)
            ts.expect(";")
            return applyRepetition(unit, nodeId, inv, variant, guard)
        if ts.accept("weakenPre"):
            ts.expect(":")
            p = parsePredHere(ts)
            ts.expect(";")
            return applyWeakenPre(unit, nodeId, p)
        if ts.accept("strengthenPost"):
            ts.expect(":")
            q = parsePredHere(ts)
            ts.expect(";")
            return applyStrengthenPost(unit, nodeId, q)
        if ts.accept("assignment"):
            stmt = _parseStmt(ts, [])
            if isinstance(stmt, LocalDecl):
                return applyAssignment(unit, nodeId, stmt.name, stmt.init, declare=stmt.type)
            if isinstance(stmt, Assign):
                return applyAssignment(unit, nodeId, stmt.target, stmt.value)
            raise ParseError("assignment takes `x := e;` or `int x := e;`", rule.line)
        if ts.accept("call"):
            stmt = _parseStmt(ts, [])
            if not isinstance(stmt, MethodCallStmt):
                raise ParseError("call takes `y := m(args);`", rule.line)
            callee = sigs.get(stmt.method)
            if callee is None:
                raise ParseError("call of unknown method %r" % stmt.method, rule.line)
            return applyMethodCall(unit, nodeId, callee, stmt.args, stmt.resultTarget)
        if ts.at("block"):
            sites: list = []
            _parseBlockStmt(ts, sites)
            site = sites[0]
            if site.accessible is None or site.assignable is None:
                raise ParseError(
                    "block introduction needs accessible(...) and assignable(...)", rule.line
                )
            return introduceBlock(
                unit,
                nodeId,
                site.name,
                site.pre,
                site.post,
                tuple(site.accessible),
                tuple(site.assignable),
                registry,
            )
        raise ParseError(
            "unknown refinement rule %r" % (rule.text or "end of input"), rule.line
        )
    except (RefineError, BlockError) as exc:
        raise ProjectError("%s: line %d: %s" % (fileName, tok.line, exc)) from exc


def _parseInstantiation(ts: TokenStream, fileName: str) -> PendingInstantiation:
    tok = ts.expect("block")
    name = ts.expectIdent("block name")
    contract = None
    if ts.accept("{"):
        ts.expect("requires")
        ts.expect(":")
        pre = parsePredHere(ts)
        ts.expect(";")
        ts.expect("ensures")
        ts.expect(":")
        post = parsePredHere(ts)
        ts.expect(";")
        ts.expect("}")
        contract = Contract(pre, post)
    ts.expect("is")
    ts.expect("{")
    body, sites = parseStatements(ts, stopAt="}")
    ts.expect("}")
    return PendingInstantiation(name, contract, body, sites, fileName, tok.line)


def runInstantiations(pending, registry, sigs) -> None:
    for inst in pending:
        where = "%s: line %d" % (inst.fileName, inst.line)
        decl = registry.get(inst.name)
        if decl is None:
            raise ProjectError("%s: instantiation of undeclared block %r" % (where, inst.name))
        if inst.contract is not None and inst.contract != decl.contract:
            raise ProjectError(
                "%s: restated contract differs from the declaration of %r; "
                "the declared contract is authoritative" % (where, inst.name)
            )
        try:
            instantiateBlock(registry, inst.name, inst.body, inst.sites, methods=sigs)
        except BlockError as exc:
            raise ProjectError("%s: %s" % (where, exc)) from exc


def replayText(text: str, fileName: str = "<script>"):
    """One-shot convenience for tests: both passes over a single script."""

    registry: dict = {}
    sigs: dict = {}
    units, pending = replayScript(text, registry=registry, sigs=sigs, fileName=fileName)
    runInstantiations(pending, registry, sigs)
    return units, registry, sigs


def loadProject(root, cfg: ProverConfig | None = None) -> Project:
    rootPath = Path(root)
    if not rootPath.is_dir():
        raise ProjectError("project directory %s does not exist" % rootPath)
    registry: dict = {}
    sigs: dict = {}
    units: dict = {}
    pending: list[PendingInstantiation] = []
    for path in sorted(rootPath.glob("*.cbc")):
        fileUnits, filePending = replayScript(
            path.read_text(), registry=registry, sigs=sigs, fileName=path.name
        )
        units.update(fileUnits)
        pending.extend(filePending)
    runInstantiations(pending, registry, sigs)
    table = None
    compositions: list = []
    traitFiles = sorted(rootPath.glob("*.trait"))
    tcFiles = sorted(rootPath.glob("*.tc"))
    if traitFiles or tcFiles:
        from .traits import TraitError, loadTraitWorld

        try:
            table, compositions = loadTraitWorld(traitFiles, tcFiles)
        except TraitError as ex:
            raise ProjectError(str(ex)) from ex
    return Project(
        root=rootPath,
        methods=units,
        registry=registry,
        sigs=sigs,
        traitTable=table,
        compositions=compositions,
        config=cfg or ProverConfig(),
    )
