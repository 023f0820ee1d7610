"""Trait composition and table flattening.

Composition is symmetric on disjoint methods. When both sides declare one
name, exactly one side may be concrete; the survivor's specification must
be respected by the other side's, which costs two prover checks:

    pre of the dropped spec                   ==>  pre of the kept spec
    both pres  &  post of the kept spec       ==>  post of the dropped spec

The post check assumes the preconditions: they describe the only states a
caller can reach, and they shield partial terms (`list.element()` is only
evaluated once `list.size() > 0` is known, in short-circuit order).

Two abstract specs keep the left one when it passes those checks in the
left-keep direction, the right one when only the mirrored direction passes.
Two concrete bodies never merge.

Flattening resolves every declaration to one literal body in two passes.
Pass one computes shapes: references chase their target, sums compose,
makeAbstract erases one body, and a literal imports the headers of the
interfaces it implements (a method both declared and imported must respect
every imported header). Pass two verifies the concrete methods of every
literal against the completed world; composed declarations are not
re-verified, their methods were checked where they were written.

Instantiable classes must end flattening with only getter methods abstract,
since those fix the constructor.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..lang.ast import Var
from ..lang.names import substMap
from ..prover.result import ProverConfig
from .model import (
    KIND_CLASS,
    KIND_INTERFACE,
    Lit,
    MakeAbstract,
    Method,
    Plus,
    Ref,
    TraitBody,
    TraitError,
    TraitTable,
    allMeth,
    makeAbstractBody,
    wellFormed,
)
from .typing import TraitCheck, checkBody, checkSpecImplication, conj


class CompositionError(TraitError):
    """Two methods of one name cannot be reconciled."""


class ConflictError(CompositionError):
    """Both sides are concrete."""


class SpecIncompatible(CompositionError):
    """Neither spec refines the other; carries the failed checks."""

    def __init__(self, message: str, checks):
        super().__init__(message)
        self.checks = list(checks)


class FlattenError(TraitError):
    """The table has no flat form: bad shape, cycle, conflict, or a class
    left with non-getter abstract methods."""

    def __init__(self, message: str, *, checks=None, diagnostics=None):
        super().__init__(message)
        self.checks = list(checks or [])
        self.diagnostics = list(diagnostics or [])


@dataclass
class CompositionPair:
    """One name collision resolved by composeMethod, with its proofs.

    origin is "plus" for a composition operator, "import" for interface
    header reconciliation. kept names the surviving side."""

    context: str
    method: str
    origin: str
    checks: list
    kept: str

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _renamedSpec(spec, fromParams, toParams):
    mapping = {pn: Var(qn) for (_, pn), (_, qn) in zip(fromParams, toParams) if pn != qn}
    if not mapping:
        return spec.pre, spec.post
    return substMap(spec.pre, mapping), substMap(spec.post, mapping)


def _implicationChecks(keep: Method, drop: Method, context: str, origin: str,
                       flat: dict, cfg: ProverConfig, backend):
    """The two checks that let `keep`'s spec stand for `drop`'s."""
    dPre, dPost = _renamedSpec(drop.spec, drop.params, keep.params)
    classEnv = {"this": context}
    for t, n in keep.params:
        classEnv[n] = t
    preCheck = checkSpecImplication(
        "compose.pre" if origin == "plus" else "interface.pre",
        context, keep.name,
        "%s.%s.%s.pre" % (origin, context, keep.name),
        dPre, keep.spec.pre, classEnv, flat, cfg, backend=backend,
        note="%s %s.%s: dropped precondition admits the kept one" % (origin, context, keep.name),
    )
    postEnv = dict(classEnv)
    postEnv["result"] = keep.returnType
    # The post implication is judged where the method can actually have been
    # called, so both preconditions join the hypothesis. They come first:
    # a spec like `result == list.element()` is only evaluable behind its
    # own precondition's short-circuit guard.
    postCheck = checkSpecImplication(
        "compose.post" if origin == "plus" else "interface.post",
        context, keep.name,
        "%s.%s.%s.post" % (origin, context, keep.name),
        conj([dPre, keep.spec.pre, keep.spec.post]), dPost, postEnv, flat, cfg,
        backend=backend,
        note="%s %s.%s: kept postcondition delivers the dropped one" % (origin, context, keep.name),
    )
    return [preCheck, postCheck]


def composeMethod(m1: Method, m2: Method, *, context: str, origin: str,
                  flat: dict, cfg: ProverConfig, pairs: list, checks: list,
                  backend=None) -> Method:
    """Def-by-cases composition of two same-name methods. Records one
    CompositionPair with every implication it had to prove."""
    if not m1.sameHeaderTypes(m2):
        raise CompositionError(
            "%s.%s: the two sides declare different signatures" % (context, m1.name)
        )
    if not m1.isAbstract and not m2.isAbstract:
        raise ConflictError(
            "%s.%s: two concrete implementations cannot compose" % (context, m1.name)
        )

    if not m1.isAbstract or not m2.isAbstract:
        keep, drop = (m1, m2) if not m1.isAbstract else (m2, m1)
        cs = _implicationChecks(keep, drop, context, origin, flat, cfg, backend)
        pair = CompositionPair(context, m1.name, origin, cs,
                               "left" if keep is m1 else "right")
        pairs.append(pair)
        checks.extend(cs)
        if not pair.ok:
            raise SpecIncompatible(
                "%s.%s: the concrete side does not respect the abstract specification"
                % (context, m1.name), cs)
        return keep

    # both abstract: left-biased choice of the surviving header
    left = _implicationChecks(m1, m2, context, origin, flat, cfg, backend)
    if all(c.ok for c in left):
        pairs.append(CompositionPair(context, m1.name, origin, left, "left"))
        checks.extend(left)
        return m1
    right = _implicationChecks(m2, m1, context, origin, flat, cfg, backend)
    pair = CompositionPair(context, m1.name, origin, left + right,
                           "right" if all(c.ok for c in right) else "none")
    pairs.append(pair)
    checks.extend(left + right)
    if pair.kept == "none":
        raise SpecIncompatible(
            "%s.%s: neither abstract specification refines the other"
            % (context, m1.name), left + right)
    return m2


def composeBodies(b1: TraitBody, b2: TraitBody, *, context: str,
                  flat: dict, cfg: ProverConfig, pairs: list, checks: list,
                  backend=None, origin: str = "plus") -> TraitBody:
    """Symmetric sum: disjoint methods stack, shared names go through
    composeMethod, interface lists union."""
    if b1.isInterface != b2.isInterface:
        raise CompositionError(
            "%s: cannot compose an interface body with a class/trait body" % context
        )
    interfaces = list(b1.interfaces)
    for i in b2.interfaces:
        if i not in interfaces:
            interfaces.append(i)
    names2 = {m.name: m for m in b2.methods}
    methods = []
    for m in b1.methods:
        if m.name in names2:
            methods.append(composeMethod(
                m, names2[m.name], context=context, origin=origin, flat=flat,
                cfg=cfg, pairs=pairs, checks=checks, backend=backend))
        else:
            methods.append(m)
    names1 = set(b1.methodNames())
    for m in b2.methods:
        if m.name not in names1:
            methods.append(m)
    return TraitBody(b1.isInterface, tuple(interfaces), tuple(methods))


@dataclass
class FlatResult:
    """Outcome of flattening one table: the flat bodies, every proof that
    was attempted, and the composition pairs in resolution order."""

    table: dict
    kinds: dict
    checks: list
    pairs: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]


def flattenTable(table: TraitTable, cfg: ProverConfig, *, backend=None,
                 preludeNames=()) -> FlatResult:
    """Resolve every declaration, then verify every literal body against
    the completed world. Structural impossibilities raise FlattenError;
    failed proofs land in the result with ok=False."""
    diags = wellFormed(table, preludeNames)
    if diags:
        raise FlattenError("; ".join(diags), diagnostics=diags)

    flat: dict = {}
    checks: list = []
    pairs: list = []
    literals: list = []
    resolving: set = set()

    def resolve(name: str) -> TraitBody:
        if name in flat:
            return flat[name]
        if name in resolving:
            raise FlattenError("circular resolution through %s" % name)
        resolving.add(name)
        try:
            body = resolveExpr(name, table.decls[name])
        finally:
            resolving.discard(name)
        kind = table.kinds[name]
        if kind == KIND_CLASS:
            if body.isInterface:
                raise FlattenError("class %s flattens to an interface body" % name)
            bad = [m.name for m in body.abstractMethods() if m.arity > 0]
            if bad:
                raise FlattenError(
                    "class %s still has abstract non-getter method %s; "
                    "only getters may stay abstract" % (name, bad[0]),
                    checks=checks)
        elif kind == KIND_INTERFACE and not body.isInterface:
            raise FlattenError("interface %s flattens to a non-interface body" % name)
        flat[name] = body
        return body

    def resolveExpr(name: str, e) -> TraitBody:
        if isinstance(e, Ref):
            return resolve(e.trait)
        if isinstance(e, Plus):
            lhs = resolveExpr(name, e.lhs)
            rhs = resolveExpr(name, e.rhs)
            try:
                return composeBodies(lhs, rhs, context=name, flat=flat, cfg=cfg,
                                     pairs=pairs, checks=checks, backend=backend)
            except FlattenError:
                raise
            except SpecIncompatible as ex:
                raise FlattenError(str(ex), checks=checks) from ex
            except CompositionError as ex:
                raise FlattenError(str(ex), checks=checks) from ex
        if isinstance(e, MakeAbstract):
            inner = resolveExpr(name, e.inner)
            try:
                return makeAbstractBody(inner, e.method)
            except TraitError as ex:
                raise FlattenError("%s: %s" % (name, ex), checks=checks) from ex
        assert isinstance(e, Lit)
        return bflat(name, e.body)

    def bflat(name: str, body: TraitBody) -> TraitBody:
        """Interface import: headers of implemented interfaces join the
        literal; methods present on both sides must respect every header."""
        ifaceBodies = [resolve(i) for i in body.interfaces]
        own = set(body.methodNames())
        importedNames: list = []
        for ib in ifaceBodies:
            for m in ib.methods:
                if m.name not in own and m.name not in importedNames:
                    importedNames.append(m.name)
        imported = []
        for mname in importedNames:
            headers = allMeth(mname, ifaceBodies)
            h = headers[0]
            for h2 in headers[1:]:
                try:
                    h = composeMethod(h, h2, context=name, origin="import",
                                      flat=flat, cfg=cfg, pairs=pairs,
                                      checks=checks, backend=backend)
                except SpecIncompatible as ex:
                    raise FlattenError(str(ex), checks=checks) from ex
                except CompositionError as ex:
                    raise FlattenError(str(ex), checks=checks) from ex
            imported.append(h)
        for m in body.methods:
            for h in allMeth(m.name, ifaceBodies):
                if not m.sameHeaderTypes(h):
                    raise FlattenError(
                        "%s.%s: signature differs from the %s header it implements"
                        % (name, m.name, "interface"), checks=checks)
                cs = _implicationChecks(m, h, name, "import", flat, cfg, backend)
                checks.extend(cs)
        literals.append((name, body))
        return TraitBody(body.isInterface, body.interfaces,
                         body.methods + tuple(imported))

    for name in table.decls:
        resolve(name)

    for owner, rawBody in literals:
        checks.extend(checkBody(flat, table.kinds, owner, rawBody, cfg, backend=backend))

    return FlatResult(flat, dict(table.kinds), checks, pairs)
