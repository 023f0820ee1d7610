"""Data model for specification-aware traits.

A trait world is a table of named declarations. Each declaration is a trait
expression: a body literal, a reference to another declaration, a symmetric
sum of two expressions, or a makeAbstract modifier. Bodies hold methods with
first-class contracts; abstract methods are headers (spec only), concrete
methods carry an expression body and, when directly recursive, an integer
measure over the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from dataclasses import fields as _dcFields

from ..lang.ast import Call, Contract, Expr, IfE, New, Old, Predicate, SEQ_OPS, TrueP
from ..lang.names import freeVars, freeVarsExpr


def containsNode(node, types) -> bool:
    """True when any instance of `types` occurs in a predicate or
    expression tree."""
    if isinstance(node, types):
        return True
    if hasattr(node, "__dataclass_fields__") and not isinstance(node, type):
        for f in _dcFields(node):
            v = getattr(node, f.name)
            if isinstance(v, tuple):
                if any(containsNode(x, types) for x in v):
                    return True
            elif hasattr(v, "__dataclass_fields__"):
                if containsNode(v, types):
                    return True
    return False


def containsOld(node) -> bool:
    """Trait specifications are stateless; old() means nothing in them."""
    return containsNode(node, Old)

# Primitive type names of the trait surface. They are not declarations;
# instanceof treats them reflexively and they carry no methods.
NUM = "Num"
BOOL = "Bool"
PRIMITIVES = (NUM, BOOL)

# Classes backed by the sequence theory. Only the prelude may touch these.
LIST = "List"
SEQ_CLASSES = ("List", "Nil", "Cons")


class TraitError(Exception):
    """Base for everything the trait layer can reject."""


class WellFormedError(TraitError):
    """A declaration table failed the static sanity checks."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class Method:
    """One method: contract + header, optionally a body and a measure.

    params are (type, name) pairs in declaration order. body is None for
    abstract methods. measure, when present, is an integer expression over
    the parameters that must strictly decrease on direct recursive calls.
    """

    spec: Contract
    returnType: str
    name: str
    params: tuple
    body: Expr | None = None
    measure: Expr | None = None

    @property
    def isAbstract(self) -> bool:
        return self.body is None

    @property
    def arity(self) -> int:
        return len(self.params)

    def paramNames(self) -> tuple:
        return tuple(n for _, n in self.params)

    def paramTypes(self) -> tuple:
        return tuple(t for t, _ in self.params)

    def header(self) -> "Method":
        """The abstract view: same contract and signature, no body."""
        if self.body is None and self.measure is None:
            return self
        return replace(self, body=None, measure=None)

    def sameHeaderTypes(self, other: "Method") -> bool:
        return (
            self.name == other.name
            and self.returnType == other.returnType
            and self.paramTypes() == other.paramTypes()
        )


@dataclass(frozen=True)
class TraitBody:
    """interface? [implemented interfaces] methods"""

    isInterface: bool
    interfaces: tuple
    methods: tuple

    def method(self, name: str) -> Method | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    def methodNames(self) -> tuple:
        return tuple(m.name for m in self.methods)

    def abstractMethods(self) -> tuple:
        return tuple(m for m in self.methods if m.isAbstract)

    def getters(self) -> tuple:
        """Abstract zero-argument methods, in declaration order.

        For an instantiable class these fix the constructor: one argument
        per getter, in this order.
        """
        return tuple(m for m in self.methods if m.isAbstract and m.arity == 0)


class TraitExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Lit(TraitExpr):
    body: TraitBody


@dataclass(frozen=True)
class Ref(TraitExpr):
    trait: str


@dataclass(frozen=True)
class Plus(TraitExpr):
    lhs: TraitExpr
    rhs: TraitExpr


@dataclass(frozen=True)
class MakeAbstract(TraitExpr):
    inner: TraitExpr
    method: str


# Declaration kinds. Interfaces and classes are type names; traits are not
# types and exist only to be composed.
KIND_TRAIT = "trait"
KIND_CLASS = "class"
KIND_INTERFACE = "interface"


@dataclass
class TraitTable:
    """Named declarations, insertion-ordered. kinds[name] is one of the
    KIND_* constants."""

    decls: dict
    kinds: dict

    def copy(self) -> "TraitTable":
        return TraitTable(dict(self.decls), dict(self.kinds))

    def add(self, name: str, kind: str, expr: TraitExpr, *, origin: str = "") -> None:
        if name in self.decls:
            raise TraitError(
                "duplicate declaration of %r%s" % (name, " in %s" % origin if origin else "")
            )
        self.decls[name] = expr
        self.kinds[name] = kind


def makeAbstractBody(body: TraitBody, name: str) -> TraitBody:
    """Replace method `name` by its header. The method must exist; applying
    this to an already-abstract method (or twice) changes nothing."""
    m = body.method(name)
    if m is None:
        raise TraitError("makeAbstract: no method named %r in this body" % name)
    methods = tuple(mm.header() if mm.name == name else mm for mm in body.methods)
    return replace(body, methods=methods)


def allMeth(name: str, bodies) -> tuple:
    """Every header for method `name` across the given bodies, deduplicated
    but order-preserving. Distinct specs for the same name all survive; the
    composition step reconciles them."""
    out = []
    for b in bodies:
        m = b.method(name)
        if m is not None:
            h = m.header()
            if h not in out:
                out.append(h)
    return tuple(out)


def _litBodies(e: TraitExpr):
    if isinstance(e, Lit):
        yield e.body
    elif isinstance(e, Plus):
        yield from _litBodies(e.lhs)
        yield from _litBodies(e.rhs)
    elif isinstance(e, MakeAbstract):
        yield from _litBodies(e.inner)


def _refNames(e: TraitExpr) -> set:
    if isinstance(e, Ref):
        return {e.trait}
    if isinstance(e, Plus):
        return _refNames(e.lhs) | _refNames(e.rhs)
    if isinstance(e, MakeAbstract):
        return _refNames(e.inner)
    return set()


def _checkMethod(owner: str, m: Method, diags: list) -> None:
    where = "%s.%s" % (owner, m.name)
    seen = set()
    for t, n in m.params:
        if n in seen:
            diags.append("%s: duplicate parameter %r" % (where, n))
        seen.add(n)
        if n in ("this", "result"):
            diags.append("%s: parameter may not be named %r" % (where, n))
    if m.isAbstract and m.measure is not None:
        diags.append("%s: a measure needs a body to protect" % where)
    allowed = set(m.paramNames()) | {"this"}
    for label, p in (("precondition", m.spec.pre), ("postcondition", m.spec.post)):
        fv = freeVars(p)
        extra = fv - allowed - ({"result"} if label == "postcondition" else set())
        if extra:
            diags.append(
                "%s: %s mentions %s" % (where, label, ", ".join(sorted(extra)))
            )
        if containsOld(p):
            diags.append("%s: old() has no meaning in a trait %s" % (where, label))
        if containsNode(p, (New, IfE)):
            diags.append(
                "%s: %s may not contain new or conditional expressions" % (where, label)
            )
    if m.measure is not None:
        extra = freeVarsExpr(m.measure) - allowed
        if extra:
            diags.append("%s: measure mentions %s" % (where, ", ".join(sorted(extra))))
        if containsNode(m.measure, (Call, New, IfE)):
            diags.append(
                "%s: a measure must be built from parameters and sequence "
                "operations only" % where
            )


def _checkBodyShape(owner: str, body: TraitBody, prelude: bool, diags: list) -> None:
    seen = set()
    for i in body.interfaces:
        if i in seen:
            diags.append("%s: interface %r listed twice" % (owner, i))
        seen.add(i)
        if not prelude and i in SEQ_CLASSES:
            diags.append(
                "%s: may not implement %r; the sequence theory is built in" % (owner, i)
            )
    seen = set()
    for m in body.methods:
        if m.name in seen:
            diags.append("%s: duplicate method %r" % (owner, m.name))
        seen.add(m.name)
        if m.name in SEQ_OPS and not (
            prelude and m.isAbstract and m.arity == 0 and m.name in ("element", "tail")
        ):
            diags.append(
                "%s: method name %r is reserved for the sequence theory" % (owner, m.name)
            )
        _checkMethod(owner, m, diags)


def wellFormed(table: TraitTable, preludeNames=()) -> list:
    """Static shape checks. Returns diagnostics (empty means fine):
    unknown references, circular definitions (through composition and
    through interface implementation), malformed bodies."""
    diags: list = []
    preludeNames = set(preludeNames)
    known = set(table.decls) | set(PRIMITIVES)
    for name, expr in table.decls.items():
        for b in _litBodies(expr):
            _checkBodyShape(name, b, name in preludeNames, diags)
            for i in b.interfaces:
                if i not in known:
                    diags.append("%s: unknown interface %r" % (name, i))
        for r in _refNames(expr):
            if r not in table.decls:
                diags.append("%s: reference to undeclared %r" % (name, r))

    # Cycle check over both composition references and interface lists; the
    # flattener recurses through both.
    edges = {}
    for name, expr in table.decls.items():
        deps = _refNames(expr) & set(table.decls)
        for b in _litBodies(expr):
            deps |= set(b.interfaces) & set(table.decls)
        edges[name] = deps
    state: dict = {}

    def visit(n, stack):
        state[n] = 1
        for d in edges.get(n, ()):
            if state.get(d) == 1:
                cycle = stack[stack.index(d):] + [d] if d in stack else [n, d]
                diags.append("circular definition: %s" % " -> ".join(cycle))
            elif state.get(d) is None:
                visit(d, stack + [d])
        state[n] = 2

    for n in edges:
        if state.get(n) is None:
            visit(n, [n])
    return diags


def trueContract() -> Contract:
    return Contract(TrueP(), TrueP())
