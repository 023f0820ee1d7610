"""Core ASTs: expressions, predicates, statements, contracts, bounded domains.

Everything here is immutable; tree operations elsewhere in the package
always build new nodes. Conventions worth knowing:

  * `div` is floor division; `&&` and `||` short-circuit left to right.
  * The five sequence primitives (size/get/contains/element/tail) are
    reserved operation names on sequence-typed receivers.
  * `result` is a reserved identifier naming the value a method returns;
    it may appear only in postconditions, as may `old(x)`.
  * Quantifiers always carry an explicit bounded domain so that validity
    stays decidable for the enumeration prover.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Type names of the guarded-command language.
T_INT = "int"
T_BOOL = "bool"
T_LIST = "List"
KERNEL_TYPES = (T_INT, T_BOOL, T_LIST)

# Reserved identifier for the method return value.
RESULT = "result"

ARITH_OPS = ("+", "-", "*", "div")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
LOGIC_OPS = ("&&", "||")
BINARY_OPS = ARITH_OPS + CMP_OPS + LOGIC_OPS

SEQ_OPS = ("size", "get", "contains", "element", "tail")


# ---------------------------------------------------------------------------
# Expressions


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Old(Expr):
    """Pre-state value of a variable; legal only inside postconditions."""

    inner: Var

    @property
    def name(self) -> str:
        return self.inner.name


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError("unknown binary operator %r" % self.op)


@dataclass(frozen=True)
class Not(Expr):
    inner: Expr


@dataclass(frozen=True)
class SeqLit(Expr):
    elems: tuple[Expr, ...]


@dataclass(frozen=True)
class SeqOp(Expr):
    """One of the built-in sequence operations.

    `index` carries the single extra argument of get/contains and must be
    absent for size/element/tail.
    """

    op: str
    receiver: Expr
    index: Expr | None = None

    def __post_init__(self):
        if self.op not in SEQ_OPS:
            raise ValueError("unknown sequence operation %r" % self.op)
        needs_index = self.op in ("get", "contains")
        if needs_index and self.index is None:
            raise ValueError("%s needs an argument" % self.op)
        if not needs_index and self.index is not None:
            raise ValueError("%s takes no argument" % self.op)


@dataclass(frozen=True)
class Call(Expr):
    """Method call of the trait language (not a sequence primitive)."""

    receiver: Expr
    method: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class New(Expr):
    cls: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class IfE(Expr):
    """Conditional expression (trait method bodies); guard evaluates first."""

    cond: Expr
    then: Expr
    els: Expr


def Result() -> Var:
    """The distinguished post-state value, modeled as the reserved name."""

    return Var(RESULT)


# ---------------------------------------------------------------------------
# Predicates


class Predicate:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Predicate):
    expr: Expr


@dataclass(frozen=True)
class TrueP(Predicate):
    pass


@dataclass(frozen=True)
class FalseP(Predicate):
    pass


@dataclass(frozen=True)
class NotP(Predicate):
    inner: Predicate


@dataclass(frozen=True)
class AndP(Predicate):
    items: tuple[Predicate, ...]


@dataclass(frozen=True)
class OrP(Predicate):
    items: tuple[Predicate, ...]


@dataclass(frozen=True)
class Implies(Predicate):
    lhs: Predicate
    rhs: Predicate


@dataclass(frozen=True)
class Forall(Predicate):
    var: str
    domain: "BoundedDomain"
    body: Predicate


@dataclass(frozen=True)
class Exists(Predicate):
    var: str
    domain: "BoundedDomain"
    body: Predicate


@dataclass(frozen=True)
class TypeAtom(Predicate):
    """`x : C` — records the declared class of a variable.

    Sorts are enforced by an obligation's envTypes, so the bounded prover
    evaluates these as true; they exist to keep typing knowledge in the
    shape the composition rules produce it.
    """

    var: str
    cls: str


# ---------------------------------------------------------------------------
# Bounded quantifier domains


class BoundedDomain:
    __slots__ = ()


@dataclass(frozen=True)
class IntRange(BoundedDomain):
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty IntRange [%d,%d]" % (self.lo, self.hi))


@dataclass(frozen=True)
class SeqElems(BoundedDomain):
    seq: Expr


@dataclass(frozen=True)
class SeqIndices(BoundedDomain):
    seq: Expr


@dataclass(frozen=True)
class AllInts(BoundedDomain):
    """`forall Num n: P` from trait specifications.

    Not directly enumerable; the trait verifier resolves it to the
    configured integer window before an obligation is built.
    """


# ---------------------------------------------------------------------------
# Statements


class Statement:
    __slots__ = ()


@dataclass(frozen=True)
class Skip(Statement):
    pass


@dataclass(frozen=True)
class Assign(Statement):
    target: str
    value: Expr


@dataclass(frozen=True)
class SeqStmt(Statement):
    first: Statement
    second: Statement


@dataclass(frozen=True)
class Select(Statement):
    branches: tuple[tuple[Expr, Statement], ...]


@dataclass(frozen=True)
class Repeat(Statement):
    invariant: Predicate
    variant: Expr
    guard: Expr
    body: Statement


@dataclass(frozen=True)
class MethodCallStmt(Statement):
    method: str
    args: tuple[Expr, ...]
    resultTarget: str


@dataclass(frozen=True)
class Abstract(Statement):
    id: str


@dataclass(frozen=True)
class BlockRef(Statement):
    name: str
    pre: Predicate
    post: Predicate


@dataclass(frozen=True)
class LocalDecl(Statement):
    name: str
    type: str
    init: Expr


# ---------------------------------------------------------------------------
# Contracts


def iterExprTree(node):
    """Yield node and every Expr/Predicate/BoundedDomain nested inside it."""

    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Old):
            stack.append(n.inner)
        elif isinstance(n, Binary):
            stack.extend((n.lhs, n.rhs))
        elif isinstance(n, (Not, NotP)):
            stack.append(n.inner)
        elif isinstance(n, SeqLit):
            stack.extend(n.elems)
        elif isinstance(n, SeqOp):
            stack.append(n.receiver)
            if n.index is not None:
                stack.append(n.index)
        elif isinstance(n, Call):
            stack.append(n.receiver)
            stack.extend(n.args)
        elif isinstance(n, New):
            stack.extend(n.args)
        elif isinstance(n, IfE):
            stack.extend((n.cond, n.then, n.els))
        elif isinstance(n, Atom):
            stack.append(n.expr)
        elif isinstance(n, (AndP, OrP)):
            stack.extend(n.items)
        elif isinstance(n, Implies):
            stack.extend((n.lhs, n.rhs))
        elif isinstance(n, (Forall, Exists)):
            stack.extend((n.domain, n.body))
        elif isinstance(n, (SeqElems, SeqIndices)):
            stack.append(n.seq)


def mentionsOld(node) -> bool:
    return any(isinstance(n, Old) for n in iterExprTree(node))


def mentionsResult(node) -> bool:
    return any(isinstance(n, Var) and n.name == RESULT for n in iterExprTree(node))


@dataclass(frozen=True)
class Contract:
    pre: Predicate
    post: Predicate

    def __post_init__(self):
        if mentionsOld(self.pre):
            raise ValueError("precondition must not mention old(...)")
        if mentionsResult(self.pre):
            raise ValueError("precondition must not mention result")
