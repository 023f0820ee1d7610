"""Compile obligations to a small flat-array IR for the evaluation engines.

Every runtime value is a machine integer: booleans are 0/1, sequences are ids
into an interning table holding all sequences up to the configured bounds in
shortlex order (plus dynamically interned literals), and opaque class values
are members of a two-element placeholder domain. Interning is canonical, so
sequence equality is id equality.

Both engine backends (cbcforge.prover._engine, compiled, and
cbcforge.prover._engine_py, pure) execute this IR with identical semantics:
short-circuit logical operators, floor division, and an error flag for
partial operations (div by zero, get out of range, element/tail of empty).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..lang.ast import (
    Atom,
    AndP,
    Binary,
    BoolLit,
    Call,
    Exists,
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
    SeqElems,
    SeqIndices,
    SeqLit,
    SeqOp,
    TrueP,
    TypeAtom,
    Var,
)
from .result import Obligation, ProverConfig

# Opcodes. The compiled backend duplicates these as compile-time constants;
# the twin-equivalence tests pin the two interpreters to identical behavior.
OP_CONST = 0
OP_LOAD = 1
OP_BLOAD = 2
OP_ADD = 3
OP_SUB = 4
OP_MUL = 5
OP_FDIV = 6
OP_EQ = 7
OP_NE = 8
OP_LT = 9
OP_LE = 10
OP_GT = 11
OP_GE = 12
OP_AND = 13
OP_OR = 14
OP_NOT = 15
OP_IMPL = 16
OP_SSIZE = 17
OP_SGET = 18
OP_SCONT = 19
OP_SELEM = 20
OP_STAIL = 21
OP_SLIT = 22
OP_FORALL_R = 23
OP_FORALL_SE = 24
OP_FORALL_SI = 25
OP_EXISTS_R = 26
OP_EXISTS_SE = 27
OP_EXISTS_SI = 28

_BINOP = {
    "+": OP_ADD,
    "-": OP_SUB,
    "*": OP_MUL,
    "div": OP_FDIV,
    "==": OP_EQ,
    "!=": OP_NE,
    "<": OP_LT,
    "<=": OP_LE,
    ">": OP_GT,
    ">=": OP_GE,
    "&&": OP_AND,
    "||": OP_OR,
}

# Variable kinds, selecting the enumeration domain.
KIND_INT = 0
KIND_BOOL = 1
KIND_SEQ = 2
KIND_OPAQUE = 3

# Refuse enumerations beyond this many stores (see checkImplication).
MAX_STATES = 200_000_000


class CompileError(Exception):
    pass


@dataclass
class Compiled:
    names: tuple
    kinds: list
    ops: list
    a: list
    b: list
    c: list
    ext: list
    hypRoot: int
    conclRoot: int
    nslots: int
    intBound: int
    maxSeqLen: int
    seqElemBound: int


def shortlexSeqs(maxLen: int, elemBound: int) -> list[tuple[int, ...]]:
    """All int sequences of length <= maxLen over [-elemBound, elemBound],
    shortest first, lexicographic within a length. A sequence's id is its
    index in this list."""

    out: list[tuple[int, ...]] = []
    for n in range(maxLen + 1):
        out.extend(itertools.product(range(-elemBound, elemBound + 1), repeat=n))
    return out


def _kindOf(typeName: str) -> int:
    if typeName == "int":
        return KIND_INT
    if typeName == "bool":
        return KIND_BOOL
    if typeName == "List":
        return KIND_SEQ
    return KIND_OPAQUE


def domainSizes(co: Compiled) -> list[int]:
    sizes = []
    nSeqs = len(shortlexSeqs(co.maxSeqLen, co.seqElemBound))
    for k in co.kinds:
        if k == KIND_INT:
            sizes.append(2 * co.intBound + 1)
        elif k == KIND_BOOL:
            sizes.append(2)
        elif k == KIND_SEQ:
            sizes.append(nSeqs)
        else:
            sizes.append(2)
    return sizes


def totalStates(co: Compiled) -> int:
    n = 1
    for s in domainSizes(co):
        n *= s
    return n


def decodeState(co: Compiled, stateIdx: int) -> dict:
    """Reconstruct the store the engines used at enumeration index stateIdx.
    Must mirror the engines exactly: sorted names, rightmost fastest."""

    sizes = domainSizes(co)
    idxs = [0] * len(sizes)
    k = stateIdx
    for i in range(len(sizes) - 1, -1, -1):
        idxs[i] = k % sizes[i]
        k //= sizes[i]
    seqs = None
    store = {}
    for name, kind, idx in zip(co.names, co.kinds, idxs):
        if kind == KIND_INT:
            store[name] = idx - co.intBound
        elif kind == KIND_BOOL:
            store[name] = idx == 1
        elif kind == KIND_SEQ:
            if seqs is None:
                seqs = shortlexSeqs(co.maxSeqLen, co.seqElemBound)
            store[name] = seqs[idx]
        else:
            store[name] = idx
    return store


class _Compiler:
    def __init__(self, names: tuple, cfg: ProverConfig):
        self.varIndex = {n: i for i, n in enumerate(names)}
        self.ops: list[int] = []
        self.a: list[int] = []
        self.b: list[int] = []
        self.c: list[int] = []
        self.ext: list[int] = []
        self.binders: list[tuple[str, int]] = []  # (name, slot), innermost last
        self.maxDepth = 0

    def node(self, op: int, a: int = 0, b: int = 0, c: int = 0) -> int:
        self.ops.append(op)
        self.a.append(a)
        self.b.append(b)
        self.c.append(c)
        return len(self.ops) - 1

    def expr(self, e) -> int:
        if isinstance(e, IntLit):
            return self.node(OP_CONST, e.value)
        if isinstance(e, BoolLit):
            return self.node(OP_CONST, 1 if e.value else 0)
        if isinstance(e, Var):
            for name, slot in reversed(self.binders):
                if name == e.name:
                    return self.node(OP_BLOAD, slot)
            return self.node(OP_LOAD, self.varIndex[e.name])
        if isinstance(e, Binary):
            l = self.expr(e.lhs)
            r = self.expr(e.rhs)
            return self.node(_BINOP[e.op], l, r)
        if isinstance(e, Not):
            return self.node(OP_NOT, self.expr(e.inner))
        if isinstance(e, SeqLit):
            kids = [self.expr(x) for x in e.elems]
            off = len(self.ext)
            self.ext.extend(kids)
            return self.node(OP_SLIT, off, len(kids))
        if isinstance(e, SeqOp):
            recv = self.expr(e.receiver)
            if e.op == "size":
                return self.node(OP_SSIZE, recv)
            if e.op == "get":
                return self.node(OP_SGET, recv, self.expr(e.index))
            if e.op == "contains":
                return self.node(OP_SCONT, recv, self.expr(e.index))
            if e.op == "element":
                return self.node(OP_SELEM, recv)
            return self.node(OP_STAIL, recv)
        if isinstance(e, Old):
            raise CompileError("old(%s) must be resolved before proving" % e.name)
        if isinstance(e, (Call, New, IfE)):
            raise CompileError(
                "trait-language expression must be lowered before proving: %r"
                % type(e).__name__
            )
        raise CompileError("cannot compile expression %r" % (e,))

    def quant(self, p, opR: int, opSE: int, opSI: int) -> int:
        slot = len(self.binders)
        self.maxDepth = max(self.maxDepth, slot + 1)
        d = p.domain
        if isinstance(d, IntRange):
            off = len(self.ext)
            self.ext.extend((d.lo, d.hi))
            self.binders.append((p.var, slot))
            body = self.pred(p.body)
            self.binders.pop()
            return self.node(opR, body, slot, off)
        seq = self.expr(d.seq)
        self.binders.append((p.var, slot))
        body = self.pred(p.body)
        self.binders.pop()
        op = opSE if isinstance(d, SeqElems) else opSI
        return self.node(op, body, slot, seq)

    def pred(self, p: Predicate) -> int:
        if isinstance(p, TrueP):
            return self.node(OP_CONST, 1)
        if isinstance(p, FalseP):
            return self.node(OP_CONST, 0)
        if isinstance(p, TypeAtom):
            # Class membership is tracked statically; at enumeration time the
            # variable already ranges over values of its declared type.
            return self.node(OP_CONST, 1)
        if isinstance(p, Atom):
            return self.expr(p.expr)
        if isinstance(p, NotP):
            return self.node(OP_NOT, self.pred(p.inner))
        if isinstance(p, AndP):
            if not p.items:
                return self.node(OP_CONST, 1)
            acc = self.pred(p.items[0])
            for q in p.items[1:]:
                acc = self.node(OP_AND, acc, self.pred(q))
            return acc
        if isinstance(p, OrP):
            if not p.items:
                return self.node(OP_CONST, 0)
            acc = self.pred(p.items[0])
            for q in p.items[1:]:
                acc = self.node(OP_OR, acc, self.pred(q))
            return acc
        if isinstance(p, Implies):
            l = self.pred(p.lhs)
            r = self.pred(p.rhs)
            return self.node(OP_IMPL, l, r)
        if isinstance(p, Forall):
            return self.quant(p, OP_FORALL_R, OP_FORALL_SE, OP_FORALL_SI)
        if isinstance(p, Exists):
            return self.quant(p, OP_EXISTS_R, OP_EXISTS_SE, OP_EXISTS_SI)
        raise CompileError("cannot compile predicate %r" % (p,))


def compileObligation(ob: Obligation, cfg: ProverConfig) -> Compiled:
    names = tuple(sorted(ob.envTypes))
    kinds = [_kindOf(ob.envTypes[n]) for n in names]
    comp = _Compiler(names, cfg)
    hypRoot = comp.pred(ob.hypothesis)
    conclRoot = comp.pred(ob.conclusion)
    return Compiled(
        names=names,
        kinds=kinds,
        ops=comp.ops,
        a=comp.a,
        b=comp.b,
        c=comp.c,
        ext=comp.ext,
        hypRoot=hypRoot,
        conclRoot=conclRoot,
        nslots=max(comp.maxDepth, 1),
        intBound=cfg.intBound,
        maxSeqLen=cfg.maxSeqLen,
        seqElemBound=cfg.seqElemBound,
    )
