"""Pure-Python evaluation engine for compiled obligations.

Behavioral twin of the compiled backend (_engine.pyx); selected when the
extension is unavailable or CBCFORGE_PURE=1. Any semantic change here must
be mirrored there.
"""

from __future__ import annotations

from functools import lru_cache

from .compile import (
    Compiled,
    KIND_BOOL,
    KIND_INT,
    KIND_OPAQUE,
    KIND_SEQ,
    OP_ADD,
    OP_AND,
    OP_BLOAD,
    OP_CONST,
    OP_EQ,
    OP_EXISTS_R,
    OP_EXISTS_SE,
    OP_EXISTS_SI,
    OP_FDIV,
    OP_FORALL_R,
    OP_FORALL_SE,
    OP_FORALL_SI,
    OP_GE,
    OP_GT,
    OP_IMPL,
    OP_LE,
    OP_LOAD,
    OP_LT,
    OP_MUL,
    OP_NE,
    OP_NOT,
    OP_OR,
    OP_SCONT,
    OP_SELEM,
    OP_SGET,
    OP_SLIT,
    OP_SSIZE,
    OP_STAIL,
    OP_SUB,
    shortlexSeqs,
)

BACKEND = "pure"

# Run outcome codes shared by both backends.
CODE_VALID = 0
CODE_INVALID = 1
CODE_HYP_ERROR = 2
CODE_CONCL_ERROR = 3


@lru_cache(maxsize=8)
def _seqTable(maxLen: int, elemBound: int):
    tuples = shortlexSeqs(maxLen, elemBound)
    index = {t: i for i, t in enumerate(tuples)}
    tails = [index[t[1:]] if t else -1 for t in tuples]
    return tuples, index, tails


def run(co: Compiled):
    """Enumerate all stores; return (code, stateIdx). stateIdx is -1 for
    CODE_VALID, otherwise the index of the offending store."""

    preTuples, preIndex, preTails = _seqTable(co.maxSeqLen, co.seqElemBound)
    preN = len(preTuples)
    dynTuples: list[tuple] = []
    dynIndex: dict = {}

    def intern(t):
        i = preIndex.get(t)
        if i is not None:
            return i
        i = dynIndex.get(t)
        if i is not None:
            return i
        dynTuples.append(t)
        i = preN + len(dynTuples) - 1
        dynIndex[t] = i
        return i

    def seqOf(sid):
        return preTuples[sid] if sid < preN else dynTuples[sid - preN]

    ops, A, B, C, ext = co.ops, co.a, co.b, co.c, co.ext
    n = len(co.names)
    store = [0] * n
    slots = [0] * co.nslots
    err = 0

    def ev(i):
        nonlocal err
        op = ops[i]
        if op == OP_CONST:
            return A[i]
        if op == OP_LOAD:
            return store[A[i]]
        if op == OP_BLOAD:
            return slots[A[i]]
        if op == OP_AND:
            x = ev(A[i])
            if err or not x:
                return 0
            return ev(B[i])
        if op == OP_OR:
            x = ev(A[i])
            if err:
                return 0
            if x:
                return 1
            return ev(B[i])
        if op == OP_IMPL:
            x = ev(A[i])
            if err:
                return 0
            if not x:
                return 1
            return ev(B[i])
        if op == OP_NOT:
            x = ev(A[i])
            if err:
                return 0
            return 0 if x else 1
        if OP_ADD <= op <= OP_GE:
            x = ev(A[i])
            if err:
                return 0
            y = ev(B[i])
            if err:
                return 0
            if op == OP_ADD:
                return x + y
            if op == OP_SUB:
                return x - y
            if op == OP_MUL:
                return x * y
            if op == OP_FDIV:
                if y == 0:
                    err = 1
                    return 0
                return x // y
            if op == OP_EQ:
                return 1 if x == y else 0
            if op == OP_NE:
                return 1 if x != y else 0
            if op == OP_LT:
                return 1 if x < y else 0
            if op == OP_LE:
                return 1 if x <= y else 0
            if op == OP_GT:
                return 1 if x > y else 0
            return 1 if x >= y else 0
        if op == OP_SSIZE:
            s = ev(A[i])
            if err:
                return 0
            return len(seqOf(s))
        if op == OP_SGET:
            s = ev(A[i])
            if err:
                return 0
            ix = ev(B[i])
            if err:
                return 0
            t = seqOf(s)
            if ix < 0 or ix >= len(t):
                err = 1
                return 0
            return t[ix]
        if op == OP_SCONT:
            s = ev(A[i])
            if err:
                return 0
            v = ev(B[i])
            if err:
                return 0
            return 1 if v in seqOf(s) else 0
        if op == OP_SELEM:
            s = ev(A[i])
            if err:
                return 0
            t = seqOf(s)
            if not t:
                err = 1
                return 0
            return t[0]
        if op == OP_STAIL:
            s = ev(A[i])
            if err:
                return 0
            if s < preN:
                tid = preTails[s]
                if tid < 0:
                    err = 1
                    return 0
                return tid
            t = dynTuples[s - preN]
            if not t:
                err = 1
                return 0
            return intern(t[1:])
        if op == OP_SLIT:
            vals = []
            for j in range(A[i], A[i] + B[i]):
                v = ev(ext[j])
                if err:
                    return 0
                vals.append(v)
            return intern(tuple(vals))
        if op == OP_FORALL_R or op == OP_EXISTS_R:
            lo = ext[C[i]]
            hi = ext[C[i] + 1]
            body = A[i]
            slot = B[i]
            if op == OP_FORALL_R:
                for v in range(lo, hi + 1):
                    slots[slot] = v
                    r = ev(body)
                    if err or not r:
                        return 0
                return 1
            for v in range(lo, hi + 1):
                slots[slot] = v
                r = ev(body)
                if err:
                    return 0
                if r:
                    return 1
            return 0
        if op in (OP_FORALL_SE, OP_FORALL_SI, OP_EXISTS_SE, OP_EXISTS_SI):
            s = ev(C[i])
            if err:
                return 0
            t = seqOf(s)
            values = t if op in (OP_FORALL_SE, OP_EXISTS_SE) else range(len(t))
            body = A[i]
            slot = B[i]
            if op in (OP_FORALL_SE, OP_FORALL_SI):
                for v in values:
                    slots[slot] = v
                    r = ev(body)
                    if err or not r:
                        return 0
                return 1
            for v in values:
                slots[slot] = v
                r = ev(body)
                if err:
                    return 0
                if r:
                    return 1
            return 0
        raise AssertionError("bad opcode %d" % op)

    sizes = []
    bases = []
    for kind in co.kinds:
        if kind == KIND_INT:
            sizes.append(2 * co.intBound + 1)
            bases.append(-co.intBound)
        elif kind == KIND_BOOL:
            sizes.append(2)
            bases.append(0)
        elif kind == KIND_SEQ:
            sizes.append(preN)
            bases.append(0)
        else:  # KIND_OPAQUE
            sizes.append(2)
            bases.append(0)

    idxs = [0] * n
    for v in range(n):
        store[v] = bases[v]
    k = 0
    while True:
        err = 0
        hv = ev(co.hypRoot)
        if err:
            return CODE_HYP_ERROR, k
        if hv:
            err = 0
            cv = ev(co.conclRoot)
            if err:
                return CODE_CONCL_ERROR, k
            if not cv:
                return CODE_INVALID, k
        k += 1
        i = n - 1
        while i >= 0:
            idxs[i] += 1
            if idxs[i] < sizes[i]:
                store[i] = bases[i] + idxs[i]
                break
            idxs[i] = 0
            store[i] = bases[i]
            i -= 1
        if i < 0:
            return CODE_VALID, -1
