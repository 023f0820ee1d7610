# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation engine for compiled obligations.

Behavioral twin of _engine_py; any semantic change must be mirrored there.
All runtime values are C long longs: booleans 0/1, sequences as ids into the
shortlex intern table (dynamic literals overflow into a Python-side list).
"""

import array as _array

from .compile import shortlexSeqs, KIND_INT, KIND_BOOL, KIND_SEQ

BACKEND = "compiled"

CODE_VALID = 0
CODE_INVALID = 1
CODE_HYP_ERROR = 2
CODE_CONCL_ERROR = 3

cdef enum:
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


_tables = {}


def _seqTable(maxLen, elemBound):
    key = (maxLen, elemBound)
    t = _tables.get(key)
    if t is not None:
        return t
    tuples = shortlexSeqs(maxLen, elemBound)
    index = {tt: i for i, tt in enumerate(tuples)}
    n = len(tuples)
    offs = _array.array('q', bytes(8 * (n + 1)))
    lens = _array.array('q', bytes(8 * n))
    tails = _array.array('q', bytes(8 * n))
    flat = _array.array('q')
    pos = 0
    for i, tt in enumerate(tuples):
        offs[i] = pos
        lens[i] = len(tt)
        flat.extend(tt)
        pos += len(tt)
        tails[i] = index[tt[1:]] if tt else -1
    offs[n] = pos
    if not flat:
        flat.append(0)  # keep the buffer non-empty for the memoryview
    t = (index, offs, lens, flat, tails, n)
    _tables[key] = t
    return t


cdef class Runner:
    cdef long long[:] ops
    cdef long long[:] ar
    cdef long long[:] br
    cdef long long[:] cr
    cdef long long[:] ext
    cdef long long[:] store
    cdef long long[:] slots
    cdef long long[:] seqOff
    cdef long long[:] seqLen
    cdef long long[:] seqElems
    cdef long long[:] seqTail
    cdef Py_ssize_t preN
    cdef int err
    cdef list dynTuples
    cdef dict preIndex
    cdef dict dynIndex

    cdef long long lenOf(self, long long sid):
        if sid < self.preN:
            return self.seqLen[sid]
        return <long long>len(<tuple>self.dynTuples[sid - self.preN])

    cdef long long elemAt(self, long long sid, long long ix):
        # caller guarantees 0 <= ix < lenOf(sid)
        if sid < self.preN:
            return self.seqElems[self.seqOff[sid] + ix]
        return <long long>(<tuple>self.dynTuples[sid - self.preN])[ix]

    cdef long long intern(self, tuple t):
        v = self.preIndex.get(t)
        if v is not None:
            return <long long>v
        v = self.dynIndex.get(t)
        if v is not None:
            return <long long>v
        self.dynTuples.append(t)
        cdef long long sid = self.preN + len(self.dynTuples) - 1
        self.dynIndex[t] = sid
        return sid

    cdef long long ev(self, Py_ssize_t i):
        cdef long long op = self.ops[i]
        cdef long long x, y, q, sid, ix, v, lo, hi, ln, r
        cdef Py_ssize_t j, body, slot
        if op == OP_CONST:
            return self.ar[i]
        if op == OP_LOAD:
            return self.store[self.ar[i]]
        if op == OP_BLOAD:
            return self.slots[self.ar[i]]
        if op == OP_AND:
            x = self.ev(self.ar[i])
            if self.err or x == 0:
                return 0
            return self.ev(self.br[i])
        if op == OP_OR:
            x = self.ev(self.ar[i])
            if self.err:
                return 0
            if x != 0:
                return 1
            return self.ev(self.br[i])
        if op == OP_IMPL:
            x = self.ev(self.ar[i])
            if self.err:
                return 0
            if x == 0:
                return 1
            return self.ev(self.br[i])
        if op == OP_NOT:
            x = self.ev(self.ar[i])
            if self.err:
                return 0
            return 0 if x != 0 else 1
        if OP_ADD <= op <= OP_GE:
            x = self.ev(self.ar[i])
            if self.err:
                return 0
            y = self.ev(self.br[i])
            if self.err:
                return 0
            if op == OP_ADD:
                return x + y
            if op == OP_SUB:
                return x - y
            if op == OP_MUL:
                return x * y
            if op == OP_FDIV:
                if y == 0:
                    self.err = 1
                    return 0
                q = x / y
                if x % y != 0 and (x < 0) != (y < 0):
                    q -= 1
                return q
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
            sid = self.ev(self.ar[i])
            if self.err:
                return 0
            return self.lenOf(sid)
        if op == OP_SGET:
            sid = self.ev(self.ar[i])
            if self.err:
                return 0
            ix = self.ev(self.br[i])
            if self.err:
                return 0
            if ix < 0 or ix >= self.lenOf(sid):
                self.err = 1
                return 0
            return self.elemAt(sid, ix)
        if op == OP_SCONT:
            sid = self.ev(self.ar[i])
            if self.err:
                return 0
            v = self.ev(self.br[i])
            if self.err:
                return 0
            ln = self.lenOf(sid)
            for ix in range(ln):
                if self.elemAt(sid, ix) == v:
                    return 1
            return 0
        if op == OP_SELEM:
            sid = self.ev(self.ar[i])
            if self.err:
                return 0
            if self.lenOf(sid) == 0:
                self.err = 1
                return 0
            return self.elemAt(sid, 0)
        if op == OP_STAIL:
            sid = self.ev(self.ar[i])
            if self.err:
                return 0
            if sid < self.preN:
                x = self.seqTail[sid]
                if x < 0:
                    self.err = 1
                    return 0
                return x
            t = <tuple>self.dynTuples[sid - self.preN]
            if len(t) == 0:
                self.err = 1
                return 0
            return self.intern(t[1:])
        if op == OP_SLIT:
            vals = []
            for j in range(self.ar[i], self.ar[i] + self.br[i]):
                v = self.ev(self.ext[j])
                if self.err:
                    return 0
                vals.append(v)
            return self.intern(tuple(vals))
        if op == OP_FORALL_R or op == OP_EXISTS_R:
            lo = self.ext[self.cr[i]]
            hi = self.ext[self.cr[i] + 1]
            body = self.ar[i]
            slot = self.br[i]
            if op == OP_FORALL_R:
                for v in range(lo, hi + 1):
                    self.slots[slot] = v
                    r = self.ev(body)
                    if self.err or r == 0:
                        return 0
                return 1
            for v in range(lo, hi + 1):
                self.slots[slot] = v
                r = self.ev(body)
                if self.err:
                    return 0
                if r != 0:
                    return 1
            return 0
        # sequence-driven quantifiers
        sid = self.ev(self.cr[i])
        if self.err:
            return 0
        ln = self.lenOf(sid)
        body = self.ar[i]
        slot = self.br[i]
        if op == OP_FORALL_SE or op == OP_FORALL_SI:
            for ix in range(ln):
                self.slots[slot] = self.elemAt(sid, ix) if op == OP_FORALL_SE else ix
                r = self.ev(body)
                if self.err or r == 0:
                    return 0
            return 1
        if op == OP_EXISTS_SE or op == OP_EXISTS_SI:
            for ix in range(ln):
                self.slots[slot] = self.elemAt(sid, ix) if op == OP_EXISTS_SE else ix
                r = self.ev(body)
                if self.err:
                    return 0
                if r != 0:
                    return 1
            return 0
        raise AssertionError("bad opcode %d" % op)

    def drive(self, Py_ssize_t n, long long[:] sizes, long long[:] bases,
              long long[:] idxs, Py_ssize_t hypRoot, Py_ssize_t conclRoot):
        cdef long long k = 0
        cdef long long hv, cv
        cdef Py_ssize_t i
        while True:
            self.err = 0
            hv = self.ev(hypRoot)
            if self.err:
                return (CODE_HYP_ERROR, k)
            if hv != 0:
                self.err = 0
                cv = self.ev(conclRoot)
                if self.err:
                    return (CODE_CONCL_ERROR, k)
                if cv == 0:
                    return (CODE_INVALID, k)
            k += 1
            i = n - 1
            while i >= 0:
                idxs[i] += 1
                if idxs[i] < sizes[i]:
                    self.store[i] = bases[i] + idxs[i]
                    break
                idxs[i] = 0
                self.store[i] = bases[i]
                i -= 1
            if i < 0:
                return (CODE_VALID, -1)


def run(co):
    """Enumerate all stores; return (code, stateIdx)."""

    index, offs, lens, flat, tails, preN = _seqTable(co.maxSeqLen, co.seqElemBound)
    r = Runner()
    r.ops = _array.array('q', co.ops)
    r.ar = _array.array('q', co.a)
    r.br = _array.array('q', co.b)
    r.cr = _array.array('q', co.c)
    r.ext = _array.array('q', co.ext or [0])
    r.seqOff = offs
    r.seqLen = lens
    r.seqElems = flat
    r.seqTail = tails
    r.preN = preN
    r.preIndex = index
    r.dynIndex = {}
    r.dynTuples = []
    r.err = 0

    n = len(co.names)
    sizes = _array.array('q', bytes(8 * max(n, 1)))
    bases = _array.array('q', bytes(8 * max(n, 1)))
    for i, kind in enumerate(co.kinds):
        if kind == KIND_INT:
            sizes[i] = 2 * co.intBound + 1
            bases[i] = -co.intBound
        elif kind == KIND_BOOL:
            sizes[i] = 2
            bases[i] = 0
        elif kind == KIND_SEQ:
            sizes[i] = preN
            bases[i] = 0
        else:
            sizes[i] = 2
            bases[i] = 0
    store = _array.array('q', bytes(8 * max(n, 1)))
    for i in range(n):
        store[i] = bases[i]
    r.store = store
    r.slots = _array.array('q', bytes(8 * max(co.nslots, 1)))
    idxs = _array.array('q', bytes(8 * max(n, 1)))
    return r.drive(n, sizes, bases, idxs, co.hypRoot, co.conclRoot)
