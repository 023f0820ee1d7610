"""Seeded random generator of well-typed bounded obligations.

Used by the prover agreement suite (engine vs naive oracle) and, in smtSafe
mode, by the committed SMT expectation fixtures. smtSafe obligations stay in
the fragment where the SMT encoding and the enumerator agree by construction:
no partial operations reachable (no div, no get/element/tail, no sequence
literals) and no [-intBound, intBound] sentinel quantifier ranges, which the
exporter re-widens to full Int.
"""

from __future__ import annotations

from cbcforge.lang.ast import (
    Atom, AndP, Binary, Exists, Forall, Implies, IntLit, IntRange, NotP, OrP,
    SeqElems, SeqIndices, SeqLit, SeqOp, Var,
)
from cbcforge.prover.result import Obligation, ProverConfig

CMP = ("==", "!=", "<", "<=", ">", ">=")


class _Gen:
    def __init__(self, rng, env, smtSafe):
        self.rng = rng
        self.env = env
        self.smtSafe = smtSafe
        self.intVars = [n for n, t in env.items() if t == "int"]
        self.boolVars = [n for n, t in env.items() if t == "bool"]
        self.seqVars = [n for n, t in env.items() if t == "List"]
        self.binders = []  # quantifier-bound int variables in scope
        self.nextBinder = 0

    def intExpr(self, d):
        r = self.rng
        pool = self.intVars + self.binders
        choices = ["lit"]
        if pool:
            choices += ["var", "var"]
        if d > 0:
            choices += ["arith", "arith"]
            if self.seqVars:
                choices.append("size")
                if not self.smtSafe:
                    choices += ["get", "element"]
            if not self.smtSafe:
                choices.append("div")
        k = r.choice(choices)
        if k == "lit":
            return IntLit(r.randint(-3, 3))
        if k == "var":
            return Var(r.choice(pool))
        if k == "arith":
            return Binary(r.choice("+-*"), self.intExpr(d - 1), self.intExpr(d - 1))
        if k == "div":
            return Binary("div", self.intExpr(d - 1), self.intExpr(d - 1))
        if k == "size":
            return SeqOp("size", self.seqExpr(d - 1))
        if k == "get":
            return SeqOp("get", self.seqExpr(d - 1), self.intExpr(d - 1))
        return SeqOp("element", self.seqExpr(d - 1))

    def seqExpr(self, d):
        r = self.rng
        if not self.smtSafe and d > 0 and r.random() < 0.15:
            return SeqOp("tail", self.seqExpr(d - 1))
        if not self.seqVars or (not self.smtSafe and r.random() < 0.08):
            return SeqLit(tuple(IntLit(r.randint(-2, 2)) for _ in range(r.randint(0, 3))))
        return Var(r.choice(self.seqVars))

    def pred(self, d):
        r = self.rng
        choices = ["cmp", "cmp"]
        if self.boolVars:
            choices.append("bvar")
        if self.seqVars:
            choices.append("contains")
        if d > 0:
            choices += ["and", "or", "not", "implies", "forall", "exists"]
        k = r.choice(choices)
        if k == "cmp":
            return Atom(Binary(r.choice(CMP), self.intExpr(max(d - 1, 0)), self.intExpr(max(d - 1, 0))))
        if k == "bvar":
            return Atom(Var(r.choice(self.boolVars)))
        if k == "contains":
            return Atom(SeqOp("contains", self.seqExpr(max(d - 1, 0)), self.intExpr(max(d - 1, 0))))
        if k == "and":
            return AndP(tuple(self.pred(d - 1) for _ in range(r.randint(2, 3))))
        if k == "or":
            return OrP(tuple(self.pred(d - 1) for _ in range(r.randint(2, 3))))
        if k == "not":
            return NotP(self.pred(d - 1))
        if k == "implies":
            return Implies(self.pred(d - 1), self.pred(d - 1))
        # quantifier
        v = "q%d" % self.nextBinder
        self.nextBinder += 1
        dk = r.choice(["range", "elems", "indices"] if self.seqVars else ["range"])
        if dk == "range":
            lo = r.randint(-3, 2)
            dom = IntRange(lo, lo + r.randint(0, 3))
        elif dk == "elems":
            dom = SeqElems(self.seqExpr(0))
        else:
            dom = SeqIndices(self.seqExpr(0))
        self.binders.append(v)
        body = self.pred(d - 1)
        self.binders.pop()
        cls = Forall if k == "forall" else Exists
        return cls(v, dom, body)


def _storeCount(env, cfg):
    nSeq = sum((2 * cfg.seqElemBound + 1) ** n for n in range(cfg.maxSeqLen + 1))
    total = 1
    for t in env.values():
        total *= {"int": 2 * cfg.intBound + 1, "bool": 2, "List": nSeq}.get(t, 2)
    return total


def genObligation(rng, idx: int, cfg: ProverConfig, smtSafe: bool = False) -> Obligation:
    while True:
        env = {}
        for name, t in (("x", "int"), ("y", "int"), ("b", "bool"), ("s", "List"), ("t", "List")):
            if rng.random() < (0.7 if name in ("x", "s") else 0.35):
                env[name] = t
        if not env:
            continue
        if _storeCount(env, cfg) > 30000:
            continue
        g = _Gen(rng, env, smtSafe)
        hyp = g.pred(rng.randint(1, 2))
        concl = g.pred(rng.randint(1, 3))
        return Obligation("rand.%d" % idx, hyp, concl, "random obligation", env)
