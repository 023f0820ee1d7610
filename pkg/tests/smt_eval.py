"""Bounded-model evaluator for the exported SMT-LIB2 scripts.

This is a deliberately small, self-contained interpreter for the exact
script shape `emitSmt` produces: declarations, quantified asserts and a
final check-sat. It decides satisfiability by enumerating a *fixed finite
model*:

  - `SeqVal` is interpreted as the set of integer tuples of length at most
    `maxSeqLen` with entries within `seqElemBound`; `seq-len`, `seq-get`
    and `seq-tail` get their evident interpretations (out-of-range `get`
    returns 0, `tail` of the empty tuple is the empty tuple, both
    consistent with the guarded axioms).
  - Any other declared sort gets a fresh carrier of `opaqueSize` elements.
  - `Int`-sorted binders range over the window [-W, W] with
    W = intBound + maxSeqLen + seqElemBound + 3.

For the scripts emitSmt produces for obligations in the guarded bounded
fragment (every free variable domain-constrained, every quantifier guarded
by a range, contains or index check that the window covers) this agrees
with real SMT satisfiability: any solver model can be collapsed onto the
tuple universe because extensionality identifies observationally equal
sequences and no assert can see values outside the guards. Scripts with an
unguarded integer quantifier (the re-widened all-int sentinel) are outside
that fragment and must go to a real solver instead.

The module imports nothing from the package on purpose: it exercises the
emitted text alone.
"""

from __future__ import annotations

import itertools
import re

__all__ = ["SmtEvalError", "evalScript"]


class SmtEvalError(Exception):
    pass


_TOKEN = re.compile(r"\(|\)|\|[^|]*\||[^\s()|;]+")
_INT = re.compile(r"\d+\Z")

_MISSING = object()

# closed formulas (the sequence axioms) are identical from script to
# script; their truth under a given bounded model never changes
_closedMemo: dict = {}


def _parse(text: str):
    """Parse a script into a list of top-level s-expressions."""

    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith(";")]
    toks = _TOKEN.findall("\n".join(lines))
    pos = 0

    def node():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(toks) and toks[pos] != ")":
                items.append(node())
            if pos >= len(toks):
                raise SmtEvalError("unbalanced parenthesis")
            pos += 1
            return items
        if tok == ")":
            raise SmtEvalError("unexpected ')'")
        if _INT.match(tok):
            return int(tok)
        if tok.startswith("|") and tok.endswith("|"):
            return tok[1:-1]
        return tok

    cmds = []
    while pos < len(toks):
        cmds.append(node())
    return cmds


def _euclidDiv(a: int, b: int) -> int:
    if b == 0:
        return 0
    return a // b if b > 0 else -(a // -b)


def _euclidMod(a: int, b: int) -> int:
    return a - b * _euclidDiv(a, b)


class _Script:
    def __init__(self, intBound: int, maxSeqLen: int, seqElemBound: int, opaqueSize: int):
        window = intBound + maxSeqLen + seqElemBound + 3
        self.boundsKey = (intBound, maxSeqLen, seqElemBound, opaqueSize)
        self.intUniverse = list(range(-window, window + 1))
        self.seqUniverse = [
            tup
            for n in range(maxSeqLen + 1)
            for tup in itertools.product(range(-seqElemBound, seqElemBound + 1), repeat=n)
        ]
        self.opaqueSize = opaqueSize
        self.sorts: dict[str, list] = {"Int": self.intUniverse, "Bool": [False, True]}
        self.funs: dict[str, tuple] = {}  # name -> (params, sorts, body closure)
        self.consts: list[tuple[str, list]] = []
        self.constNames: set[str] = set()
        self.asserts: list[tuple] = []  # (closure, frozenset of const names)
        self.closedFalse = False

    # ----- commands -------------------------------------------------

    def run(self, cmds) -> str:
        verdict = None
        for cmd in cmds:
            if not isinstance(cmd, list) or not cmd:
                raise SmtEvalError("bad command %r" % (cmd,))
            head = cmd[0]
            if head in ("set-logic", "set-option", "set-info", "exit"):
                continue
            if head == "declare-sort":
                self._declareSort(cmd)
            elif head in ("declare-fun", "declare-const"):
                self._declareFun(cmd)
            elif head == "define-fun":
                self._defineFun(cmd)
            elif head == "assert":
                free: set[str] = set()
                clo = self._compile(cmd[1], {}, free)
                deps = frozenset(free & self.constNames)
                if not deps:
                    key = (repr(cmd[1]), self.boundsKey)
                    if key not in _closedMemo:
                        _closedMemo[key] = bool(clo({}))
                    if not _closedMemo[key]:
                        self.closedFalse = True
                    continue
                self.asserts.append((clo, deps))
            elif head == "check-sat":
                verdict = self._solve()
            else:
                raise SmtEvalError("unsupported command %r" % head)
        if verdict is None:
            raise SmtEvalError("script has no check-sat")
        return verdict

    def _declareSort(self, cmd):
        name, arity = cmd[1], cmd[2]
        if arity != 0:
            raise SmtEvalError("parametric sorts unsupported")
        if name == "SeqVal":
            self.sorts[name] = self.seqUniverse
        else:
            self.sorts[name] = [(name, i) for i in range(self.opaqueSize)]

    def _declareFun(self, cmd):
        if cmd[0] == "declare-const":
            name, args, _ret = cmd[1], [], cmd[2]
        else:
            name, args, _ret = cmd[1], cmd[2], cmd[3]
        if not args:
            dom = self.sorts.get(_ret)
            if dom is None:
                raise SmtEvalError("unknown sort %r" % _ret)
            self.consts.append((name, dom))
            self.constNames.add(name)
            return
        # the only non-constant declarations emitSmt produces are the
        # three sequence observers; give them the evident interpretation
        builtin = {
            "seq-len": lambda s: len(s),
            "seq-get": lambda s, k: s[k] if 0 <= k < len(s) else 0,
            "seq-tail": lambda s: s[1:] if s else (),
        }.get(name)
        if builtin is None:
            raise SmtEvalError("uninterpreted function %r unsupported" % name)
        self.funs[name] = ("builtin", builtin)

    def _defineFun(self, cmd):
        name, params, _ret, body = cmd[1], cmd[2], cmd[3], cmd[4]
        names = [p[0] for p in params]
        free: set[str] = set()
        clo = self._compile(body, {p: True for p in names}, free)
        self.funs[name] = ("defined", names, clo)

    # ----- compilation to closures ----------------------------------

    def _compile(self, node, bound: dict, free: set):
        if isinstance(node, int):
            return lambda env: node
        if isinstance(node, str):
            if node == "true":
                return lambda env: True
            if node == "false":
                return lambda env: False
            if node not in bound:
                free.add(node)
            name = node
            return lambda env: env[name]
        head = node[0]
        if head in ("forall", "exists"):
            binders = [(p[0], self._domain(p[1])) for p in node[1]]
            inner = dict(bound)
            for v, _ in binders:
                inner[v] = True
            bodyC = self._compile(node[2], inner, free)
            return self._quant(head == "forall", binders, bodyC)
        if head in ("and", "or"):
            items = [self._compile(n, bound, free) for n in node[1:]]
            if head == "and":
                return lambda env: all(c(env) for c in items)
            return lambda env: any(c(env) for c in items)
        if head == "=>":
            items = [self._compile(n, bound, free) for n in node[1:]]

            def impl(env):
                for c in items[:-1]:
                    if not c(env):
                        return True
                return items[-1](env)

            return impl
        if head == "not":
            c = self._compile(node[1], bound, free)
            return lambda env: not c(env)
        if head == "ite":
            c, t, e = (self._compile(n, bound, free) for n in node[1:4])
            return lambda env: t(env) if c(env) else e(env)
        if head == "=":
            a, b = (self._compile(n, bound, free) for n in node[1:3])
            return lambda env: a(env) == b(env)
        if head == "distinct":
            items = [self._compile(n, bound, free) for n in node[1:]]

            def dist(env):
                vals = [c(env) for c in items]
                return len(set(vals)) == len(vals)

            return dist
        if head in ("<", "<=", ">", ">="):
            a, b = (self._compile(n, bound, free) for n in node[1:3])
            op = head
            if op == "<":
                return lambda env: a(env) < b(env)
            if op == "<=":
                return lambda env: a(env) <= b(env)
            if op == ">":
                return lambda env: a(env) > b(env)
            return lambda env: a(env) >= b(env)
        if head == "+":
            items = [self._compile(n, bound, free) for n in node[1:]]
            return lambda env: sum(c(env) for c in items)
        if head == "*":
            items = [self._compile(n, bound, free) for n in node[1:]]

            def mul(env):
                out = 1
                for c in items:
                    out *= c(env)
                return out

            return mul
        if head == "-":
            items = [self._compile(n, bound, free) for n in node[1:]]
            if len(items) == 1:
                a = items[0]
                return lambda env: -a(env)
            a, b = items
            return lambda env: a(env) - b(env)
        if head == "div":
            a, b = (self._compile(n, bound, free) for n in node[1:3])
            return lambda env: _euclidDiv(a(env), b(env))
        if head == "mod":
            a, b = (self._compile(n, bound, free) for n in node[1:3])
            return lambda env: _euclidMod(a(env), b(env))
        if isinstance(head, str) and head in self.funs:
            fun = self.funs[head]
            args = [self._compile(n, bound, free) for n in node[1:]]
            if fun[0] == "builtin":
                f = fun[1]
                return lambda env: f(*(c(env) for c in args))
            names, clo = fun[1], fun[2]

            def call(env):
                inner = dict(env)
                for nm, c in zip(names, args):
                    inner[nm] = c(env)
                return clo(inner)

            return call
        raise SmtEvalError("unsupported term %r" % (node,))

    def _domain(self, sortName: str) -> list:
        dom = self.sorts.get(sortName)
        if dom is None:
            raise SmtEvalError("unknown sort %r" % sortName)
        return dom

    @staticmethod
    def _quant(universal: bool, binders, bodyC):
        names = [v for v, _ in binders]
        doms = [d for _, d in binders]

        def f(env):
            saved = [env.get(v, _MISSING) for v in names]
            try:
                for combo in itertools.product(*doms):
                    for v, val in zip(names, combo):
                        env[v] = val
                    got = bodyC(env)
                    if universal and not got:
                        return False
                    if not universal and got:
                        return True
                return universal
            finally:
                for v, old in zip(names, saved):
                    if old is _MISSING:
                        env.pop(v, None)
                    else:
                        env[v] = old

        return f

    # ----- solving ---------------------------------------------------

    def _solve(self) -> str:
        if self.closedFalse:
            return "unsat"
        env: dict = {}
        attached: list[list] = [[] for _ in self.consts]
        order = {name: i for i, (name, _) in enumerate(self.consts)}
        for clo, deps in self.asserts:
            attached[max(order[n] for n in deps)].append(clo)

        consts = self.consts

        def rec(i: int) -> bool:
            if i == len(consts):
                return True
            name, dom = consts[i]
            for val in dom:
                env[name] = val
                if all(c(env) for c in attached[i]) and rec(i + 1):
                    return True
            del env[name]
            return False

        return "sat" if rec(0) else "unsat"


def evalScript(
    text: str,
    intBound: int = 4,
    maxSeqLen: int = 3,
    seqElemBound: int = 2,
    opaqueSize: int = 2,
) -> str:
    """Decide a script under the fixed bounded model; 'sat' or 'unsat'."""

    cmds = _parse(text)
    return _Script(intBound, maxSeqLen, seqElemBound, opaqueSize).run(cmds)
