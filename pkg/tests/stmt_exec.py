"""Scoped bounded interpreter for concrete statements (test-side oracle).

Executes statement trees directly over Python stores with proper lexical
scoping: a local declaration creates a binding in the current scope, so
shadowing behaves like a real language. Used to check that wp is sound
(wp holds => execution establishes the postcondition) and that alpha-renamed
statements are observationally equal on the outer store.

Select executes the first branch whose guard is true (any true branch would
do for wp-soundness: wp guarantees the postcondition for every enabled
branch). Loops are fuel-limited.
"""

from __future__ import annotations

from cbcforge.lang.ast import (
    Assign, LocalDecl, Repeat, Select, SeqStmt, Skip,
)
from naive_oracle import evalExpr, evalPred


class ExecError(Exception):
    pass


class Scope:
    def __init__(self, parent=None, base=None):
        self.vars = dict(base or {})
        self.parent = parent

    def __getitem__(self, name):
        s = self
        while s is not None:
            if name in s.vars:
                return s.vars[name]
            s = s.parent
        raise KeyError(name)

    def __contains__(self, name):
        try:
            self[name]
        except KeyError:
            return False
        return True

    def assign(self, name, value):
        s = self
        while s is not None:
            if name in s.vars:
                s.vars[name] = value
                return
            s = s.parent
        raise ExecError("assignment to undeclared %r" % name)

    def declare(self, name, value):
        self.vars[name] = value


def execStmt(s, scope: Scope, fuel: list):
    if isinstance(s, Skip):
        return
    if isinstance(s, Assign):
        scope.assign(s.target, evalExpr(s.value, scope))
        return
    if isinstance(s, LocalDecl):
        scope.declare(s.name, evalExpr(s.init, scope))
        return
    if isinstance(s, SeqStmt):
        execStmt(s.first, scope, fuel)
        execStmt(s.second, scope, fuel)
        return
    if isinstance(s, Select):
        for g, body in s.branches:
            if evalExpr(g, scope):
                execStmt(body, Scope(parent=scope), fuel)
                return
        raise ExecError("no guard enabled")
    if isinstance(s, Repeat):
        while evalExpr(s.guard, scope):
            fuel[0] -= 1
            if fuel[0] < 0:
                raise ExecError("loop fuel exhausted")
            execStmt(s.body, Scope(parent=scope), fuel)
        return
    raise ExecError("cannot execute %r" % (s,))


def runStatement(s, initial: dict, fuel: int = 10000) -> dict:
    """Execute s over a copy of initial; returns the final outer store."""

    outer = Scope(base=initial)
    execStmt(s, Scope(parent=outer), [fuel])
    return dict(outer.vars)


def checkPost(post, store: dict) -> bool:
    return evalPred(post, store)
