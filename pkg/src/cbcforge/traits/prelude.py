"""Built-in declarations every trait world starts from.

List is an empty interface; Nil and Cons are its two instantiable classes.
Cons exposes the getters element and tail, which fixes its constructor as
new Cons(element, tail). The five sequence operations themselves (size, get,
contains, element, tail) are theory primitives: calls to them never resolve
to user methods, so only the prelude may use those names.
"""

from __future__ import annotations

from .model import (
    KIND_CLASS,
    KIND_INTERFACE,
    Lit,
    Method,
    TraitBody,
    TraitTable,
    trueContract,
)

PRELUDE_NAMES = ("List", "Nil", "Cons")


def preludeTable() -> TraitTable:
    listBody = TraitBody(isInterface=True, interfaces=(), methods=())
    nilBody = TraitBody(isInterface=False, interfaces=("List",), methods=())
    consBody = TraitBody(
        isInterface=False,
        interfaces=("List",),
        methods=(
            Method(trueContract(), "Num", "element", ()),
            Method(trueContract(), "List", "tail", ()),
        ),
    )
    t = TraitTable({}, {})
    t.add("List", KIND_INTERFACE, Lit(listBody))
    t.add("Nil", KIND_CLASS, Lit(nilBody))
    t.add("Cons", KIND_CLASS, Lit(consBody))
    return t
