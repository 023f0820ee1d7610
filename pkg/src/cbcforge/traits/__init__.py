"""Specification-aware traits: model, composition, flattening, running.

loadTraitWorld builds one table from a project's .trait and .tc files on
top of the prelude; flattenWorld resolves and verifies it.
"""

from __future__ import annotations

from ..lang.parser import ParseError
from .compose import (
    CompositionError,
    CompositionPair,
    ConflictError,
    FlatResult,
    FlattenError,
    SpecIncompatible,
    composeBodies,
    composeMethod,
    flattenTable,
)
from .interp import FuelExhausted, StuckError, evaluate, isValue, seqToCons, step
from .model import (
    KIND_CLASS,
    KIND_INTERFACE,
    KIND_TRAIT,
    Lit,
    MakeAbstract,
    Method,
    Plus,
    Ref,
    TraitBody,
    TraitError,
    TraitTable,
    WellFormedError,
    allMeth,
    makeAbstractBody,
    trueContract,
    wellFormed,
)
from .parse import parseTcFile, parseTraitFile
from .prelude import PRELUDE_NAMES, preludeTable
from .typing import (
    Checker,
    LowerError,
    TraitCheck,
    VerifyError,
    checkBody,
    checkSpecImplication,
    instanceOf,
    lowerObligation,
    sortOf,
    verifyMethod,
)

__all__ = [
    "CompositionError", "CompositionPair", "ConflictError", "FlatResult",
    "FlattenError", "SpecIncompatible", "composeBodies", "composeMethod",
    "flattenTable", "FuelExhausted", "StuckError", "evaluate", "isValue",
    "seqToCons", "step", "KIND_CLASS", "KIND_INTERFACE", "KIND_TRAIT",
    "Lit", "MakeAbstract", "Method", "Plus", "Ref", "TraitBody",
    "TraitError", "TraitTable", "WellFormedError", "allMeth",
    "makeAbstractBody", "trueContract", "wellFormed", "parseTcFile",
    "parseTraitFile", "PRELUDE_NAMES", "preludeTable", "Checker",
    "LowerError", "TraitCheck", "VerifyError", "checkBody",
    "checkSpecImplication", "instanceOf", "lowerObligation", "sortOf",
    "verifyMethod", "loadTraitWorld", "flattenWorld",
]


def loadTraitWorld(traitFiles, tcFiles):
    """Parse declaration files onto the prelude. Returns the table and the
    names declared by composition files, in file order."""
    table = preludeTable()
    for path in traitFiles:
        try:
            decls = parseTraitFile(path.read_text())
        except ParseError as ex:
            raise TraitError("%s: %s" % (path.name, ex)) from ex
        for name, kind, expr in decls:
            table.add(name, kind, expr, origin=path.name)
    compositions = []
    for path in tcFiles:
        try:
            decls = parseTcFile(path.read_text())
        except ParseError as ex:
            raise TraitError("%s: %s" % (path.name, ex)) from ex
        for name, kind, expr in decls:
            table.add(name, kind, expr, origin=path.name)
            compositions.append(name)
    return table, compositions


def flattenWorld(table, cfg, *, backend=None) -> FlatResult:
    """flattenTable with the prelude's reserved-name exemptions applied."""
    return flattenTable(table, cfg, backend=backend, preludeNames=PRELUDE_NAMES)
