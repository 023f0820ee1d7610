"""Obligations, prover configuration, and proof results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..lang.ast import Predicate
from ..lang.names import freeVars
from ..lang.types import checkPred

# Theory type names. Anything else is an opaque class type enumerated over a
# tiny placeholder domain (identity is all that matters for such values).
T_INT = "int"
T_BOOL = "bool"
T_LIST = "List"


@dataclass(frozen=True)
class ProverConfig:
    """Bounds for the enumeration prover.

    intBound: integers range over [-intBound, intBound].
    maxSeqLen: sequences have length <= maxSeqLen.
    seqElemBound: sequence elements range over [-seqElemBound, seqElemBound].
    """

    intBound: int = 4
    maxSeqLen: int = 3
    seqElemBound: int = 2

    def __post_init__(self):
        if self.intBound < 0 or self.maxSeqLen < 0 or self.seqElemBound < 0:
            raise ValueError("prover bounds must be non-negative")


class Obligation:
    """A named implication with provenance: hypothesis |= conclusion.

    envTypes maps every variable that may occur free to its type name; the
    prover enumerates assignments for exactly these variables.
    """

    __slots__ = ("id", "hypothesis", "conclusion", "provenance", "envTypes")

    def __init__(
        self,
        id: str,
        hypothesis: Predicate,
        conclusion: Predicate,
        provenance: str = "",
        envTypes: Mapping[str, str] | None = None,
    ):
        env = dict(envTypes or {})
        free = freeVars(hypothesis) | freeVars(conclusion)
        missing = free - set(env)
        if missing:
            raise ValueError(
                "obligation %s: variables %s not covered by envTypes"
                % (id, ", ".join(sorted(missing)))
            )
        checkPred(hypothesis, env)
        checkPred(conclusion, env)
        self.id = id
        self.hypothesis = hypothesis
        self.conclusion = conclusion
        self.provenance = provenance
        self.envTypes = env

    def __eq__(self, other):
        if not isinstance(other, Obligation):
            return NotImplemented
        return (
            self.id == other.id
            and self.hypothesis == other.hypothesis
            and self.conclusion == other.conclusion
            and self.provenance == other.provenance
            and self.envTypes == other.envTypes
        )

    def __repr__(self):
        return "Obligation(%r, %r, %r)" % (self.id, self.hypothesis, self.conclusion)


class ProofResult:
    """Base class; one of Valid, Invalid, Unknown."""

    __slots__ = ()

    @property
    def isValid(self) -> bool:
        return isinstance(self, Valid)


@dataclass(frozen=True)
class Valid(ProofResult):
    __slots__ = ()


@dataclass(frozen=True)
class Unknown(ProofResult):
    reason: str


@dataclass
class Invalid(ProofResult):
    counterexample: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, Invalid):
            return NotImplemented
        return self.counterexample == other.counterexample


def resultStr(r: ProofResult) -> str:
    if isinstance(r, Valid):
        return "Valid"
    if isinstance(r, Invalid):
        items = ", ".join("%s=%s" % (k, _valueStr(v)) for k, v in sorted(r.counterexample.items()))
        return "Invalid(%s)" % items
    if isinstance(r, Unknown):
        return "Unknown(%s)" % r.reason
    return repr(r)


def _valueStr(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[%s]" % ", ".join(str(x) for x in v)
    return str(v)
