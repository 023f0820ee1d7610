"""checkImplication: the bounded-domain enumeration prover."""

from __future__ import annotations

from . import engine
from .compile import MAX_STATES, compileObligation, decodeState, totalStates
from .result import Invalid, Obligation, ProofResult, ProverConfig, Unknown, Valid


def _stateText(store: dict) -> str:
    parts = []
    for k in sorted(store):
        v = store[k]
        if isinstance(v, bool):
            parts.append("%s=%s" % (k, "true" if v else "false"))
        elif isinstance(v, tuple):
            parts.append("%s=[%s]" % (k, ", ".join(str(x) for x in v)))
        else:
            parts.append("%s=%s" % (k, v))
    return ", ".join(parts)


def checkImplication(
    ob: Obligation,
    cfg: ProverConfig = ProverConfig(),
    backend=None,
) -> ProofResult:
    """Enumerate every assignment of ob.envTypes variables over the bounded
    domains; Valid iff hypothesis implies conclusion at each. Deterministic:
    the reported counterexample is the first offender in enumeration order
    (sorted variable names, rightmost fastest; integers ascending, sequences
    shortlex). Partiality errors surface as Unknown, never as a silent pass.
    """

    co = compileObligation(ob, cfg)
    if totalStates(co) > MAX_STATES:
        return Unknown(
            "state space of %d stores exceeds the enumeration limit; "
            "tighten the prover bounds" % totalStates(co)
        )
    be = backend if backend is not None else engine.backend
    code, stateIdx = be.run(co)
    if code == engine.CODE_VALID:
        return Valid()
    store = decodeState(co, stateIdx)
    if code == engine.CODE_INVALID:
        return Invalid(store)
    if code == engine.CODE_HYP_ERROR:
        return Unknown(
            "hypothesis hits a partial operation at %s" % _stateText(store)
        )
    return Unknown(
        "conclusion hits a partial operation under a true hypothesis at %s"
        % _stateText(store)
    )
