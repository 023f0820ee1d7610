#!/usr/bin/env python3
"""Regenerate the committed SMT fixture corpus.

Samples random obligations in the guarded bounded fragment, exports each
with emitSmt, decides the script with the bounded-model evaluator in
tests/smt_eval.py, cross-checks that verdict against checkImplication and
writes the scripts plus a verdicts.json of recorded expectations under
tests/fixtures/smt/.

Deterministic: a fixed seed drives the sampler, emission is byte-stable,
so reruns reproduce the corpus exactly.
"""

from __future__ import annotations

import json
import pathlib
import random
import sys
import time

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))
sys.path.insert(0, str(ROOT / "src"))

from cbcforge.lang.ast import Exists, Forall, Implies, AndP, OrP, NotP  # noqa: E402
from cbcforge.prover.check import checkImplication  # noqa: E402
from cbcforge.prover.result import Invalid, ProverConfig, Valid  # noqa: E402
from cbcforge.prover.smt import emitSmt  # noqa: E402
from obgen import genObligation  # noqa: E402
from smt_eval import evalScript  # noqa: E402

SEED = 20260814
COUNT = 50
MIN_EACH = 10
# the evaluator enumerates filtered stores times a window per quantifier
# level; keep that product small enough for the acceptance re-check
MAX_EVAL_COST = 1_000_000
WINDOW = 25  # ints in [-12, 12] at the default bounds


def quantDepth(p) -> int:
    if isinstance(p, (Forall, Exists)):
        return 1 + quantDepth(p.body)
    if isinstance(p, Implies):
        return max(quantDepth(p.lhs), quantDepth(p.rhs))
    if isinstance(p, (AndP, OrP)):
        return max((quantDepth(q) for q in p.items), default=0)
    if isinstance(p, NotP):
        return quantDepth(p.inner)
    return 0


def evalCost(ob) -> int:
    cost = 1
    for t in ob.envTypes.values():
        cost *= {"int": 9, "bool": 2}.get(t, 156)
    depth = max(quantDepth(ob.hypothesis), quantDepth(ob.conclusion))
    return cost * WINDOW ** depth


def main() -> None:
    cfg = ProverConfig()
    outDir = ROOT / "tests" / "fixtures" / "smt"
    outDir.mkdir(parents=True, exist_ok=True)
    for old in outDir.glob("*.smt2"):
        old.unlink()

    rng = random.Random(SEED)
    verdicts: dict = {}
    kept = {"sat": 0, "unsat": 0}
    idx = 0
    t0 = time.time()
    while len(verdicts) < COUNT:
        idx += 1
        ob = genObligation(rng, idx, cfg, smtSafe=True)
        if evalCost(ob) > MAX_EVAL_COST:
            continue
        res = checkImplication(ob, cfg)
        if not isinstance(res, (Valid, Invalid)):
            raise SystemExit("unexpected verdict for %s: %r" % (ob.id, res))
        want = "unsat" if isinstance(res, Valid) else "sat"
        # keep the corpus balanced between the two outcomes
        remaining = COUNT - len(verdicts)
        if kept[want] >= COUNT - MIN_EACH and kept["sat" if want == "unsat" else "unsat"] + remaining <= MIN_EACH:
            continue
        if kept[want] - kept["sat" if want == "unsat" else "unsat"] >= COUNT - 2 * MIN_EACH:
            continue
        script = emitSmt(ob, cfg)
        got = evalScript(script)
        if got != want:
            raise SystemExit(
                "bounded-model evaluation disagrees with the prover on %s: %s vs %s"
                % (ob.id, got, want)
            )
        (outDir / ("%s.smt2" % ob.id)).write_text(script)
        verdicts[ob.id] = {
            "script": "%s.smt2" % ob.id,
            "solver": got,
            "prover": "valid" if want == "unsat" else "invalid",
        }
        kept[want] += 1

    payload = {
        "_meta": {
            "seed": SEED,
            "bounds": [cfg.intBound, cfg.maxSeqLen, cfg.seqElemBound],
            "generator": "scripts/gen_smt_fixtures.py",
            "recordedBy": "tests/smt_eval.py bounded-model evaluation",
            "recheck": "scripts/verify_smt_expectations.py (needs an SMT solver)",
        },
        "obligations": dict(sorted(verdicts.items())),
    }
    (outDir / "verdicts.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(
        "wrote %d scripts (%d sat, %d unsat) in %.1fs after %d candidates"
        % (COUNT, kept["sat"], kept["unsat"], time.time() - t0, idx)
    )


if __name__ == "__main__":
    main()
