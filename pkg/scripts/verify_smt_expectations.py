#!/usr/bin/env python3
"""Re-check the committed SMT fixture verdicts with a real solver.

The expectations in tests/fixtures/smt/verdicts.json were recorded with
the bounded-model evaluator. Where an actual SMT solver is installed
(z3 or cvc5, as a Python binding or a binary), this script replays every
committed script through it and compares answers. Without a solver it
exits 0 after saying so, because the sandbox the corpus was built in has
none.
"""

from __future__ import annotations

import json
import pathlib
import shutil
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures" / "smt"


def solverCommand() -> list[str] | None:
    try:
        import z3  # noqa: F401

        return ["python-z3"]
    except ImportError:
        pass
    for name, args in (("z3", ["-smt2", "-in"]), ("cvc5", ["--lang=smt2"])):
        path = shutil.which(name)
        if path:
            return [path] + args
    return None


def runZ3Binding(text: str) -> str:
    import z3

    solver = z3.Solver()
    solver.from_string(text)
    res = solver.check()
    return str(res)


def runBinary(cmd: list[str], text: str) -> str:
    proc = subprocess.run(cmd, input=text, capture_output=True, text=True, timeout=120)
    out = (proc.stdout + proc.stderr).strip().splitlines()
    return out[-1].strip() if out else "error"


def main() -> int:
    cmd = solverCommand()
    if cmd is None:
        print("no SMT solver available; expectations stay as recorded")
        return 0
    verdicts = json.loads((FIXTURES / "verdicts.json").read_text())["obligations"]
    bad = 0
    for obId, entry in sorted(verdicts.items()):
        text = (FIXTURES / entry["script"]).read_text()
        if cmd == ["python-z3"]:
            got = runZ3Binding(text)
        else:
            got = runBinary(cmd, text)
        ok = got == entry["solver"]
        bad += 0 if ok else 1
        print("%-12s want=%-6s got=%-8s %s" % (obId, entry["solver"], got, "ok" if ok else "MISMATCH"))
    if bad:
        print("%d mismatches" % bad)
        return 1
    print("all %d scripts confirmed" % len(verdicts))
    return 0


if __name__ == "__main__":
    sys.exit(main())
