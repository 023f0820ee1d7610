"""Command line front end.

    cbcforge check    [--target M]  <project-dir>
    cbcforge flatten  [--name C]    <project-dir>
    cbcforge run --class C --method m [--args JSON] [--fuel N] <project-dir>
    cbcforge emit-smt [--out DIR]   <project-dir>

A project directory holds `.cbc` refinement scripts, `.trait` trait
declarations and `.tc` composition files; any subset may be present.
`check` drives the refinement route, `flatten` the trait route, `run`
evaluates a method of a flattened class, and `emit-smt` writes one
SMT-LIB2 script per obligation.

Prover bounds come from `--int-bound/--seq-len/--seq-elem-bound`
(defaults 4/3/2); the environment variable CBCFORGE_PROVER_BOUND, when
set, overrides `--int-bound`. Exit codes: 0 everything proven, 1 a check
failed or something is still open, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .blocks import checkBlocks
from .lang.ast import BoolLit, IntLit, New, Call
from .lang.printer import exprStr
from .project import ProjectError, loadProject
from .prover.result import Invalid, ProverConfig, Unknown
from .prover.smt import EmitError, emitSmt
from .refine import checkTree
from .report import Report
from .traits import (
    FlattenError,
    FuelExhausted,
    StuckError,
    evaluate,
    flattenWorld,
    seqToCons,
)
from .traits.model import TraitTable
from .traits.prelude import PRELUDE_NAMES, preludeTable
from .traits.printer import bodyStr


class UsageError(Exception):
    pass


def _bounds(cfg: ProverConfig) -> dict:
    return {
        "intBound": cfg.intBound,
        "maxSeqLen": cfg.maxSeqLen,
        "seqElemBound": cfg.seqElemBound,
    }


def buildConfig(args) -> ProverConfig:
    intBound = args.int_bound
    env = os.environ.get("CBCFORGE_PROVER_BOUND")
    if env is not None:
        try:
            intBound = int(env)
        except ValueError:
            raise UsageError("CBCFORGE_PROVER_BOUND must be an integer, got %r" % env)
    try:
        return ProverConfig(
            intBound=intBound, maxSeqLen=args.seq_len, seqElemBound=args.seq_elem_bound
        )
    except ValueError as ex:
        raise UsageError(str(ex))


def _emptyWorld() -> TraitTable:
    return preludeTable()


def cmdCheck(project, cfg: ProverConfig, target: str | None = None) -> Report:
    """Discharge block obligations, then every refinement tree."""
    report = Report("check", _bounds(cfg))
    for ob, res in checkBlocks(project.registry, cfg):
        report.add(ob, res)
    units = project.methods
    if target is not None:
        if target not in units:
            raise UsageError("no method %r in the project (have: %s)"
                             % (target, ", ".join(sorted(units)) or "none"))
        units = {target: units[target]}
    for name in units:
        for ob, res in checkTree(units[name], cfg,
                                 methods=project.sigs, blocks=project.registry):
            report.add(ob, res)
    report.statuses["methods"] = {n: u.root.status for n, u in units.items()}
    report.statuses["blocks"] = {n: d.status for n, d in project.registry.items()}
    return report


def _flattenReport(project, cfg: ProverConfig, name: str | None):
    """Shared by flatten/run: (Report, FlatResult | None)."""
    report = Report("flatten", _bounds(cfg))
    table = project.traitTable if project.traitTable is not None else _emptyWorld()
    try:
        fr = flattenWorld(table, cfg)
    except FlattenError as ex:
        for c in ex.checks:
            report.add(c.obligation, c.result,
                       id="%s.%s.%s" % (c.kind, c.context, c.method), provenance=c.note)
        for diag in ex.diagnostics:
            report.add(None, Invalid({}), id="wellformed", provenance=diag)
        report.add(None, Invalid({}), id="flatten", provenance=str(ex))
        return report, None
    for c in fr.checks:
        report.add(c.obligation, c.result,
                   id="%s.%s.%s" % (c.kind, c.context, c.method), provenance=c.note)
    perDecl: dict[str, str] = {n: "Proven" for n in table.decls if n not in PRELUDE_NAMES}
    for c in fr.checks:
        if c.context not in perDecl:
            continue
        if isinstance(c.result, Invalid):
            perDecl[c.context] = "Failed"
        elif isinstance(c.result, Unknown) and perDecl[c.context] != "Failed":
            perDecl[c.context] = "Open"
    report.statuses["traits"] = perDecl
    names = project.compositions
    if name is not None:
        if name not in fr.table:
            raise UsageError("no declaration %r in the project" % name)
        names = [name]
    chunks = [bodyStr(n, fr.kinds[n], fr.table[n]) for n in names]
    report.listing = "\n\n".join(chunks)
    return report, fr


def cmdFlatten(project, cfg: ProverConfig, name: str | None = None) -> Report:
    report, _ = _flattenReport(project, cfg, name)
    return report


def _argExpr(v):
    if isinstance(v, bool):
        return BoolLit(v)
    if isinstance(v, int):
        return IntLit(v)
    if isinstance(v, list):
        return seqToCons([_argExpr(x) for x in v])
    raise UsageError("unsupported argument %r: use ints, bools, or int lists" % (v,))


def _plainValue(v):
    """A JSON-friendly rendering of an interpreter value."""
    if isinstance(v, IntLit):
        return v.value
    if isinstance(v, BoolLit):
        return v.value
    if isinstance(v, New) and v.cls in ("Cons", "Nil"):
        out = []
        while isinstance(v, New) and v.cls == "Cons":
            out.append(_plainValue(v.args[0]))
            v = v.args[1]
        if isinstance(v, New) and v.cls == "Nil":
            return out
    return exprStr(v)


def cmdRun(project, cfg: ProverConfig, cls: str, method: str,
           argsText: str, fuel: int):
    """Returns (payload dict, exit code). Flattening must pass first."""
    report, fr = _flattenReport(project, cfg, None)
    if fr is None or report.overall == "fail":
        return {"command": "run", "error": "the project does not flatten cleanly",
                "flatten": report.toJson()}, 1
    if cls not in fr.table:
        raise UsageError("no class %r in the flattened project" % cls)
    body = fr.table[cls]
    if body.getters():
        raise UsageError(
            "%s has constructor fields (%s); run drives argumentless classes only"
            % (cls, ", ".join(m.name for m in body.getters())))
    if body.method(method) is None:
        raise UsageError("%s has no method %r" % (cls, method))
    try:
        args = json.loads(argsText)
    except json.JSONDecodeError as ex:
        raise UsageError("--args must be a JSON list: %s" % ex)
    if not isinstance(args, list):
        raise UsageError("--args must be a JSON list, got %r" % (args,))
    call = Call(New(cls, ()), method, tuple(_argExpr(a) for a in args))
    try:
        value = evaluate(fr.table, call, fuel=fuel)
    except FuelExhausted as ex:
        return {"command": "run", "error": "fuel exhausted: %s" % ex}, 1
    except StuckError as ex:
        return {"command": "run",
                "error": "stuck term (internal soundness alarm): %s" % ex}, 1
    return {"command": "run", "class": cls, "method": method,
            "args": args, "value": _plainValue(value)}, 0


def _fileName(obId: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in obId) + ".smt2"


def cmdEmitSmt(project, cfg: ProverConfig, outDir: Path | None,
               target: str | None = None) -> Report:
    """One deterministic .smt2 per obligation the project produces."""
    report = Report("emit-smt", _bounds(cfg))
    obligations = []
    for ob, res in checkBlocks(project.registry, cfg):
        obligations.append(ob)
        report.add(ob, res)
    units = project.methods
    if target is not None:
        if target not in units:
            raise UsageError("no method %r in the project" % target)
        units = {target: units[target]}
    for name in units:
        for ob, res in checkTree(units[name], cfg,
                                 methods=project.sigs, blocks=project.registry):
            obligations.append(ob)
            report.add(ob, res)
    if project.traitTable is not None:
        try:
            fr = flattenWorld(project.traitTable, cfg)
            checks = fr.checks
        except FlattenError as ex:
            checks = ex.checks
        for c in checks:
            if c.obligation is None:
                continue
            obligations.append(c.obligation)
            report.add(c.obligation, c.result)
    out = outDir if outDir is not None else project.root / "smt2"
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for ob in obligations:
        try:
            text = emitSmt(ob, cfg)
        except EmitError as ex:
            report.add(None, Unknown("not exportable: %s" % ex), id=ob.id + ".export",
                       provenance=ob.provenance)
            continue
        path = out / _fileName(ob.id)
        path.write_text(text)
        written.append(path.name)
    report.listing = "wrote %d scripts to %s" % (len(written), out)
    return report, written


def makeParser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cbcforge",
        description="check refinement scripts, flatten specified traits, "
                    "run flattened programs, export proof obligations",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--int-bound", type=int, default=4, metavar="B",
                        help="enumerate ints in [-B, B] (default 4)")
    common.add_argument("--seq-len", type=int, default=3, metavar="L",
                        help="enumerate sequences up to length L (default 3)")
    common.add_argument("--seq-elem-bound", type=int, default=2, metavar="E",
                        help="sequence elements range over [-E, E] (default 2)")
    common.add_argument("--json", action="store_true",
                        help="print a JSON report instead of text")
    common.add_argument("project", type=Path, help="project directory")

    sub = p.add_subparsers(dest="command", required=True)
    pc = sub.add_parser("check", parents=[common],
                        help="replay and verify the refinement scripts")
    pc.add_argument("--target", metavar="METHOD", help="check one method only")
    pf = sub.add_parser("flatten", parents=[common],
                        help="flatten the trait world and verify it")
    pf.add_argument("--name", metavar="DECL", help="print one declaration only")
    pr = sub.add_parser("run", parents=[common],
                        help="evaluate a method of a flattened class")
    pr.add_argument("--class", dest="cls", required=True, metavar="C")
    pr.add_argument("--method", required=True, metavar="M")
    pr.add_argument("--args", default="[]", metavar="JSON",
                    help="JSON list of ints, bools, or int lists (default [])")
    pr.add_argument("--fuel", type=int, default=100000, metavar="N",
                    help="reduction step budget (default 100000)")
    pe = sub.add_parser("emit-smt", parents=[common],
                        help="write one SMT-LIB2 script per obligation")
    pe.add_argument("--out", type=Path, default=None, metavar="DIR",
                    help="output directory (default PROJECT/smt2)")
    pe.add_argument("--target", metavar="METHOD",
                    help="restrict the refinement route to one method")
    return p


def main(argv=None) -> int:
    args = makeParser().parse_args(argv)
    try:
        cfg = buildConfig(args)
        project = loadProject(args.project, cfg)
        if args.command == "check":
            report = cmdCheck(project, cfg, args.target)
        elif args.command == "flatten":
            report = cmdFlatten(project, cfg, args.name)
        elif args.command == "run":
            payload, code = cmdRun(project, cfg, args.cls, args.method,
                                   args.args, args.fuel)
            if args.json:
                print(json.dumps(payload, indent=2))
            elif "error" in payload:
                print(payload["error"], file=sys.stderr)
            else:
                print(json.dumps(payload["value"]) if not isinstance(payload["value"], str)
                      else payload["value"])
            return code
        else:
            report, _ = cmdEmitSmt(project, cfg, args.out, args.target)
    except UsageError as ex:
        print("error: %s" % ex, file=sys.stderr)
        return 2
    except ProjectError as ex:
        print("error: %s" % ex, file=sys.stderr)
        return 2
    if args.json:
        sys.stdout.write(report.jsonText())
    else:
        sys.stdout.write(report.text())
    return report.exitCode


if __name__ == "__main__":
    sys.exit(main())
