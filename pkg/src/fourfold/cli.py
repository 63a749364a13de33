"""Command-line entry point: ``fourfold run | check | walls``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import families as F
from . import manifold as M
from .dataspace import Scenario
from .dsl import ParseError, ScriptError, parse
from .errors import FourfoldError
from .lattice import DEFAULT_R_STAR, dumps, realizability_gate
from .runner import RunConfig, execute, render_table


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fourfold", description="Seiberg-Witten calculus for constructed 4-manifolds.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a construction script")
    run.add_argument("script", type=Path)
    fmt = run.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON report (default)")
    fmt.add_argument("--table", dest="fmt", action="store_const", const="table", help="plain-text report")
    run.add_argument("--mod2", action="store_true", default=True, help="show mod-2 values (always on)")
    run.add_argument("--show-int-flags", action="store_true", help="add integer-definedness and fixture lifts")
    run.add_argument("--r-star", type=int, default=DEFAULT_R_STAR, help="rank threshold for the realizability gate")
    run.add_argument("--out", type=Path, help="write report.json and report.txt here; exports are relative to it")

    chk = sub.add_parser("check", help="validate a model or family JSON document")
    chk.add_argument("document", type=Path)
    chk.add_argument("--r-star", type=int, default=DEFAULT_R_STAR)

    walls = sub.add_parser("walls", help="count wall crossings in a data-space scenario")
    walls.add_argument("scenario", type=Path)
    wf = walls.add_mutually_exclusive_group()
    wf.add_argument("--json", dest="fmt", action="store_const", const="json")
    wf.add_argument("--table", dest="fmt", action="store_const", const="table")
    return ap


def _run(args) -> int:
    try:
        text = args.script.read_bytes()
        script = parse(text)
    except OSError as exc:
        print(f"fourfold: cannot read {args.script}: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"{args.script}:{exc}", file=sys.stderr)
        return 2
    config = RunConfig(r_star=args.r_star, show_int_flags=args.show_int_flags, out_dir=args.out)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
    try:
        report = execute(script, config)
    except ScriptError as exc:
        print(f"{args.script}:{exc}", file=sys.stderr)
        return 2
    text_out = render_table(report) if args.fmt == "table" else report.dumps()
    sys.stdout.write(text_out)
    if args.out is not None:
        (args.out / "report.json").write_text(report.dumps(), encoding="utf-8")
        (args.out / "report.txt").write_text(render_table(report), encoding="utf-8")
    return report.exit_code


def _check(args) -> int:
    try:
        doc = json.loads(args.document.read_text(encoding="utf-8"))
        if str(doc.get("schema", "")).startswith("fourfold.family"):
            fam = F.FamilyElement.from_json(doc)
            out = {"kind": "family", "violations": F.validate_family(fam)}
        else:
            m = M.ManifoldModel.from_json(doc)
            gate = realizability_gate(m.homeo, args.r_star)
            out = {
                "kind": "model",
                "name": m.name,
                "violations": [v.to_json() for v in M.validate_model(m)],
                "realizability_gate": {"passed": gate.passed, "reasons": list(gate.reasons)},
            }
    except (OSError, ValueError, FourfoldError, AttributeError) as exc:
        print(f"fourfold: {args.document}: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(dumps(out))
    return 0 if not out["violations"] else 1


def _walls(args) -> int:
    try:
        scen = Scenario.from_json(json.loads(args.scenario.read_text(encoding="utf-8")))
        rows = scen.evaluate()
    except (OSError, ValueError, FourfoldError) as exc:
        print(f"fourfold: {args.scenario}: {exc}", file=sys.stderr)
        return 2
    if args.fmt == "table":
        print(f"{'chain':>5} {'wall':>4} {'dim':>3} {'codim':>5}  {'kind':<16} value")
        for r in rows:
            val = r["value"] if r["value"] is not None else r.get("error")
            print(f"{r['chain']:>5} {r['wall']:>4} {r['chain_dim']:>3} {r['codim']:>5}  {r['kind']:<16} {val}")
    else:
        sys.stdout.write(dumps({"dimension": scen.model.dimension, "counts": rows}))
    return 1 if any(r["kind"] == "error" for r in rows) else 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    return {"run": _run, "check": _check, "walls": _walls}[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
