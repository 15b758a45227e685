"""Command-line front end: ``travsel <subcommand> ...``.

Exit codes: 0 success, 1 user error (bad flags, unreadable or malformed
input, unsupported property combination), 2 failure while running an
analysis or an internal error, 3 ground-truth validation found mismatches.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from pathlib import Path

from . import harness
from .analyses import CODES, AnalysisAsset, load_asset
from .cfg import CfgError, Cyclicity, format_cfg, generate_corpus, generate_random_cfg, parse_cfg
from .cfg.generate import InfeasibleGraph, MIN_SIZE
from .dsl import DslError, DslRuntimeError, parse_program
from .engine import DivergenceError, ExecutionPlan, Strategy, compile_program, execute_analysis
from .props import extract_properties
from .selector import SelectorError, explain_line, select


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UserError(f"{self.prog}: {message}")


# -- loading -------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UserError(f"cannot read {path}: {e.strerror or e}") from None


def load_program(name_or_path: str):
    """An analysis code such as ``PDOM`` or the path of a DSL file."""
    if name_or_path.upper() in CODES:
        asset = load_asset(name_or_path)
        return asset.code, asset.program
    if not Path(name_or_path).exists() and not name_or_path.endswith(".trav"):
        raise UserError(f"unknown analysis {name_or_path!r}: not a file and not one of {', '.join(CODES)}")
    text = _read(name_or_path)
    try:
        return Path(name_or_path).stem, parse_program(text)
    except DslError as e:
        raise UserError(f"{name_or_path}: {e}") from None


def load_graph(path: str):
    try:
        return parse_cfg(_read(path))
    except CfgError as e:
        raise UserError(f"{path}: {e}") from None


# -- rendering -------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, (set, frozenset)):
        return sorted((_jsonable(x) for x in v), key=lambda x: (isinstance(x, str), x))
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if hasattr(v, "id") and hasattr(v, "stmt"):
        return v.id
    return v


def _text_value(v) -> str:
    v = _jsonable(v)
    if isinstance(v, list):
        return "{" + ", ".join(str(x) for x in v) + "}"
    return "null" if v is None else str(v)


# -- subcommands -------------------------------------------------------------------


def _plans(program, g, strategy: str | None, optimize: bool):
    props = extract_properties(program)
    rows = []
    for entry in props:
        p = entry.props
        if strategy in (None, "HYBRID"):
            outcome = select(p, g.cyclicity)
            plan, path = outcome.plan, outcome.path
            if not optimize and plan.single_pass:
                plan = ExecutionPlan(plan.strategy, False, plan.direction)
        else:
            plan, path = ExecutionPlan(Strategy(strategy), False, p.direction), "-"
        rows.append((entry.traversal, path, plan))
    return rows


def cmd_analyze(args, out) -> int:
    name, program = load_program(args.analysis)
    g = load_graph(args.graph)
    rows = _plans(program, g, args.strategy, not args.no_optimize)
    outputs, metrics = execute_analysis(compile_program(program), g, [plan for _, _, plan in rows])

    if args.format == "json":
        doc = {
            "analysis": name,
            "graph": g.name,
            "cyclicity": g.cyclicity.value,
            "plans": [
                {"traversal": t, "path": path, "strategy": plan.strategy.value,
                 "single_pass": plan.single_pass, "direction": plan.direction.value}
                for t, path, plan in rows
            ],
            "outputs": {
                t: {str(v): _jsonable(om[v]) for v in sorted(om)} for t, om in outputs.items()
            },
            "metrics": metrics.to_dict(),
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["traversal", "node", "value"])
        for t, om in outputs.items():
            for v in sorted(om):
                w.writerow([t, v, _text_value(om[v])])
    else:
        out.write(f"analysis {name} on {g.name} ({g.cyclicity.value}, {len(g)} nodes)\n")
        for t, path, plan in rows:
            out.write(f"plan {t}: path={path} strategy={plan.strategy.value} "
                      f"single_pass={str(plan.single_pass).lower()}\n")
        for t, om in outputs.items():
            for v in sorted(om):
                out.write(f"{t} {v}: {_text_value(om[v])}\n")
        out.write(f"visits={metrics.visits} passes={metrics.passes} "
                  f"checks={metrics.fixpoint_checks} pushes={metrics.worklist_pushes} "
                  f"time_us={round(metrics.wall_time * 1e6)}\n")
    return 0


def cmd_explain(args, out) -> int:
    _, program = load_program(args.analysis)
    g = load_graph(args.graph)
    for entry in extract_properties(program):
        outcome = select(entry.props, g.cyclicity)
        out.write(explain_line(entry.traversal, entry.props, g.cyclicity, outcome) + "\n")
    return 0


def cmd_props(args, out) -> int:
    _, program = load_program(args.analysis)
    report = extract_properties(program)
    if args.format == "json":
        doc = [
            {"traversal": e.traversal, "flw": e.props.data_flow_sensitive,
             "lp": e.props.loop_sensitive, "dir": e.props.direction.short}
            for e in report
        ]
        out.write(json.dumps({"traversals": doc, "static_us": round(report.static_seconds * 1e6)}, indent=2) + "\n")
    else:
        for line in report.lines():
            out.write(line + "\n")
    return 0


def _bench_config(args) -> harness.BenchConfig:
    d = {}
    if args.config:
        try:
            d = json.loads(_read(args.config))
        except json.JSONDecodeError as e:
            raise UserError(f"{args.config}: {e}") from None
        if not isinstance(d, dict):
            raise UserError(f"{args.config}: expected a JSON object")
    for key in ("seed", "graphs", "graphs_per_class", "metric", "workers"):
        value = getattr(args, key)
        if value is not None:
            d[key] = value
    if args.size is not None:
        d["size_range"] = _size_range(args.size)
    if args.analyses:
        d["analyses"] = args.analyses.split(",")
    if args.strategies is not None:
        d["strategies"] = [s for s in args.strategies.split(",") if s]
    try:
        return harness.BenchConfig.from_dict(d)
    except (TypeError, ValueError, KeyError) as e:
        raise UserError(f"bad bench configuration: {e}") from None


def cmd_bench(args, out) -> int:
    cfg = _bench_config(args)
    report = harness.run_matrix(cfg)
    text = harness.emit_report(report, args.format)
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as e:
            raise UserError(f"cannot write {args.output}: {e.strerror or e}") from None
    else:
        out.write(text)
    return 0


def _size_range(text: str) -> tuple[int, int]:
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UserError(f"size must be N or LO-HI, got {text!r}") from None
    if not 2 <= lo <= hi:
        raise UserError(f"bad size range {text!r}")
    return lo, hi


def cmd_gen(args, out) -> int:
    lo, hi = _size_range(args.size)
    target = Path(args.out)
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UserError(f"cannot create {target}: {e.strerror or e}") from None
    try:
        if args.cls == "mix":
            graphs = generate_corpus(args.seed, args.count, (lo, hi))
        else:
            cls = Cyclicity(args.cls)
            if hi < MIN_SIZE[cls]:
                raise UserError(f"{cls.value} graphs need at least {MIN_SIZE[cls]} nodes")
            rng = random.Random(args.seed)
            graphs = []
            for i in range(args.count):
                size = max(rng.randint(lo, hi), MIN_SIZE[cls])
                graphs.append(generate_random_cfg(rng.randrange(2**31), size, cls, name=f"g{i:05d}"))
    except InfeasibleGraph as e:
        raise UserError(str(e)) from None
    for g in graphs:
        path = target / f"{g.name}.cfg"
        path.write_text(format_cfg(g), encoding="utf-8")
        out.write(f"{path}\n")
    return 0


def cmd_validate(args, out) -> int:
    if args.corpus:
        files = sorted(Path(args.corpus).glob("*.cfg"))
        if not files and not Path(args.corpus).is_dir():
            raise UserError(f"{args.corpus} is not a directory")
        corpus = [load_graph(str(f)) for f in files]
    else:
        corpus = generate_corpus(args.seed, args.graphs)
    codes = args.analyses.split(",") if args.analyses else list(CODES)
    try:
        assets: list[AnalysisAsset] = [load_asset(c) for c in codes]
    except KeyError as e:
        raise UserError(str(e.args[0])) from None
    result = harness.validate_groundtruth(assets, corpus)
    for m in result.mismatches[:50]:
        out.write(f"MISMATCH {m.analysis} {m.graph} vs {m.against}: {m.traversal} node {m.node}: "
                  f"got {_text_value(m.got)}, expected {_text_value(m.expected)}\n")
    out.write(f"checked {result.checked} (analysis, graph) pairs: "
              f"{len(result.mismatches)} mismatches\n")
    return 0 if result.ok else 3


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="travsel", description="Traversal-strategy selection for DSL control-flow analyses.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    formats = ("text", "csv", "json")
    strategies = [s.value for s in Strategy] + ["HYBRID"]

    a = sub.add_parser("analyze", help="run an analysis on one graph")
    a.add_argument("--analysis", required=True, help=f"one of {', '.join(CODES)} or a DSL file")
    a.add_argument("--graph", required=True)
    a.add_argument("--strategy", choices=strategies)
    a.add_argument("--no-optimize", action="store_true", help="keep the fixpoint-confirmation pass")
    a.add_argument("--format", choices=formats, default="text")
    a.set_defaults(run=cmd_analyze)

    e = sub.add_parser("explain", help="show the selector's decision per traversal")
    e.add_argument("--analysis", required=True)
    e.add_argument("--graph", required=True)
    e.add_argument("--format", choices=("text",), default="text")
    e.set_defaults(run=cmd_explain)

    pr = sub.add_parser("props", help="print static traversal properties")
    pr.add_argument("--analysis", required=True)
    pr.add_argument("--format", choices=("text", "json"), default="text")
    pr.set_defaults(run=cmd_props)

    b = sub.add_parser("bench", help="run the strategy-comparison matrix")
    b.add_argument("--config", help="JSON file with BenchConfig fields")
    b.add_argument("--seed", type=int)
    b.add_argument("--graphs", type=int)
    b.add_argument("--graphs-per-class", dest="graphs_per_class", type=int)
    b.add_argument("--size", help="N or LO-HI")
    b.add_argument("--analyses", help="comma-separated codes")
    b.add_argument("--strategies", help="comma-separated, e.g. PO,RPO,HYBRID")
    b.add_argument("--metric", choices=harness.METRICS)
    b.add_argument("--workers", type=int)
    b.add_argument("--output", help="write the report here instead of stdout")
    b.add_argument("--format", choices=formats, default="text")
    b.set_defaults(run=cmd_bench)

    gn = sub.add_parser("gen", help="write random CFG files")
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--count", type=int, default=10)
    gn.add_argument("--class", dest="cls", default="mix", choices=["mix"] + [c.value for c in Cyclicity])
    gn.add_argument("--size", default="2-24", help="N or LO-HI")
    gn.add_argument("--out", default=".")
    gn.set_defaults(run=cmd_gen)

    v = sub.add_parser("validate", help="check hybrid outputs against the oracle and reference solvers")
    v.add_argument("--corpus", help="directory of .cfg files (default: a generated corpus)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--graphs", type=int, default=1000)
    v.add_argument("--analyses", help="comma-separated codes")
    v.add_argument("--format", choices=("text",), default="text")
    v.set_defaults(run=cmd_validate)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except UserError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SelectorError as e:
        print(f"error: unsupported combination: {e}", file=sys.stderr)
        return 1
    except (DivergenceError, DslRuntimeError) as e:
        print(f"error: analysis failed: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        # e.g. a malformed BCFA_MAX_PASSES
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
