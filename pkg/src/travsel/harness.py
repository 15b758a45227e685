"""Strategy-comparison benchmark over a generated corpus of CFGs.

Every analysis runs on every graph under each fixed strategy (without the
single-pass optimization, so a fixpoint-confirmation pass is always paid)
and under ``HYBRID``, which runs whatever plan the selector picks.  Visit
counts are the deterministic metric; wall time is measured alongside.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

from .analyses import CODES, AnalysisAsset, load_asset, reference_solution
from .cfg import Cfg, Cyclicity, generate_corpus, generate_random_cfg
from .cfg.generate import MIN_SIZE
from .dsl.ast import Direction
from .engine import DivergenceError, ExecutionPlan, RunMetrics, Strategy, compile_program, execute_analysis
from .props import AnalysisProperties, extract_properties
from .selector import select

HYBRID = "HYBRID"
FIXED_STRATEGIES = ("DFS", "PO", "RPO", "WPO", "WRPO", "ANY")
ALL_STRATEGIES = FIXED_STRATEGIES + (HYBRID,)
METRICS = ("visits", "time")
CSV_COLUMNS = (
    "analysis", "strategy", "graphs", "total_visits", "total_passes",
    "total_checks", "total_time_us", "infeasible_count",
)


@dataclass(frozen=True)
class BenchConfig:
    seed: int = 0
    graphs: int = 1000
    graphs_per_class: int | None = None  # overrides ``graphs`` and the class mix when set
    size_range: tuple[int, int] = (2, 24)
    analyses: tuple[str, ...] = CODES
    strategies: tuple[str, ...] = ALL_STRATEGIES
    metric: str = "visits"
    workers: int = 1

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        unknown = [s for s in self.strategies if s not in ALL_STRATEGIES]
        if unknown:
            raise ValueError(f"unknown strategies {unknown}; choose from {ALL_STRATEGIES}")
        lo, hi = self.size_range
        if not 2 <= lo <= hi:
            raise ValueError(f"bad size range {self.size_range}")
        for code in self.analyses:
            load_asset(code)

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        d = dict(d)
        for key in ("size_range", "analyses", "strategies"):
            if key in d:
                d[key] = tuple(d[key])
        if "analyses" in d:
            d["analyses"] = tuple(a.upper() for a in d["analyses"])
        return cls(**d)

    def corpus(self) -> list[Cfg]:
        if self.graphs_per_class is None:
            return generate_corpus(self.seed, self.graphs, self.size_range)
        return class_balanced_corpus(self.seed, self.graphs_per_class, self.size_range)


def class_balanced_corpus(seed: int, per_class: int, size_range=(2, 24)) -> list[Cfg]:
    graphs = []
    lo, hi = size_range
    for cls in Cyclicity:
        sizes = range(max(lo, MIN_SIZE[cls]), max(hi, MIN_SIZE[cls]) + 1)
        for i in range(per_class):
            size = sizes[i % len(sizes)]
            graphs.append(generate_random_cfg(seed * 1_000_003 + i, size, cls, name=f"{cls.value}_{i:05d}"))
    return graphs


@dataclass
class CellTotals:
    graphs: int = 0
    visits: int = 0
    passes: int = 0
    checks: int = 0
    time_us: int = 0
    infeasible: int = 0

    def add(self, m: RunMetrics | None):
        self.graphs += 1
        if m is None:
            self.infeasible += 1
            return
        self.visits += m.visits
        self.passes += m.passes
        self.checks += m.fixpoint_checks
        self.time_us += round(m.wall_time * 1e6)


@dataclass
class Misprediction:
    analysis: str
    graph: str
    cyclicity: str
    hybrid: float
    best_strategy: str
    best: float


@dataclass
class BenchReport:
    cells: dict[str, dict[str, CellTotals]] = field(default_factory=dict)  # analysis -> strategy -> totals
    reductions: dict[str, dict[str, dict[str, float | None]]] = field(default_factory=dict)
    precision: dict[str, float] = field(default_factory=dict)
    mispredictions: list[Misprediction] = field(default_factory=list)
    static_seconds: float = 0.0
    total_seconds: float = 0.0
    metric: str = "visits"
    graphs: int = 0

    @property
    def overhead_ratio(self) -> float:
        return self.static_seconds / self.total_seconds if self.total_seconds > 0 else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["overhead_ratio"] = self.overhead_ratio
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        d = dict(d)
        d.pop("overhead_ratio", None)
        d["cells"] = {
            a: {s: CellTotals(**c) for s, c in per.items()} for a, per in d.get("cells", {}).items()
        }
        d["mispredictions"] = [Misprediction(**m) for m in d.get("mispredictions", [])]
        return cls(**d)


# -- running -------------------------------------------------------------------


def plans_for(props: list[AnalysisProperties], strategy: str, c: Cyclicity) -> list[ExecutionPlan]:
    if strategy == HYBRID:
        return [select(p, c).plan for p in props]
    s = Strategy(strategy)
    return [ExecutionPlan(s, False, p.direction) for p in props]


def _run_cell(compiled, props, strategy: str, g: Cfg) -> RunMetrics | None:
    start = time.perf_counter()
    plans = plans_for(props, strategy, g.cyclicity)
    try:
        _, m = execute_analysis(compiled, g, plans)
    except DivergenceError:
        return None
    # selection time is part of what the hybrid pays
    m.wall_time = time.perf_counter() - start
    return m


def _run_analysis(code: str, strategies: tuple[str, ...], graphs: list[Cfg]):
    """All strategies of one analysis over the corpus.

    Returns static extraction seconds and ``per_graph[i][strategy]``.
    """
    asset = load_asset(code)
    report = extract_properties(asset.program)
    props = [e.props for e in report]
    compiled = compile_program(asset.program)
    per_graph = [{s: _run_cell(compiled, props, s, g) for s in strategies} for g in graphs]
    return report.static_seconds, per_graph


def _metric_of(m: RunMetrics, metric: str) -> float:
    return m.visits if metric == "visits" else m.wall_time


def _reduction(t_s: float, t_h: float) -> float | None:
    if t_s <= 0:
        return None
    return round(100.0 * (t_s - t_h) / t_s, 1)


def run_matrix(cfg: BenchConfig, graphs: list[Cfg] | None = None) -> BenchReport:
    graphs = cfg.corpus() if graphs is None else graphs
    # corpus generation is setup, not bench time
    start = time.perf_counter()
    report = BenchReport(metric=cfg.metric, graphs=len(graphs))
    if not cfg.strategies or not cfg.analyses:
        report.total_seconds = time.perf_counter() - start
        return report

    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_analysis, cfg.analyses, [cfg.strategies] * len(cfg.analyses),
                                    [graphs] * len(cfg.analyses)))
    else:
        results = [_run_analysis(code, cfg.strategies, graphs) for code in cfg.analyses]

    for code, (static, per_graph) in zip(cfg.analyses, results):
        report.static_seconds += static
        cells = {s: CellTotals() for s in cfg.strategies}
        for row in per_graph:
            for s, m in row.items():
                cells[s].add(m)
        report.cells[code] = cells
        if HYBRID in cfg.strategies:
            report.reductions[code] = _reductions(cells)
            ratio, missed = _precision(code, graphs, per_graph, cfg.metric)
            report.precision[code] = ratio
            report.mispredictions += missed
    report.total_seconds = time.perf_counter() - start
    return report


def _reductions(cells: dict[str, CellTotals]) -> dict[str, dict[str, float | None]]:
    h = cells[HYBRID]
    out = {}
    for s, c in cells.items():
        if s == HYBRID:
            continue
        feasible = c.infeasible == 0 and h.infeasible == 0
        out[s] = {
            "visits": _reduction(c.visits, h.visits) if feasible else None,
            "time": _reduction(c.time_us, h.time_us) if feasible else None,
        }
    return out


def _precision(code, graphs, per_graph, metric):
    correct = 0
    missed = []
    for g, row in zip(graphs, per_graph):
        h = row[HYBRID]
        rivals = {s: _metric_of(m, metric) for s, m in row.items() if s != HYBRID and m is not None}
        if h is None:
            best_s = min(rivals, key=rivals.get) if rivals else "-"
            missed.append(Misprediction(code, g.name, g.cyclicity.value, float("inf"), best_s, rivals.get(best_s, 0)))
            continue
        hv = _metric_of(h, metric)
        if not rivals or hv <= min(rivals.values()):
            correct += 1
        else:
            best_s = min(rivals, key=rivals.get)
            missed.append(Misprediction(code, g.name, g.cyclicity.value, hv, best_s, rivals[best_s]))
    return (correct / len(graphs) if graphs else 1.0), missed


def measure_selection_precision(analyses: Iterable[str], corpus: list[Cfg], metric: str = "visits",
                                strategies: tuple[str, ...] = FIXED_STRATEGIES):
    """Fraction of graphs on which HYBRID is at least as good as every fixed strategy.

    Returns ``(ratio per analysis, mispredictions)``.
    """
    strategies = tuple(s for s in strategies if s != HYBRID) + (HYBRID,)
    cfg = BenchConfig(analyses=tuple(analyses), strategies=strategies, metric=metric)
    r = run_matrix(cfg, corpus)
    return r.precision, r.mispredictions


# -- ground truth ----------------------------------------------------------------


@dataclass
class Mismatch:
    analysis: str
    graph: str
    against: str  # "oracle" | "reference"
    traversal: str
    node: int
    got: object
    expected: object


@dataclass
class GroundTruth:
    checked: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def oracle_plan(direction: Direction) -> ExecutionPlan:
    if direction is Direction.FORWARD:
        return ExecutionPlan(Strategy.WRPO, False, direction)
    if direction is Direction.BACKWARD:
        return ExecutionPlan(Strategy.WPO, False, direction)
    return ExecutionPlan(Strategy.ANY, True, direction)


def _diff(code, g, against, got, expected) -> list[Mismatch]:
    out = []
    for t in sorted(set(got) | set(expected)):
        a, b = got.get(t, {}), expected.get(t, {})
        for v in sorted(set(a) | set(b)):
            if a.get(v) != b.get(v):
                out.append(Mismatch(code, g.name, against, t, v, a.get(v), b.get(v)))
    return out


Chooser = Callable[[AnalysisProperties, Cyclicity], ExecutionPlan]


def validate_groundtruth(analyses: Iterable[AnalysisAsset | str], corpus: list[Cfg],
                         choose: Chooser | None = None) -> GroundTruth:
    """Compare HYBRID outputs with the worklist oracle and the reference solvers.

    ``choose`` replaces the selector, which is how a deliberately wrong
    strategy can be checked to be caught.
    """
    choose = choose or (lambda p, c: select(p, c).plan)
    result = GroundTruth()
    for asset in analyses:
        asset = load_asset(asset) if isinstance(asset, str) else asset
        props = [e.props for e in extract_properties(asset.program)]
        compiled = compile_program(asset.program)
        oracle = [oracle_plan(p.direction) for p in props]
        for g in corpus:
            got, _ = execute_analysis(compiled, g, [choose(p, g.cyclicity) for p in props])
            want, _ = execute_analysis(compiled, g, oracle)
            result.mismatches += _diff(asset.code, g, "oracle", got, want)
            result.mismatches += _diff(asset.code, g, "reference", got, reference_solution(asset, g))
            result.checked += 1
    return result


# -- reports -----------------------------------------------------------------------


def _cell_row(code: str, s: str, c: CellTotals) -> list[str]:
    if c.infeasible:
        totals = ["--"] * 4
    else:
        totals = [str(c.visits), str(c.passes), str(c.checks), str(c.time_us)]
    return [code, s, str(c.graphs), *totals, str(c.infeasible)]


def _pct(x: float | None) -> str:
    return "--" if x is None else f"{x:.1f}%"


def emit_report(r: BenchReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(r.to_dict(), indent=2, allow_nan=True)
    rows = [_cell_row(a, s, c) for a, per in r.cells.items() for s, c in per.items()]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(rows)
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")

    widths = [max(len(x) for x in col) for col in zip(CSV_COLUMNS, *rows)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(CSV_COLUMNS, widths))]
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in rows]
    if r.reductions:
        lines += ["", "reduction R = (T_S - T_H) / T_S of HYBRID against each strategy S"]
        lines.append(f"{'analysis':<9} {'strategy':<8} {'R(visits)':>10} {'R(time)':>10}")
        for a, per in r.reductions.items():
            for s, red in per.items():
                lines.append(f"{a:<9} {s:<8} {_pct(red['visits']):>10} {_pct(red['time']):>10}")
    if r.precision:
        lines += ["", f"selection precision ({r.metric})"]
        lines += [f"{a:<9} {100 * p:.1f}%" for a, p in r.precision.items()]
        lines.append(f"mispredictions: {len(r.mispredictions)}")
    lines += [
        "",
        f"graphs: {r.graphs}",
        f"static extraction: {r.static_seconds * 1e6:.0f} us of {r.total_seconds:.3f} s "
        f"(overhead {100 * r.overhead_ratio:.4f}%)",
    ]
    return "\n".join(lines) + "\n"
