"""Command line entry point: generate, solve, validate, oracle, compare, report, serve.

Exit codes: 0 success, 1 infeasible solution or failed check, 2 usage or input error.
With ``--server URL`` the single-instance commands are forwarded to a running service.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import statistics
import sys
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

from .instances import PRESETS, SCENARIOS, GenerationError, generate_instance, preset
from .io import (
    dumps,
    instance_from_dict,
    instance_to_dict,
    solution_paths_from_dict,
    solution_to_dict,
)
from .metrics import best_upper_bound, gap_pct
from .model import ModelError
from .oracle import OracleLimitError, brute_force_optimum
from .runner import ALGORITHMS, ConfigError, SolveConfig, run
from .validator import StructureError, validate

WORKERS_ENV = "CSQF_WORKERS"

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_json(path: str) -> dict[str, Any]:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        return json.loads(text)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _write(doc: Any, path: Optional[str]) -> None:
    text = dumps(doc) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _int_list(text: str) -> list[int]:
    """``3``, ``0,2,5`` or an inclusive range ``0-9``."""
    out: list[int] = []
    try:
        for part in text.split(","):
            lo, sep, hi = part.partition("-")
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    return out


def _str_list(choices: Sequence[str]):
    def parse(text: str) -> list[str]:
        items = [t for t in text.split(",") if t]
        bad = [t for t in items if t not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(f"choose from {list(choices)}, got {text!r}")
        return items

    return parse


def _on_off_list(text: str) -> list[bool]:
    return [x == "on" for x in _str_list(["on", "off"])(text)]


def _post(server: str, route: str, body: dict[str, Any]) -> dict[str, Any]:
    import httpx

    try:
        resp = httpx.post(server.rstrip("/") + route, json=body, timeout=None)
    except httpx.HTTPError as exc:
        raise UsageError(f"cannot reach {server}: {exc}") from None
    if resp.status_code == 422:
        raise UsageError(f"server rejected request: {resp.text}")
    if resp.status_code >= 400:
        raise RuntimeError(f"server error {resp.status_code}: {resp.text}")
    return resp.json()


# --- single-instance commands ----------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    overrides: dict[str, Any] = {"seed": args.seed}
    if args.scenario:
        overrides["scenario"] = args.scenario
    if args.demands is not None:
        overrides["demand_count"] = args.demands
    if args.R is not None:
        overrides["R"] = args.R
    if args.server:
        body = {"preset": args.preset, "seed": args.seed, "scenario": args.scenario, "demands": args.demands, "R": args.R}
        doc = _post(args.server, "/generate", body)
    else:
        doc = instance_to_dict(generate_instance(preset(args.preset, **overrides)))
    _write(doc, args.output)
    return EXIT_OK


def _config(args: argparse.Namespace, algorithm: Optional[str] = None) -> SolveConfig:
    return SolveConfig(
        algorithm=algorithm or args.algorithm,
        strengthen=args.strengthen,
        rr_runs=args.rr_runs,
        seed=args.seed,
        order=args.order,
        k=args.k,
        epsilon=args.epsilon,
    )


def _solve_common(args: argparse.Namespace, algorithm: Optional[str] = None) -> int:
    doc = _read_json(args.instance)
    config = _config(args, algorithm)
    if args.server:
        route = "/oracle" if config.algorithm == "oracle" else "/solve"
        out = _post(args.server, route, {"instance": doc, "options": config.to_dict()})
        solution_doc, metrics = out["solution"], out["metrics"]
    else:
        instance = instance_from_dict(doc)
        outcome = run(instance, config)
        solution_doc, metrics = solution_to_dict(outcome.solution), outcome.metrics(instance, config)
    if args.output:
        _write(solution_doc, args.output)
    if args.metrics:
        _write(metrics, args.metrics)
    if not args.output:
        _write({"solution": solution_doc, "metrics": metrics}, None)
    elif not args.metrics:
        _write(metrics, None)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    return _solve_common(args)


def cmd_oracle(args: argparse.Namespace) -> int:
    return _solve_common(args, "oracle")


def cmd_validate(args: argparse.Namespace) -> int:
    inst_doc, sol_doc = _read_json(args.instance), _read_json(args.solution)
    if args.server:
        report = _post(args.server, "/validate", {"instance": inst_doc, "solution": sol_doc})
    else:
        instance = instance_from_dict(inst_doc)
        paths = solution_paths_from_dict(sol_doc)
        try:
            report = validate(instance, paths).to_dict()
        except StructureError as exc:
            report = {"feasible": False, "objective": 0, "violations": [], "error": str(exc)}
    _write(report, args.output)
    return EXIT_OK if report["feasible"] else EXIT_FAILED


# --- compare / report ------------------------------------------------------------------------

CSV_FIELDS = [
    "preset",
    "scenario",
    "demands",
    "seed",
    "R",
    "algorithm",
    "strengthen",
    "rr_runs",
    "accepted_traffic_pct",
    "accepted_demand_count",
    "objective_du",
    "total_du",
    "upper_bound_du",
    "best_upper_bound_du",
    "gap_pct",
    "oracle_du",
    "proven",
    "iterations",
    "columns",
    "wall_time_s",
]


@dataclass(frozen=True)
class Cell:
    preset: str
    scenario: str
    demands: Optional[int]
    seed: int
    R: int
    algorithm: str
    strengthen: Optional[bool]
    rr_runs: int


def _cell_instance(cell: Cell):
    overrides: dict[str, Any] = {"seed": cell.seed, "R": cell.R, "scenario": cell.scenario}
    if cell.demands is not None:
        overrides["demand_count"] = cell.demands
    return generate_instance(preset(cell.preset, **overrides))


def run_cell(cell: Cell) -> dict[str, Any]:
    instance = _cell_instance(cell)
    t0 = time.perf_counter()
    if cell.algorithm == "oracle":
        res = brute_force_optimum(instance)
        solution, ub, extra = res.solution, float(res.objective), {}
    else:
        config = SolveConfig(
            algorithm=cell.algorithm,
            strengthen=bool(cell.strengthen),
            rr_runs=cell.rr_runs,
            seed=cell.seed,
        )
        outcome = run(instance, config)
        solution, ub, extra = outcome.solution, outcome.upper_bound, outcome.extra
        report = validate(instance, solution)
        if not report.feasible:
            raise RuntimeError(f"{cell} produced an infeasible plan: {report.kinds()}")
    total, objective = instance.total_bandwidth, solution.objective
    return {
        "preset": cell.preset,
        "scenario": cell.scenario,
        "demands": len(instance.demands),
        "seed": cell.seed,
        "R": cell.R,
        "algorithm": cell.algorithm,
        "strengthen": "" if cell.strengthen is None else ("on" if cell.strengthen else "off"),
        "rr_runs": cell.rr_runs if cell.algorithm in ("cg-rr", "nocycleinfo") else "",
        "accepted_traffic_pct": 100.0 * objective / total if total else 0.0,
        "accepted_demand_count": len(solution.accepted),
        "objective_du": objective,
        "total_du": total,
        "upper_bound_du": ub if cell.algorithm in ("cg-rr", "oracle") else None,
        "proven": extra.get("proven", ""),
        "iterations": extra.get("iterations", ""),
        "columns": extra.get("columns", ""),
        "wall_time_s": time.perf_counter() - t0,
    }


def compare_cells(
    preset_name: str,
    scenario: str,
    demand_counts: Sequence[Optional[int]],
    seeds: Sequence[int],
    algorithms: Sequence[str],
    Rs: Sequence[int],
    strengthen: Sequence[bool],
    rr_runs: int,
    oracle: bool,
) -> list[Cell]:
    cells = []
    for n in demand_counts:
        for seed in seeds:
            for R in Rs:
                for alg in algorithms:
                    if alg == "greedy":
                        cells.append(Cell(preset_name, scenario, n, seed, R, alg, None, rr_runs))
                    else:
                        for s in strengthen:
                            cells.append(Cell(preset_name, scenario, n, seed, R, alg, s, rr_runs))
                if oracle:
                    cells.append(Cell(preset_name, scenario, n, seed, R, "oracle", None, rr_runs))
    return cells


def _worker_count(explicit: Optional[int]) -> int:
    if explicit is not None:
        return max(1, explicit)
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def finish_rows(rows: list[dict[str, Any]]) -> tuple[list[dict[str, Any]], list[str]]:
    """Attach best bounds, gaps and oracle values; return rows plus ordering violations."""
    groups: dict[tuple, list[dict[str, Any]]] = defaultdict(list)
    for row in rows:
        groups[(row["demands"], row["seed"], row["R"])].append(row)
    problems: list[str] = []
    for key, group in groups.items():
        bounds = [r["upper_bound_du"] for r in group if r["algorithm"] == "cg-rr"]
        best = best_upper_bound(bounds)
        oracle = next((r["objective_du"] for r in group if r["algorithm"] == "oracle"), None)
        for r in group:
            r["best_upper_bound_du"] = best
            r["gap_pct"] = gap_pct(r["objective_du"], best)
            r["oracle_du"] = oracle
            if oracle is not None and r["algorithm"] != "oracle" and r["objective_du"] > oracle:
                problems.append(f"{key}: {r['algorithm']} objective {r['objective_du']} exceeds oracle {oracle}")
        if oracle is not None and best is not None and oracle > best + 1e-6:
            problems.append(f"{key}: oracle {oracle} exceeds upper bound {best}")
    return rows, problems


def compare(cells: Sequence[Cell], workers: int = 1) -> tuple[list[dict[str, Any]], list[str]]:
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]
    return finish_rows(rows)


def _fmt(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return value


def write_csv(rows: Sequence[dict[str, Any]], fields: Sequence[str], path: Optional[str]) -> None:
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row.get(k)) for k in fields})
    if path is None or path == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _preset_scenario(name: str) -> str:
    mix = PRESETS[name].mix
    return next(k for k, v in sorted(SCENARIOS.items()) if v == mix)


def cmd_compare(args: argparse.Namespace) -> int:
    algorithms = args.algorithms
    oracle = args.oracle or args.preset == "tiny"
    cells = compare_cells(
        args.preset,
        args.scenario or _preset_scenario(args.preset),
        args.demands or [None],
        args.seeds,
        algorithms,
        args.R,
        args.strengthen,
        args.rr_runs,
        oracle,
    )
    rows, problems = compare(cells, _worker_count(args.workers))
    fields = [f for f in CSV_FIELDS if not (args.no_timing and f == "wall_time_s")]
    write_csv(rows, fields, args.output)
    for p in problems:
        print(json.dumps({"check": "ordering", "detail": p}), file=sys.stderr)
    return EXIT_FAILED if problems else EXIT_OK


def series_label(row: dict[str, str]) -> str:
    label = f"{row['algorithm']} R={row['R']}"
    if row.get("strengthen"):
        label += f" str={row['strengthen']}"
    return label


def report_table(rows: Sequence[dict[str, str]], metric: str) -> tuple[list[str], list[list[Any]]]:
    """Mean of ``metric`` over seeds, one line per demand count and one column per series."""
    series: list[str] = []
    cells: dict[tuple[int, str], list[float]] = defaultdict(list)
    for row in rows:
        label = series_label(row)
        if label not in series:
            series.append(label)
        if row.get(metric, "") != "":
            cells[(int(row["demands"]), label)].append(float(row[metric]))
    counts = sorted({int(r["demands"]) for r in rows})
    header = ["demands"] + series
    table = []
    for n in counts:
        line: list[Any] = [n]
        for label in series:
            values = cells.get((n, label))
            line.append(round(statistics.fmean(values), 4) if values else None)
        table.append(line)
    return header, table


def cmd_report(args: argparse.Namespace) -> int:
    try:
        text = Path(args.csv).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc.strerror or exc}") from None
    rows = list(csv.DictReader(_io.StringIO(text)))
    if not rows:
        raise UsageError(f"{args.csv} has no rows")
    if args.metric not in rows[0]:
        raise UsageError(f"{args.csv} has no column {args.metric!r}")
    header, table = report_table(rows, args.metric)
    buf = _io.StringIO()
    if args.format == "gnuplot":
        buf.write("# " + " | ".join(header) + "\n")
        for line in table:
            buf.write(" ".join("NaN" if v is None else str(v) for v in line) + "\n")
    else:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([["" if v is None else v for v in line] for line in table])
    if args.output:
        Path(args.output).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("csqf_planner.service.app:app", host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------------


def _add_solver_flags(p: argparse.ArgumentParser, with_algorithm: bool) -> None:
    p.add_argument("instance", help="instance JSON file ('-' for stdin)")
    if with_algorithm:
        p.add_argument("--algorithm", choices=[a for a in ALGORITHMS if a != "oracle"], default="cg-rr")
    p.add_argument("--order", default="input", help="greedy order: input or random:<seed>")
    p.add_argument("--k", type=int, default=None, help="greedy candidates per demand (default 4(R+1))")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--strengthen", type=_on_off, default=True, metavar="{on,off}")
    p.add_argument("--rr-runs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="solution JSON path (metrics then go to stdout)")
    p.add_argument("--metrics", help="metrics JSON path")
    p.add_argument("--server", help="forward to a running service at this URL")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csqf", description="CSQF routing and scheduling planner")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate an IPRAN-style instance")
    g.add_argument("--preset", choices=["tiny", "desk", "paper"], default="tiny")
    g.add_argument("--scenario", choices=sorted(SCENARIOS))
    g.add_argument("--demands", type=int)
    g.add_argument("--R", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.add_argument("--server")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="plan an instance")
    _add_solver_flags(s, with_algorithm=True)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    _add_solver_flags(o, with_algorithm=False)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("validate", help="check a solution against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("-o", "--output")
    v.add_argument("--server")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("compare", help="algorithm x R x strengthening matrix over seeds, as CSV")
    c.add_argument("--preset", choices=["tiny", "desk", "paper"], default="tiny")
    c.add_argument("--scenario", choices=sorted(SCENARIOS), help="default: the preset's own mix")
    c.add_argument("--demands", type=_int_list, help="demand counts, e.g. 1200,1600")
    c.add_argument("--seeds", type=_int_list, default=[0])
    c.add_argument("--algorithms", type=_str_list([a for a in ALGORITHMS if a != "oracle"]),
                   default=["greedy", "cg-rr", "nocycleinfo"])
    c.add_argument("--R", type=_int_list, default=[0, 1])
    c.add_argument("--strengthen", type=_on_off_list, default=[True, False], metavar="on,off")
    c.add_argument("--rr-runs", type=int, default=50)
    c.add_argument("--oracle", action="store_true", help="add the oracle (always on for tiny)")
    c.add_argument("--workers", type=int, help=f"parallel cells (default ${WORKERS_ENV} or 1)")
    c.add_argument("--no-timing", action="store_true", help="omit wall times for byte-stable output")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("report", help="accepted traffic vs demand count table from a compare CSV")
    r.add_argument("csv")
    r.add_argument("--metric", default="accepted_traffic_pct")
    r.add_argument("--format", choices=["csv", "gnuplot"], default="csv")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_report)

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    sv.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ModelError, GenerationError, ConfigError, OracleLimitError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as a structured failure
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
