"""Grid benchmarks: one CSV row per (instance, alpha, beta, cap, solver) cell.

Config file (JSON)::

    {
      "format": 1,
      "instances": [
        {"name": "ref", "path": "reference.json"},
        {"name": "g12", "generate": {"kind": "cut", "n": 12, "m": 3, "p": 0.5, "seed": 1}}
      ],
      "alpha": ["0", "1/4", "1/2", "3/4", "1"],
      "beta": ["1"],            # or "alpha", "(1+alpha)/2"
      "cap": [null, "sum-lower", "n", 6],
      "solvers": ["exact", "random-greedy"],
      "trials": 100,
      "seed": 0,
      "opt_budget": 14
    }

Cells with alpha > beta are skipped. Paths are resolved relative to the
config file.
"""
from __future__ import annotations

import copy
import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .fair import FairSolveConfig, solve
from .files import generate_instance, read_instance
from .model import FairnessSpec, InfeasibleSpecError, Instance, format_fraction, group_bounds, parse_fraction
from .objectives import TABLE_LIMIT
from .verification import brute_force_opt

COLUMNS = [
    "instance", "alpha", "beta", "cap", "solver", "algorithm", "mean_value",
    "opt", "ratio", "time_s", "oracle_calls", "status",
]


@dataclass(frozen=True)
class Cell:
    name: str
    instance: Instance
    alpha: Fraction
    beta: Fraction
    cap: int | None
    solver: str
    trials: int
    seed: int
    opt_budget: int


def _beta_values(entry, alpha: Fraction) -> Fraction:
    if entry == "alpha":
        return alpha
    if entry == "(1+alpha)/2":
        return (1 + alpha) / 2
    return parse_fraction(entry)


def _cap_value(entry, instance: Instance, spec: FairnessSpec) -> int | None:
    if entry is None:
        return None
    if entry == "n":
        return instance.n
    if entry == "sum-lower":
        return sum(group_bounds(instance, spec).lower)
    return int(entry)


def load_cells(config_path) -> list[Cell]:
    config_path = Path(config_path)
    cfg = json.loads(config_path.read_text())
    if cfg.get("format") != 1:
        raise ValueError(f"unsupported bench config format {cfg.get('format')!r}")
    instances = []
    for k, entry in enumerate(cfg["instances"]):
        if "path" in entry:
            inst = read_instance(config_path.parent / entry["path"])
        else:
            g = entry["generate"]
            inst = generate_instance(g.get("kind", "cut"), int(g["n"]), int(g["m"]),
                                     float(g.get("p", 0.5)), int(g.get("seed", 0)))
        instances.append((entry.get("name", f"instance{k}"), inst))
    cells = []
    seen = set()
    for name, inst in instances:
        for a in cfg.get("alpha", ["0"]):
            alpha = parse_fraction(a)
            for b in cfg.get("beta", ["1"]):
                beta = _beta_values(b, alpha)
                if alpha > beta:
                    continue
                for c in cfg.get("cap", [None]):
                    cap = _cap_value(c, inst, FairnessSpec(alpha, beta))
                    for solver in cfg.get("solvers", ["exact"]):
                        key = (name, alpha, beta, cap, solver)
                        if key in seen:
                            continue
                        seen.add(key)
                        cells.append(Cell(name, inst, alpha, beta, cap, solver,
                                          int(cfg.get("trials", 100)), int(cfg.get("seed", 0)),
                                          int(cfg.get("opt_budget", 14))))
    return cells


def run_cell(cell: Cell) -> dict:
    row = {
        "instance": cell.name,
        "alpha": format_fraction(cell.alpha),
        "beta": format_fraction(cell.beta),
        "cap": "" if cell.cap is None else cell.cap,
        "solver": cell.solver,
        "algorithm": "", "mean_value": "", "opt": "", "ratio": "",
        "time_s": "", "oracle_calls": "", "status": "ok",
    }
    spec = FairnessSpec(cell.alpha, cell.beta, cell.cap)
    # fresh copy so cached tables and counters never leak between cells
    inst = copy.deepcopy(cell.instance)
    inst.objective._table_cache = None
    inst.objective.reset_calls()
    t0 = time.perf_counter()
    try:
        report = solve(inst, spec, FairSolveConfig(solver=cell.solver, seed=cell.seed, trials=cell.trials))
    except InfeasibleSpecError:
        row["status"] = "infeasible"
        return row
    except ValueError as exc:
        row["status"] = f"error: {exc}"
        return row
    row["time_s"] = f"{time.perf_counter() - t0:.4f}"
    row["oracle_calls"] = inst.objective.calls
    row["algorithm"] = report.algorithm
    row["mean_value"] = f"{report.mean:.6g}"
    if not report.feasible:
        row["status"] = "audit-failure"
    if inst.n <= min(cell.opt_budget, TABLE_LIMIT):
        opt = brute_force_opt(inst, spec).opt_value
        row["opt"] = f"{opt:.6g}"
        if opt > 0:
            row["ratio"] = f"{report.mean / opt:.6f}"
    return row


def run_bench(config_path, jobs: int = 1, timing: bool = True) -> str:
    """Run every cell and return the CSV text (rows in grid order)."""
    cells = load_cells(config_path)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        if not timing:
            row["time_s"] = ""
        writer.writerow(row)
    return buf.getvalue()
