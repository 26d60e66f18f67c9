"""JSON instance files and run reports (``"format": 1``)."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .fair import FairSolveConfig, SolveReport
from .model import FairnessSpec, Instance, format_fraction
from .objectives import CutOracle, TableOracle, make_random_cut_instance, make_random_table_oracle

FORMAT_VERSION = 1


class InstanceFormatError(ValueError):
    pass


def instance_to_dict(instance: Instance) -> dict:
    f = instance.objective
    if isinstance(f, CutOracle):
        objective = {"type": "cut", "edges": [[u, v, w] for u, v, w in f.edges]}
    elif isinstance(f, TableOracle):
        objective = {"type": "table", "values": f.values.tolist()}
    else:
        raise TypeError(f"cannot serialize objective of type {type(f).__name__}")
    return {
        "format": FORMAT_VERSION,
        "n": instance.n,
        "groups": [sorted(g) for g in instance.groups],
        "objective": objective,
    }


def instance_from_dict(doc: dict, validate: bool = True) -> Instance:
    """Build an instance; ``validate=False`` skips the table submodularity check."""
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    if doc.get("format") != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported instance format {doc.get('format')!r}")
    try:
        n = int(doc["n"])
        groups = doc["groups"]
        obj = doc["objective"]
        kind = obj["type"]
    except (KeyError, TypeError) as exc:
        raise InstanceFormatError(f"missing field: {exc}") from None
    flat = sorted(e for g in groups for e in g)
    if flat != list(range(n)):
        raise InstanceFormatError("groups must be disjoint and cover items 0..n-1")
    try:
        if kind == "cut":
            oracle = CutOracle(n, [tuple(e) for e in obj["edges"]])
        elif kind == "table":
            values = obj["values"]
            if len(values) != 1 << n:
                raise InstanceFormatError(f"table needs {1 << n} values, got {len(values)}")
            oracle = TableOracle(values, validate=validate)
        else:
            raise InstanceFormatError(f"unknown objective type {kind!r}")
        return Instance.from_groups(groups, oracle)
    except InstanceFormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise InstanceFormatError(str(exc)) from None


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def instance_digest(instance: Instance) -> str:
    return hashlib.sha256(canonical_json(instance_to_dict(instance)).encode()).hexdigest()


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=1) + "\n")


def read_instance(path, validate: bool = True) -> Instance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: invalid JSON ({exc})") from None
    return instance_from_dict(doc, validate=validate)


def generate_instance(kind: str, n: int, m: int, edge_probability: float = 0.5, seed: int = 0,
                      weight_range=(1.0, 1.0)) -> Instance:
    """Random instance; groups are dealt round-robin and then shuffled."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n (got m={m}, n={n}); some group would be empty")
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % m
    rng.shuffle(labels)
    obj_seed = int(rng.integers(2**32))
    if kind == "cut":
        oracle = make_random_cut_instance(n, edge_probability, weight_range, seed=obj_seed)
    elif kind == "table":
        if n > 16:
            raise ValueError("table instances are limited to n <= 16")
        oracle = make_random_table_oracle(n, seed=obj_seed)
    else:
        raise ValueError(f"unknown instance kind {kind!r}")
    return Instance(tuple(int(x) for x in labels), oracle)


def report_to_dict(report: SolveReport, instance: Instance, config: FairSolveConfig) -> dict:
    return {
        "format": FORMAT_VERSION,
        "instance_digest": instance_digest(instance),
        "spec": {
            "alpha": format_fraction(report.alpha),
            "beta": format_fraction(report.beta),
            "cap": report.cap,
        },
        "config": {
            "solver": config.solver,
            "seed": config.seed,
            "trials": config.trials,
            "epsilon": config.epsilon,
            "best_of": config.best_of,
            "lazy_fill": config.lazy_fill,
        },
        "algorithm": report.algorithm,
        "branch": report.branch,
        "declared_gamma": report.declared_gamma,
        "trials": [{"members": sorted(s.members), "value": s.value} for s in report.solutions],
        "mean": report.mean,
        "stderr": report.stderr,
        "selected": {"members": sorted(report.selected.members), "value": report.selected.value},
        "feasible": report.feasible,
        "violations": report.violations,
        "oracle_calls": report.oracle_calls,
        "wall_time": report.wall_time,
        "notes": report.notes,
    }


def spec_to_dict(spec: FairnessSpec) -> dict:
    return {"alpha": format_fraction(spec.alpha), "beta": format_fraction(spec.beta), "cap": spec.cap}
