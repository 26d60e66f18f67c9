import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

import fairsub.fair
from fairsub.cli import EXIT_AUDIT, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, main
from fairsub.files import (
    InstanceFormatError,
    generate_instance,
    instance_to_dict,
    read_instance,
    write_instance,
)
from fairsub.model import Instance
from fairsub.objectives import TableOracle, to_mask

from .conftest import REF_EDGES, REF_GROUPS

DOCS = Path(__file__).resolve().parents[1] / "docs"


@pytest.fixture
def ref_path(tmp_path, ref_instance):
    p = tmp_path / "ref.json"
    write_instance(ref_instance, p)
    return p


def _agree_on_random_subsets(a, b, n, count=1000, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        S = np.flatnonzero(rng.random(n) < 0.5).tolist()
        assert a.value(S) == b.value(S)


@pytest.mark.parametrize("kind, n", [("cut", 10), ("cut", 25), ("table", 9)])
def test_generate_round_trip(tmp_path, kind, n):
    out = tmp_path / "inst.json"
    assert main(["generate", "--kind", kind, "--n", str(n), "--m", "3", "--p", "0.5", "--seed", "7",
                 "--out", str(out)]) == EXIT_OK
    back = read_instance(out)
    again = generate_instance(kind, n, 3, 0.5, 7)
    assert back.group_of == again.group_of
    assert sorted(back.group_sizes) == sorted(again.group_sizes)
    assert max(back.group_sizes) - min(back.group_sizes) <= 1
    _agree_on_random_subsets(back.objective, again.objective, n)
    assert json.loads(out.read_text())["format"] == 1


def test_generate_rejects_more_groups_than_items(tmp_path, capsys):
    assert main(["generate", "--n", "3", "--m", "4", "--out", str(tmp_path / "x.json")]) == EXIT_INPUT
    assert "empty" in capsys.readouterr().err


def test_generate_zero_probability(tmp_path):
    out = tmp_path / "z.json"
    main(["generate", "--n", "6", "--m", "2", "--p", "0", "--out", str(out)])
    assert json.loads(out.read_text())["objective"]["edges"] == []


def test_reference_doc_matches_fixture():
    inst = read_instance(DOCS / "reference_instance.json")
    assert [sorted(g) for g in inst.groups] == REF_GROUPS
    assert sorted(inst.objective.edges) == sorted(REF_EDGES)


def test_schema_ships_with_docs():
    schema = json.loads((DOCS / "instance.schema.json").read_text())
    assert schema["properties"]["format"]["const"] == 1


@pytest.mark.parametrize(
    "doc",
    [
        {"format": 2, "n": 1, "groups": [[0]], "objective": {"type": "cut", "edges": []}},
        {"format": 1, "n": 2, "groups": [[0]], "objective": {"type": "cut", "edges": []}},
        {"format": 1, "n": 2, "groups": [[0], [1]], "objective": {"type": "table", "values": [0, 1]}},
        {"format": 1, "n": 2, "groups": [[0], [1]], "objective": {"type": "quadratic"}},
        {"format": 1, "n": 1, "groups": [[0]], "objective": {"type": "table", "values": [0, "x"]}},
    ],
)
def test_bad_instance_documents(tmp_path, doc):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(InstanceFormatError):
        read_instance(p)
    assert main(["solve", str(p), "--alpha", "0", "--beta", "1"]) == EXIT_INPUT


def test_table_round_trip(tmp_path):
    inst = generate_instance("table", 8, 2, seed=3)
    p = tmp_path / "t.json"
    write_instance(inst, p)
    back = read_instance(p)
    assert np.array_equal(back.objective.table(), inst.objective.table())
    # bit k of the table index is item k
    values = instance_to_dict(inst)["objective"]["values"]
    assert values[to_mask([1, 4])] == inst.objective.value([1, 4])


def test_solve_reference_mean_four(ref_path, tmp_path, capsys):
    out = tmp_path / "report.json"
    csv_path = tmp_path / "trials.csv"
    code = main(["solve", str(ref_path), "--alpha", "1/2", "--beta", "1", "--solver", "exact", "--trials", "100",
                 "--out", str(out), "--csv", str(csv_path)])
    assert code == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["mean"] == 4 and rep["algorithm"] == 1 and rep["branch"] == "low-alpha"
    assert rep["spec"] == {"alpha": "1/2", "beta": "1", "cap": None}
    assert len(csv_path.read_text().splitlines()) == 101


def test_solve_decimal_alpha_routes_high(ref_path, capsys):
    assert main(["solve", str(ref_path), "--alpha", "0.6", "--beta", "1"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["algorithm"] == 2 and rep["branch"] == "high-alpha"
    assert rep["spec"]["alpha"] == "3/5"


def test_solve_fraction_serialized_exactly(ref_path, capsys):
    main(["solve", str(ref_path), "--alpha", "1/3", "--beta", "2/3"])
    assert json.loads(capsys.readouterr().out)["spec"]["alpha"] == "1/3"


def test_solve_infeasible_cap(ref_path, capsys):
    assert main(["solve", str(ref_path), "--alpha", "1/2", "--beta", "1", "--cap", "1"]) == EXIT_INFEASIBLE
    assert "infeasible" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["--alpha", "3/4", "--beta", "1/2"], ["--alpha", "x", "--beta", "1"]])
def test_solve_bad_spec(ref_path, argv):
    try:
        code = main(["solve", str(ref_path), *argv])
    except SystemExit as exc:  # argparse rejects unparsable fractions itself
        code = exc.code
    assert code != EXIT_OK


def test_solve_missing_file(tmp_path):
    assert main(["solve", str(tmp_path / "nope.json"), "--alpha", "0", "--beta", "1"]) == EXIT_INPUT


def test_audit_failure_exit_code(ref_path, monkeypatch):
    monkeypatch.setattr(fairsub.fair, "is_fair", lambda *a, **k: False)
    assert main(["solve", str(ref_path), "--alpha", "1/2", "--beta", "1"]) == EXIT_AUDIT


def test_seed_from_environment(ref_path, monkeypatch, capsys):
    monkeypatch.setenv("FAIRSUB_SEED", "17")
    main(["solve", str(ref_path), "--alpha", "0", "--beta", "1", "--solver", "random-greedy"])
    assert json.loads(capsys.readouterr().out)["config"]["seed"] == 17


def test_verify_reference_all_pass(ref_path, capsys):
    assert main(["verify", str(ref_path), "--trials", "300"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_verify_corrupted_table(tmp_path, capsys):
    vals = [float(bin(m).count("1") ** 2) for m in range(16)]
    inst = Instance.from_groups(REF_GROUPS, TableOracle(vals, validate=False))
    p = tmp_path / "bad.json"
    write_instance(inst, p)
    assert main(["verify", str(p), "--alpha", "1/2", "--trials", "100"]) != EXIT_OK
    assert "FAIL  submodular f" in capsys.readouterr().out


def test_verify_requires_target(capsys):
    assert main(["verify"]) == EXIT_INPUT


@pytest.mark.slow
def test_verify_random_suite_deterministic(capsys):
    assert main(["verify", "--suite", "random", "--count", "20", "--nmax", "12", "--seed", "1"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["verify", "--suite", "random", "--count", "20", "--nmax", "12", "--seed", "1"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert "FAIL" not in first


def _bench_config(tmp_path, ref_path, **over):
    cfg = {"format": 1, "instances": [{"name": "ref", "path": ref_path.name}],
           "alpha": ["1/2"], "beta": ["1"], "cap": [None], "solvers": ["exact"], "trials": 20, "seed": 0}
    cfg.update(over)
    p = tmp_path / "bench.json"
    p.write_text(json.dumps(cfg))
    return p


def test_bench_single_cell(tmp_path, ref_path):
    out = tmp_path / "out.csv"
    assert main(["bench", str(_bench_config(tmp_path, ref_path)), "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("instance,alpha,beta,cap,solver")
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert row["opt"] == "4" and row["mean_value"] == "4" and row["status"] == "ok"


def test_bench_alpha_grid_covers_both_branches(tmp_path, ref_path, capsys):
    cfg = _bench_config(tmp_path, ref_path, alpha=["0", "1/4", "1/2", "3/4", "1"], cap=[None, "n"])
    assert main(["bench", str(cfg)]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()[1:]
    algorithms = {r.split(",")[5] for r in rows}
    assert algorithms == {"1", "2", "3", "4"}


def test_bench_rerun_is_byte_identical(tmp_path, ref_path):
    cfg = _bench_config(tmp_path, ref_path, solvers=["random-greedy", "local-search"],
                        alpha=["1/4", "3/4"], cap=[None, "sum-lower"])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["bench", str(cfg), "--out", str(a), "--no-timing"])
    main(["bench", str(cfg), "--out", str(b), "--no-timing"])
    assert a.read_bytes() == b.read_bytes()


def test_bench_parallel_keeps_grid_order(tmp_path, ref_path):
    cfg = _bench_config(tmp_path, ref_path, alpha=["0", "1/2", "3/4"], solvers=["random-greedy"])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["bench", str(cfg), "--out", str(a), "--no-timing"])
    main(["bench", str(cfg), "--out", str(b), "--no-timing", "--jobs", "2"])
    assert a.read_bytes() == b.read_bytes()


def test_bench_infeasible_cell_and_blank_opt(tmp_path, ref_path, capsys):
    cfg = _bench_config(tmp_path, ref_path, cap=[1],
                        instances=[{"name": "ref", "path": ref_path.name},
                                   {"name": "big", "generate": {"kind": "cut", "n": 18, "m": 2, "seed": 1}}],
                        opt_budget=14)
    main(["bench", str(cfg)])
    rows = [r.split(",") for r in capsys.readouterr().out.splitlines()[1:]]
    assert rows[0][-1] == "infeasible"
    assert rows[1][-1] == "infeasible"
    cfg = _bench_config(tmp_path, ref_path, cap=[None],
                        instances=[{"name": "big", "generate": {"kind": "cut", "n": 18, "m": 2, "seed": 1}}])
    main(["bench", str(cfg)])
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[7] == "" and row[-1] == "ok"
