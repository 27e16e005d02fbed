import json
import math

import pytest

from locallim.errors import ConfigError
from locallim.experiments import (
    CSV_COLUMNS,
    SUITES,
    ExperimentConfig,
    ReportRow,
    _budget_rows,
    check,
    fmt,
    manifest_to_csv,
    ray_code,
    rows_to_csv,
    run_suite,
    theta_core,
    worker_count,
    write_outputs,
)
from locallim.decompose import decompose


def cfg(suite, **kw):
    return ExperimentConfig.from_dict({"suite": suite, **kw})


# --- rows ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "pred,obs,ref,tol,ok",
    [
        ("abs<", 0.1, 0.0, 0.1, False),
        ("abs<", 0.09, 0.0, 0.1, True),
        ("abs<=", 0.05, 0.0, 0.05, True),
        (">=", 0.99, 0.99, 0, True),
        (">=", 0.98, 0.99, 0, False),
        ("<", 0.01, 0.01, 0, False),
        ("within", 1.5, 1.2, 0.4, True),
        ("within", 1.7, 1.2, 0.4, False),
        ("ratio", 90, 100, 2, True),
        ("ratio", 40, 100, 2, False),
        ("info", 5, 0, 0, True),
        ("info", math.nan, 0, 0, False),
    ],
)
def test_predicates(pred, obs, ref, tol, ok):
    assert check(pred, obs, ref, tol) is ok


def test_unknown_predicate():
    with pytest.raises(ValueError):
        check("~", 1, 1, 1)


def test_row_formatting():
    r = ReportRow("S", "a=1", "x", 1 / 3, 0.0, 0.01, "abs<", 9, "note")
    assert r.csv_fields() == ["S", "a=1", "x", "0.333333333", "0", "0.01", "abs<", "fail", "9", "note"]
    assert fmt(1e-12) == "1e-12"
    text = rows_to_csv([r])
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_budget_note_forces_failure():
    r = ReportRow("S", "", "x", 0.0, 0.0, 1.0, "abs<", 0, "budget: exhausted")
    assert not r.passed


def test_budget_rows_thresholds():
    (ok,) = _budget_rows("S", "", 0, 100, 0)
    assert ok.passed and ok.note == ""
    (warn,) = _budget_rows("S", "", 5, 100, 0)
    assert warn.passed and warn.note.startswith("warning:")
    (bad,) = _budget_rows("S", "", 6, 100, 0)
    assert not bad.passed and bad.note.startswith("budget:")


# --- config -------------------------------------------------------------------------


def test_config_errors():
    with pytest.raises(ConfigError):
        cfg("NOPE")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"suite": "BOREL", "colour": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"seed": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json("{not json")
    with pytest.raises(ConfigError):
        cfg("BOREL", seed=-1)


def test_config_resolution_and_hash():
    c = cfg("BOREL", replicates=1000, params={"cap": 50})
    r = c.resolved()
    assert r["replicates"] == 1000 and r["cap"] == 50 and r["kmax"] == 10
    assert c.content_hash() == cfg("BOREL", replicates=1000, params={"cap": 50}).content_hash()
    assert c.content_hash() != cfg("BOREL", replicates=1001, params={"cap": 50}).content_hash()
    # output paths and threads do not change what is computed
    assert c.content_hash() == cfg("BOREL", replicates=1000, params={"cap": 50}, threads=4, output={"csv": "x"}).content_hash()


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("LOCALLIM_THREADS", raising=False)
    assert worker_count(cfg("BOREL", threads=3)) == 3
    monkeypatch.setenv("LOCALLIM_THREADS", "2")
    assert worker_count(cfg("BOREL", threads=3)) == 2
    monkeypatch.setenv("LOCALLIM_THREADS", "many")
    with pytest.raises(ConfigError):
        worker_count()


def test_bad_suite_parameters_are_config_errors():
    with pytest.raises(ConfigError):
        run_suite(cfg("REGIME_LIMIT"))
    with pytest.raises(ConfigError):
        run_suite(cfg("REGIME_LIMIT", regime={"regime": "III", "c": 3.0}))


# --- fixed objects -------------------------------------------------------------------


def test_theta_core_shape():
    g = theta_core(6)
    assert g.n == 20 and g.m == 21
    d = decompose(g)
    assert d.kernel.n == 2 and sorted(d.subdivision.values()) == [6, 6, 6]


def test_ray_code():
    assert ray_code(2, 1) == b"T(()())"
    assert ray_code(0, 3) == b"T()"


# --- small suite runs ----------------------------------------------------------------


SMALL = [
    ("BOREL", dict(replicates=20_000, params={"chunk": 5000})),
    ("UNIFORMITY", dict(replicates=3000, params={"cases": [["tree", 4], ["gnm", 4, 2], ["planar", 5, 9]]})),
    ("FOREST_UNIFORM", dict(replicates=3000)),
    ("GW_CONDITIONING", dict(params={"radii": [1, 2]})),
    ("NONCOMPLEX_LIMIT", dict(n=300, m=150, replicates=5)),
    ("PLANAR_REGIME_I", dict(replicates=20)),
    ("SUBDIVISION", dict(replicates=10, params={"ks": [10, 100]})),
    ("ER_CENSUS", dict(n=5000, replicates=2, tolerance=0.03)),
    ("COMPLEX_PART_LIMIT", dict(replicates=10, params={"q": 300, "reference_draws": 5000, "roots": 20})),
    ("CORE_KERNEL_LIMIT", dict(replicates=10, params={"k": 300})),
    ("TREE_DISTANCE", dict(n=500, replicates=30, params={"oracle_n": 100, "oracle_replicates": 30})),
    ("MIXTURE", dict(params={"reference_draws": 5000, "mass_tol": 1e-3})),
    ("PLANAR_STRUCTURE", dict(n=60, m=45, replicates=5, params={"burn_in": 5000, "thin": 200})),
    ("REGIME_LIMIT", dict(n=200, replicates=5, regime={"regime": "III", "c": 1.5}, params={"reference_draws": 5000})),
]


@pytest.mark.parametrize("suite,kw", SMALL, ids=[s for s, _ in SMALL])
def test_small_suite_runs_and_is_deterministic(suite, kw):
    a = run_suite(cfg(suite, seed=11, **kw))
    b = run_suite(cfg(suite, seed=11, **kw))
    assert a.rows and a.csv == b.csv
    assert all(r.suite == suite for r in a.rows)
    assert a.csv.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_small_suite_threads_do_not_change_output(monkeypatch):
    kw = dict(replicates=6, params={"ks": [10, 50]})
    monkeypatch.setenv("LOCALLIM_THREADS", "1")
    one = run_suite(cfg("SUBDIVISION", seed=3, **kw)).csv
    monkeypatch.setenv("LOCALLIM_THREADS", "2")
    two = run_suite(cfg("SUBDIVISION", seed=3, **kw)).csv
    assert one == two


def test_budget_exhaustion_becomes_failed_row():
    res = run_suite(cfg("NONCOMPLEX_LIMIT", n=20, m=40, replicates=4, max_tries=3))
    assert res.budget_failed and not res.all_passed
    row = [r for r in res.rows if r.statistic == "budget_failure_fraction"][0]
    assert row.observed == 1.0 and row.note.startswith("budget:")


def test_borel_rows_per_k():
    res = run_suite(cfg("BOREL", replicates=10_000, params={"chunk": 5000}))
    ks = [r for r in res.rows if r.statistic == "freq"]
    assert len(ks) == 10
    assert any(r.statistic.startswith("sum_abs_error") for r in res.rows)


def test_manifest_round_trip(tmp_path):
    c = cfg("GW_CONDITIONING", params={"radii": [1]}, output={"csv": str(tmp_path / "r.csv"), "manifest": str(tmp_path / "m.json")})
    res = run_suite(c)
    write_outputs(res)
    doc = json.loads((tmp_path / "m.json").read_text())
    assert doc["config_hash"] == c.content_hash()
    assert {"version", "started", "rows", "runtime_s"} <= set(doc)
    assert manifest_to_csv(doc) == (tmp_path / "r.csv").read_text() == res.csv


def test_suite_registry_covers_criteria():
    crit = {s.criterion for s in SUITES.values()}
    assert {str(i) for i in range(1, 13)} <= crit
