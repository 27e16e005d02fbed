"""Acceptance criteria 1-13, one suite run each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line.  Run with
``pytest tests/test_acceptance.py -v -s`` or directly as a script.  The
full pass takes several minutes on one core.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import pytest

from locallim.experiments import ExperimentConfig, SuiteResult, run_suite
from locallim.limits import sk_reference_for_seed

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

# criterion -> (config file, runtime limit in seconds or None)
CRITERIA = {
    1: ("01_uniformity.json", 30),
    2: ("02_borel.json", 60),
    3: ("03_er_census.json", 120),
    4: ("04_noncomplex_limit.json", 300),
    5: ("05_complex_part_limit.json", None),
    6: ("06_core_kernel_limit.json", None),
    7: ("07_subdivision.json", None),
    8: ("08_tree_distance.json", None),
    9: ("09_gw_conditioning.json", None),
    10: ("10_planar_regime_i.json", None),
    11: ("11_mixture.json", None),
    12: ("12_planar_structure.json", None),
}

_results: dict[int, SuiteResult] = {}


def load(criterion: int) -> ExperimentConfig:
    name, _ = CRITERIA[criterion]
    return ExperimentConfig.from_json((CONFIGS / name).read_text())


def result(criterion: int) -> SuiteResult:
    if criterion not in _results:
        _results[criterion] = run_suite(load(criterion))
    return _results[criterion]


def verdict(criterion: int) -> tuple[bool, str]:
    res = result(criterion)
    failed = [r for r in res.rows if not r.passed]
    limit = CRITERIA[criterion][1]
    slow = limit is not None and res.runtime >= limit
    ok = not failed and not slow
    bits = [f"{len(res.rows) - len(failed)}/{len(res.rows)} rows", f"{res.runtime:.1f}s"]
    if slow:
        bits.append(f"over the {limit}s limit")
    for r in failed[:4]:
        bits.append(f"{r.statistic}={r.observed:.4g} ({r.params})")
    if len(failed) > 4:
        bits.append(f"... {len(failed) - 4} more")
    return ok, "; ".join(bits)


def emit(line: str) -> None:
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()


def check_criterion(criterion: int) -> None:
    ok, detail = verdict(criterion)
    emit(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} [{result(criterion).config.suite}] {detail}")
    assert ok, detail


@pytest.mark.parametrize("criterion", sorted(CRITERIA))
def test_criterion(criterion):
    check_criterion(criterion)


def rerun_identical() -> tuple[bool, str]:
    """Criterion 13: rerun every suite on a different worker count."""
    before = os.environ.get("LOCALLIM_THREADS")
    os.environ["LOCALLIM_THREADS"] = "2"
    sk_reference_for_seed.cache_clear()
    diffs = []
    try:
        for c in sorted(CRITERIA):
            first = result(c)
            again = run_suite(load(c))
            if again.csv.encode() != first.csv.encode():
                diffs.append(first.config.suite)
    finally:
        if before is None:
            os.environ.pop("LOCALLIM_THREADS", None)
        else:
            os.environ["LOCALLIM_THREADS"] = before
    if diffs:
        return False, "CSV differs for " + ", ".join(diffs)
    return True, f"{len(CRITERIA)} suites byte-identical on rerun with 2 workers"


def test_criterion_13_determinism():
    ok, detail = rerun_identical()
    emit(f"criterion 13: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def main() -> int:
    bad = 0
    for c in sorted(CRITERIA):
        ok, detail = verdict(c)
        bad += not ok
        emit(f"criterion {c}: {'PASS' if ok else 'FAIL'} [{result(c).config.suite}] {detail}")
    ok, detail = rerun_identical()
    bad += not ok
    emit(f"criterion 13: {'PASS' if ok else 'FAIL'} {detail}")
    summary = {c: _results[c].all_passed for c in sorted(_results)}
    emit(json.dumps({"rows_all_passed": summary}))
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
