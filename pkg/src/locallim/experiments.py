"""Experiment configs, verification suites and CSV/JSON reports.

A suite turns an ``ExperimentConfig`` into ``ReportRow`` values.  Replicate
``i`` always draws from stream ``i`` of the master seed (root choices from the
root stream ``i``, reference laws from reference streams), so reports do not
depend on how replicates are scheduled across workers.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from math import factorial, sqrt
from statistics import median
from typing import Any, Callable

import numpy as np

from . import __version__
from .decompose import kernel_of
from .errors import BudgetError, ConfigError, ContractViolation, LocalLimError
from .graphcore import Graph, MultiGraph, ball, components, distance
from .limits import (
    RegimeSpec,
    borel_pmf,
    gw_ball_reference,
    gw_plane_prob,
    mixture,
    plane_trees,
    predicted_limit,
    sk_reference_for_seed,
)
from .localstats import EmpiricalDist, RootPolicy, ball_code, census_counts, empirical_dist, tv_distance
from .oracles import (
    all_complexparts,
    all_cores_given_kernel,
    all_forests,
    all_gnm,
    all_noncomplex,
    all_planar,
    all_trees,
)
from .planar_chain import make_chain
from .rng import derive_seed, reference_stream, root_stream
from .samplers import (
    sample_cayley_tree,
    sample_complexpart,
    sample_core_given_kernel,
    sample_forest,
    sample_gnm,
    sample_gw_totals,
    sample_noncomplex,
    sample_planar,
    skeleton_children,
)
from .trees import PlaneTree, ahu_code

CSV_COLUMNS = ("suite", "params", "statistic", "observed", "reference", "tolerance", "predicate", "pass", "seed", "note")
BUDGET_WARN_FRACTION = 0.05


def fmt(x: float) -> str:
    return format(float(x), ".9g")


@dataclass
class ReportRow:
    """One checked statistic.

    ``predicate`` fixes how ``passed`` follows from the numbers:
    ``abs<`` |obs - ref| < tol, ``abs<=`` |obs - ref| <= tol, ``>=`` obs >= ref,
    ``<`` obs < ref, ``within`` ref - tol <= obs <= ref + tol, ``ratio``
    ref/tol <= obs <= ref*tol, ``info`` always passes.
    """

    suite: str
    params: str
    statistic: str
    observed: float
    reference: float
    tolerance: float
    predicate: str
    seed: int
    note: str = ""
    passed: bool = field(default=False)
    runtime: float = 0.0

    def __post_init__(self):
        self.passed = check(self.predicate, self.observed, self.reference, self.tolerance)
        if self.note.startswith("budget:") and self.predicate != "info":
            self.passed = False

    def csv_fields(self) -> list[str]:
        return [
            self.suite,
            self.params,
            self.statistic,
            fmt(self.observed),
            fmt(self.reference),
            fmt(self.tolerance),
            self.predicate,
            "pass" if self.passed else "fail",
            str(self.seed),
            self.note,
        ]


def check(predicate: str, obs: float, ref: float, tol: float) -> bool:
    if obs != obs:
        return False
    if predicate == "abs<":
        return abs(obs - ref) < tol
    if predicate == "abs<=":
        return abs(obs - ref) <= tol
    if predicate == ">=":
        return obs >= ref
    if predicate == "<":
        return obs < ref
    if predicate == "within":
        return ref - tol <= obs <= ref + tol
    if predicate == "ratio":
        return ref / tol <= obs <= ref * tol
    if predicate == "info":
        return True
    raise ValueError(f"unknown predicate {predicate!r}")


def rows_to_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def _params(**kw) -> str:
    return ";".join(f"{k}={v}" for k, v in kw.items())


# ---------------------------------------------------------------------------
# config


CONFIG_KEYS = {
    "suite",
    "seed",
    "n",
    "m",
    "radius",
    "replicates",
    "policy",
    "regime",
    "tolerance",
    "max_tries",
    "params",
    "output",
    "threads",
}


@dataclass
class ExperimentConfig:
    suite: str
    seed: int = 0
    n: Any = None
    m: Any = None
    radius: int | None = None
    replicates: int | None = None
    policy: str | None = None
    regime: dict | None = None
    tolerance: float | None = None
    max_tries: int | None = None
    params: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    threads: int | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(doc) - CONFIG_KEYS
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "suite" not in doc:
            raise ConfigError("config needs a suite")
        cfg = cls(**doc)
        if cfg.suite not in SUITES:
            raise ConfigError(f"unknown suite {cfg.suite!r}; known: {sorted(SUITES)}")
        if not isinstance(cfg.seed, int) or cfg.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(doc)

    def resolved(self) -> dict:
        """Suite defaults overlaid with every field this config sets."""
        out = dict(SUITES[self.suite].defaults)
        for key in ("n", "m", "radius", "replicates", "policy", "regime", "tolerance", "max_tries"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        for key, val in self.params.items():
            out[key] = val
        return out

    def content_hash(self) -> str:
        doc = {"suite": self.suite, "seed": self.seed, "resolved": self.resolved()}
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def worker_count(cfg: ExperimentConfig | None = None) -> int:
    env = os.environ.get("LOCALLIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"LOCALLIM_THREADS={env!r} is not an integer") from None
    if cfg is not None and cfg.threads:
        return max(1, int(cfg.threads))
    return 1


def _pmap(fn: Callable, items: list, threads: int) -> list:
    """Order-preserving map, optionally over worker processes."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))


def _merge_counts(parts) -> Counter:
    total: Counter = Counter()
    for p in parts:
        if p is not None:
            total.update(p)
    return total


def _budget_rows(suite: str, params: str, failures: int, attempted: int, seed: int) -> list[ReportRow]:
    """Share of replicates lost to sampling budgets; above 5% the row fails."""
    frac = failures / attempted if attempted else 0.0
    note = ""
    if frac > BUDGET_WARN_FRACTION:
        note = f"budget: {failures} of {attempted} replicates exhausted their budget"
    elif failures:
        note = f"warning: {failures} of {attempted} replicates exhausted their budget"
    return [ReportRow(suite, params, "budget_failure_fraction", frac, 0.0, BUDGET_WARN_FRACTION, "abs<=", seed, note)]


def _dist_from_counts(counts: Counter) -> EmpiricalDist:
    return EmpiricalDist(Counter(counts), sum(counts.values()))


# ---------------------------------------------------------------------------
# fixed objects


def k4_graph() -> Graph:
    return Graph.from_edges(4, [(a, b) for a in range(1, 5) for b in range(a + 1, 5)])


def k4_kernel() -> MultiGraph:
    return MultiGraph(frozenset(range(1, 5)), tuple((a, b) for a in range(1, 5) for b in range(a + 1, 5)))


def theta_kernel() -> MultiGraph:
    return MultiGraph(frozenset({1, 2}), ((1, 2), (1, 2), (1, 2)))


def theta_core(per_edge: int) -> Graph:
    """Theta kernel on {1, 2} with each of its three edges subdivided ``per_edge`` times."""
    edges = []
    nxt = 3
    for _ in range(3):
        chain = [1, *range(nxt, nxt + per_edge), 2]
        nxt += per_edge
        edges.extend(zip(chain, chain[1:]))
    return Graph.from_edges(nxt - 1, edges)


def ray_code(k: int, radius: int) -> bytes:
    """Ball code of k bare rays: the SK(k) ball in which every GW tree is trivial."""
    ch = skeleton_children(k, radius, lambda: 0)
    return ahu_code(ch, range(len(ch)))


# ---------------------------------------------------------------------------
# suites


@dataclass(frozen=True)
class Suite:
    run: Callable[[dict, int, int], list[ReportRow]]
    defaults: dict
    criterion: str


DEFAULT_UNIFORMITY_CASES = [
    ["tree", 4],
    ["tree", 5],
    ["forest", 3, 1],
    ["forest", 3, 2],
    ["forest", 4, 1],
    ["forest", 4, 2],
    ["forest", 4, 3],
    ["forest", 5, 1],
    ["forest", 5, 2],
    ["forest", 5, 3],
    ["gnm", 4, 1],
    ["gnm", 4, 2],
    ["gnm", 4, 3],
    ["gnm", 4, 4],
    ["gnm", 4, 5],
    ["noncomplex", 4, 1],
    ["noncomplex", 4, 2],
    ["noncomplex", 4, 3],
    ["noncomplex", 4, 4],
    ["complexpart", "K4", 6],
    ["core_given_kernel", "theta", 2],
    ["planar", 5, 8],
    ["planar", 5, 9],
]


def _uniformity_case(args) -> tuple:
    case, N, seed, stream, max_tries = args
    rng = derive_seed(seed, stream)
    kind = case[0]
    if kind == "tree":
        n = case[1]
        support = all_trees(n)
        draw = lambda: sample_cayley_tree(n, rng).edges
    elif kind == "forest":
        n, t = case[1], case[2]
        support = all_forests(n, t)
        draw = lambda: sample_forest(n, t, rng).graph.edges
    elif kind == "gnm":
        n, m = case[1], case[2]
        support = all_gnm(n, m)
        draw = lambda: sample_gnm(n, m, rng).edges
    elif kind == "noncomplex":
        n, m = case[1], case[2]
        support = all_noncomplex(n, m)
        draw = lambda: sample_noncomplex(n, m, max_tries, rng).edges
    elif kind == "complexpart":
        core, q = k4_graph(), case[2]
        support = all_complexparts(core, q)
        draw = lambda: sample_complexpart(core, q, rng).edges
    elif kind == "core_given_kernel":
        kernel, k = theta_kernel(), case[2]
        support = all_cores_given_kernel(kernel, k)
        draw = lambda: sample_core_given_kernel(kernel, k, max_tries, rng).edges
    elif kind == "planar":
        n, m = case[1], case[2]
        support = all_planar(n, m)
        draw = lambda: sample_planar(n, m, "rejection", max_tries, rng).edges
    else:
        raise ConfigError(f"unknown uniformity case {case!r}")
    counts: Counter = Counter()
    failures = 0
    for _ in range(N):
        try:
            counts[draw()] += 1
        except BudgetError:
            failures += 1
    drawn = N - failures
    p = 1.0 / len(support)
    sup = set(support)
    errs = [abs(counts.get(s, 0) / drawn - p) for s in support]
    outside = sum(c for s, c in counts.items() if s not in sup) / drawn
    tv = 0.5 * (sum(errs) + outside)
    return tv, max(errs + [outside]), len(support), failures


def run_uniformity(p: dict, seed: int, threads: int) -> list[ReportRow]:
    N, tol = p["replicates"], p["tolerance"]
    cases = p["cases"]
    jobs = [(tuple(c), N, seed, i, p["max_tries"]) for i, c in enumerate(cases)]
    out = []
    for (case, *_), (tv, maxerr, size, failures) in zip(jobs, _pmap(_uniformity_case, jobs, threads)):
        label = "/".join(str(x) for x in case)
        prm = _params(case=label, N=N, outcomes=size)
        out.append(ReportRow("UNIFORMITY", prm, "tv_vs_enumeration", tv, 0.0, tol, "abs<", seed))
        out.append(ReportRow("UNIFORMITY", prm, "max_outcome_error", maxerr, 0.0, tol, "abs<", seed))
        if failures:
            out.extend(_budget_rows("UNIFORMITY", prm, failures, N, seed))
    return out


def run_forest_uniform(p: dict, seed: int, threads: int) -> list[ReportRow]:
    """Single-case form of the uniformity check for F(n, t)."""
    q = dict(p, cases=[["forest", p["n"], p["t"]]])
    rows = run_uniformity(q, seed, threads)
    for r in rows:
        r.suite = "FOREST_UNIFORM"
    return [r for r in rows if r.statistic != "max_outcome_error"]


def _borel_chunk(args) -> tuple[list[int], int]:
    seed, stream, size, cap, K = args
    totals = sample_gw_totals(1.0, cap, size, derive_seed(seed, stream))
    hist = np.bincount(totals[(totals >= 1) & (totals <= K)], minlength=K + 1)
    return hist.tolist(), int((totals < 0).sum())


def run_borel(p: dict, seed: int, threads: int) -> list[ReportRow]:
    N, cap, K, chunk = p["replicates"], p["cap"], p["kmax"], p["chunk"]
    jobs = []
    for i, start in enumerate(range(0, N, chunk)):
        jobs.append((seed, i, min(chunk, N - start), cap, K))
    hist = [0] * (K + 1)
    capped = 0
    for h, c in _pmap(_borel_chunk, jobs, threads):
        hist = [a + b for a, b in zip(hist, h)]
        capped += c
    out = []
    total_err = 0.0
    prm = _params(N=N, cap=cap)
    for k in range(1, K + 1):
        freq = hist[k] / N
        ref = borel_pmf(k)
        total_err += abs(freq - ref)
        out.append(ReportRow("BOREL", _params(N=N, cap=cap, k=k), "freq", freq, ref, p["tolerance"], "abs<", seed))
    out.append(ReportRow("BOREL", prm, "sum_abs_error_k1_to_%d" % K, total_err, 0.0, p["tolerance"], "abs<", seed))
    out.append(ReportRow("BOREL", prm, "capped_fraction", capped / N, p["capped_max"], 0.0, "<", seed))
    return out


def _census_replicate(args) -> dict:
    seed, stream, n, m, radius, wanted = args
    g = sample_gnm(n, m, derive_seed(seed, stream))
    cc = census_counts(g, radius)
    return {t: cc.get(PlaneTree(t, radius), 0) for t in wanted}


def census_targets(c: float, radius: int, threshold: float, max_size: int = 14) -> list[PlaneTree]:
    out = []
    for s in range(1, max_size + 1):
        out.extend(t for t in plane_trees(s, radius) if gw_plane_prob(c, t) >= threshold)
    return out


def run_er_census(p: dict, seed: int, threads: int) -> list[ReportRow]:
    n, radius, reps = p["n"], p["radius"], p["replicates"]
    m = p["m"] if p.get("m") is not None else n // 2
    c = 2 * m / n
    targets = census_targets(c, radius, p["min_prob"])
    wanted = [t.child_counts for t in targets]
    jobs = [(seed, i, n, m, radius, wanted) for i in range(reps)]
    out = []
    for i, counts in enumerate(_pmap(_census_replicate, jobs, threads)):
        for t in targets:
            obs = counts[t.child_counts] / n
            prm = _params(n=n, m=m, radius=radius, replicate=i, tree=str(t))
            out.append(ReportRow("ER_CENSUS", prm, "census_fraction", obs, gw_plane_prob(c, t), p["tolerance"], "abs<", seed))
    return out


def _noncomplex_replicate(args):
    seed, stream, n, m, max_tries, radius, roots = args
    try:
        g = sample_noncomplex(n, m, max_tries, derive_seed(seed, stream))
    except BudgetError:
        return None
    return empirical_dist([g], RootPolicy.UNIFORM, radius, root_stream(seed, stream), roots=roots).counts


def run_noncomplex_limit(p: dict, seed: int, threads: int) -> list[ReportRow]:
    n, m, radius, reps = p["n"], p["m"], p["radius"], p["replicates"]
    jobs = [(seed, i, n, m, p["max_tries"], radius, p["roots"]) for i in range(reps)]
    parts = _pmap(_noncomplex_replicate, jobs, threads)
    failures = sum(1 for x in parts if x is None)
    prm = _params(n=n, m=m, radius=radius, samples=reps, roots=p["roots"])
    regime = RegimeSpec("I", min(1.0, 2 * m / n))
    ref = predicted_limit(regime, RootPolicy.UNIFORM).build(radius, p["mass_tol"])
    out = []
    if failures < reps:
        tv = tv_distance(_dist_from_counts(_merge_counts(parts)), ref)
        out.append(ReportRow("NONCOMPLEX_LIMIT", prm, "tv_vs_GW(%g)" % regime.limit_c, tv, 0.0, p["tolerance"], "abs<", seed))
    out.extend(_budget_rows("NONCOMPLEX_LIMIT", prm, failures, reps, seed))
    return out


def _complexpart_replicate(args):
    seed, stream, per_edge, q, radius, roots = args
    g = sample_complexpart(theta_core(per_edge), q, derive_seed(seed, stream))
    return empirical_dist([g], RootPolicy.UNIFORM, radius, root_stream(seed, stream), roots=roots).counts


def run_complexpart_limit(p: dict, seed: int, threads: int) -> list[ReportRow]:
    q, radius, reps, per_edge = p["q"], p["radius"], p["replicates"], p["per_edge"]
    jobs = [(seed, i, per_edge, q, radius, p["roots"]) for i in range(reps)]
    emp = _dist_from_counts(_merge_counts(_pmap(_complexpart_replicate, jobs, threads)))
    ref = sk_reference_for_seed(1, radius, p["reference_draws"], seed)
    core_n = theta_core(per_edge).n
    prm = _params(core_vertices=core_n, q=q, radius=radius, samples=reps, roots=p["roots"], ref_draws=p["reference_draws"])
    return [ReportRow("COMPLEX_PART_LIMIT", prm, "tv_vs_SK(1)", tv_distance(emp, ref), 0.0, p["tolerance"], "abs<", seed)]


def _core_kernel_replicate(args):
    seed, stream, k, max_tries, radius = args
    try:
        g = sample_core_given_kernel(k4_kernel(), k, max_tries, derive_seed(seed, stream))
    except BudgetError:
        return None
    r = root_stream(seed, stream)
    u = empirical_dist([g], RootPolicy.UNIFORM, radius, r).counts
    kv = empirical_dist([g], RootPolicy.KERNEL, radius, r).counts
    return u, kv


def run_core_kernel_limit(p: dict, seed: int, threads: int) -> list[ReportRow]:
    k, radius, reps = p["k"], p["radius"], p["replicates"]
    jobs = [(seed, i, k, p["max_tries"], radius) for i in range(reps)]
    parts = _pmap(_core_kernel_replicate, jobs, threads)
    ok = [x for x in parts if x is not None]
    uni = _merge_counts(u for u, _ in ok)
    ker = _merge_counts(kv for _, kv in ok)
    two, three = ray_code(2, radius), ray_code(3, radius)
    prm = _params(kernel="K4", k=k, radius=radius, samples=reps)
    out = []
    if ok:
        out.append(ReportRow("CORE_KERNEL_LIMIT", prm + ";policy=uniform", "freq_2_ray_ball", uni[two] / len(ok), p["uniform_min"], 0.0, ">=", seed))
        out.append(ReportRow("CORE_KERNEL_LIMIT", prm + ";policy=kernel", "freq_3_ray_ball", ker[three] / len(ok), p["kernel_min"], 0.0, ">=", seed))
    out.extend(_budget_rows("CORE_KERNEL_LIMIT", prm, reps - len(ok), reps, seed))
    return out


def _subdivision_replicate(args):
    seed, stream, k, max_tries = args
    try:
        g = sample_core_given_kernel(k4_kernel(), k, max_tries, derive_seed(seed, stream))
    except BudgetError:
        return None
    kernel, kmap, _, sub = kernel_of(g)
    for i, (a, b) in enumerate(kernel.edges):
        if {kmap[a], kmap[b]} == {1, 2}:
            return sub[i]
    raise ContractViolation("kernel edge {1, 2} missing")


def run_subdivision(p: dict, seed: int, threads: int) -> list[ReportRow]:
    ks, reps = p["ks"], p["replicates"]
    jobs = [(seed, j * reps + i, k, p["max_tries"]) for j, k in enumerate(ks) for i in range(reps)]
    res = _pmap(_subdivision_replicate, jobs, threads)
    out = []
    meds = []
    e = k4_kernel().m
    for j, k in enumerate(ks):
        vals = [x for x in res[j * reps : (j + 1) * reps] if x is not None]
        med = float(median(vals)) if vals else float("nan")
        meds.append(med)
        last = j == len(ks) - 1
        prm = _params(kernel="K4", edge="1-2", k=k, samples=reps)
        out.append(ReportRow("SUBDIVISION", prm, "median_subdivision", med, k / e, p["factor"], "ratio" if last else "info", seed))
        out.extend(_budget_rows("SUBDIVISION", prm, reps - len(vals), reps, seed))
    inc = float(all(a < b for a, b in zip(meds, meds[1:])))
    out.append(ReportRow("SUBDIVISION", _params(ks="/".join(map(str, ks))), "median_strictly_increasing", inc, 1.0, 0.0, ">=", seed))
    return out


def _tree_distance_replicate(args) -> int:
    seed, stream, n = args
    rng = derive_seed(seed, stream)
    t = sample_cayley_tree(n, rng)
    r1, r2 = (int(x) for x in rng.integers(1, n + 1, size=2))
    return distance(t, r1, r2)


def aldous_broder_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform labelled tree as the first-entrance tree of a walk on K_n."""
    cur = int(rng.integers(1, n + 1))
    seen = {cur}
    edges = []
    while len(seen) < n:
        steps = rng.integers(1, n, size=4 * n).tolist()
        for s in steps:
            nxt = s if s < cur else s + 1  # uniform over the other n - 1 vertices
            if nxt not in seen:
                seen.add(nxt)
                edges.append((cur, nxt))
            cur = nxt
            if len(seen) == n:
                break
    return Graph.from_edges(n, edges)


def _bfs_distance(g: Graph, a: int, b: int) -> int:
    adj = g.adj
    dist = {a: 0}
    frontier = [a]
    while frontier and b not in dist:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist[b]


def _oracle_distance_replicate(args) -> int:
    seed, index, n = args
    rng = reference_stream(seed, index)
    t = aldous_broder_tree(n, rng)
    r1, r2 = (int(x) for x in rng.integers(1, n + 1, size=2))
    return _bfs_distance(t, r1, r2)


def run_tree_distance(p: dict, seed: int, threads: int) -> list[ReportRow]:
    n, reps, n_or, reps_or = p["n"], p["replicates"], p["oracle_n"], p["oracle_replicates"]
    lo, hi = p["window"]
    centre, half = (lo + hi) / 2, (hi - lo) / 2
    orc = _pmap(_oracle_distance_replicate, [(seed, i, n_or) for i in range(reps_or)], threads)
    d = _pmap(_tree_distance_replicate, [(seed, i, n) for i in range(reps)], threads)
    thr = n ** (1 / 3)
    frac = sum(1 for x in d if x > thr) / reps
    return [
        ReportRow("TREE_DISTANCE", _params(n=n_or, draws=reps_or, method="walk-oracle"), "median_over_sqrt_n",
                  median(orc) / sqrt(n_or), centre, half, "within", seed),
        ReportRow("TREE_DISTANCE", _params(n=n, draws=reps), "fraction_above_cuberoot_n", frac, p["fraction_min"], 0.0, ">=", seed),
        ReportRow("TREE_DISTANCE", _params(n=n, draws=reps), "median_over_sqrt_n", median(d) / sqrt(n), centre, half, "within", seed),
    ]


def _all_labelled_trees(n: int) -> list[frozenset]:
    return all_trees(n)


def _code_of_tree_ball(g: Graph, root: int, radius: int) -> bytes:
    return bytes(ball_code(ball(g, root, radius)))


def cayley_root_ball_law(n: int, radius: int) -> dict[bytes, Fraction]:
    """Exact law of the radius-``radius`` root ball of a uniform rooted labelled tree."""
    law: dict[bytes, Fraction] = {}
    trees = _all_labelled_trees(n)
    w = Fraction(1, len(trees) * n)
    for es in trees:
        g = Graph.from_edges(n, es)
        for r in range(1, n + 1):
            c = _code_of_tree_ball(g, r, radius)
            law[c] = law.get(c, 0) + w
    return law


def _truncate(t: PlaneTree, radius: int) -> PlaneTree:
    ch = t.children()
    counts = []
    level = [0]
    for _ in range(radius):
        nxt = []
        for x in level:
            counts.append(len(ch[x]))
            nxt.extend(ch[x])
        level = nxt
        if not level:
            break
    return PlaneTree(tuple(counts), radius)


def gw_conditioned_ball_law(n: int, radius: int) -> dict[bytes, Fraction]:
    """Exact ball law of GW(1) conditioned on total size ``n``.

    A plane tree with child counts d_i has probability prod e^{-1}/d_i!; on a
    fixed size the e^{-n} factor cancels, leaving weights prod 1/d_i!.
    """
    weights: dict[bytes, Fraction] = {}
    for t in plane_trees(n, n):
        w = Fraction(1)
        for d in t.child_counts:
            w /= factorial(d)
        c = _truncate(t, radius).code()
        weights[c] = weights.get(c, 0) + w
    z = sum(weights.values())
    return {c: w / z for c, w in weights.items()}


def run_gw_conditioning(p: dict, seed: int, threads: int) -> list[ReportRow]:
    n = p["n"]
    out = []
    for radius in p["radii"]:
        a = cayley_root_ball_law(n, radius)
        b = gw_conditioned_ball_law(n, radius)
        diff = max(abs(float(a.get(c, 0) - b.get(c, 0))) for c in set(a) | set(b))
        prm = _params(n=n, radius=radius, codes=len(set(a) | set(b)))
        out.append(ReportRow("GW_CONDITIONING", prm, "max_abs_diff", diff, 0.0, p["tolerance"], "abs<=", seed))
    return out


def _planar_vs_gnm_replicate(args):
    seed, stream, n, m, radius, budget, planar = args
    rng = derive_seed(seed, stream)
    try:
        g = sample_planar(n, m, "rejection", budget, rng) if planar else sample_gnm(n, m, rng)
    except BudgetError:
        return None
    return empirical_dist([g], RootPolicy.UNIFORM, radius, root_stream(seed, stream), roots="all").counts


def run_planar_regime_i(p: dict, seed: int, threads: int) -> list[ReportRow]:
    n, m, radius, reps = p["n"], p["m"], p["radius"], p["replicates"]
    pj = [(seed, i, n, m, radius, p["max_tries"], True) for i in range(reps)]
    gj = [(seed, reps + i, n, m, radius, p["max_tries"], False) for i in range(reps)]
    pl = _pmap(_planar_vs_gnm_replicate, pj, threads)
    gn = _pmap(_planar_vs_gnm_replicate, gj, threads)
    failures = sum(1 for x in pl if x is None)
    prm = _params(n=n, m=m, radius=radius, samples=reps, roots="all")
    out = []
    if failures < reps:
        tv = tv_distance(_dist_from_counts(_merge_counts(pl)), _dist_from_counts(_merge_counts(gn)))
        out.append(ReportRow("PLANAR_REGIME_I", prm, "tv_planar_vs_gnm", tv, 0.0, p["tolerance"], "abs<", seed))
    out.extend(_budget_rows("PLANAR_REGIME_I", prm, failures, reps, seed))
    return out


def run_mixture(p: dict, seed: int, threads: int) -> list[ReportRow]:
    radius, N, tol_mass = p["radius"], p["reference_draws"], p["mass_tol"]
    a = p["a"]
    sk = sk_reference_for_seed(1, radius, N, seed)
    gw = gw_ball_reference(1, radius, tol_mass)
    mix = mixture(a, sk, gw)
    codes = set(sk.mass) | set(gw.mass)
    pointwise = max(abs(mix.mass.get(c, 0.0) - (a * sk.mass.get(c, 0.0) + (1 - a) * gw.mass.get(c, 0.0))) for c in codes)
    support = float(set(mix.mass) != codes)
    regime = RegimeSpec("III", 1 + a)
    recipe = predicted_limit(regime, RootPolicy.UNIFORM)
    built = recipe.build(radius, tol_mass, N, seed)
    inst = max(abs(built.mass.get(c, 0.0) - mix.mass.get(c, 0.0)) for c in set(built.mass) | set(mix.mass))
    inst = max(inst, abs(built.leftover - mix.leftover))
    prm = _params(a=a, radius=radius, sk_draws=N, mass_tol=tol_mass)
    return [
        ReportRow("MIXTURE", prm, "max_pointwise_diff", pointwise, 0.0, 0.0, "abs<=", seed),
        ReportRow("MIXTURE", prm, "support_mismatch", support, 0.0, 0.0, "abs<=", seed),
        ReportRow("MIXTURE", prm + f";recipe={recipe}", "recipe_vs_mixture_max_diff", inst, 0.0, 0.0, "abs<=", seed),
    ]


def run_planar_structure(p: dict, seed: int, threads: int) -> list[ReportRow]:
    n, m = p["n"], p["m"]
    burn, samples, thin = p["burn_in"], p["replicates"], p["thin"]
    chain = make_chain(n, m, derive_seed(seed, 0))
    chain.run(burn)
    fr = []
    for _ in range(samples):
        chain.run(thin)
        fr.append(len(components(chain.graph())[0]) / n)
    mean = sum(fr) / len(fr)
    prm = _params(n=n, m=m, burn_in=burn, samples=samples, thin=thin, method="mcmc")
    note = "approximate: edge-swap chain, mixing not established"
    return [
        ReportRow("PLANAR_STRUCTURE", prm, "mean_vL_over_n", mean, 2 * m / n - 1, p["tolerance"], "within", seed, note),
        ReportRow("PLANAR_STRUCTURE", prm, "acceptance_rate", chain.accepted / chain.proposals, 0.0, 0.0, "info", seed),
    ]


def _regime_replicate(args):
    seed, stream, n, m, radius, policy, method, budget, roots = args
    rng = derive_seed(seed, stream)
    try:
        if method == "gnm":
            g = sample_gnm(n, m, rng)
        else:
            g = sample_planar(n, m, method, budget, rng)
    except BudgetError:
        return None
    try:
        return empirical_dist([g], policy, radius, root_stream(seed, stream), roots=roots).counts
    except LocalLimError:
        return Counter()


def run_regime_limit(p: dict, seed: int, threads: int) -> list[ReportRow]:
    reg = p["regime"]
    if not isinstance(reg, dict) or "regime" not in reg:
        raise ConfigError("REGIME_LIMIT needs regime: {\"regime\": ..., \"c\": ...}")
    regime = RegimeSpec(reg["regime"], reg.get("c"))
    n, m = regime.instantiate(p["n"])
    policy = RootPolicy.parse(p["policy"])
    recipe = predicted_limit(regime, policy)
    ref = recipe.build(p["radius"], p["mass_tol"], p["reference_draws"], seed)
    jobs = [(seed, i, n, m, p["radius"], policy.value, p["method"], p["max_tries"], p["roots"]) for i in range(p["replicates"])]
    parts = _pmap(_regime_replicate, jobs, threads)
    failures = sum(1 for x in parts if x is None)
    counts = _merge_counts(parts)
    prm = _params(regime=regime.regime, c=regime.limit_c, n=n, m=m, policy=policy.value, method=p["method"], limit=str(recipe))
    out = []
    if counts:
        out.append(ReportRow("REGIME_LIMIT", prm, "tv_vs_predicted", tv_distance(_dist_from_counts(counts), ref), 0.0, p["tolerance"], "abs<", seed))
    out.extend(_budget_rows("REGIME_LIMIT", prm, failures, p["replicates"], seed))
    return out


SUITES: dict[str, Suite] = {
    "UNIFORMITY": Suite(run_uniformity, {"replicates": 100_000, "tolerance": 0.01, "max_tries": 1000, "cases": DEFAULT_UNIFORMITY_CASES}, "1"),
    "FOREST_UNIFORM": Suite(run_forest_uniform, {"n": 4, "t": 2, "replicates": 100_000, "tolerance": 0.01, "max_tries": 1}, "1"),
    "BOREL": Suite(run_borel, {"replicates": 1_000_000, "cap": 100_000, "kmax": 10, "chunk": 100_000, "tolerance": 0.005, "capped_max": 0.01}, "2"),
    "ER_CENSUS": Suite(run_er_census, {"n": 100_000, "m": None, "radius": 2, "replicates": 5, "min_prob": 0.01, "tolerance": 0.01}, "3"),
    "NONCOMPLEX_LIMIT": Suite(run_noncomplex_limit, {"n": 2000, "m": 1000, "radius": 2, "replicates": 200, "max_tries": 1000, "roots": "all", "mass_tol": 1e-4, "tolerance": 0.05}, "4"),
    "COMPLEX_PART_LIMIT": Suite(run_complexpart_limit, {"q": 10_000, "per_edge": 6, "radius": 2, "replicates": 500, "roots": 200, "reference_draws": 1_000_000, "tolerance": 0.05}, "5"),
    "CORE_KERNEL_LIMIT": Suite(run_core_kernel_limit, {"k": 10_000, "radius": 3, "replicates": 1000, "max_tries": 1000, "uniform_min": 0.99, "kernel_min": 0.95}, "6"),
    "SUBDIVISION": Suite(run_subdivision, {"ks": [100, 1000, 10_000], "replicates": 200, "max_tries": 1000, "factor": 2.0}, "7"),
    "TREE_DISTANCE": Suite(run_tree_distance, {"n": 10_000, "replicates": 1000, "oracle_n": 1000, "oracle_replicates": 1000, "window": [0.8, 1.6], "fraction_min": 0.99}, "8"),
    "GW_CONDITIONING": Suite(run_gw_conditioning, {"n": 5, "radii": [1, 2, 3, 4], "tolerance": 1e-9}, "9"),
    "PLANAR_REGIME_I": Suite(run_planar_regime_i, {"n": 30, "m": 15, "radius": 1, "replicates": 500, "max_tries": 1000, "tolerance": 0.05}, "10"),
    "MIXTURE": Suite(run_mixture, {"a": 0.5, "radius": 2, "reference_draws": 1_000_000, "mass_tol": 1e-4}, "11"),
    "PLANAR_STRUCTURE": Suite(run_planar_structure, {"n": 400, "m": 300, "burn_in": 1_000_000, "replicates": 100, "thin": 2000, "tolerance": 0.15}, "12"),
    "REGIME_LIMIT": Suite(run_regime_limit, {"n": 200, "regime": None, "policy": "uniform", "method": "gnm", "radius": 2, "replicates": 50, "roots": "all", "max_tries": 1000, "mass_tol": 1e-4, "reference_draws": 100_000, "tolerance": 0.05}, "-"),
}


# ---------------------------------------------------------------------------
# running


@dataclass
class SuiteResult:
    config: ExperimentConfig
    rows: list[ReportRow]
    runtime: float
    started: str

    @property
    def csv(self) -> str:
        return rows_to_csv(self.rows)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def budget_failed(self) -> bool:
        return any(not r.passed and r.note.startswith("budget:") for r in self.rows)

    def manifest(self) -> dict:
        return {
            "config_hash": self.config.content_hash(),
            "version": __version__,
            "started": self.started,
            "runtime_s": round(self.runtime, 3),
            "config": asdict(self.config),
            "resolved": self.config.resolved(),
            "columns": list(CSV_COLUMNS),
            "rows": [dict(zip(CSV_COLUMNS, r.csv_fields()), runtime=round(r.runtime, 3)) for r in self.rows],
        }


def run_suite(cfg: ExperimentConfig) -> SuiteResult:
    suite = SUITES[cfg.suite]
    params = cfg.resolved()
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    try:
        rows = suite.run(params, cfg.seed, worker_count(cfg))
    except BudgetError as exc:
        rows = [ReportRow(cfg.suite, _params(), "suite", float("nan"), 0.0, 0.0, "abs<=", cfg.seed, f"budget: {exc}")]
    except (ContractViolation, KeyError, TypeError) as exc:
        raise ConfigError(f"suite {cfg.suite} rejected its parameters: {exc}") from exc
    runtime = time.perf_counter() - t0
    for r in rows:
        r.runtime = runtime
    return SuiteResult(cfg, rows, runtime, started)


def write_outputs(res: SuiteResult, csv_path: str | None = None, manifest_path: str | None = None) -> None:
    csv_path = csv_path or res.config.output.get("csv")
    manifest_path = manifest_path or res.config.output.get("manifest")
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            fh.write(res.csv)
    if manifest_path:
        with open(manifest_path, "w") as fh:
            json.dump(res.manifest(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def manifest_to_csv(doc: dict) -> str:
    cols = doc.get("columns", list(CSV_COLUMNS))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in doc["rows"]:
        w.writerow([row[c] for c in cols])
    return buf.getvalue()
