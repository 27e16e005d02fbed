"""Command-line entry point.

Exit codes: 0 success / all rows passed, 1 some report row failed,
2 usage, input or configuration error, 3 sampling budget exhausted.
Data goes to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .decompose import StructureStats, decompose, structure_stats
from .errors import BudgetError, LocalLimError
from .experiments import ExperimentConfig, manifest_to_csv, run_suite, write_outputs
from .graphcore import Graph, format_graph, parse_graph, parse_multigraph
from .localstats import census, empirical_dist
from .rng import derive_seed, root_stream
from .samplers import (
    sample_cayley_tree,
    sample_complexpart,
    sample_core_given_kernel,
    sample_forest,
    sample_gnm,
    sample_gw_ball,
    sample_noncomplex,
    sample_planar,
    sample_skeleton_ball,
)
from .trees import PlaneTree

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

SAMPLERS = ("cayley", "forest", "gnm", "noncomplex", "complexpart", "core-given-kernel", "planar", "gw-ball", "skeleton-ball")


class UsageError(Exception):
    pass


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"sampler {args.sampler!r} needs --{name.replace('_', '-')}")


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _plane_tree_graph(t: PlaneTree) -> Graph:
    ch = t.children()
    return Graph.from_edges(len(ch), [(x + 1, y + 1) for x, ys in enumerate(ch) for y in ys])


def draw(args, rng) -> Graph:
    s = args.sampler
    if s == "cayley":
        _need(args, "n")
        return sample_cayley_tree(args.n, rng)
    if s == "forest":
        _need(args, "n", "t")
        return sample_forest(args.n, args.t, rng).graph
    if s == "gnm":
        _need(args, "n", "m")
        return sample_gnm(args.n, args.m, rng)
    if s == "noncomplex":
        _need(args, "n", "m")
        return sample_noncomplex(args.n, args.m, args.max_tries, rng)
    if s == "complexpart":
        _need(args, "core", "q")
        return sample_complexpart(parse_graph(_read(args.core)), args.q, rng)
    if s == "core-given-kernel":
        _need(args, "kernel", "k")
        return sample_core_given_kernel(parse_multigraph(_read(args.kernel)), args.k, args.max_tries, rng)
    if s == "planar":
        _need(args, "n", "m")
        return sample_planar(args.n, args.m, args.method, args.max_tries, rng)
    if s == "gw-ball":
        _need(args, "c", "radius")
        return _plane_tree_graph(sample_gw_ball(args.c, args.radius, rng))
    if s == "skeleton-ball":
        _need(args, "k", "radius")
        return sample_skeleton_ball(args.k, args.radius, rng).graph
    raise UsageError(f"unknown sampler {s!r}")


def _param_text(args) -> str:
    keys = ("n", "m", "t", "q", "k", "c", "radius", "core", "kernel")
    if args.sampler == "planar":
        keys += ("method", "max_tries")
    elif args.sampler in ("noncomplex", "core-given-kernel"):
        keys += ("max_tries",)
    return " ".join(f"{k}={getattr(args, k)}" for k in keys if getattr(args, k, None) is not None)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sample(args) -> int:
    g = draw(args, derive_seed(args.seed, args.stream))
    comments = [f"sampler={args.sampler}", f"params: {_param_text(args)}", f"seed={args.seed}", f"stream={args.stream}"]
    _emit(format_graph(g, comments), args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    g = parse_graph(_read(args.file))
    d = decompose(g)
    if args.json:
        _emit(d.to_json() + "\n", args.out)
    else:
        st = structure_stats(d)
        text = ",".join(StructureStats.FIELDS) + "\n" + ",".join(map(str, st.as_row())) + "\n"
        _emit(text, args.out)
    return EXIT_OK


def cmd_census(args) -> int:
    g = parse_graph(_read(args.file))
    t = PlaneTree.parse(args.tree)
    if t.radius != args.radius:
        raise UsageError(f"tree literal has radius {t.radius}, --radius is {args.radius}")
    _emit(f"{census(g, args.radius, t)}\n", args.out)
    return EXIT_OK


def cmd_dist(args) -> int:
    roots = args.roots if args.roots == "all" else int(args.roots)
    if os.path.isfile(args.source):
        graphs = [parse_graph(_read(args.source))]
        prov = {"file": args.source, "seed": args.seed}
    elif args.source in SAMPLERS:
        args.sampler = args.source
        graphs = (draw(args, derive_seed(args.seed, i)) for i in range(args.N))
        prov = {"sampler": args.source, "params": _param_text(args), "seed": args.seed, "N": args.N}
    else:
        raise UsageError(f"{args.source!r} is neither a file nor a sampler ({', '.join(SAMPLERS)})")
    dist = empirical_dist(graphs, args.policy, args.radius, lambda i: root_stream(args.seed, i), roots=roots, provenance=prov)
    if dist.skipped:
        print(f"skipped {dist.skipped} samples with an empty {args.policy} target set", file=sys.stderr)
    _emit(dist.to_json() + "\n" if args.json else dist.to_csv(), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(_read(args.config))
    res = run_suite(cfg)
    write_outputs(res, args.out, args.manifest)
    if not (args.out or cfg.output.get("csv")):
        sys.stdout.write(res.csv)
    failed = [r for r in res.rows if not r.passed]
    print(f"{cfg.suite}: {len(res.rows) - len(failed)}/{len(res.rows)} rows passed in {res.runtime:.1f}s", file=sys.stderr)
    if res.budget_failed:
        return EXIT_BUDGET
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_report(args) -> int:
    try:
        doc = json.loads(_read(args.manifest))
    except json.JSONDecodeError as exc:
        raise UsageError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "rows" not in doc:
        raise UsageError("manifest has no rows")
    text = manifest_to_csv(doc)
    _emit(text, args.out)
    failed = [r for r in doc["rows"] if r.get("pass") != "pass"]
    if any(str(r.get("note", "")).startswith("budget:") for r in failed):
        return EXIT_BUDGET
    return EXIT_FAIL if failed else EXIT_OK


def _sampler_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--t", type=int, help="number of forest roots")
    p.add_argument("--q", type=int, help="vertex count of the complex part")
    p.add_argument("--k", type=int, help="subdivision vertices, or skeleton rays")
    p.add_argument("--c", type=float, help="Poisson mean of the GW offspring law")
    p.add_argument("--core", help="edge-list file of the core")
    p.add_argument("--kernel", help="multigraph edge-list file of the kernel")
    p.add_argument("--method", choices=("rejection", "mcmc"), default="rejection")
    p.add_argument("--max-tries", type=int, default=10_000, help="rejection attempts, or mcmc proposals")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="locallim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"locallim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one graph and print it as an edge list")
    p.add_argument("sampler", choices=SAMPLERS)
    _sampler_options(p)
    p.add_argument("--radius", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("decompose", help="structure statistics of an edge-list file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="full decomposition instead of the CSV row")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("ball-census", help="count vertices whose ball is a given plane tree")
    p.add_argument("file")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--tree", required=True, help='plane tree literal "radius:d1,d2,..."')
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("dist", help="empirical ball-code distribution")
    p.add_argument("source", help="edge-list file or sampler name")
    _sampler_options(p)
    p.add_argument("--policy", default="uniform")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("-N", type=int, default=1, help="number of sampled graphs")
    p.add_argument("--roots", default="1", help='roots per graph, or "all"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("experiment", help="run a suite from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", help="CSV path (overrides the config)")
    p.add_argument("--manifest", help="manifest path (overrides the config)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="re-render the CSV stored in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, LocalLimError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
