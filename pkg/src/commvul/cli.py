"""Command-line front end: ``commvul {detect,analyze,sensitivity,compare}``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings as pywarnings
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .community import PartitionError, detect_communities, load_partition, modularity
from .graph import Graph, GraphFormatError, load_adjacency_csv, load_edge_list
from .report import RunManifest, render, render_partition, render_sobol, render_vulnerability
from .sensitivity import ESTIMATORS, DegenerateRangeError, SamplePlan, sobol_indices
from .vulnerability import (AGGREGATES, Conventions, WeightVector, community_features,
                            proposed_vulnerability, vulnerability_chain)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_WARNINGS = 3


class InputError(Exception):
    pass


def _common(suppress: bool) -> argparse.ArgumentParser:
    # the same flags are accepted before and after the subcommand; the copy
    # attached to subparsers suppresses defaults so it never overrides the first
    kw = {"argument_default": argparse.SUPPRESS} if suppress else {}
    p = argparse.ArgumentParser(add_help=False, **kw)

    def d(value):
        return {} if suppress else {"default": value}

    p.add_argument("--format", choices=("csv", "json", "md"), **d(None),
                   help="output format (default: csv; json for detect)")
    p.add_argument("-o", "--output", **d(None), help="write to this file instead of stdout")
    p.add_argument("--partition", **d(None), help="partition file; communities are detected if absent")
    p.add_argument("--n-communities", type=int, **d(None),
                   help="stop detection at this many communities")
    p.add_argument("--weights", nargs=4, type=float, metavar=("ALPHA", "BETA", "LAMBDA", "ETA"),
                   **d([1.0, 1.0, 1.0, 1.0]))
    scope = p.add_mutually_exclusive_group()
    scope.add_argument("--intra-degree", dest="degree_scope", action="store_const", const="intra",
                       **d("intra"), help="community-internal degrees and betweenness (default)")
    scope.add_argument("--global-degree", dest="degree_scope", action="store_const", const="global",
                       help="network-wide degrees and betweenness")
    p.add_argument("--ordered-pairs", action="store_true", **d(False),
                   help="count both orientations of each pair in betweenness")
    p.add_argument("--aggregate", choices=AGGREGATES, **d("divergence"),
                   help="how pairwise divergences become the external score")
    p.add_argument("--seed", type=int, **d(0))
    p.add_argument("--samples", type=int, **d(10000), help="base sample size N")
    p.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), **d([0.2, 5.0]))
    p.add_argument("--estimator", choices=ESTIMATORS, **d("jansen"))
    p.add_argument("--bootstrap", type=int, **d(200), help="bootstrap resamples for half-widths")
    p.add_argument("--quasi-random", action="store_true", **d(False),
                   help="scrambled Sobol' points instead of pseudo-random draws")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="commvul", parents=[_common(False)],
                                     description="Entropy-based vulnerability of network communities.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _common(True)
    for name, help_ in (
        ("detect", "greedy modularity communities and the merge trace"),
        ("analyze", "features and vulnerability scores per community"),
        ("sensitivity", "Sobol' indices of vulnerability with respect to the weights"),
        ("compare", "classical versus proposed vulnerability rankings"),
    ):
        sp = sub.add_parser(name, parents=[shared], help=help_)
        sp.add_argument("graph", help="edge list (or .csv adjacency matrix)")
        if name == "detect":
            sp.add_argument("--trace", help="also write the merge trace JSON here")
            sp.add_argument("--save-partition", help="also write the partition file here")
        if name == "compare":
            sp.add_argument("--reference", help="CSV with community,value columns to rank alongside")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_graph(path: str, notes: List[str]) -> Graph:
    text = _read(path)
    if path.lower().endswith(".csv"):
        return load_adjacency_csv(text)
    result = load_edge_list(text)
    if result.self_loops:
        notes.append(f"ignored {result.self_loops} self-loop(s)")
    if result.duplicates:
        notes.append(f"merged {result.duplicates} duplicate edge(s)")
    if not result.graph.is_connected():
        notes.append("graph is disconnected; pairs across components have no shortest path")
    return result.graph


def _partition(args, g: Graph, manifest: RunManifest):
    if args.partition:
        manifest.add_input("partition", args.partition)
        manifest.partition_source = "loaded"
        return load_partition(_read(args.partition), g), None
    manifest.partition_source = "detected"
    partition, trace = detect_communities(g, n_communities=args.n_communities)
    manifest.extra["modularity"] = modularity(g, partition)
    return partition, trace


def _conventions(args) -> Conventions:
    return Conventions(args.degree_scope, args.ordered_pairs, args.aggregate)


def _emit(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _features(args, manifest, notes):
    g = _load_graph(args.graph, notes)
    manifest.add_input("graph", args.graph)
    partition, _ = _partition(args, g, manifest)
    conventions = _conventions(args)
    manifest.conventions = conventions.to_dict()
    with pywarnings.catch_warnings(record=True) as caught:
        pywarnings.simplefilter("always")
        features, _ = community_features(g, partition, conventions, notes)
    notes.extend(str(w.message) for w in caught)
    return g, partition, features


def cmd_detect(args, notes) -> None:
    g = _load_graph(args.graph, notes)
    manifest = RunManifest("detect")
    manifest.add_input("graph", args.graph)
    partition, trace = detect_communities(g, n_communities=args.n_communities)
    q = modularity(g, partition)
    fmt = args.format or "json"
    _emit(render_partition(partition, trace, q, manifest, fmt), args)
    if args.save_partition:
        Path(args.save_partition).write_text(partition.to_text(), encoding="utf-8")
    if args.trace:
        Path(args.trace).write_text(json.dumps({"manifest": manifest.to_dict(), **trace.to_dict()},
                                               indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"k = {partition.k}, Q = {q:.6f}", file=sys.stderr)


def cmd_analyze(args, notes) -> None:
    manifest = RunManifest("analyze")
    _, _, features = _features(args, manifest, notes)
    w = WeightVector(*args.weights)
    manifest.weights = w.to_dict()
    report = proposed_vulnerability(features, w)
    notes.extend(report.warnings)
    report.warnings[:] = list(notes)
    _emit(render_vulnerability(report, manifest, args.format or "csv"), args)


def cmd_sensitivity(args, notes) -> None:
    manifest = RunManifest("sensitivity")
    plan = SamplePlan.uniform(args.range[0], args.range[1], n_samples=args.samples, seed=args.seed,
                              estimator=args.estimator, n_bootstrap=args.bootstrap,
                              quasi_random=args.quasi_random)
    if args.range[0] == args.range[1]:
        raise DegenerateRangeError("a factor range has zero width; its indices are undefined")
    _, _, features = _features(args, manifest, notes)
    manifest.plan = plan.to_dict()
    report = sobol_indices(features, plan)
    notes.extend(report.warnings)
    report.warnings[:] = list(notes)
    _emit(render_sobol(report, manifest, args.format or "csv"), args)


def _read_reference(path: str) -> dict:
    values = {}
    rows = csv.reader(line for line in _read(path).splitlines() if line and not line.startswith("#"))
    for n, row in enumerate(rows, start=1):
        if len(row) < 2:
            raise InputError(f"{path}: row {n} needs community,value")
        try:
            values[int(row[0])] = float(row[1])
        except ValueError:
            if n == 1:
                continue  # header
            raise InputError(f"{path}: row {n} is not numeric") from None
    return values


def rank_correlation(a, b) -> Optional[float]:
    """Spearman correlation, or None when it is undefined (k < 3 or a constant ranking)."""
    from scipy.stats import spearmanr

    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if a.size < 3 or np.ptp(a) == 0 or np.ptp(b) == 0:
        return None
    rho = spearmanr(a, b)[0]
    return None if math.isnan(rho) else float(rho)


def cmd_compare(args, notes) -> None:
    manifest = RunManifest("compare")
    _, _, features = _features(args, manifest, notes)
    w = WeightVector(*args.weights)
    manifest.weights = w.to_dict()
    report = proposed_vulnerability(features, w)
    notes.extend(report.warnings)
    index = report.index
    proposed, _ = vulnerability_chain(report.rv, index)
    classical, _ = vulnerability_chain(report.r, index)
    rho = rank_correlation(report.r, report.rv)
    if rho is None:
        notes.append("rank correlation undefined (fewer than three communities or a constant ranking)")
    rows = [{"method": "classical", "chain": classical},
            {"method": "proposed", "chain": proposed}]
    payload = {"classical": classical, "proposed": proposed, "spearman_classical_proposed": rho,
               "relative_vulnerability": report.rv.tolist(), "classical_relative": report.r.tolist()}
    if args.reference:
        manifest.add_input("reference", args.reference)
        ref = _read_reference(args.reference)
        missing = [c for c in index if c not in ref]
        if missing:
            raise InputError(f"reference lacks communities {missing}")
        values = [ref[c] for c in index]
        chain, _ = vulnerability_chain(values, index)
        rows.append({"method": "reference", "chain": chain})
        payload["reference"] = chain
        payload["spearman_reference_proposed"] = rank_correlation(values, report.rv)
    payload["warnings"] = list(notes)
    lines = [f"Spearman (classical vs proposed): {'undefined' if rho is None else format(rho, '.4f')}"]
    lines += [f"Warning: {n}" for n in notes]
    _emit(render("Vulnerability ranking comparison (least to most vulnerable)", payload, rows,
                 manifest, args.format or "csv", lines), args)


COMMANDS = {"detect": cmd_detect, "analyze": cmd_analyze, "sensitivity": cmd_sensitivity,
            "compare": cmd_compare}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    notes: List[str] = []
    try:
        COMMANDS[args.command](args, notes)
    except (InputError, GraphFormatError, PartitionError, DegenerateRangeError, ValueError) as exc:
        print(f"commvul: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for n in notes:
        print(f"commvul: warning: {n}", file=sys.stderr)
    return EXIT_WARNINGS if notes else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
