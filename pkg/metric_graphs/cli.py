# metric_graphs/cli.py
"""
Command-line front end.

    python -m metric_graphs build cs --input metadata/four_point_matrix.csv --format matrix-csv
    python -m metric_graphs classify --fixture right_angle --norm l1
    python -m metric_graphs perturb --input metadata/unit_square.csv --epsilon 0.01 --seed 7 --out out.csv
    python -m metric_graphs stats --model uniform:3:1 --m 20 --trials 100 --out stats.csv
    python -m metric_graphs inspect --fixture grid_3x3
    python -m metric_graphs bottleneck --input a.csv --other b.csv --bruteforce

Artifacts go to --out, or to stdout when --out is absent. One-line summaries go to
stdout when the artifact went to a file and to stderr otherwise, so stdout never mixes
the two. Exit codes: 0 ok, 2 input parse, 3 metric validation, 4 infeasible request,
5 internal invariant.
"""
import argparse
import io
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import pandas as pd
from tqdm import tqdm

from . import settings
from .constructions import build_cs, build_mc, build_sigma, relations_report
from .exceptions import InputParseError, InternalInvariantViolation, MetricGraphsError, MissingCoordinates
from .fixtures import fixture_path, load_fixture_index
from .graphs import is_connected, is_tree
from .metrics import (
    FiniteMetricSpace,
    Norm,
    distance_set,
    format_real,
    from_points,
    is_distance_separated,
    mesh_delta,
    tied_pairs,
)
from .serializers import (
    BottleneckSchema,
    InspectSchema,
    PerturbSchema,
    RunConfig,
    dump_json,
    format_graph,
    read_space,
    relations_schema,
    space_schema,
    trace_schema,
    write_points_csv,
    write_text,
)
from .spaces import bottleneck_bruteforce, bottleneck_distance, parse_model, perturb_to_ds, sample_cloud

logger = logging.getLogger(__name__)

STATS_COLUMNS = [
    "trial",
    "seed",
    "m",
    "cs_edges",
    "mc_edges",
    "sigma_edges",
    "cs_is_tree",
    "distance_separated",
    "class",
    "mc_edges_per_vertex",
]


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------
def _summary(text: str, config: RunConfig) -> None:
    print(text, file=sys.stdout if config.out is not None else sys.stderr)


def _load(config: RunConfig, args: argparse.Namespace) -> FiniteMetricSpace:
    fixture = getattr(args, "fixture", None)
    if fixture:
        path = fixture_path(fixture)
        fmt = load_fixture_index()[fixture].get("format", "points-csv")
    else:
        if config.input is None:
            raise InputParseError("no input given; pass --input or --fixture")
        path, fmt = config.input, config.format
    M = read_space(path, fmt, config.norm, config.tolerance())
    logger.info("loaded %s points from %s (%s)", M.size, path, fmt)
    return M


def _options(args: argparse.Namespace) -> Dict:
    options = dict(vars(args))
    if options.get("rel_tol") is not None:
        options["eq_tol"] = options["rel_tol"]
        options["scale_mode"] = "relative"
    elif options.get("eq_tol") is not None:
        options["scale_mode"] = "absolute"
    if options.get("seed") is None:
        options["seed"] = os.getenv("METRIC_GRAPHS_SEED", settings.DEFAULT_SEED)
    return options


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_build(args: argparse.Namespace, config: RunConfig) -> int:
    M = _load(config, args)
    kind = args.kind
    if kind == "cs":
        trace = build_cs(M)
        graph = trace.final_graph
        trace_path = args.trace
        if trace_path is None and config.out is not None:
            trace_path = config.out.with_name(config.out.name + ".trace.json")
        if trace_path is not None:
            write_text(dump_json(trace_schema(trace)), trace_path)
        else:
            logger.info("no --out or --trace given; CS trace not written")
        summary = f"cs: {graph.edge_count} edges in {trace.step_count} step(s), tree={is_tree(graph)}"
    elif kind == "mc":
        graph, cut = build_mc(M)
        summary = f"cut value {format_real(cut.value)} (index {cut.index})"
    else:
        graph = build_sigma(M)
        summary = f"sigma: {graph.edge_count} edges"

    if not is_connected(graph):
        raise InternalInvariantViolation(f"{kind} graph on {M.size} points is disconnected")
    write_text(format_graph(graph, config.emit, kind), config.out)
    _summary(summary, config)
    return 0


def cmd_classify(args: argparse.Namespace, config: RunConfig) -> int:
    M = _load(config, args)
    report = relations_report(M)
    write_text(dump_json(relations_schema(report)), config.out)
    rel = report.relations
    _summary(
        f"{report.intrinsic.describe()}; |CS|={report.cs.edge_count} |MC|={report.mc.edge_count} "
        f"|Sigma|={report.sigma.edge_count}; CS = Sigma∩MC: {rel.cs_equals_sigma_cap_mc}",
        config,
    )
    return 0


def cmd_perturb(args: argparse.Namespace, config: RunConfig) -> int:
    if config.epsilon is None:
        raise InputParseError("perturb needs --epsilon")
    M = _load(config, args)
    if M.cloud is None:
        raise MissingCoordinates("perturb needs point coordinates, not a distance matrix")
    report = perturb_to_ds(M.cloud, config.epsilon, config.seed, config.max_attempts, config.tolerance())

    buf = io.StringIO()
    write_points_csv(report.output, buf)
    write_text(buf.getvalue(), config.out)

    separated = from_points(report.output, config.tolerance())
    schema = PerturbSchema(
        m=report.output.size,
        epsilon=report.epsilon,
        seed=report.seed,
        attempts=report.attempts,
        displacement=report.displacement,
        mesh=mesh_delta(distance_set(separated)),
        distance_separated=is_distance_separated(separated),
    )
    if args.report is not None:
        write_text(dump_json(schema), args.report)
    _summary(
        f"distance separated after {report.attempts} attempt(s); "
        f"max displacement {format_real(report.displacement)} < epsilon/2 = {format_real(report.epsilon / 2)}",
        config,
    )
    return 0


def cmd_stats(args: argparse.Namespace, config: RunConfig) -> int:
    if config.model is None or config.m is None:
        raise InputParseError("stats needs --model and --m")
    model = parse_model(config.model)
    tolerance = config.tolerance()
    rows: List[Dict] = []
    for trial in tqdm(range(config.trials), desc="stats", file=sys.stderr, disable=not settings.SHOW_PROGRESS):
        seed = config.seed + trial
        M = from_points(sample_cloud(model, config.m, seed, config.norm), tolerance)
        report = relations_report(M)
        rows.append({
            "trial": trial,
            "seed": seed,
            "m": M.size,
            "cs_edges": report.cs.edge_count,
            "mc_edges": report.mc.edge_count,
            "sigma_edges": report.sigma.edge_count,
            "cs_is_tree": is_tree(report.cs),
            "distance_separated": is_distance_separated(M),
            "class": report.intrinsic.label.value,
            "mc_edges_per_vertex": report.mc.edge_count / M.size,
        })

    frame = pd.DataFrame(rows, columns=STATS_COLUMNS)
    aggregate = {
        "trial": "all",
        "seed": config.seed,
        "m": config.m,
        "cs_edges": frame["cs_edges"].mean(),
        "mc_edges": frame["mc_edges"].mean(),
        "sigma_edges": frame["sigma_edges"].mean(),
        "cs_is_tree": frame["cs_is_tree"].mean(),
        "distance_separated": frame["distance_separated"].mean(),
        "class": frame["class"].mode().iloc[0],
        "mc_edges_per_vertex": frame["mc_edges_per_vertex"].mean(),
    }
    table = pd.concat([frame.astype(object), pd.DataFrame([aggregate], columns=STATS_COLUMNS)], ignore_index=True)
    buf = io.StringIO()
    table.to_csv(buf, index=False, float_format="%.17g", lineterminator="\n")
    write_text(buf.getvalue(), config.out)

    trees = int(frame["cs_is_tree"].sum())
    _summary(
        f"{model.describe()} m={config.m}: CS tree in {trees}/{config.trials} trials, "
        f"mean |E(MC)|/m = {aggregate['mc_edges_per_vertex']:.3f}",
        config,
    )
    return 0


def cmd_inspect(args: argparse.Namespace, config: RunConfig) -> int:
    M = _load(config, args)
    ds = distance_set(M)
    ties = tied_pairs(M)
    schema = InspectSchema(
        m=M.size,
        values=list(ds.values),
        multiplicity=list(ds.multiplicity),
        mesh=mesh_delta(ds),
        distance_separated=not ties,
        ties=ties,
        space=space_schema(M),
    )
    write_text(dump_json(schema), config.out)
    _summary(
        f"m={M.size}: {len(ds.positive)} distinct positive distance(s), mesh {format_real(schema.mesh)}, "
        f"distance separated={not ties}, {len(ties)} tie link(s)",
        config,
    )
    return 0


def cmd_bottleneck(args: argparse.Namespace, config: RunConfig) -> int:
    A = _load(config, args)
    B = read_space(args.other, config.format, config.norm, config.tolerance())
    distance, f = bottleneck_distance(A, B)
    brute = None
    if args.bruteforce:
        brute = bottleneck_bruteforce(A, B)
        if brute != distance:
            raise InternalInvariantViolation(f"matching gave {distance!r}, exhaustive search gave {brute!r}")
    write_text(dump_json(BottleneckSchema(m=A.size, distance=distance, bijection=list(f.forward), bruteforce=brute)), config.out)
    _summary(f"d_B = {format_real(distance)}", config)
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "build": cmd_build,
    "classify": cmd_classify,
    "perturb": cmd_perturb,
    "stats": cmd_stats,
    "inspect": cmd_inspect,
    "bottleneck": cmd_bottleneck,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------
def _add_tolerance(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--eq-tol", type=float, help="absolute equality tolerance for distances")
    group.add_argument("--rel-tol", type=float, help="equality tolerance relative to the diameter")


def _add_input(p: argparse.ArgumentParser, allow_fixture: bool = True) -> None:
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", "-i", type=Path, help="input file")
    if allow_fixture:
        source.add_argument("--fixture", help="a bundled example from metadata/fixtures.json")
    p.add_argument("--format", choices=["points-csv", "matrix-csv", "space-json"], default="points-csv")
    p.add_argument("--norm", choices=[n.value for n in Norm], default=Norm.L2.value)
    _add_tolerance(p)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", "-o", type=Path, help="artifact path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metric_graphs", description="Graphs induced by finite metric spaces.")
    parser.add_argument("--log-level", default=None, help="logging level (default: METRIC_GRAPHS_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build CS, MC or Sigma")
    p.add_argument("kind", choices=["cs", "mc", "sigma"])
    _add_input(p)
    _add_output(p)
    p.add_argument("--emit", choices=["edges", "dot", "json"], default="edges")
    p.add_argument("--trace", type=Path, help="where to write the CS trace (default: <out>.trace.json)")

    p = sub.add_parser("classify", help="intrinsic class and the relations among CS, MC and Sigma")
    _add_input(p)
    _add_output(p)

    p = sub.add_parser("perturb", help="move points by < epsilon/2 into distance separated position")
    _add_input(p)
    _add_output(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed (default: METRIC_GRAPHS_SEED)")
    p.add_argument("--max-attempts", type=int)
    p.add_argument("--report", type=Path, help="where to write the JSON perturbation report")

    p = sub.add_parser("stats", help="ensemble statistics over sampled clouds (CSV)")
    p.add_argument("--model", required=True, help="uniform:N:side | grid:N:k | jittered:N:k:sigma")
    p.add_argument("--m", type=int, required=True, help="points per trial")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, help="base seed; trial t uses seed + t")
    p.add_argument("--norm", choices=[n.value for n in Norm], default=Norm.L2.value)
    _add_tolerance(p)
    _add_output(p)

    p = sub.add_parser("inspect", help="distance set, mesh, ties and the canonical JSON dump")
    _add_input(p)
    _add_output(p)

    p = sub.add_parser("bottleneck", help="bottleneck distance between two equal-size clouds")
    _add_input(p, allow_fixture=False)
    p.add_argument("--other", type=Path, required=True)
    p.add_argument("--bruteforce", action="store_true", help="cross-check against all m! bijections")
    _add_output(p)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=(args.log_level or settings.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = RunConfig.from_options(_options(args))
        return COMMANDS[args.command](args, config)
    except MetricGraphsError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except Exception:
        logger.exception("unexpected failure in %s", args.command)
        raise
