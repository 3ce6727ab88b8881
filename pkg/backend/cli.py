"""
Command-line front end.

Exit codes: 0 success, 1 input error, 2 search space over the cap,
3 reference check failed (only with --check).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import config
from errors import ResilienceError, TooLargeError
from exact_solver import bnb_vat
from experiments import (
    attack_report,
    format_model_summary,
    run_measure_comparison,
    run_model_comparison,
)
from generators import gen_plod_from_degrees, generate
from graph_core import Graph, VertexSet, degree_sequence, read_edge_list, to_edge_list, write_edge_list
from graph_providers import DefaultGraphProvider
from heuristic_solver import optimize_vat
from measures import MeasureResult, brute_force_optimize, evaluate, search_space_size, twin_classes
from models import ExperimentSpec, GAConfig, GenSpec, GraphFamily, MeasureKind

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_TOO_LARGE = 2
EXIT_CHECK_FAILED = 3


def _int_list(raw: str) -> List[int]:
    try:
        return [int(tok) for tok in raw.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integers, got {raw!r}") from exc


def _write_record(result: MeasureResult, graph_id: str, out: Optional[str]) -> None:
    payload = result.to_record(graph_id).model_dump_json(indent=2)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(payload + "\n")
        print(f"Result saved to: {path}")
    else:
        print(payload)


def _summary(tag: str, result: MeasureResult) -> None:
    print(
        f"[{tag}] {result.kind.value} = {result.value} ({float(result.value):.6f}) "
        f"witness={result.witness.labels()} solver={result.solver} exact={result.exact}"
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_generate(args: argparse.Namespace) -> int:
    degrees = args.degrees
    if args.degrees_from:
        degrees = degree_sequence(read_edge_list(args.degrees_from))
    family = GraphFamily(args.family)

    if family is GraphFamily.PLOD:
        draw = gen_plod_from_degrees(degrees or [], args.seed, max_retries=args.max_retries)
        g = draw.graph
        header = f"plod n={g.n} seed={args.seed} connected={draw.connected} attempts={draw.attempts}"
        if not draw.connected:
            print(f"[generate] warning: no connected realization in {draw.attempts} draws", file=sys.stderr)
    else:
        spec = GenSpec(family=family, n=args.n, m=args.m, degrees=degrees, seed=args.seed,
                       topology=args.topology, max_retries=args.max_retries)
        g = generate(spec)
        header = f"{family.value} n={g.n} m={g.m_edges} seed={args.seed}"

    if args.out:
        path = write_edge_list(g, args.out, header=header)
        print(f"[generate] {header} -> {path}")
    else:
        sys.stdout.write(to_edge_list(g, header=header))
    return EXIT_OK


def _cmd_measure(args: argparse.Namespace) -> int:
    g = read_edge_list(args.input)
    s = VertexSet.from_labels(args.set, g.n)
    value = evaluate(g, MeasureKind(args.measure), s)
    print(json.dumps({
        "kind": args.measure,
        "set": s.labels(),
        "numerator": value.numerator,
        "denominator": value.denominator,
        "value": float(value),
    }))
    return EXIT_OK


def _exact(g: Graph, kind: MeasureKind, args: argparse.Namespace) -> MeasureResult:
    if kind is not MeasureKind.VAT or args.solver == "brute":
        return brute_force_optimize(g, kind, cap=args.cap, n_jobs=args.threads)
    if args.solver == "bnb":
        return bnb_vat(g, node_cap=args.bnb_cap, n_jobs=args.threads)
    if search_space_size(twin_classes(g)) <= 2 ** args.cap:
        return brute_force_optimize(g, kind, cap=args.cap, n_jobs=args.threads)
    return bnb_vat(g, node_cap=args.bnb_cap, n_jobs=args.threads)


def _cmd_exact(args: argparse.Namespace) -> int:
    g = read_edge_list(args.input)
    result = _exact(g, MeasureKind(args.measure), args)
    _summary("exact", result)
    _write_record(result, Path(args.input).stem, args.out)
    return EXIT_OK


def _cmd_heuristic(args: argparse.Namespace) -> int:
    g = read_edge_list(args.input)
    cfg = GAConfig(
        population=args.pop,
        generations=args.gens,
        seed=args.seed,
        log_every=args.log_every,
    )
    result = optimize_vat(g, cfg, cuts=args.cuts, max_j=args.max_j, n_jobs=args.threads)
    _summary("heuristic", result)
    _write_record(result, Path(args.input).stem, args.out)
    return EXIT_OK


def _cmd_compare_measures(args: argparse.Namespace) -> int:
    spec = ExperimentSpec(
        name="measure_comparison",
        exact_cap=args.cap,
        bnb_cap=args.bnb_cap,
        threads=args.threads,
        out_dir=args.out_dir,
    )
    table = run_measure_comparison(spec, DefaultGraphProvider(args.fixtures_dir))
    print(table.format())
    print()
    for column, verdict in table.ranking.items():
        print(f"[compare-measures] ranking star < barbell < wheel, {column}: {verdict}")
    for failure in table.reference_failures:
        print(f"[compare-measures] mismatch {failure}", file=sys.stderr)
    if args.check and table.reference_failures:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_compare_models(args: argparse.Namespace) -> int:
    spec = ExperimentSpec(
        name="model_comparison",
        sizes=args.sizes,
        seeds=args.seeds if len(args.seeds) > 1 else list(range(args.seeds[0])),
        solver=args.solver,
        bnb_cap=args.bnb_cap,
        ga=GAConfig(population=args.pop, generations=args.gens, log_every=args.log_every),
        cuts=args.cuts,
        max_j=args.max_j,
        ba_m=args.ba_m,
        full_scale=args.full_scale,
        threads=args.threads,
        out_dir=args.out_dir,
    )
    comparison = run_model_comparison(spec)
    print(format_model_summary(comparison.summary))
    for failure in comparison.reference_failures:
        print(f"[compare-models] {failure}", file=sys.stderr)
    if args.check and comparison.reference_failures:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_attack_report(args: argparse.Namespace) -> int:
    g = read_edge_list(args.input)
    if args.from_result:
        labels = json.loads(Path(args.from_result).read_text())["witness"]
    elif args.set:
        labels = args.set
    else:
        raise ResilienceError("one of --set or --from-result is required", code="invalid-witness")
    graph_id = args.graph_id or Path(args.input).stem
    record = attack_report(g, VertexSet.from_labels(labels, g.n), args.out_dir, graph_id=graph_id)
    print(
        f"[attack-report] {graph_id}: |S|={len(record.witness)} tau={record.tau_numerator}/{record.tau_denominator} "
        f"components={record.component_sizes}"
    )
    if record.graphml_path:
        print(f"[attack-report] GraphML: {record.graphml_path}")
        print(f"[attack-report] histogram: {record.histogram_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vat", description="Vertex attack tolerance toolkit.")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="Logging level (default VAT_LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="Write a generated graph as an edge list")
    gen.add_argument("--family", required=True, choices=[f.value for f in GraphFamily])
    gen.add_argument("--n", type=int, help="Node count (star, ba) or clique size (big_barbell)")
    gen.add_argument("--m", type=int, help="BA attachment count")
    gen.add_argument("--degrees", type=_int_list, help="PLOD degree sequence, e.g. '3,2,2,1'")
    gen.add_argument("--degrees-from", help="Take the PLOD degree sequence from this edge list")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--topology", choices=["mobius", "prism"], default="mobius")
    gen.add_argument("--max-retries", type=int, default=100)
    gen.add_argument("--out", help="Output edge list path (stdout if omitted)")
    gen.set_defaults(handler=_cmd_generate)

    meas = sub.add_parser("measure", help="Evaluate one measure on one attack set")
    meas.add_argument("--in", dest="input", required=True)
    meas.add_argument("--measure", required=True, choices=[k.value for k in MeasureKind])
    meas.add_argument("--set", required=True, type=_int_list, help="1-based node labels")
    meas.set_defaults(handler=_cmd_measure)

    exact = sub.add_parser("exact", help="Exact global optimum of a measure")
    exact.add_argument("--in", dest="input", required=True)
    exact.add_argument("--measure", default="vat", choices=[k.value for k in MeasureKind])
    exact.add_argument("--solver", choices=["auto", "brute", "bnb"], default="auto")
    exact.add_argument("--cap", type=int, default=config.BRUTE_FORCE_CAP,
                       help="log2 of the largest subset space brute force walks")
    exact.add_argument("--bnb-cap", type=int, default=config.BNB_NODE_CAP)
    exact.add_argument("--threads", type=int, default=config.DEFAULT_THREADS)
    exact.add_argument("--out", help="Result record path (JSON)")
    exact.set_defaults(handler=_cmd_exact)

    heur = sub.add_parser("heuristic", help="GA plus hill-climbing VAT upper bound")
    heur.add_argument("--in", dest="input", required=True)
    heur.add_argument("--measure", default="vat", choices=["vat"])
    heur.add_argument("--pop", type=int, default=config.DEFAULT_POPULATION)
    heur.add_argument("--gens", type=int, default=config.DEFAULT_GENERATIONS)
    heur.add_argument("--cuts", type=int, default=config.DEFAULT_CUTS)
    heur.add_argument("--max-j", type=int, default=config.DEFAULT_MAX_J)
    heur.add_argument("--seed", type=int, default=0)
    heur.add_argument("--log-every", type=int, default=1000)
    heur.add_argument("--threads", type=int, default=config.DEFAULT_THREADS)
    heur.add_argument("--out", help="Result record path (JSON)")
    heur.set_defaults(handler=_cmd_heuristic)

    cmp_m = sub.add_parser("compare-measures", help="Six measures on the seven comparison graphs")
    cmp_m.add_argument("--cap", type=int, default=config.BRUTE_FORCE_CAP)
    cmp_m.add_argument("--bnb-cap", type=int, default=config.BNB_NODE_CAP)
    cmp_m.add_argument("--threads", type=int, default=config.DEFAULT_THREADS)
    cmp_m.add_argument("--fixtures-dir", default=None)
    cmp_m.add_argument("--out-dir", default=None)
    cmp_m.add_argument("--check", action="store_true", help="Exit 3 when a strict row misses its printed value")
    cmp_m.set_defaults(handler=_cmd_compare_measures)

    cmp_g = sub.add_parser("compare-models", help="BA vs. same-degree random graphs")
    cmp_g.add_argument("--sizes", type=_int_list, default=[40, 45, 100, 250, 500, 1000, 2500])
    cmp_g.add_argument("--seeds", type=_int_list, default=[10],
                       help="A single count (seeds 0..k-1) or an explicit list")
    cmp_g.add_argument("--solver", choices=["exact", "heuristic"], default="heuristic")
    cmp_g.add_argument("--bnb-cap", type=int, default=config.BNB_NODE_CAP)
    cmp_g.add_argument("--pop", type=int, default=config.DEFAULT_POPULATION)
    cmp_g.add_argument("--gens", type=int, default=config.DEFAULT_GENERATIONS)
    cmp_g.add_argument("--cuts", type=int, default=config.DEFAULT_CUTS)
    cmp_g.add_argument("--max-j", type=int, default=config.DEFAULT_MAX_J)
    cmp_g.add_argument("--log-every", type=int, default=1000)
    cmp_g.add_argument("--ba-m", type=int, default=2)
    cmp_g.add_argument("--full-scale", action="store_true", help="Also run n >= 1000")
    cmp_g.add_argument("--threads", type=int, default=config.DEFAULT_THREADS)
    cmp_g.add_argument("--out-dir", default=None)
    cmp_g.add_argument("--check", action="store_true", help="Exit 3 when the ordering or BA tolerance fails")
    cmp_g.set_defaults(handler=_cmd_compare_models)

    atk = sub.add_parser("attack-report", help="GraphML and component histogram for an attack set")
    atk.add_argument("--in", dest="input", required=True)
    atk.add_argument("--set", type=_int_list, help="1-based node labels")
    atk.add_argument("--from-result", help="Take the witness from a result record JSON")
    atk.add_argument("--graph-id", default=None)
    atk.add_argument("--out-dir", default="attack_report")
    atk.set_defaults(handler=_cmd_attack_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    handler: Callable[[argparse.Namespace], int] = args.handler
    logger.debug("running %s", args.command)
    try:
        return handler(args)
    except TooLargeError as exc:
        print(f"[{args.command}] {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (ResilienceError, FileNotFoundError) as exc:
        print(f"[{args.command}] {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # pydantic validation errors and malformed inputs
        print(f"[{args.command}] invalid-parameter: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
