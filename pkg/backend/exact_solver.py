"""
Exact VAT by depth-first branch-and-bound, plus exact checks that relate
VAT to conductance on regular graphs.

Nodes are decided in descending-degree order, include before exclude. A set
is scored the moment its last member is included, so every subset is scored
once. For a subtree with k included nodes and a largest decided-out
component of size c, every completion S' satisfies

    tau_S' >= max(k, 1) / (n - max(k, 1) - max(c, 1) + 1)

because the decided-out component survives inside the largest component of
V - S'. A subtree is cut when that bound is above the incumbent, or equal to
it with more nodes than the incumbent witness, so the returned witness is
the same one exhaustive search picks.
"""

from __future__ import annotations

import logging
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

import config
from errors import NotRegularError, ResilienceError, TooLargeError
from graph_core import Graph, VertexSet, component_masks, induced_is_connected, is_regular
from heuristic_solver import hill_climb, karger_seed
from measures import (
    MeasureResult,
    brute_force_optimize_many,
    optimal_sets,
    require_measurable,
    vat_of_mask,
    witness_key,
)
from models import ConductanceBoundReport, ConnectedWitnessReport, MeasureKind

logger = logging.getLogger(__name__)

_WARM_START_SEEDS = 3


@dataclass
class BnBNode:
    """Search state: ``decided`` leading positions of the order are fixed."""

    decided: int
    in_set: int
    out_set: int


@dataclass
class _Incumbent:
    value: Optional[Fraction] = None
    mask: int = 0
    history: List[str] = field(default_factory=list)
    visited: int = 0

    def offer(self, value: Optional[Fraction], mask: int) -> None:
        if value is None:
            return
        if self.value is None or witness_key(value, mask) < witness_key(self.value, self.mask):
            self.value, self.mask = value, mask
            self.history.append(str(value))


def _lower_bound(g: Graph, node: BnBNode) -> Optional[Fraction]:
    """None when no proper nonempty completion exists."""
    k = max(node.in_set.bit_count(), 1)
    c = max((comp.bit_count() for comp in component_masks(g, node.out_set)), default=0)
    denominator = g.n - k - max(c, 1) + 1
    if denominator <= 0:
        return None
    return Fraction(k, denominator)


def _prunable(g: Graph, node: BnBNode, inc: _Incumbent) -> bool:
    bound = _lower_bound(g, node)
    if bound is None:
        return True
    if inc.value is None:
        return False
    if bound != inc.value:
        return bound > inc.value
    return max(node.in_set.bit_count(), 1) > inc.mask.bit_count()


def _search(g: Graph, order: Sequence[int], node: BnBNode, inc: _Incumbent, prune: bool) -> None:
    inc.visited += 1
    if node.decided == len(order):
        return
    if prune and _prunable(g, node, inc):
        return
    bit = 1 << order[node.decided]

    included = node.in_set | bit
    inc.offer(vat_of_mask(g, included), included)
    _search(g, order, BnBNode(node.decided + 1, included, node.out_set), inc, prune)
    _search(g, order, BnBNode(node.decided + 1, node.in_set, node.out_set | bit), inc, prune)


def _search_subtree(
    g: Graph,
    order: Sequence[int],
    prefix: Tuple[bool, ...],
    start: Tuple[Optional[Fraction], int],
    prune: bool,
) -> _Incumbent:
    in_set = out_set = 0
    for pos, take in enumerate(prefix):
        if take:
            in_set |= 1 << order[pos]
        else:
            out_set |= 1 << order[pos]
    inc = _Incumbent(value=start[0], mask=start[1])
    # The prefix set with every later node excluded belongs to this subtree only.
    if in_set:
        inc.offer(vat_of_mask(g, in_set), in_set)
    _search(g, order, BnBNode(len(prefix), in_set, out_set), inc, prune)
    return inc


def _warm_start(g: Graph) -> Tuple[Optional[Fraction], int]:
    inc = _Incumbent()
    hub = max(range(g.n), key=lambda v: (g.degree(v), -v))
    starts = [VertexSet(1 << hub, g.n)]
    for seed in range(_WARM_START_SEEDS):
        try:
            starts.append(karger_seed(g, seed))
        except ResilienceError:
            continue
    for start in starts:
        climbed = hill_climb(g, start, max_j=2)
        inc.offer(climbed.value, climbed.witness.mask)
    return inc.value, inc.mask


def bnb_vat(
    g: Graph,
    node_cap: int | None = None,
    n_jobs: int | None = None,
    prune: bool = True,
    warm_start: bool = True,
) -> MeasureResult:
    """
    Exact tau(G) with the smallest, then lexicographically least, witness.

    With ``n_jobs > 1`` the top decisions are split into independent subtrees
    that each start from the same incumbent; the merged value and witness are
    the same as a single-worker run, though fewer nodes may be pruned.
    """
    node_cap = node_cap if node_cap is not None else config.BNB_NODE_CAP
    n_jobs = n_jobs or config.DEFAULT_THREADS
    require_measurable(g)
    if g.n > node_cap:
        raise TooLargeError(f"branch-and-bound is capped at {node_cap} nodes, graph has {g.n}")
    if node_cap > config.BNB_NODE_CAP:
        logger.warning("branch-and-bound cap raised to %d nodes; runtime may explode", node_cap)

    started = time.perf_counter()
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    start = _warm_start(g) if warm_start else (None, 0)
    warm_value = start[0]
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * g.n + 100))

    depth = 0
    if n_jobs > 1:
        depth = min(g.n - 1, math.ceil(math.log2(4 * n_jobs)))
    prefixes = [tuple(bool(bits >> (depth - 1 - i) & 1) for i in range(depth)) for bits in range(2 ** depth)]
    # Include-first order within the split.
    prefixes.sort(key=lambda p: tuple(not b for b in p))

    if depth:
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_search_subtree)(g, order, prefix, start, prune) for prefix in prefixes
        )
    else:
        parts = [_search_subtree(g, order, (), start, prune)]

    best = _Incumbent(value=start[0], mask=start[1])
    history: List[str] = [str(warm_value)] if warm_value is not None else []
    visited = 0
    for part in parts:
        visited += part.visited
        best.offer(part.value, part.mask)
    for part in parts:
        history.extend(part.history)
    history = _non_increasing(history)

    if best.value is None:
        raise ResilienceError("no proper nonempty attack set", code="no-valid-set")
    logger.info("bnb n=%d: tau %s after %d nodes", g.n, best.value, visited)

    return MeasureResult(
        kind=MeasureKind.VAT,
        value=best.value,
        witness=VertexSet(best.mask, g.n),
        exact=True,
        solver="bnb",
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        metadata={
            "visited": visited,
            "warm_start": str(warm_value) if warm_value is not None else None,
            "pruning": prune,
            "workers": n_jobs if depth else 1,
            "incumbent_history": history,
        },
    )


def _non_increasing(values: List[str]) -> List[str]:
    """Merge per-worker improvement logs into one running-minimum sequence."""
    out: List[str] = []
    for v in values:
        if not out or Fraction(v) <= Fraction(out[-1]):
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# Regular-graph checks
# ---------------------------------------------------------------------------

def _require_regular(g: Graph) -> int:
    d = is_regular(g)
    if d is None:
        raise NotRegularError("graph is not regular")
    return d


def check_vat_conductance_bound(g: Graph, cap: int | None = None) -> ConductanceBoundReport:
    """
    On a connected d-regular graph with Phi(G) <= 1/d^2, tau(G) < d * Phi(G).

    Both the strict and the non-strict conclusion are reported; even cycles
    and rings of cliques meet the hypothesis with tau(G) = d * Phi(G).
    """
    require_measurable(g)
    d = _require_regular(g)
    results = brute_force_optimize_many(g, [MeasureKind.CONDUCTANCE, MeasureKind.VAT], cap=cap, n_jobs=1)
    for result in results.values():
        if isinstance(result, ResilienceError):
            raise result
    phi = results[MeasureKind.CONDUCTANCE].value
    tau = results[MeasureKind.VAT].value

    hypothesis = phi <= Fraction(1, d * d)
    report = ConductanceBoundReport(
        d=d,
        phi=float(phi),
        tau=float(tau),
        phi_fraction=str(phi),
        tau_fraction=str(tau),
        hypothesis_holds=hypothesis,
        conclusion_holds=tau < d * phi,
        weak_conclusion_holds=tau <= d * phi,
        vacuous=not hypothesis,
    )
    if hypothesis and not report.conclusion_holds:
        logger.warning("tau %s is not below d*phi %s (d=%d)", tau, d * phi, d)
    return report


def check_connected_conductance_witness(g: Graph, cap: int | None = None) -> ConnectedWitnessReport:
    """
    Some conductance-optimal set of a connected d-regular graph induces a
    connected subgraph. Optimal sets are enumerated up to twin swaps, which
    preserve induced connectivity.
    """
    require_measurable(g)
    d = _require_regular(g)
    sets = optimal_sets(g, MeasureKind.CONDUCTANCE, cap=cap)
    connected = [s for s in sets if induced_is_connected(g, s)]
    phi = brute_force_optimize_many(g, [MeasureKind.CONDUCTANCE], cap=cap, n_jobs=1)[MeasureKind.CONDUCTANCE]
    if isinstance(phi, ResilienceError):
        raise phi
    return ConnectedWitnessReport(
        d=d,
        phi=float(phi.value),
        optimal_sets=len(sets),
        connected_optimal_sets=len(connected),
        example_connected=connected[0].labels() if connected else None,
        holds=bool(connected),
    )


__all__ = [
    "BnBNode",
    "bnb_vat",
    "check_connected_conductance_witness",
    "check_vat_conductance_bound",
]
