"""
Deterministic fixtures and seeded random graph families.

All randomness flows from an explicit seed through numpy's PCG64 bit
generator; there is no module-level random state.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from errors import ResilienceError
from graph_core import Graph, component_masks, is_connected
from models import GenSpec, GraphFamily

logger = logging.getLogger(__name__)


def make_rng(seed: int | np.random.SeedSequence | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class DegreeSequence:
    degrees: Tuple[int, ...]

    @classmethod
    def of(cls, degrees: Sequence[int]) -> "DegreeSequence":
        seq = cls(tuple(int(d) for d in degrees))
        seq.validate()
        return seq

    @property
    def n(self) -> int:
        return len(self.degrees)

    def validate(self) -> None:
        if not self.degrees:
            raise ResilienceError("degree sequence is empty", code="non-graphical")
        if any(d < 1 for d in self.degrees):
            raise ResilienceError("degrees must be positive", code="non-graphical")
        if sum(self.degrees) % 2:
            raise ResilienceError("degree sum must be even", code="non-graphical")
        if not nx.is_graphical(list(self.degrees), method="eg"):
            raise ResilienceError("degree sequence is not graphical", code="non-graphical")


@dataclass(frozen=True)
class PlodDraw:
    graph: Graph
    connected: bool
    attempts: int


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def gen_star(n: int) -> Graph:
    """Node 1 is the center."""
    if n < 3:
        raise ResilienceError(f"star needs n >= 3, got {n}")
    return Graph.from_edges(n, ((0, v) for v in range(1, n)))


def _barbell_side(offset: int) -> List[Tuple[int, int]]:
    # K5 on offset..offset+4 minus {e-a, e-b, c-d}; e = offset is the bridge endpoint.
    e, a, b, c, d = range(offset, offset + 5)
    missing = {frozenset((e, a)), frozenset((e, b)), frozenset((c, d))}
    return [
        (u, v)
        for u, v in itertools.combinations(range(offset, offset + 5), 2)
        if frozenset((u, v)) not in missing
    ]


def gen_barbell10() -> Graph:
    """3-regular 10-node graph with a single bridge between nodes 1 and 6."""
    edges = _barbell_side(0) + _barbell_side(5) + [(0, 5)]
    return Graph.from_edges(10, edges)


def gen_big_barbell(k: int) -> Graph:
    """Two k-cliques joined by the bridge 1 - (k+1)."""
    if k < 3:
        raise ResilienceError(f"big barbell needs k >= 3, got {k}")
    edges = list(itertools.combinations(range(k), 2))
    edges += list(itertools.combinations(range(k, 2 * k), 2))
    edges.append((0, k))
    return Graph.from_edges(2 * k, edges)


def gen_wheel10(topology: str = "mobius") -> Graph:
    """
    3-regular 10-node, 15-edge wheel.

    ``mobius``: a 10-cycle plus its five diameters (bipartite, connectivity 3).
    ``prism``: two 5-cycles joined by spokes.
    """
    if topology == "mobius":
        return Graph.from_networkx(nx.circulant_graph(10, [1, 5]))
    if topology == "prism":
        return Graph.from_networkx(nx.circular_ladder_graph(5))
    raise ResilienceError(f"unknown wheel topology {topology!r}")


def gen_path(n: int) -> Graph:
    return Graph.from_networkx(nx.path_graph(n))


def gen_cycle(n: int) -> Graph:
    return Graph.from_networkx(nx.cycle_graph(n))


def gen_complete(n: int) -> Graph:
    return Graph.from_networkx(nx.complete_graph(n))


def gen_ring_of_cliques(blocks: int, clique_size: int) -> Graph:
    """
    (clique_size - 1)-regular ring: each block is a clique minus the edge
    between its two ports, and consecutive blocks are joined port to port.
    """
    if blocks < 2 or clique_size < 3:
        raise ResilienceError("ring of cliques needs blocks >= 2 and clique_size >= 3")
    edges: List[Tuple[int, int]] = []
    for b in range(blocks):
        base = b * clique_size
        port_in, port_out = base, base + 1
        for u, v in itertools.combinations(range(base, base + clique_size), 2):
            if (u, v) != (port_in, port_out):
                edges.append((u, v))
        edges.append((port_out, ((b + 1) % blocks) * clique_size))
    return Graph.from_edges(blocks * clique_size, edges)


def gen_pendant_ring(blocks: int) -> Graph:
    """
    3-regular cycle of hubs, each hub carrying a 5-node pendant block
    (K4 minus an edge, whose two degree-2 nodes meet a shared connector).
    Block b uses nodes 6b..6b+5 with the hub at 6b.
    """
    if blocks < 3:
        raise ResilienceError("pendant ring needs blocks >= 3")
    edges: List[Tuple[int, int]] = []
    for b in range(blocks):
        hub, connector, x, y, z, w = range(6 * b, 6 * b + 6)
        edges += [(hub, connector), (connector, x), (connector, y)]
        edges += [(x, z), (x, w), (y, z), (y, w), (z, w)]
        edges.append((hub, 6 * ((b + 1) % blocks)))
    return Graph.from_edges(6 * blocks, edges)


# ---------------------------------------------------------------------------
# Random families
# ---------------------------------------------------------------------------

def gen_ba(n: int, m: int, seed: int | None) -> Graph:
    """
    Preferential attachment from a clique on m+1 nodes.

    Each entering node draws m distinct targets without replacement with
    probability proportional to their current degree.
    """
    if m < 1 or n <= m:
        raise ResilienceError(f"ba requires n > m >= 1, got n={n}, m={m}")
    rng = make_rng(seed)
    degree = np.zeros(n, dtype=np.int64)
    edges: List[Tuple[int, int]] = list(itertools.combinations(range(m + 1), 2))
    degree[: m + 1] = m

    for new_node in range(m + 1, n):
        weights = degree[:new_node].astype(float)
        weights /= weights.sum()
        targets = rng.choice(new_node, size=m, replace=False, p=weights)
        for t in targets:
            edges.append((int(t), new_node))
            degree[t] += 1
        degree[new_node] = m

    return Graph.from_edges(n, edges)


def _pair_stubs(
    degrees: Sequence[int],
    rng: np.random.Generator,
    swap_attempts: int,
) -> Optional[Set[Tuple[int, int]]]:
    """One stub-matching draw; self-loops and repeats are repaired by degree-preserving swaps."""
    stubs = np.repeat(np.arange(len(degrees)), degrees)
    rng.shuffle(stubs)

    edge_set: Set[Tuple[int, int]] = set()
    edge_list: List[Tuple[int, int]] = []
    bad: List[Tuple[int, int]] = []
    for a, b in zip(stubs[0::2], stubs[1::2]):
        a, b = int(a), int(b)
        key = (min(a, b), max(a, b))
        if a == b or key in edge_set:
            bad.append((a, b))
        else:
            edge_set.add(key)
            edge_list.append(key)

    for a, b in bad:
        repaired = False
        for _ in range(swap_attempts):
            if not edge_list:
                break
            idx = int(rng.integers(len(edge_list)))
            x, y = edge_list[idx]
            if rng.random() < 0.5:
                x, y = y, x
            first = (min(a, x), max(a, x))
            second = (min(b, y), max(b, y))
            if a == x or b == y or first == second:
                continue
            if first in edge_set or second in edge_set:
                continue
            edge_set.discard(edge_list[idx])
            edge_list[idx] = edge_list[-1]
            edge_list.pop()
            for e in (first, second):
                edge_set.add(e)
                edge_list.append(e)
            repaired = True
            break
        if not repaired:
            return None
    return edge_set


def gen_plod_from_degrees(
    degrees: Sequence[int] | DegreeSequence,
    seed: int | None,
    max_retries: int = 100,
    swap_attempts: int = 200,
) -> PlodDraw:
    """
    Random simple graph with exactly the given degrees.

    Redraws until the realization is connected; after ``max_retries`` the last
    simple realization is returned with ``connected=False``.
    """
    seq = degrees if isinstance(degrees, DegreeSequence) else DegreeSequence.of(degrees)
    rng = make_rng(seed)
    last: Optional[Graph] = None

    for attempt in range(1, max_retries + 1):
        edges = _pair_stubs(seq.degrees, rng, swap_attempts)
        if edges is None:
            logger.debug("plod draw %d: stub pairing failed, redrawing", attempt)
            continue
        g = Graph.from_edges(seq.n, edges)
        if is_connected(g):
            return PlodDraw(graph=g, connected=True, attempts=attempt)
        logger.debug("plod draw %d: disconnected (%d components)", attempt,
                     len(component_masks(g, g.full_mask)))
        last = g

    if last is None:
        raise ResilienceError(
            f"no simple realization found in {max_retries} draws", code="unrealizable"
        )
    logger.warning("plod: no connected realization in %d draws; returning a disconnected one", max_retries)
    return PlodDraw(graph=last, connected=False, attempts=max_retries)


def gen_random_connected(n: int, p: float, seed: int | None) -> Graph:
    """G(n, p) with its components chained together by one random edge each."""
    if n < 1:
        raise ResilienceError("n must be positive")
    rng = make_rng(seed)
    draws = rng.random((n, n))
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if draws[u, v] < p]
    g = Graph.from_edges(n, edges)
    comps = component_masks(g, g.full_mask)
    for left, right in zip(comps, comps[1:]):
        members_left = [i for i in range(n) if left >> i & 1]
        members_right = [i for i in range(n) if right >> i & 1]
        edges.append((int(rng.choice(members_left)), int(rng.choice(members_right))))
    return Graph.from_edges(n, edges)


def gen_random_regular(d: int, n: int, seed: int, max_retries: int = 50) -> Graph:
    """Connected random d-regular graph (networkx pairing model, reseeded until connected)."""
    for attempt in range(max_retries):
        g = Graph.from_networkx(nx.random_regular_graph(d, n, seed=seed + attempt))
        if is_connected(g):
            return g
    raise ResilienceError(f"no connected {d}-regular graph on {n} nodes in {max_retries} draws",
                          code="unrealizable")


def generate(spec: GenSpec) -> Graph:
    family = spec.family
    if family is GraphFamily.STAR:
        return gen_star(spec.n)
    if family is GraphFamily.BARBELL10:
        return gen_barbell10()
    if family is GraphFamily.BIG_BARBELL:
        return gen_big_barbell(spec.n)
    if family is GraphFamily.WHEEL10:
        return gen_wheel10(spec.topology)
    if family is GraphFamily.BA:
        return gen_ba(spec.n, spec.m, spec.seed)
    draw = gen_plod_from_degrees(spec.degrees, spec.seed, max_retries=spec.max_retries)
    return draw.graph


__all__ = [
    "DegreeSequence",
    "PlodDraw",
    "gen_ba",
    "gen_barbell10",
    "gen_big_barbell",
    "gen_complete",
    "gen_cycle",
    "gen_path",
    "gen_pendant_ring",
    "gen_plod_from_degrees",
    "gen_random_connected",
    "gen_random_regular",
    "gen_ring_of_cliques",
    "gen_star",
    "gen_wheel10",
    "generate",
    "make_rng",
]
