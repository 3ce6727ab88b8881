"""
Stochastic VAT optimization for graphs too large to search exactly.

Two stages: a bitstring genetic algorithm over attack sets, then
lexicographic hill-climbing from the GA result and from many
contraction-based cut seeds. Every value returned is the exact tau_S of
its own witness, so it is always an upper bound on tau(G).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

import config
from errors import ResilienceError
from generators import make_rng
from graph_core import Graph, VertexSet, component_masks
from measures import MeasureResult, require_measurable, vat_of_mask, witness_key
from models import GAConfig, MeasureKind

logger = logging.getLogger(__name__)

# GA score cache is dropped once it grows past this many masks.
_CACHE_LIMIT = 200_000


def fitness(g: Graph, s: VertexSet) -> float:
    """
    max(0, 1 - tau_S); degenerate sets (empty or V) score 0.

    ga_run orders chromosomes by exact tau_S instead, which agrees with
    descending fitness wherever fitness is positive and still separates sets
    with tau_S >= 1 that all clamp to 0. The GA progress history reports this value.
    """
    tau = vat_of_mask(g, s.mask)
    if tau is None:
        return 0.0
    return max(0.0, 1.0 - float(tau))


def _rank(value: Optional[Fraction]) -> Tuple[int, Fraction]:
    # Degenerate chromosomes rank after every scored one.
    return (1, Fraction(0)) if value is None else (0, value)


def _offer(best: Optional[Tuple[Fraction, int]], value: Optional[Fraction], mask: int) -> Optional[Tuple[Fraction, int]]:
    if value is None:
        return best
    if best is None or witness_key(value, mask) < witness_key(*best):
        return value, mask
    return best


# ---------------------------------------------------------------------------
# Genetic algorithm
# ---------------------------------------------------------------------------

def ga_run(g: Graph, cfg: GAConfig | None = None) -> MeasureResult:
    """
    Generational GA: tournament selection, single-point crossover, per-bit
    mutation and one elite. Chromosomes are ranked by exact tau_S, which
    orders them the same way as the clamped fitness wherever it is positive.
    """
    require_measurable(g)
    cfg = cfg or GAConfig()
    started = time.perf_counter()
    n = g.n
    rng = make_rng(cfg.seed)
    p_mut = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / n
    size = cfg.population
    columns = np.arange(n)

    density = rng.uniform(1.0 / n, 0.5, size=size)
    population = rng.random((size, n)) < density[:, None]

    cache: Dict[int, Optional[Fraction]] = {}

    def score(row: np.ndarray) -> Tuple[int, Optional[Fraction]]:
        mask = VertexSet.from_array(row).mask
        if mask not in cache:
            if len(cache) >= _CACHE_LIMIT:
                cache.clear()
            cache[mask] = vat_of_mask(g, mask)
        return mask, cache[mask]

    best: Optional[Tuple[Fraction, int]] = None
    history: List[Dict[str, Any]] = []

    for generation in range(cfg.generations + 1):
        scored = [score(row) for row in population]
        for mask, value in scored:
            best = _offer(best, value, mask)

        if generation % cfg.log_every == 0 and best is not None:
            best_fitness = fitness(g, VertexSet(best[1], n))
            history.append({"generation": generation, "tau": str(best[0]), "fitness": best_fitness})
            logger.info("ga gen %d: best tau %.6f, fitness %.6f", generation, float(best[0]), best_fitness)
        if generation == cfg.generations:
            break

        order = sorted(range(size), key=lambda i: _rank(scored[i][1]))
        ranks = np.empty(size, dtype=np.int64)
        ranks[order] = np.arange(size)

        entrants = rng.integers(size, size=(size, cfg.tournament_size))
        winners = entrants[np.arange(size), np.argmin(ranks[entrants], axis=1)]
        mothers = population[winners[0::2]]
        fathers = population[winners[1::2]]

        pairs = size // 2
        do_cross = rng.random(pairs) < cfg.crossover_prob
        points = rng.integers(1, n, size=pairs)
        keep = (columns[None, :] < points[:, None]) | ~do_cross[:, None]
        first = np.where(keep, mothers, fathers)
        second = np.where(keep, fathers, mothers)
        children = np.vstack([first, second])
        children ^= rng.random(children.shape) < p_mut

        elite = population[order[0]]
        population = np.vstack([elite[None, :], children[: size - 1]])

    if best is None:
        raise ResilienceError("GA produced no proper nonempty attack set", code="no-valid-set")

    value, mask = best
    return MeasureResult(
        kind=MeasureKind.VAT,
        value=value,
        witness=VertexSet(mask, n),
        exact=False,
        solver="ga",
        seed=cfg.seed,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        metadata={
            "population": size,
            "generations": cfg.generations,
            "crossover_prob": cfg.crossover_prob,
            "mutation_prob": p_mut,
            "tournament_size": cfg.tournament_size,
            "elitism": 1,
            "history": history,
        },
    )


# ---------------------------------------------------------------------------
# Contraction seeds
# ---------------------------------------------------------------------------

def _contract_to_cut(g: Graph, edges: List[Tuple[int, int]], rng: np.random.Generator) -> List[Tuple[int, int]]:
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    groups = g.n
    for idx in rng.permutation(len(edges)):
        if groups == 2:
            break
        u, v = edges[idx]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            groups -= 1
    return [(u, v) for u, v in edges if find(u) != find(v)]


def karger_seed(
    g: Graph,
    seed: int | np.random.Generator | None = None,
    max_draws: int = 100,
) -> VertexSet:
    """
    Contract random edges down to two supernodes, then take one random endpoint
    of every cut edge. Redraws until the chosen set disconnects V - S.
    """
    require_measurable(g)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    edges = g.edges()
    for draw in range(1, max_draws + 1):
        cut = _contract_to_cut(g, edges, rng)
        picks = rng.integers(2, size=len(cut))
        mask = 0
        for (u, v), pick in zip(cut, picks):
            mask |= 1 << (v if pick else u)
        alive = g.full_mask ^ mask
        if alive and len(component_masks(g, alive)) >= 2:
            return VertexSet(mask, g.n)
        logger.debug("karger draw %d did not disconnect; redrawing", draw)
    raise ResilienceError(f"no disconnecting cut seed in {max_draws} draws", code="seed-failure")


# ---------------------------------------------------------------------------
# Hill climbing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MutationVector:
    """Strictly increasing 1-based node positions to flip together."""

    indices: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.indices:
            raise ValueError("mutation vector needs j >= 1")
        if self.indices[0] < 1 or any(a >= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError(f"indices must be strictly increasing and >= 1: {self.indices}")

    @classmethod
    def initial(cls, j: int) -> "MutationVector":
        return cls(tuple(range(1, j + 1)))

    @property
    def j(self) -> int:
        return len(self.indices)

    def flip_mask(self) -> int:
        mask = 0
        for i in self.indices:
            mask |= 1 << (i - 1)
        return mask


def mv_increment(m: MutationVector, n: int) -> Optional[MutationVector]:
    """Lexicographic successor among j-subsets of 1..n, or None after the last one."""
    idx = list(m.indices)
    j = len(idx)
    i = j - 1
    while i >= 0 and idx[i] == n - j + 1 + i:
        i -= 1
    if i < 0:
        return None
    idx[i] += 1
    for t in range(i + 1, j):
        idx[t] = idx[t - 1] + 1
    return MutationVector(tuple(idx))


def hill_climb(g: Graph, start: VertexSet, max_j: int = config.DEFAULT_MAX_J) -> MeasureResult:
    """
    Try every j-flip in lexicographic order, j = 1..max_j. A strictly better
    tau_S is accepted at once and the search restarts from single flips.
    """
    require_measurable(g)
    if max_j < 1:
        raise ResilienceError("max_j must be >= 1")
    started = time.perf_counter()
    n = g.n
    current = start.mask
    value = vat_of_mask(g, current)
    trajectory: List[str] = [str(value)] if value is not None else []
    evaluations = 0

    j = 1
    mv: Optional[MutationVector] = MutationVector.initial(1)
    while mv is not None:
        candidate = current ^ mv.flip_mask()
        candidate_value = vat_of_mask(g, candidate)
        evaluations += 1
        if candidate_value is not None and (value is None or candidate_value < value):
            current, value = candidate, candidate_value
            trajectory.append(str(value))
            j = 1
            mv = MutationVector.initial(1)
            continue
        mv = mv_increment(mv, n)
        if mv is None:
            j += 1
            if j <= min(max_j, n):
                mv = MutationVector.initial(j)

    if value is None:
        raise ResilienceError("hill climb found no proper nonempty attack set", code="no-valid-set")

    return MeasureResult(
        kind=MeasureKind.VAT,
        value=value,
        witness=VertexSet(current, n),
        exact=False,
        solver="hill_climb",
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        metadata={"max_j": max_j, "evaluations": evaluations, "trajectory": trajectory},
    )


def _climb_from_cut(g: Graph, seed_seq: np.random.SeedSequence, max_j: int) -> Optional[MeasureResult]:
    try:
        start = karger_seed(g, make_rng(seed_seq))
    except ResilienceError as exc:
        logger.debug("skipping cut seed: %s", exc)
        return None
    return hill_climb(g, start, max_j)


def optimize_vat(
    g: Graph,
    cfg: GAConfig | None = None,
    cuts: int = config.DEFAULT_CUTS,
    max_j: int = config.DEFAULT_MAX_J,
    n_jobs: int | None = None,
) -> MeasureResult:
    """Best of a hill-climbed GA result and ``cuts`` hill-climbed contraction seeds."""
    require_measurable(g)
    cfg = cfg or GAConfig()
    n_jobs = n_jobs or config.DEFAULT_THREADS
    started = time.perf_counter()

    ga = ga_run(g, cfg)
    ga_climbed = hill_climb(g, ga.witness, max_j)
    best: Tuple[Fraction, int] = (ga_climbed.value, ga_climbed.witness.mask)
    branch = "ga"

    seeds = np.random.SeedSequence(cfg.seed).spawn(cuts)
    if n_jobs > 1 and cuts > 1:
        climbs = Parallel(n_jobs=n_jobs)(delayed(_climb_from_cut)(g, s, max_j) for s in seeds)
    else:
        climbs = [_climb_from_cut(g, s, max_j) for s in seeds]

    failures = 0
    cut_values: List[Fraction] = []
    for i, climbed in enumerate(climbs):
        if climbed is None:
            failures += 1
            continue
        cut_values.append(climbed.value)
        if witness_key(climbed.value, climbed.witness.mask) < witness_key(*best):
            best = (climbed.value, climbed.witness.mask)
            branch = f"cut:{i}"

    if failures:
        logger.warning("%d of %d cut seeds failed to disconnect", failures, cuts)
    value, mask = best
    logger.info("optimize_vat n=%d: tau %.6f from %s", g.n, float(value), branch)

    return MeasureResult(
        kind=MeasureKind.VAT,
        value=value,
        witness=VertexSet(mask, g.n),
        exact=False,
        solver="heuristic",
        seed=cfg.seed,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        metadata={
            "branch": branch,
            "ga_value": str(ga.value),
            "ga_climbed_value": str(ga_climbed.value),
            "best_cut_value": str(min(cut_values)) if cut_values else None,
            "cuts": cuts,
            "cut_failures": failures,
            "max_j": max_j,
            "ga": ga.metadata,
        },
    )


__all__ = [
    "MutationVector",
    "fitness",
    "ga_run",
    "hill_climb",
    "karger_seed",
    "mv_increment",
    "optimize_vat",
]
