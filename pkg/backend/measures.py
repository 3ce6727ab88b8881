"""
Set-conditional resilience measures and their exhaustive global optimization.

Every value is an exact ``Fraction``. The exhaustive optimizer walks subsets
up to twin symmetry: nodes with identical open or closed neighbourhoods are
interchangeable under an automorphism, so only the per-class member counts
matter, and taking the lowest-index members of each class yields the same
optimum and the same tie-broken witness as walking every subset.

Scattering uses the subtractive form omega(V-S) - |S|; the reference values
for inverse scattering on the star and barbell only fit that form.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

import config
from errors import (
    DegenerateSetError,
    DisconnectedGraphError,
    NotACutSetError,
    ResilienceError,
    TooLargeError,
    UndefinedMeasureError,
)
from graph_core import (
    Graph,
    VertexSet,
    boundary_mask,
    component_sizes,
    cut_count,
    is_connected,
    volume_of,
)
from models import MeasureKind, ResultRecord

logger = logging.getLogger(__name__)


@dataclass
class MeasureResult:
    kind: MeasureKind
    value: Fraction
    witness: VertexSet
    exact: bool
    solver: str
    seed: Optional[int] = None
    wall_time_ms: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def real(self) -> float:
        return float(self.value)

    def to_record(self, graph_id: str) -> ResultRecord:
        return ResultRecord(
            graph_id=graph_id,
            kind=self.kind,
            numerator=self.value.numerator,
            denominator=self.value.denominator,
            value=float(self.value),
            witness=self.witness.labels(),
            exact=self.exact,
            solver=self.solver,
            seed=self.seed,
            wall_time_ms=round(self.wall_time_ms, 3),
            metadata=self.metadata,
        )


# ---------------------------------------------------------------------------
# Set-level measures
# ---------------------------------------------------------------------------

def require_measurable(g: Graph) -> None:
    if g.n < 3:
        raise ResilienceError(f"measures need n >= 3, got {g.n}")
    if not is_connected(g):
        raise DisconnectedGraphError("measures are defined on connected graphs")


def _require_proper(g: Graph, s: VertexSet) -> None:
    if s.n != g.n:
        raise ResilienceError(f"set is over {s.n} nodes, graph has {g.n}")
    if not s.is_proper_nonempty():
        raise DegenerateSetError("set must be a nonempty proper subset of V")


def _survivors(g: Graph, mask: int) -> Tuple[int, int, int]:
    """(omega, c_max, remainder) of V - mask."""
    sizes = component_sizes(g, g.full_mask ^ mask)
    c_max = max(sizes, default=0)
    alive = g.n - mask.bit_count()
    return len(sizes), c_max, alive - c_max


def _require_cut_set(g: Graph, s: VertexSet) -> Tuple[int, int]:
    require_measurable(g)
    _require_proper(g, s)
    omega, c_max, _ = _survivors(g, s.mask)
    if omega < 2:
        raise NotACutSetError("V - S must have at least two components")
    return omega, c_max


def vat_set(g: Graph, s: VertexSet) -> Fraction:
    """|S| / (|V - S - C_max(V - S)| + 1)."""
    require_measurable(g)
    _require_proper(g, s)
    _, _, remainder = _survivors(g, s.mask)
    return Fraction(s.cardinality, remainder + 1)


def unsmoothed_vat_set(g: Graph, s: VertexSet) -> Fraction:
    require_measurable(g)
    _require_proper(g, s)
    _, _, remainder = _survivors(g, s.mask)
    if remainder == 0:
        raise UndefinedMeasureError("attack causes no non-trivial disconnection")
    return Fraction(s.cardinality, remainder)


def conductance_set(g: Graph, s: VertexSet) -> Fraction:
    require_measurable(g)
    _require_proper(g, s)
    vol = volume_of(g, s.mask)
    if vol > g.m_edges:
        raise ResilienceError("Vol(S) exceeds Vol(V)/2", code="volume-exceeded")
    return Fraction(cut_count(g, s.mask), vol)


def vertex_expansion_set(g: Graph, s: VertexSet) -> Fraction:
    require_measurable(g)
    _require_proper(g, s)
    k = s.cardinality
    boundary = boundary_mask(g, s.mask).bit_count()
    return Fraction(g.n * boundary, k * (g.n - k))


def integrity_set(g: Graph, s: VertexSet) -> int:
    require_measurable(g)
    if s.mask == g.full_mask:
        raise DegenerateSetError("integrity is undefined for S = V")
    _, c_max, _ = _survivors(g, s.mask)
    return s.cardinality + c_max


def toughness_set(g: Graph, s: VertexSet) -> Fraction:
    omega, _ = _require_cut_set(g, s)
    return Fraction(s.cardinality, omega)


def tenacity_set(g: Graph, s: VertexSet) -> Fraction:
    omega, c_max = _require_cut_set(g, s)
    return Fraction(s.cardinality + c_max, omega)


def scattering_set(g: Graph, s: VertexSet) -> int:
    omega, _ = _require_cut_set(g, s)
    return omega - s.cardinality


def inv_scattering_set(g: Graph, s: VertexSet) -> Fraction:
    sn = scattering_set(g, s)
    if sn == -1:
        raise UndefinedMeasureError("scattering number -1 leaves h undefined", code="undefined-h")
    return Fraction(1, sn + 1)


_SET_FUNCTIONS = {
    MeasureKind.VAT: vat_set,
    MeasureKind.VAT_UNSMOOTHED: unsmoothed_vat_set,
    MeasureKind.CONDUCTANCE: conductance_set,
    MeasureKind.VERTEX_EXPANSION: vertex_expansion_set,
    MeasureKind.INTEGRITY: integrity_set,
    MeasureKind.TOUGHNESS: toughness_set,
    MeasureKind.TENACITY: tenacity_set,
    MeasureKind.SCATTERING: scattering_set,
    MeasureKind.INV_SCATTERING: inv_scattering_set,
}


def evaluate(g: Graph, kind: MeasureKind, s: VertexSet) -> Fraction:
    """Evaluate ``kind`` on a single set; integer-valued measures come back as Fractions."""
    return Fraction(_SET_FUNCTIONS[MeasureKind(kind)](g, s))


def vat_of_mask(g: Graph, mask: int) -> Optional[Fraction]:
    """Hot-path VAT for solvers: None for the empty and the full set."""
    if mask == 0 or mask == g.full_mask:
        return None
    _, _, remainder = _survivors(g, mask)
    return Fraction(mask.bit_count(), remainder + 1)


# ---------------------------------------------------------------------------
# Exhaustive optimization
# ---------------------------------------------------------------------------

def twin_classes(g: Graph) -> List[List[int]]:
    """Partition nodes into classes of closed twins, then open twins, then singletons."""
    by_closed: Dict[int, List[int]] = {}
    for v in range(g.n):
        by_closed.setdefault(g.masks[v] | (1 << v), []).append(v)
    classes: List[List[int]] = []
    singles: List[int] = []
    for members in by_closed.values():
        if len(members) > 1:
            classes.append(members)
        else:
            singles.append(members[0])
    by_open: Dict[int, List[int]] = {}
    for v in singles:
        by_open.setdefault(g.masks[v], []).append(v)
    classes.extend(by_open.values())
    return sorted((sorted(c) for c in classes), key=lambda c: c[0])


def search_space_size(classes: Sequence[Sequence[int]]) -> int:
    return math.prod(len(c) + 1 for c in classes)


def _objective(kind: MeasureKind, g: Graph, mask: int, k: int, stats: Tuple[int, int, int],
               extra: Dict[str, int]) -> Optional[Fraction]:
    """Signed objective (always minimized); None when the set is outside the kind's domain."""
    omega, c_max, remainder = stats
    if kind is MeasureKind.VAT:
        return Fraction(k, remainder + 1)
    if kind is MeasureKind.VAT_UNSMOOTHED:
        return Fraction(k, remainder) if remainder > 0 else None
    if kind is MeasureKind.CONDUCTANCE:
        vol = extra["vol"]
        if vol > g.m_edges or vol == 0:
            return None
        return Fraction(extra["cut"], vol)
    if kind is MeasureKind.VERTEX_EXPANSION:
        return Fraction(g.n * extra["boundary"], k * (g.n - k))
    if kind is MeasureKind.INTEGRITY:
        return Fraction(k + c_max)
    if omega < 2:
        return None
    if kind is MeasureKind.TOUGHNESS:
        return Fraction(k, omega)
    if kind is MeasureKind.TENACITY:
        return Fraction(k + c_max, omega)
    # SCATTERING and INV_SCATTERING both maximize omega - |S|.
    return Fraction(k - omega)


def _lex(mask: int) -> Tuple[int, ...]:
    return tuple(VertexSet(mask, mask.bit_length()).indices())


def witness_key(value: Fraction, mask: int) -> Tuple[Fraction, int, Tuple[int, ...]]:
    """Deterministic order shared by every solver: value, then |S|, then sorted node list."""
    return value, mask.bit_count(), _lex(mask)


def _better(candidate: Tuple[Fraction, int, int], incumbent: Optional[Tuple[Fraction, int, int]]) -> bool:
    if incumbent is None:
        return True
    if candidate[0] != incumbent[0]:
        return candidate[0] < incumbent[0]
    if candidate[1] != incumbent[1]:
        return candidate[1] < incumbent[1]
    return _lex(candidate[2]) < _lex(incumbent[2])


def _scan_chunk(
    g: Graph,
    prefixes: List[List[int]],
    head: Tuple[int, ...],
    kinds: Tuple[MeasureKind, ...],
    collect_all: bool,
) -> Dict[MeasureKind, Tuple[Optional[Tuple[Fraction, int, int]], List[int]]]:
    head_mask = 0
    for cls, count in zip(prefixes, head):
        head_mask |= cls[count]
    tail = prefixes[len(head):]
    need_cut = any(k is MeasureKind.CONDUCTANCE for k in kinds)
    need_boundary = any(k is MeasureKind.VERTEX_EXPANSION for k in kinds)
    full = g.full_mask

    best: Dict[MeasureKind, Optional[Tuple[Fraction, int, int]]] = {k: None for k in kinds}
    ties: Dict[MeasureKind, List[int]] = {k: [] for k in kinds}

    for counts in itertools.product(*(range(len(cls)) for cls in tail)):
        mask = head_mask
        for cls, count in zip(tail, counts):
            mask |= cls[count]
        if mask == 0 or mask == full:
            continue
        k = mask.bit_count()
        stats = _survivors(g, mask)
        extra: Dict[str, int] = {}
        if need_cut:
            extra["cut"] = cut_count(g, mask)
            extra["vol"] = volume_of(g, mask)
        if need_boundary:
            extra["boundary"] = boundary_mask(g, mask).bit_count()
        for kind in kinds:
            value = _objective(kind, g, mask, k, stats, extra)
            if value is None:
                continue
            current = best[kind]
            if collect_all:
                if current is None or value < current[0]:
                    ties[kind] = [mask]
                elif value == current[0]:
                    ties[kind].append(mask)
            candidate = (value, k, mask)
            if _better(candidate, current):
                best[kind] = candidate
    return {kind: (best[kind], ties[kind]) for kind in kinds}


def _prefix_masks(classes: Sequence[Sequence[int]]) -> List[List[int]]:
    prefixes: List[List[int]] = []
    for cls in classes:
        masks = [0]
        for v in cls:
            masks.append(masks[-1] | (1 << v))
        prefixes.append(masks)
    return prefixes


def _scan(
    g: Graph,
    kinds: Tuple[MeasureKind, ...],
    cap: int,
    n_jobs: int,
    collect_all: bool = False,
) -> Tuple[Dict[MeasureKind, Tuple[Optional[Tuple[Fraction, int, int]], List[int]]], int]:
    require_measurable(g)
    classes = twin_classes(g)
    space = search_space_size(classes)
    if space > 2 ** cap:
        raise TooLargeError(
            f"subset space of {space} sets (n={g.n}, {len(classes)} twin classes) exceeds 2^{cap}"
        )
    # Largest classes first keeps the head split balanced across workers.
    classes = sorted(classes, key=len, reverse=True)
    prefixes = _prefix_masks(classes)

    head_len = 0
    if n_jobs > 1:
        chunks = 1
        while head_len < len(prefixes) and chunks < 4 * n_jobs:
            chunks *= len(prefixes[head_len])
            head_len += 1
    heads = list(itertools.product(*(range(len(p)) for p in prefixes[:head_len])))

    if n_jobs > 1 and len(heads) > 1:
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_scan_chunk)(g, prefixes, head, kinds, collect_all) for head in heads
        )
    else:
        parts = [_scan_chunk(g, prefixes, head, kinds, collect_all) for head in heads]

    merged: Dict[MeasureKind, Tuple[Optional[Tuple[Fraction, int, int]], List[int]]] = {}
    for kind in kinds:
        best = None
        ties: List[int] = []
        for part in parts:
            candidate, part_ties = part[kind]
            if candidate is None:
                continue
            if best is None or candidate[0] < best[0]:
                ties = list(part_ties)
            elif candidate[0] == best[0]:
                ties.extend(part_ties)
            if _better(candidate, best):
                best = candidate
        merged[kind] = (best, sorted(ties, key=lambda m: (m.bit_count(), _lex(m))))
    return merged, space


def _finish(kind: MeasureKind, g: Graph, best: Optional[Tuple[Fraction, int, int]],
            started: float, space: int) -> MeasureResult:
    if best is None:
        code = "no-cut-set" if kind in (MeasureKind.SCATTERING, MeasureKind.INV_SCATTERING) else "no-valid-set"
        raise ResilienceError(f"no admissible set for {kind.value}", code=code)
    value, _, mask = best
    if kind is MeasureKind.SCATTERING:
        value = -value
    elif kind is MeasureKind.INV_SCATTERING:
        sn = -value
        if sn == -1:
            raise UndefinedMeasureError("scattering number is -1; h is undefined", code="undefined-h")
        value = Fraction(1) / (sn + 1)
    return MeasureResult(
        kind=kind,
        value=value,
        witness=VertexSet(mask, g.n),
        exact=True,
        solver="brute_force",
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        metadata={"search_space": space},
    )


def brute_force_optimize_many(
    g: Graph,
    kinds: Iterable[MeasureKind],
    cap: int | None = None,
    n_jobs: int | None = None,
) -> Dict[MeasureKind, MeasureResult | ResilienceError]:
    """
    One enumeration pass for several measures.

    Kinds with no admissible set map to the ResilienceError describing why,
    so a comparison row can annotate the cell instead of failing outright.
    """
    started = time.perf_counter()
    kinds = tuple(dict.fromkeys(MeasureKind(k) for k in kinds))
    merged, space = _scan(
        g, kinds, cap if cap is not None else config.BRUTE_FORCE_CAP, n_jobs or config.DEFAULT_THREADS
    )
    out: Dict[MeasureKind, MeasureResult | ResilienceError] = {}
    for kind in kinds:
        try:
            out[kind] = _finish(kind, g, merged[kind][0], started, space)
        except ResilienceError as exc:
            out[kind] = exc
    logger.debug("brute force over %d sets for %s took %.1f ms",
                 space, [k.value for k in kinds], (time.perf_counter() - started) * 1000.0)
    return out


def brute_force_optimize(
    g: Graph,
    kind: MeasureKind,
    cap: int | None = None,
    n_jobs: int | None = None,
) -> MeasureResult:
    """Exact optimum with the smallest, then lexicographically least, witness."""
    result = brute_force_optimize_many(g, [kind], cap=cap, n_jobs=n_jobs)[MeasureKind(kind)]
    if isinstance(result, ResilienceError):
        raise result
    return result


def inv_scattering(g: Graph, cap: int | None = None, n_jobs: int | None = None) -> MeasureResult:
    """h(G) = 1 / (sn(G) + 1) with the argmax scattering set as witness."""
    return brute_force_optimize(g, MeasureKind.INV_SCATTERING, cap=cap, n_jobs=n_jobs)


def optimal_sets(g: Graph, kind: MeasureKind, cap: int | None = None) -> List[VertexSet]:
    """All optimal sets up to twin symmetry, smallest and lexicographically least first."""
    kind = MeasureKind(kind)
    merged, _ = _scan(g, (kind,), cap if cap is not None else config.BRUTE_FORCE_CAP, 1, collect_all=True)
    best, ties = merged[kind]
    if best is None:
        raise ResilienceError(f"no admissible set for {kind.value}", code="no-valid-set")
    return [VertexSet(mask, g.n) for mask in ties]


__all__ = [
    "MeasureResult",
    "brute_force_optimize",
    "brute_force_optimize_many",
    "conductance_set",
    "evaluate",
    "integrity_set",
    "inv_scattering",
    "inv_scattering_set",
    "optimal_sets",
    "require_measurable",
    "scattering_set",
    "search_space_size",
    "tenacity_set",
    "toughness_set",
    "twin_classes",
    "unsmoothed_vat_set",
    "vat_of_mask",
    "vat_set",
    "vertex_expansion_set",
    "witness_key",
]
