"""
Undirected simple graphs and the set-relative primitives every measure uses.

Nodes are 0-based internally and 1-based at every text boundary (edge lists,
result records, the CLI). Vertex sets are integer bitmasks so component
sweeps over V - S stay cheap during exhaustive and heuristic searches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np

import config
from errors import DegenerateSetError, GraphFormatError


@dataclass(frozen=True)
class VertexSet:
    """Membership bitmask over the nodes of a host graph with ``n`` nodes."""

    mask: int
    n: int

    def __post_init__(self) -> None:
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask has bits outside 0..{self.n - 1}")

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls((1 << n) - 1, n)

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "VertexSet":
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise ValueError(f"node index {i} out of range for n={n}")
            mask |= 1 << i
        return cls(mask, n)

    @classmethod
    def from_labels(cls, labels: Iterable[int], n: int) -> "VertexSet":
        """Build from 1-based node labels."""
        return cls.from_indices((int(label) - 1 for label in labels), n)

    @classmethod
    def from_array(cls, bits: np.ndarray) -> "VertexSet":
        packed = np.packbits(np.asarray(bits, dtype=bool), bitorder="little")
        return cls(int.from_bytes(packed.tobytes(), "little"), int(len(bits)))

    @property
    def cardinality(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.cardinality

    def __contains__(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def indices(self) -> List[int]:
        out: List[int] = []
        m = self.mask
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return out

    def labels(self) -> List[int]:
        return [i + 1 for i in self.indices()]

    def complement(self) -> "VertexSet":
        return VertexSet(((1 << self.n) - 1) ^ self.mask, self.n)

    def flip(self, indices: Iterable[int]) -> "VertexSet":
        mask = self.mask
        for i in indices:
            mask ^= 1 << i
        return VertexSet(mask, self.n)

    def to_array(self) -> np.ndarray:
        return np.array([bool(self.mask >> i & 1) for i in range(self.n)], dtype=bool)

    def is_proper_nonempty(self) -> bool:
        return 0 < self.mask < (1 << self.n) - 1

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        """Tie-break order: smaller cardinality, then lexicographically least node list."""
        return self.cardinality, tuple(self.indices())


@dataclass(frozen=True)
class PartitionStats:
    """Component structure of the survivors V - S."""

    omega: int
    c_max: int
    remainder: int
    component_sizes: Tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on nodes 0..n-1."""

    n: int
    adjacency: Tuple[frozenset, ...]
    m_edges: int
    masks: Tuple[int, ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        """Build from 0-based edge pairs; duplicates collapse, self-loops are rejected."""
        if n < 0:
            raise GraphFormatError("node count must be non-negative")
        neighbors: List[set] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphFormatError(f"self-loop on node {u + 1}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u + 1}, {v + 1}) outside 1..{n}")
            neighbors[u].add(v)
            neighbors[v].add(u)
        adjacency = tuple(frozenset(nb) for nb in neighbors)
        masks = tuple(sum(1 << w for w in nb) for nb in adjacency)
        m_edges = sum(len(nb) for nb in adjacency) // 2
        return cls(n=n, adjacency=adjacency, m_edges=m_edges, masks=masks)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        nodes = sorted(graph.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[u], index[v]) for u, v in graph.edges()))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> List[Tuple[int, int]]:
        """0-based edges with u < v, sorted."""
        return sorted((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.n + 1))
        graph.add_edges_from((u + 1, v + 1) for u, v in self.edges())
        return graph

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with node ``i`` renamed ``perm[i]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def vertex_set(self, labels: Iterable[int]) -> VertexSet:
        return VertexSet.from_labels(labels, self.n)


# ---------------------------------------------------------------------------
# Text boundary
# ---------------------------------------------------------------------------

def parse_edge_list(text: str, max_nodes: int | None = None) -> Graph:
    """
    Parse "u v" lines (1-based labels, '#' comments) into a Graph.

    The node count is the largest label seen; duplicate lines collapse.
    Labels above ``max_nodes`` (default VAT_MAX_NODES) are rejected before
    any node storage is allocated.
    """
    limit = max_nodes if max_nodes is not None else config.MAX_NODES
    pairs: List[Tuple[int, int]] = []
    max_label = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"line {lineno}: expected two labels, got {len(tokens)}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: non-integer label in {line!r}") from exc
        if u < 1 or v < 1:
            raise GraphFormatError(f"line {lineno}: labels must be positive")
        if u > limit or v > limit:
            raise GraphFormatError(f"line {lineno}: label {max(u, v)} exceeds the {limit}-node limit")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop on node {u}")
        pairs.append((u - 1, v - 1))
        max_label = max(max_label, u, v)

    if not pairs:
        raise GraphFormatError("edge list contains no edges")
    return Graph.from_edges(max_label, pairs)


def to_edge_list(g: Graph, header: str | None = None) -> str:
    lines = [f"# {line}" for line in header.splitlines()] if header else []
    lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | Path) -> Graph:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Edge list not found: {path}")
    return parse_edge_list(path.read_text())


def write_edge_list(g: Graph, path: str | Path, header: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_edge_list(g, header))
    return path


# ---------------------------------------------------------------------------
# Bitmask kernels
# ---------------------------------------------------------------------------

def component_masks(g: Graph, alive: int) -> List[int]:
    """Connected components of the subgraph induced by ``alive``, as masks."""
    masks = g.masks
    comps: List[int] = []
    rest = alive
    while rest:
        seed = rest & -rest
        comp = seed
        frontier = seed
        while frontier:
            reach = 0
            f = frontier
            while f:
                low = f & -f
                reach |= masks[low.bit_length() - 1]
                f ^= low
            reach &= rest & ~comp
            comp |= reach
            frontier = reach
        rest &= ~comp
        comps.append(comp)
    return comps


def component_sizes(g: Graph, alive: int) -> List[int]:
    return [c.bit_count() for c in component_masks(g, alive)]


def boundary_mask(g: Graph, mask: int) -> int:
    reach = 0
    m = mask
    while m:
        low = m & -m
        reach |= g.masks[low.bit_length() - 1]
        m ^= low
    return reach & ~mask


def cut_count(g: Graph, mask: int) -> int:
    outside = g.full_mask ^ mask
    total = 0
    m = mask
    while m:
        low = m & -m
        total += (g.masks[low.bit_length() - 1] & outside).bit_count()
        m ^= low
    return total


def volume_of(g: Graph, mask: int) -> int:
    total = 0
    m = mask
    while m:
        low = m & -m
        total += len(g.adjacency[low.bit_length() - 1])
        m ^= low
    return total


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def connected_components(g: Graph, removed: VertexSet) -> PartitionStats:
    """Stats of the subgraph induced on V - removed."""
    sizes = sorted(component_sizes(g, g.full_mask ^ removed.mask), reverse=True)
    alive_count = g.n - removed.cardinality
    c_max = sizes[0] if sizes else 0
    return PartitionStats(
        omega=len(sizes),
        c_max=c_max,
        remainder=alive_count - c_max,
        component_sizes=tuple(sizes),
    )


def cut_size(g: Graph, s: VertexSet) -> int:
    if not s.is_proper_nonempty():
        raise DegenerateSetError("cut of an empty or full set", code="degenerate-cut")
    return cut_count(g, s.mask)


def volume(g: Graph, s: VertexSet) -> int:
    return volume_of(g, s.mask)


def outer_boundary(g: Graph, s: VertexSet) -> VertexSet:
    return VertexSet(boundary_mask(g, s.mask), g.n)


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return False
    return len(component_masks(g, g.full_mask)) == 1


def induced_is_connected(g: Graph, s: VertexSet) -> bool:
    return s.mask != 0 and len(component_masks(g, s.mask)) == 1


def degree_sequence(g: Graph) -> List[int]:
    return [len(nb) for nb in g.adjacency]


def is_regular(g: Graph) -> int | None:
    """Return the common degree if ``g`` is regular, else None."""
    degrees = set(degree_sequence(g))
    return degrees.pop() if len(degrees) == 1 else None


__all__ = [
    "Graph",
    "PartitionStats",
    "VertexSet",
    "boundary_mask",
    "component_masks",
    "component_sizes",
    "connected_components",
    "cut_count",
    "cut_size",
    "degree_sequence",
    "induced_is_connected",
    "is_connected",
    "is_regular",
    "outer_boundary",
    "parse_edge_list",
    "read_edge_list",
    "to_edge_list",
    "volume",
    "volume_of",
    "write_edge_list",
]
