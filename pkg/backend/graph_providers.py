from __future__ import annotations

from pathlib import Path
from typing import List, Protocol, runtime_checkable

import config
from generators import generate
from graph_core import Graph, read_edge_list
from models import GraphSource


@runtime_checkable
class GraphProvider(Protocol):
    """Protocol describing objects that can turn a GraphSource into a Graph."""

    def get_graph(self, source: GraphSource) -> Graph:
        """Return the graph the source names."""


class FixtureGraphProvider:
    """Loads edge-list fixtures from backend/data/fixtures (or VAT_FIXTURES_DIR)."""

    SUFFIX = ".edges"

    def __init__(self, fixtures_dir: str | Path | None = None) -> None:
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else config.FIXTURES_DIR

    def _resolve_path(self, name: str) -> Path:
        path = Path(name)
        if path.is_absolute():
            return path
        if not name.endswith(self.SUFFIX):
            name = f"{name}{self.SUFFIX}"
        return self.fixtures_dir / name

    def available(self) -> List[str]:
        if not self.fixtures_dir.exists():
            return []
        return sorted(p.stem for p in self.fixtures_dir.glob(f"*{self.SUFFIX}"))

    def describe(self, name: str) -> str:
        """Leading '#' comment block of the fixture file."""
        path = self._resolve_path(name)
        if not path.exists():
            raise FileNotFoundError(f"Fixture not found: {path}")
        lines = []
        for raw in path.read_text().splitlines():
            if not raw.startswith("#"):
                break
            lines.append(raw.lstrip("# ").rstrip())
        return "\n".join(lines)

    def load(self, name: str) -> Graph:
        path = self._resolve_path(name)
        if not path.exists():
            raise FileNotFoundError(f"Fixture not found: {path}")
        return read_edge_list(path)

    def get_graph(self, source: GraphSource) -> Graph:
        if source.fixture is None:
            raise ValueError(f"source {source.graph_id!r} has no fixture")
        return self.load(source.fixture)


class GeneratorGraphProvider:
    """Builds graphs from a GenSpec; seeded families are reproducible."""

    def get_graph(self, source: GraphSource) -> Graph:
        if source.generate is None:
            raise ValueError(f"source {source.graph_id!r} has no generator spec")
        return generate(source.generate)


class DefaultGraphProvider:
    """Dispatches to fixtures or generators depending on the source."""

    def __init__(self, fixtures_dir: str | Path | None = None) -> None:
        self.fixtures = FixtureGraphProvider(fixtures_dir)
        self.generators = GeneratorGraphProvider()

    def get_graph(self, source: GraphSource) -> Graph:
        if source.fixture is not None:
            return self.fixtures.get_graph(source)
        return self.generators.get_graph(source)


__all__ = ["DefaultGraphProvider", "FixtureGraphProvider", "GeneratorGraphProvider", "GraphProvider"]
