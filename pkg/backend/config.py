"""Environment-driven defaults. CLI flags and request bodies override these."""

from __future__ import annotations

import os
from pathlib import Path


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


# Worker count for brute force chunks, B&B subtrees, seed climbs and experiment rows.
DEFAULT_THREADS = max(1, _env_int("VAT_THREADS", 1))

# log2 of the largest (twin-compressed) subset space brute force will walk.
BRUTE_FORCE_CAP = _env_int("VAT_BRUTE_FORCE_CAP", 20)

BNB_NODE_CAP = _env_int("VAT_BNB_NODE_CAP", 40)

# Largest node label accepted when parsing edge lists.
MAX_NODES = _env_int("VAT_MAX_NODES", 50_000)

FIXTURES_DIR = Path(
    os.getenv("VAT_FIXTURES_DIR", "").strip() or Path(__file__).parent / "data" / "fixtures"
)

LOG_LEVEL = os.getenv("VAT_LOG_LEVEL", "INFO").strip().upper() or "INFO"

# Heuristic budgets used for large graphs (GA generations of population 64,
# then hill-climbing up to two flips on the GA result and on random cuts).
DEFAULT_POPULATION = 64
DEFAULT_GENERATIONS = 100_000
DEFAULT_CUTS = 1_000
DEFAULT_MAX_J = 2
