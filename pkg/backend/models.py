from __future__ import annotations

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

import config


class MeasureKind(str, Enum):
    VAT = "vat"
    VAT_UNSMOOTHED = "vat_unsmoothed"
    CONDUCTANCE = "conductance"
    VERTEX_EXPANSION = "vertex_expansion"
    INTEGRITY = "integrity"
    TOUGHNESS = "toughness"
    TENACITY = "tenacity"
    SCATTERING = "scattering"
    INV_SCATTERING = "inv_scattering"

    @property
    def maximize(self) -> bool:
        return self is MeasureKind.SCATTERING


class GraphFamily(str, Enum):
    STAR = "star"
    BARBELL10 = "barbell10"
    BIG_BARBELL = "big_barbell"
    WHEEL10 = "wheel10"
    BA = "ba"
    PLOD = "plod"


WheelTopology = Literal["mobius", "prism"]
Solver = Literal["exact", "heuristic"]


class GenSpec(BaseModel):
    family: GraphFamily
    n: Optional[int] = Field(None, ge=1, description="Node count (star, BA); clique size for big barbell")
    m: Optional[int] = Field(None, ge=1, description="BA attachment count")
    degrees: Optional[List[int]] = Field(None, description="PLOD degree sequence")
    seed: Optional[int] = Field(None, description="PRNG seed for random families")
    topology: WheelTopology = "mobius"
    max_retries: int = Field(100, ge=1)

    @model_validator(mode="after")
    def _check_family_params(self) -> "GenSpec":
        if self.family in (GraphFamily.STAR, GraphFamily.BIG_BARBELL) and self.n is None:
            raise ValueError(f"{self.family.value} requires n")
        if self.family is GraphFamily.BA:
            if self.n is None or self.m is None:
                raise ValueError("ba requires n and m")
            if self.n <= self.m:
                raise ValueError("ba requires n > m")
        if self.family is GraphFamily.PLOD and not self.degrees:
            raise ValueError("plod requires degrees")
        return self


class GAConfig(BaseModel):
    population: int = Field(config.DEFAULT_POPULATION, ge=2)
    generations: int = Field(config.DEFAULT_GENERATIONS, ge=0)
    crossover_prob: float = Field(0.9, ge=0.0, le=1.0)
    # None means 1/n for the graph being searched.
    mutation_prob: Optional[float] = Field(None, ge=0.0, le=1.0)
    tournament_size: int = Field(3, ge=1)
    seed: int = 0
    log_every: int = Field(1000, ge=1)

    @model_validator(mode="after")
    def _check_even_population(self) -> "GAConfig":
        if self.population % 2:
            raise ValueError("population must be even for pairwise crossover")
        return self


class ResultRecord(BaseModel):
    """Serialized MeasureResult; witness is a sorted 1-based node list."""

    graph_id: str
    kind: MeasureKind
    numerator: int
    denominator: int
    value: float
    witness: List[int]
    exact: bool
    solver: str
    seed: Optional[int] = None
    wall_time_ms: float = 0.0
    metadata: Dict[str, Any] = Field(default_factory=dict)


class GraphSource(BaseModel):
    """A comparison row: either a generator spec or a fixture file name."""

    graph_id: str
    generate: Optional[GenSpec] = None
    fixture: Optional[str] = None
    strict: bool = True

    @model_validator(mode="after")
    def _one_source(self) -> "GraphSource":
        if (self.generate is None) == (self.fixture is None):
            raise ValueError("exactly one of generate / fixture is required")
        return self


class ExperimentSpec(BaseModel):
    name: Literal["measure_comparison", "model_comparison", "attack_report"]
    graphs: List[GraphSource] = []
    sizes: List[int] = [40, 45, 100, 250, 500, 1000, 2500]
    # Sizes at or above this only run with full_scale.
    full_scale_from: int = 1000
    full_scale: bool = False
    ba_m: int = Field(2, ge=1)
    seeds: List[int] = list(range(10))
    solver: Solver = "heuristic"
    exact_cap: int = Field(config.BRUTE_FORCE_CAP, ge=1)
    bnb_cap: int = Field(config.BNB_NODE_CAP, ge=3)
    ga: GAConfig = Field(default_factory=GAConfig)
    cuts: int = Field(config.DEFAULT_CUTS, ge=0)
    max_j: int = Field(config.DEFAULT_MAX_J, ge=1)
    threads: int = Field(config.DEFAULT_THREADS, ge=1)
    out_dir: Optional[str] = None


class AttackReportRecord(BaseModel):
    graph_id: str
    witness: List[int]
    component_sizes: List[int]
    tau_numerator: int
    tau_denominator: int
    tau: float
    graphml_path: Optional[str] = None
    histogram_path: Optional[str] = None


class ConductanceBoundReport(BaseModel):
    d: int
    phi: float
    tau: float
    phi_fraction: str
    tau_fraction: str
    hypothesis_holds: bool
    conclusion_holds: bool
    weak_conclusion_holds: bool
    vacuous: bool


class ConnectedWitnessReport(BaseModel):
    d: int
    phi: float
    optimal_sets: int
    connected_optimal_sets: int
    example_connected: Optional[List[int]] = None
    holds: bool


# ---------------------------------------------------------------------------
# HTTP bodies
# ---------------------------------------------------------------------------

class GenerateResponse(BaseModel):
    family: GraphFamily
    n: int
    m_edges: int
    connected: bool
    edges: str = Field(..., description="Edge list text, 1-based labels")


class MeasureRequest(BaseModel):
    edges: str = Field(..., description="Edge list text, 1-based labels")
    kind: MeasureKind
    nodes: List[int] = Field(..., description="1-based attack set")


class MeasureResponse(BaseModel):
    kind: MeasureKind
    numerator: int
    denominator: int
    value: float


class OptimizeRequest(BaseModel):
    edges: str
    kind: MeasureKind = MeasureKind.VAT
    solver: Solver = "exact"
    graph_id: str = "request"
    cap: Optional[int] = Field(None, ge=1)
    ga: GAConfig = Field(default_factory=lambda: GAConfig(generations=200))
    cuts: int = Field(20, ge=0, le=10_000)
    max_j: int = Field(2, ge=1, le=3)


class AttackReportRequest(BaseModel):
    edges: str
    nodes: List[int]
    graph_id: str = "request"
