from __future__ import annotations

import logging
from typing import Callable, TypeVar

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

import config
from errors import ResilienceError, TooLargeError
from exact_solver import bnb_vat
from experiments import attack_report
from generators import gen_plod_from_degrees, generate
from graph_core import Graph, VertexSet, is_connected, parse_edge_list, to_edge_list
from heuristic_solver import optimize_vat
from measures import brute_force_optimize, evaluate, search_space_size, twin_classes
from models import (
    AttackReportRecord,
    AttackReportRequest,
    GenerateResponse,
    GenSpec,
    GraphFamily,
    MeasureKind,
    MeasureRequest,
    MeasureResponse,
    OptimizeRequest,
    ResultRecord,
)

logger = logging.getLogger(__name__)

app = FastAPI(title="Vertex Attack Tolerance API", version="0.1.0")

# Adjust this to match your dev/preview URL for Vite
ALLOWED_ORIGINS = [
    "http://localhost:5173",
    "http://127.0.0.1:5173",
]

app.add_middleware(
    CORSMiddleware,
    allow_origins=ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Requests are served synchronously; keep HTTP searches small.
HTTP_BRUTE_FORCE_CAP = min(config.BRUTE_FORCE_CAP, 20)
HTTP_BNB_NODE_CAP = min(config.BNB_NODE_CAP, 30)
HTTP_MAX_HEURISTIC_NODES = 500
HTTP_MAX_NODES = min(config.MAX_NODES, 2_000)

T = TypeVar("T")


def _guard(fn: Callable[[], T]) -> T:
    """Map domain errors onto HTTP status codes."""
    try:
        return fn()
    except TooLargeError as exc:
        raise HTTPException(status_code=413, detail=str(exc)) from exc
    except ResilienceError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"invalid-parameter: {exc}") from exc


def _parse(edges: str) -> Graph:
    return _guard(lambda: parse_edge_list(edges, max_nodes=HTTP_MAX_NODES))


@app.get("/api/health")
def health():
    return {"ok": True}


@app.post("/api/generate", response_model=GenerateResponse)
def generate_graph(spec: GenSpec) -> GenerateResponse:
    """Generate a fixture or seeded random graph and return it as an edge list."""

    def run() -> GenerateResponse:
        if spec.family is GraphFamily.PLOD:
            draw = gen_plod_from_degrees(spec.degrees or [], spec.seed, max_retries=spec.max_retries)
            g, connected = draw.graph, draw.connected
        else:
            g = generate(spec)
            connected = is_connected(g)
        return GenerateResponse(
            family=spec.family,
            n=g.n,
            m_edges=g.m_edges,
            connected=connected,
            edges=to_edge_list(g),
        )

    return _guard(run)


@app.post("/api/measure", response_model=MeasureResponse)
def measure_set(req: MeasureRequest) -> MeasureResponse:
    g = _parse(req.edges)

    def run() -> MeasureResponse:
        value = evaluate(g, req.kind, VertexSet.from_labels(req.nodes, g.n))
        return MeasureResponse(
            kind=req.kind,
            numerator=value.numerator,
            denominator=value.denominator,
            value=float(value),
        )

    return _guard(run)


@app.post("/api/optimize", response_model=ResultRecord)
def optimize(req: OptimizeRequest) -> ResultRecord:
    """
    Global optimum of a measure: exact (brute force, or branch-and-bound for
    VAT beyond the brute-force cap) or the heuristic VAT upper bound.
    """
    g = _parse(req.edges)

    def run() -> ResultRecord:
        logger.info("optimize %s with %s solver, n=%d", req.kind.value, req.solver, g.n)
        if req.solver == "heuristic":
            if req.kind is not MeasureKind.VAT:
                raise ResilienceError("the heuristic solver only optimizes vat")
            if g.n > HTTP_MAX_HEURISTIC_NODES:
                raise TooLargeError(f"heuristic requests are capped at {HTTP_MAX_HEURISTIC_NODES} nodes")
            return optimize_vat(g, req.ga, cuts=req.cuts, max_j=req.max_j, n_jobs=1).to_record(req.graph_id)

        cap = min(req.cap or HTTP_BRUTE_FORCE_CAP, HTTP_BRUTE_FORCE_CAP)
        if req.kind is MeasureKind.VAT and search_space_size(twin_classes(g)) > 2 ** cap:
            return bnb_vat(g, node_cap=HTTP_BNB_NODE_CAP, n_jobs=1).to_record(req.graph_id)
        return brute_force_optimize(g, req.kind, cap=cap, n_jobs=1).to_record(req.graph_id)

    return _guard(run)


@app.post("/api/attack-report", response_model=AttackReportRecord)
def attack(req: AttackReportRequest) -> AttackReportRecord:
    """Component sizes left by an attack set (files are not written for HTTP callers)."""
    g = _parse(req.edges)
    return _guard(lambda: attack_report(g, VertexSet.from_labels(req.nodes, g.n), graph_id=req.graph_id))


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("main:app", host="0.0.0.0", port=8000, reload=True)
