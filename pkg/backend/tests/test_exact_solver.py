from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import random_corpus
from errors import DisconnectedGraphError, NotRegularError, TooLargeError
from exact_solver import bnb_vat, check_connected_conductance_witness, check_vat_conductance_bound
from generators import gen_pendant_ring, gen_random_regular, gen_ring_of_cliques, gen_star
from graph_core import Graph, VertexSet
from measures import brute_force_optimize, vat_set
from models import MeasureKind


def test_star_forty():
    result = bnb_vat(gen_star(40))
    assert result.value == Fraction(1, 39)
    assert result.witness.labels() == [1]
    assert result.exact
    assert result.solver == "bnb"


def test_big_barbell(big_barbell):
    result = bnb_vat(big_barbell)
    assert result.value == Fraction(1, 12)
    assert result.witness.labels() == [1]


def test_matches_brute_force(small_random_graphs):
    for g in small_random_graphs:
        exact = brute_force_optimize(g, MeasureKind.VAT)
        result = bnb_vat(g, n_jobs=1)
        assert result.value == exact.value
        assert result.witness == exact.witness


def test_pruning_never_changes_the_answer():
    for g in random_corpus(10, min_n=6, max_n=10, seed_offset=40):
        pruned = bnb_vat(g, n_jobs=1)
        full = bnb_vat(g, n_jobs=1, prune=False, warm_start=False)
        assert pruned.value == full.value
        assert pruned.witness == full.witness
        assert pruned.metadata["visited"] <= full.metadata["visited"]


def test_parallel_subtrees_agree_with_serial():
    for g in random_corpus(4, min_n=8, max_n=11, seed_offset=70):
        serial = bnb_vat(g, n_jobs=1)
        parallel = bnb_vat(g, n_jobs=2)
        assert parallel.value == serial.value
        assert parallel.witness == serial.witness
        assert parallel.metadata["workers"] == 2


def test_incumbent_history_is_non_increasing(small_random_graphs):
    for g in small_random_graphs:
        history = [Fraction(v) for v in bnb_vat(g, n_jobs=1).metadata["incumbent_history"]]
        assert history
        assert all(a >= b for a, b in zip(history, history[1:]))
        assert history[-1] == bnb_vat(g, n_jobs=1).value


def test_witness_reproduces_value(barbell):
    result = bnb_vat(barbell)
    assert vat_set(barbell, result.witness) == result.value
    assert result.value >= Fraction(1, barbell.n - 1)


def test_node_cap():
    with pytest.raises(TooLargeError):
        bnb_vat(gen_star(41))
    assert bnb_vat(gen_star(12), node_cap=12).value == Fraction(1, 11)


def test_disconnected_input():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    with pytest.raises(DisconnectedGraphError):
        bnb_vat(g)


@pytest.mark.slow
def test_oracle_equivalence_large_corpus():
    for g in random_corpus(300, min_n=6, max_n=18):
        assert bnb_vat(g, n_jobs=1).value == brute_force_optimize(g, MeasureKind.VAT).value


# ---------------------------------------------------------------------------
# Regular-graph checks
# ---------------------------------------------------------------------------

def test_conductance_bound_is_tight_on_cycle(cycle8):
    report = check_vat_conductance_bound(cycle8)
    assert report.d == 2
    assert report.phi_fraction == "1/4"
    assert report.tau_fraction == "1/2"
    assert report.hypothesis_holds
    assert not report.conclusion_holds
    assert report.weak_conclusion_holds
    assert not report.vacuous


def test_conductance_bound_is_tight_on_ring_of_cliques():
    report = check_vat_conductance_bound(gen_ring_of_cliques(4, 4))
    assert report.d == 3
    assert report.phi_fraction == "1/12"
    assert report.tau_fraction == "1/4"
    assert report.hypothesis_holds
    assert not report.conclusion_holds
    assert report.weak_conclusion_holds


def test_conductance_bound_holds_strictly_on_pendant_ring():
    report = check_vat_conductance_bound(gen_pendant_ring(3))
    assert report.phi_fraction == "1/15"
    assert report.tau_fraction == "1/6"
    assert report.hypothesis_holds
    assert report.conclusion_holds


def test_conductance_bound_vacuous_on_complete_graph(k4):
    report = check_vat_conductance_bound(k4)
    assert report.vacuous
    assert not report.hypothesis_holds
    assert report.phi_fraction == "2/3"


def test_checks_require_regular_graphs(star10):
    with pytest.raises(NotRegularError):
        check_vat_conductance_bound(star10)
    with pytest.raises(NotRegularError):
        check_connected_conductance_witness(star10)


def test_connected_conductance_witness(cycle8, k4, wheel):
    report = check_connected_conductance_witness(cycle8)
    assert report.holds
    assert report.optimal_sets == report.connected_optimal_sets == 8
    assert report.example_connected == [1, 2, 3, 4]

    complete = check_connected_conductance_witness(k4)
    assert complete.holds
    assert complete.example_connected == [1, 2]

    assert check_connected_conductance_witness(wheel).holds


def test_connected_conductance_witness_on_random_regular_graphs():
    for seed in range(5):
        g = gen_random_regular(3, 10, seed=seed)
        report = check_connected_conductance_witness(g)
        assert report.holds
        example = VertexSet.from_labels(report.example_connected, g.n)
        assert example.cardinality >= 1


@pytest.mark.slow
def test_connected_conductance_witness_corpus():
    for seed in range(50):
        d = 3 if seed % 2 else 4
        g = gen_random_regular(d, 10 + 2 * (seed % 3), seed=seed)
        assert check_connected_conductance_witness(g).holds
