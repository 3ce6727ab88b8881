from __future__ import annotations

from collections import Counter

import networkx as nx
import pydantic
import pytest

from errors import ResilienceError
from generators import (
    DegreeSequence,
    gen_ba,
    gen_barbell10,
    gen_big_barbell,
    gen_pendant_ring,
    gen_plod_from_degrees,
    gen_random_connected,
    gen_random_regular,
    gen_ring_of_cliques,
    gen_star,
    gen_wheel10,
    generate,
)
from graph_core import connected_components, degree_sequence, is_connected, is_regular
from models import GenSpec, GraphFamily


def test_star():
    assert gen_star(4).edges() == [(0, 1), (0, 2), (0, 3)]
    assert degree_sequence(gen_star(10)) == [9] + [1] * 9
    with pytest.raises(ResilienceError):
        gen_star(2)


def test_barbell_has_one_bridge(barbell):
    assert barbell.n == 10
    assert barbell.m_edges == 15
    assert is_regular(barbell) == 3
    assert list(nx.bridges(barbell.to_networkx())) in ([(1, 6)], [(6, 1)])
    stats = connected_components(barbell, barbell.vertex_set([1]))
    assert stats.component_sizes == (5, 4)


def test_big_barbell():
    g = gen_big_barbell(12)
    assert g.n == 24
    assert g.m_edges == 12 * 11 + 1
    assert (0, 12) in g.edges()
    small = gen_big_barbell(3)
    assert (small.n, small.m_edges) == (6, 7)
    with pytest.raises(ResilienceError):
        gen_big_barbell(2)


@pytest.mark.parametrize("topology", ["mobius", "prism"])
def test_wheel_topologies(topology):
    g = gen_wheel10(topology)
    assert g.n == 10
    assert g.m_edges == 15
    assert is_regular(g) == 3
    assert nx.node_connectivity(g.to_networkx()) == 3


def test_wheel_default_is_bipartite_mobius_ladder(wheel):
    assert nx.is_bipartite(wheel.to_networkx())
    assert not nx.is_bipartite(gen_wheel10("prism").to_networkx())
    with pytest.raises(ResilienceError):
        gen_wheel10("spoked")


def test_ring_of_cliques_is_regular():
    g = gen_ring_of_cliques(4, 4)
    assert g.n == 16
    assert g.m_edges == 24
    assert is_regular(g) == 3
    assert is_connected(g)
    assert is_regular(gen_ring_of_cliques(6, 3)) == 2


def test_pendant_ring_is_cubic():
    g = gen_pendant_ring(3)
    assert g.n == 18
    assert g.m_edges == 27
    assert is_regular(g) == 3
    assert is_connected(g)
    with pytest.raises(ResilienceError):
        gen_pendant_ring(2)


def test_ba_edge_count_and_connectivity():
    for seed in range(5):
        g = gen_ba(5, 2, seed)
        assert g.m_edges == 7
        assert is_connected(g)
    tree = gen_ba(40, 1, seed=3)
    assert tree.m_edges == 39
    assert is_connected(tree)
    g = gen_ba(100, 2, seed=11)
    assert g.m_edges == 3 + 2 * 97
    assert all(d >= 2 for d in degree_sequence(g)[:3])


def test_ba_is_seeded():
    assert gen_ba(300, 2, seed=7).edges() == gen_ba(300, 2, seed=7).edges()
    assert gen_ba(300, 2, seed=7).edges() != gen_ba(300, 2, seed=8).edges()


def test_ba_rejects_small_n():
    with pytest.raises(ResilienceError):
        gen_ba(2, 2, seed=0)


@pytest.mark.parametrize("degrees", [[3, 3, 1, 1], [2, 2, 1], [0, 1, 1], []])
def test_non_graphical_degree_sequences(degrees):
    with pytest.raises(ResilienceError) as info:
        DegreeSequence.of(degrees)
    assert info.value.code == "non-graphical"


def test_plod_star_degrees_force_a_star():
    draw = gen_plod_from_degrees(degree_sequence(gen_star(10)), seed=4)
    assert draw.connected
    assert degree_sequence(draw.graph) == [9] + [1] * 9
    assert draw.graph.edges() == gen_star(10).edges()


def test_plod_four_cycle():
    draw = gen_plod_from_degrees([2, 2, 2, 2], seed=1)
    assert draw.connected
    assert draw.graph.m_edges == 4
    assert nx.is_isomorphic(draw.graph.to_networkx(), nx.cycle_graph(4))


def test_plod_preserves_ba_degrees():
    ba = gen_ba(200, 2, seed=5)
    draw = gen_plod_from_degrees(degree_sequence(ba), seed=5)
    assert degree_sequence(draw.graph) == degree_sequence(ba)
    assert Counter(degree_sequence(draw.graph)) == Counter(degree_sequence(ba))
    again = gen_plod_from_degrees(degree_sequence(ba), seed=5)
    assert again.graph.edges() == draw.graph.edges()


def test_plod_reports_disconnected_draws():
    # Six 2s realize as a 6-cycle or as two triangles.
    for seed in range(10):
        draw = gen_plod_from_degrees([2] * 6, seed=seed, max_retries=50)
        assert draw.connected == is_connected(draw.graph)
        assert degree_sequence(draw.graph) == [2] * 6


def test_random_families_are_connected():
    for seed in range(5):
        assert is_connected(gen_random_connected(15, 0.05, seed))
    g = gen_random_regular(3, 12, seed=2)
    assert is_regular(g) == 3
    assert is_connected(g)


def test_generate_dispatch():
    assert generate(GenSpec(family=GraphFamily.STAR, n=6)).n == 6
    assert generate(GenSpec(family=GraphFamily.BIG_BARBELL, n=4)).n == 8
    assert generate(GenSpec(family=GraphFamily.WHEEL10, topology="prism")).m_edges == 15
    assert generate(GenSpec(family=GraphFamily.BA, n=30, m=2, seed=1)).n == 30
    assert generate(GenSpec(family=GraphFamily.PLOD, degrees=[2, 2, 2], seed=0)).m_edges == 3


@pytest.mark.parametrize(
    "payload",
    [
        {"family": "star"},
        {"family": "ba", "n": 5},
        {"family": "ba", "n": 2, "m": 2},
        {"family": "plod"},
    ],
)
def test_gen_spec_validation(payload):
    with pytest.raises(pydantic.ValidationError):
        GenSpec(**payload)
