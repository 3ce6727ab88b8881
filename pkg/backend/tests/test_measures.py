from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from conftest import random_corpus
from errors import (
    DegenerateSetError,
    DisconnectedGraphError,
    NotACutSetError,
    ResilienceError,
    TooLargeError,
    UndefinedMeasureError,
)
from experiments import MEASURE_COLUMNS, REFERENCE_ROWS
from generators import (
    gen_barbell10,
    gen_big_barbell,
    gen_complete,
    gen_cycle,
    gen_path,
    gen_star,
    gen_wheel10,
)
from graph_core import Graph, VertexSet
from measures import (
    brute_force_optimize,
    brute_force_optimize_many,
    conductance_set,
    evaluate,
    integrity_set,
    inv_scattering,
    inv_scattering_set,
    optimal_sets,
    scattering_set,
    search_space_size,
    tenacity_set,
    toughness_set,
    twin_classes,
    unsmoothed_vat_set,
    vat_set,
    vertex_expansion_set,
    witness_key,
)
from models import MeasureKind


def labels(g: Graph, *nodes: int) -> VertexSet:
    return g.vertex_set(nodes)


# ---------------------------------------------------------------------------
# Set-level values
# ---------------------------------------------------------------------------

def test_vat_set_examples(star10, k4, barbell):
    assert vat_set(star10, labels(star10, 1)) == Fraction(1, 9)
    assert vat_set(k4, labels(k4, 2)) == 1
    assert vat_set(barbell, labels(barbell, 1)) == Fraction(1, 5)


def test_vat_set_rejects_degenerate_sets(star10):
    with pytest.raises(DegenerateSetError):
        vat_set(star10, VertexSet.empty(10))
    with pytest.raises(DegenerateSetError):
        vat_set(star10, VertexSet.full(10))


def test_measures_require_connected_graph():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(DisconnectedGraphError):
        vat_set(g, VertexSet.from_labels([1], 4))


def test_unsmoothed_vat(star10, k4, big_barbell):
    assert unsmoothed_vat_set(star10, labels(star10, 1)) == Fraction(1, 8)
    assert unsmoothed_vat_set(big_barbell, labels(big_barbell, 1)) == Fraction(1, 11)
    with pytest.raises(UndefinedMeasureError) as info:
        unsmoothed_vat_set(k4, labels(k4, 1))
    assert info.value.code == "undefined-unsmoothed"


def test_smoothed_vat_is_below_unsmoothed(small_random_graphs):
    for g in small_random_graphs:
        for r in range(1, g.n):
            for nodes in itertools.islice(itertools.combinations(range(g.n), r), 20):
                s = VertexSet.from_indices(nodes, g.n)
                try:
                    hat = unsmoothed_vat_set(g, s)
                except UndefinedMeasureError:
                    continue
                assert vat_set(g, s) < hat


def test_conductance_examples(star10, cycle8):
    assert conductance_set(star10, labels(star10, 1)) == 1
    assert conductance_set(star10, labels(star10, 2, 3, 4)) == 1
    assert conductance_set(cycle8, labels(cycle8, 1, 2, 3, 4)) == Fraction(1, 4)
    with pytest.raises(ResilienceError) as info:
        conductance_set(star10, labels(star10, 1, 2))
    assert info.value.code == "volume-exceeded"


def test_vertex_expansion_examples(star10, k4):
    assert vertex_expansion_set(star10, labels(star10, 2, 3, 4, 5, 6)) == Fraction(2, 5)
    assert vertex_expansion_set(star10, labels(star10, 1)) == 10
    assert vertex_expansion_set(k4, labels(k4, 1, 2)) == 2


def test_integrity_examples(star10, big_barbell):
    assert integrity_set(star10, labels(star10, 1)) == 2
    assert integrity_set(star10, VertexSet.empty(10)) == 10
    assert integrity_set(big_barbell, labels(big_barbell, 1)) == 13
    with pytest.raises(DegenerateSetError):
        integrity_set(star10, VertexSet.full(10))


def test_toughness_and_tenacity_examples(star10, barbell, big_barbell, path5):
    assert toughness_set(star10, labels(star10, 1)) == Fraction(1, 9)
    assert toughness_set(barbell, labels(barbell, 1)) == Fraction(1, 2)
    assert toughness_set(path5, labels(path5, 3)) == Fraction(1, 2)
    assert tenacity_set(star10, labels(star10, 1)) == Fraction(2, 9)
    assert tenacity_set(big_barbell, labels(big_barbell, 1)) == Fraction(13, 2)
    assert tenacity_set(path5, labels(path5, 3)) == Fraction(3, 2)


def test_cut_set_measures_reject_non_cut_sets(star10):
    leaf = labels(star10, 2)
    for fn in (toughness_set, tenacity_set, scattering_set):
        with pytest.raises(NotACutSetError):
            fn(star10, leaf)


def test_scattering_examples(star10, barbell, path5):
    assert scattering_set(star10, labels(star10, 1)) == 8
    assert inv_scattering_set(star10, labels(star10, 1)) == Fraction(1, 9)
    assert scattering_set(barbell, labels(barbell, 1)) == 1
    assert scattering_set(path5, labels(path5, 3)) == 1


def test_inverse_scattering_undefined_at_minus_one(path5):
    s = labels(path5, 2, 3, 4)
    assert scattering_set(path5, s) == -1
    with pytest.raises(UndefinedMeasureError) as info:
        inv_scattering_set(path5, s)
    assert info.value.code == "undefined-h"


def test_prism_wheel_values():
    prism = gen_wheel10("prism")
    assert brute_force_optimize(prism, MeasureKind.VAT).value == 1
    assert brute_force_optimize(prism, MeasureKind.TOUGHNESS).value == Fraction(5, 4)
    assert brute_force_optimize(prism, MeasureKind.TENACITY).value == Fraction(7, 4)
    assert brute_force_optimize(prism, MeasureKind.SCATTERING).value == -1
    with pytest.raises(UndefinedMeasureError) as info:
        inv_scattering(prism)
    assert info.value.code == "undefined-h"


def test_evaluate_dispatches_every_kind(star10):
    center = labels(star10, 1)
    assert evaluate(star10, MeasureKind.INTEGRITY, center) == 2
    assert evaluate(star10, "toughness", center) == Fraction(1, 9)
    assert isinstance(evaluate(star10, MeasureKind.SCATTERING, center), Fraction)


# ---------------------------------------------------------------------------
# Global optimization
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", range(3, 51))
def test_star_family(n):
    g = gen_star(n)
    vat = brute_force_optimize(g, MeasureKind.VAT)
    assert vat.value == Fraction(1, n - 1)
    assert vat.witness.labels() == [1]
    assert vat.exact
    assert brute_force_optimize(g, MeasureKind.CONDUCTANCE).value == 1


def test_path_optima(path5):
    vat = brute_force_optimize(path5, MeasureKind.VAT)
    assert vat.value == Fraction(1, 3)
    assert vat.witness.labels() == [3]
    h = inv_scattering(path5)
    assert h.value == Fraction(1, 2)
    assert h.witness.labels() == [2]


def test_complete_graph_has_no_cut_set(k4):
    with pytest.raises(ResilienceError) as info:
        inv_scattering(k4)
    assert info.value.code == "no-cut-set"
    results = brute_force_optimize_many(k4, [MeasureKind.TOUGHNESS, MeasureKind.VAT])
    assert isinstance(results[MeasureKind.TOUGHNESS], ResilienceError)
    assert results[MeasureKind.VAT].value == 1


def test_k4_conductance(k4):
    phi = brute_force_optimize(k4, MeasureKind.CONDUCTANCE)
    assert phi.value == Fraction(2, 3)
    assert phi.witness.labels() == [1, 2]


@pytest.mark.parametrize(
    "graph_id, build",
    [
        ("star", lambda: gen_star(10)),
        ("barbell", gen_barbell10),
        ("big_barbell", lambda: gen_big_barbell(12)),
        ("wheel", gen_wheel10),
    ],
)
def test_reference_rows(graph_id, build):
    g = build()
    kinds = [kind for _, kind in MEASURE_COLUMNS]
    results = brute_force_optimize_many(g, kinds)
    for column, kind in MEASURE_COLUMNS:
        value = results[kind].value
        if kind is MeasureKind.INTEGRITY:
            value = value / g.n
        assert abs(float(value) - REFERENCE_ROWS[graph_id][column]) <= 0.005 + 1e-9, column


def test_exact_reference_values(star10, big_barbell):
    star = brute_force_optimize_many(star10, [kind for _, kind in MEASURE_COLUMNS])
    assert star[MeasureKind.VAT].value == Fraction(1, 9)
    assert star[MeasureKind.INTEGRITY].value == 2
    assert star[MeasureKind.TENACITY].value == Fraction(2, 9)
    assert star[MeasureKind.VERTEX_EXPANSION].value == Fraction(2, 5)

    big = brute_force_optimize_many(big_barbell, [kind for _, kind in MEASURE_COLUMNS])
    assert big[MeasureKind.VAT].value == Fraction(1, 12)
    assert big[MeasureKind.INTEGRITY].value == 13
    assert big[MeasureKind.TOUGHNESS].value == Fraction(1, 2)
    assert big[MeasureKind.TENACITY].value == Fraction(13, 2)
    assert big[MeasureKind.INV_SCATTERING].value == Fraction(1, 2)
    assert big[MeasureKind.VERTEX_EXPANSION].value == Fraction(1, 6)


def test_witness_reproduces_value(barbell):
    for kind in MeasureKind:
        result = brute_force_optimize(barbell, kind)
        assert evaluate(barbell, kind, result.witness) == result.value, kind


def _plain_optimum(g: Graph, kind: MeasureKind):
    best = None
    for mask in range(1, g.full_mask):
        s = VertexSet(mask, g.n)
        try:
            value = evaluate(g, kind, s)
        except ResilienceError:
            continue
        if kind.maximize:
            value = -value
        key = witness_key(value, mask)
        if best is None or key < best:
            best = key
    return best


@pytest.mark.parametrize(
    "kind",
    [k for k in MeasureKind if k is not MeasureKind.INV_SCATTERING],
)
def test_twin_compression_matches_plain_enumeration(kind):
    graphs = [gen_path(6), gen_cycle(6), gen_star(7), gen_complete(5), gen_barbell10()]
    graphs += random_corpus(8, min_n=5, max_n=9, seed_offset=100)
    for g in graphs:
        plain = _plain_optimum(g, kind)
        results = brute_force_optimize_many(g, [kind])
        result = results[kind]
        if plain is None:
            assert isinstance(result, ResilienceError)
            continue
        value = -result.value if kind.maximize else result.value
        assert witness_key(value, result.witness.mask) == plain


def test_twin_classes_on_barbell(barbell):
    classes = twin_classes(barbell)
    assert [0] in classes
    assert [1, 2] in classes
    assert [3, 4] in classes
    assert search_space_size(classes) == 18 * 18


def test_parallel_scan_matches_serial(barbell):
    kinds = list(MeasureKind)
    serial = brute_force_optimize_many(barbell, kinds, n_jobs=1)
    parallel = brute_force_optimize_many(barbell, kinds, n_jobs=2)
    for kind in kinds:
        assert serial[kind].value == parallel[kind].value
        assert serial[kind].witness == parallel[kind].witness


def test_cap_is_enforced(barbell):
    with pytest.raises(TooLargeError):
        brute_force_optimize(barbell, MeasureKind.VAT, cap=5)


def test_relabeling_keeps_optimal_values(barbell):
    perm = [4, 8, 1, 0, 6, 9, 3, 2, 7, 5]
    relabeled = barbell.relabel(perm)
    for kind in (MeasureKind.VAT, MeasureKind.TENACITY, MeasureKind.CONDUCTANCE):
        original = brute_force_optimize(barbell, kind)
        moved = brute_force_optimize(relabeled, kind)
        assert original.value == moved.value
        image = VertexSet.from_indices((perm[i] for i in original.witness.indices()), barbell.n)
        assert evaluate(relabeled, kind, image) == original.value


def test_vat_lower_bound_on_random_graphs(small_random_graphs):
    for g in small_random_graphs:
        assert brute_force_optimize(g, MeasureKind.VAT).value >= Fraction(1, g.n - 1)


@pytest.mark.slow
def test_vat_lower_bound_on_large_corpus():
    for g in random_corpus(200, min_n=4, max_n=12):
        assert brute_force_optimize(g, MeasureKind.VAT).value >= Fraction(1, g.n - 1)


def test_optimal_conductance_sets_on_cycle(cycle8):
    sets = optimal_sets(cycle8, MeasureKind.CONDUCTANCE)
    assert len(sets) == 8
    assert all(len(s) == 4 for s in sets)
    assert sets[0].labels() == [1, 2, 3, 4]


def test_result_record(star10):
    record = brute_force_optimize(star10, MeasureKind.VAT).to_record("star")
    assert record.graph_id == "star"
    assert (record.numerator, record.denominator) == (1, 9)
    assert record.witness == [1]
    assert record.solver == "brute_force"
    assert record.metadata["search_space"] == 20
