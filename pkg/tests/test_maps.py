import numpy as np
import pytest

import oracles
from charbound.additive import energy, graph_energy
from charbound.groups import GroupSpec, power
from charbound.maps import (
    random_injection_map,
    sidon_energy,
    sidon_graph,
    sidon_image_map,
    sidon_set,
    walsh_paley_map,
)

Z2 = GroupSpec((2,))


def test_sidon_set_is_sum_distinct():
    S = sidon_set(1009, 20)
    sums = sorted((a + b) % 1009 for i, a in enumerate(S) for b in S[i:])
    assert len(sums) == len(set(sums)) == 20 * 21 // 2
    assert energy(GroupSpec((1009,)), [(s,) for s in S]) == sidon_energy(20)


def test_sidon_set_stalls():
    with pytest.raises(ValueError):
        sidon_set(11, 8)


def test_walsh_paley_targets():
    graph = walsh_paley_map(3, 257)
    d = graph.as_dict()
    assert d[(1, 0, 0)] == (1,) and d[(0, 1, 1)] == (6,) and d[(1, 1, 1)] == (7,)


def test_random_injection(rng):
    G = power(Z2, 4)
    graph = random_injection_map(G, list(G.elements()), GroupSpec((17,)), rng)
    assert len(graph.image) == 16
    with pytest.raises(ValueError):
        random_injection_map(G, list(G.elements()), GroupSpec((7,)), rng)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_sidon_graph_small(k):
    G = power(Z2, k)
    res = sidon_graph(G, list(G.elements()), 1009, seed=k)
    assert res.verified and res.conflicts == 0
    n = 2**k
    assert graph_energy(res.graph) == sidon_energy(n)
    if k <= 3:
        assert oracles.naive_graph_energy(res.graph.pairs, G.orders, (1009,)) == sidon_energy(n)
    assert len(res.graph.image) == n


def test_sidon_graph_deterministic():
    G = power(Z2, 4)
    a = sidon_graph(G, list(G.elements()), 257, seed=3)
    b = sidon_graph(G, list(G.elements()), 257, seed=3)
    assert a.graph == b.graph


def test_sidon_graph_verified_flag_is_exact():
    # tight target with a short budget: whatever the outcome, the flag must match an exact count
    G = power(Z2, 4)
    res = sidon_graph(G, list(G.elements()), 17, seed=0, max_moves=200, patience=100)
    assert len(res.graph.image) == 16
    assert res.verified == (graph_energy(res.graph) == sidon_energy(16))


def test_sidon_image_map_graph_is_sidon():
    G = GroupSpec((3, 4))
    graph = sidon_image_map(G, list(G.elements()), 1009)
    assert graph_energy(graph) == sidon_energy(12)
    assert np.array_equal(sorted(b for (b,) in graph.image), sidon_set(1009, 12))
