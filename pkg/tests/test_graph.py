import random
from fractions import Fraction

import pytest

from shiftopt.errors import InvalidInputError
from shiftopt.graph import build_de_bruijn, edge_path
from shiftopt.potentials import LocallyConstantPotential, constant
from shiftopt.words import EventuallyPeriodicPoint, all_words, word_index


def _zero(d, k):
    return build_de_bruijn(d, k, constant(d, k))


def test_counts():
    for d in (2, 3):
        for k in (1, 2, 3, 4):
            g = _zero(d, k)
            assert g.n_nodes == d ** (k - 1)
            assert g.n_edges == d ** k


def test_edges_are_words_glued_on_overlap():
    # an edge's word is its source word plus one symbol; its target
    # drops the first symbol — checked directly on tuples
    for d in (2, 3):
        g = _zero(d, 3)
        for e in range(g.n_edges):
            ew = g.edge_word(e)
            assert g.node_word(g.source(e)) == ew[:-1]
            assert g.node_word(g.target(e)) == ew[1:]
            assert g.edge_index(ew) == e


def test_in_out_edges_agree_with_source_target():
    g = _zero(2, 4)
    for v in range(g.n_nodes):
        assert all(g.source(e) == v for e in g.out_edges(v))
        assert all(g.target(e) == v for e in g.in_edges(v))
        assert len(list(g.out_edges(v))) == 2
        assert len(g.in_edges(v)) == 2


def test_append_prepend_arithmetic():
    g = _zero(3, 3)
    rng = random.Random(2)
    for _ in range(100):
        v = rng.randrange(g.n_nodes)
        a = rng.randrange(3)
        e = g.edge_append(v, a)
        assert g.edge_word(e) == g.node_word(v) + (a,)
        e2 = g.edge_prepend(a, v)
        assert g.edge_word(e2) == (a,) + g.node_word(v)


def test_node_index_is_base_d_rank():
    g = _zero(3, 3)
    for w in all_words(3, 2):
        assert g.node_index(w) == word_index(w, 3)


def test_weights_come_from_the_potential():
    vals = tuple(Fraction(i, 3) for i in range(8))
    pot = LocallyConstantPotential(2, 3, vals)
    g = build_de_bruijn(2, 3, pot)
    for e in range(g.n_edges):
        assert g.weight(e) == pot.value(g.edge_word(e))


def test_edge_path_slides_a_window():
    g = _zero(2, 3)
    point = EventuallyPeriodicPoint((0, 1, 1), (0, 1, 0, 0), 2)
    stream = point.prefix(7)
    path = edge_path(g, point, 4)
    assert len(path) == 4
    for i, e in enumerate(path):
        assert g.edge_word(e) == stream[i:i + 3]
    # consecutive edges must chain
    for e1, e2 in zip(path, path[1:]):
        assert g.target(e1) == g.source(e2)


def test_rejects_bad_shapes():
    with pytest.raises(InvalidInputError):
        build_de_bruijn(2, 3, constant(2, 2))
