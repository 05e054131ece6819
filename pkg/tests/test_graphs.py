import numpy as np
import pytest
from hypothesis import given, strategies as st

from bcc.errors import (
    BadPartIndexError,
    EnumerationCapExceededError,
    SideMismatchError,
    ValidationError,
)
from bcc.generators import random_bipartite_graph
from bcc.graphs import (
    Partition,
    distinct_left_neighbors,
    enumerate_partitions,
    make_graph,
    merged_partition,
    quotient_degree,
    quotient_edge_count,
    singleton_partition,
)
from oracles import quotient_edges_sets


def test_make_graph_dedups_and_sorts():
    g = make_graph(3, 2, [(2, 1), (0, 0), (2, 1), (0, 1)])
    assert g.adjacency == ((0, 1), (), (1,))
    assert list(g.edges()) == [(0, 0), (0, 1), (2, 1)]
    assert g.edge_count == 3
    assert g.degree_left(0) == 2 and g.degree_left(1) == 0
    assert g.degree_right(1) == 2
    assert g.right_adjacency == ((0,), (0, 2))


def test_make_graph_rejects_out_of_range():
    with pytest.raises(ValidationError):
        make_graph(2, 2, [(2, 0)])
    with pytest.raises(ValidationError):
        make_graph(2, 2, [(0, -1)])


def test_left_masks():
    g = make_graph(3, 2, [(0, 0), (2, 0), (2, 1)])
    assert g.left_masks == (0b101, 0b100)


def test_partition_validation():
    with pytest.raises(ValidationError):
        Partition(2, 2, (0, 2))
    with pytest.raises(ValidationError):
        Partition(2, 2, (0,))
    p = Partition(4, 2, (0, 1, 0, 1))
    assert p.part(0) == (0, 2)
    with pytest.raises(BadPartIndexError):
        p.part(2)


def test_singleton_and_merged_partitions():
    p = singleton_partition(3, 5)
    assert p.assignment == (0, 1, 2)
    with pytest.raises(ValidationError):
        singleton_partition(5, 3)
    assert merged_partition(4).assignment == (0, 0, 0, 0)


def test_quotient_edge_count_known():
    g = make_graph(4, 4, [(i, i) for i in range(4)])
    p1 = Partition(4, 2, (0, 0, 1, 1))
    p2 = Partition(4, 2, (0, 1, 0, 1))
    # pairs: (0,0), (0,1), (1,0), (1,1) all hit
    assert quotient_edge_count(g, p1, p2) == 4
    assert quotient_edge_count(g, p1, Partition(4, 2, (0, 0, 1, 1))) == 2


def test_quotient_side_mismatch():
    g = make_graph(2, 3, [(0, 0)])
    with pytest.raises(SideMismatchError):
        quotient_edge_count(g, Partition(3, 1, (0, 0, 0)), Partition(3, 1, (0, 0, 0)))


@given(st.integers(0, 500))
def test_quotient_count_matches_set_oracle(seed):
    rng = np.random.default_rng(seed)
    v1, v2 = int(rng.integers(1, 6)), int(rng.integers(1, 6))
    g = random_bipartite_graph(v1, v2, float(rng.uniform(0, 1)), seed=seed)
    k1, k2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    p1 = Partition(v1, k1, tuple(int(v) for v in rng.integers(0, k1, v1)))
    p2 = Partition(v2, k2, tuple(int(v) for v in rng.integers(0, k2, v2)))
    assert quotient_edge_count(g, p1, p2) == quotient_edges_sets(g, p1, p2)


def test_quotient_degree():
    g = make_graph(4, 4, [(i, i) for i in range(4)] + [(0, 3)])
    p1 = Partition(4, 2, (0, 0, 1, 1))
    p2 = Partition(4, 2, (0, 1, 0, 1))
    assert quotient_degree(g, p1, p2, "left", 0) == 2
    assert quotient_degree(g, p1, p2, "right", 1) == 2
    with pytest.raises(BadPartIndexError):
        quotient_degree(g, p1, p2, "left", 5)
    with pytest.raises(ValidationError):
        quotient_degree(g, p1, p2, "middle", 0)


def test_distinct_left_neighbors():
    g = make_graph(4, 3, [(0, 0), (1, 0), (1, 1), (3, 2)])
    assert distinct_left_neighbors(g, [0, 1]) == 2
    assert distinct_left_neighbors(g, [0, 1, 2]) == 3
    assert distinct_left_neighbors(g, []) == 0


def test_enumerate_partitions_lex_and_cap():
    got = list(enumerate_partitions(2, 2))
    assert [p.assignment for p in got] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(list(enumerate_partitions(3, 3))) == 27
    with pytest.raises(EnumerationCapExceededError):
        list(enumerate_partitions(10, 10, cap=100))
