import io

import pytest

from commscope.graph import CommunityStructure, Graph, load_communities, load_graph


def make_graph(edges, extra_nodes=()):
    return Graph(edges, extra_nodes)


def make_structure(graph, assignment):
    """Build a partition from a node -> label mapping (labels densified in
    graph node order)."""
    labels = []
    index = {}
    dense = {}
    for u in graph.nodes:
        lab = assignment[u]
        if lab not in index:
            index[lab] = len(labels) + 1
            labels.append(str(lab))
        dense[u] = index[lab]
    return CommunityStructure(graph, dense, labels)


def load_pair(edge_text, partition_text):
    graph, _ = load_graph(io.StringIO(edge_text))
    cs = load_communities(io.StringIO(partition_text), graph)
    return graph, cs


@pytest.fixture
def g1():
    """Triangle a,b,c plus pendant edge a-d; partition {a,b,c} / {d}."""
    graph = make_graph([("a", "b"), ("a", "c"), ("b", "c"), ("a", "d")])
    cs = make_structure(graph, {"a": "X", "b": "X", "c": "X", "d": "Y"})
    return graph, cs


@pytest.fixture
def six_cycle():
    edges = [(f"v{i}", f"v{(i + 1) % 6}") for i in range(6)]
    graph = make_graph(edges)
    cs = make_structure(graph, {f"v{i}": ("A" if i < 3 else "B") for i in range(6)})
    return graph, cs
