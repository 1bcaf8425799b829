import io
import random

import pytest

from commscope.errors import InputFormatError, PartitionError, UnknownNodeError
from commscope.graph import (
    CommunityStructure,
    Graph,
    load_attributes,
    load_communities,
    load_graph,
    load_manifest,
    node_profile,
)

from conftest import make_graph, make_structure
from oracles import brute_edge_classification, random_instance


class TestLoadGraph:
    def test_triangle(self):
        g, warnings = load_graph(io.StringIO("a b\na c\nb c\n"))
        assert (g.n, g.m) == (3, 3)
        assert warnings == []

    def test_duplicate_edges_collapse_with_warning(self):
        g, warnings = load_graph(io.StringIO("a b\na b\n"))
        assert (g.n, g.m) == (2, 1)
        assert len(warnings) == 1 and "1 duplicate" in warnings[0]

    def test_reversed_duplicate_also_collapses(self):
        g, warnings = load_graph(io.StringIO("a b\nb a\n"))
        assert g.m == 1
        assert warnings

    def test_self_loop_rejected_with_line_number(self):
        with pytest.raises(InputFormatError, match="line 1"):
            load_graph(io.StringIO("a a\n"))

    def test_comments_and_blank_lines_skipped(self):
        g, _ = load_graph(io.StringIO("# header\n\na b\n"))
        assert (g.n, g.m) == (2, 1)

    def test_single_token_line_rejected(self):
        with pytest.raises(InputFormatError, match="line 2"):
            load_graph(io.StringIO("a b\nc\n"))

    def test_extra_tokens_warn(self):
        g, warnings = load_graph(io.StringIO("a b 3.5\n"))
        assert g.m == 1
        assert any("weights" in w for w in warnings)

    def test_round_trip(self):
        rng = random.Random(7)
        for _ in range(20):
            _, edges, _ = random_instance(rng)
            g = Graph(edges)
            reloaded, _ = load_graph(io.StringIO(g.to_edge_list_text()))
            assert reloaded == g


class TestLoadCommunities:
    def test_single_community_triangle(self):
        g, _ = load_graph(io.StringIO("a b\na c\nb c\n"))
        cs = load_communities(io.StringIO("a\t1\nb\t1\nc\t1\n"), g)
        assert cs.community_count == 1
        assert cs.size(1) == 3
        assert cs.internal_links(1) == 3
        assert cs.boundary_half(1) == 0

    def test_g1_boundary_halves(self, g1):
        _, cs = g1
        assert cs.community_count == 2
        assert cs.internal_links(1) == 3
        assert cs.internal_links(2) == 0
        assert cs.boundary_half(1) == 0.5
        assert cs.boundary_half(2) == 0.5

    def test_space_separated_also_accepted(self):
        g, _ = load_graph(io.StringIO("a b\n"))
        cs = load_communities(io.StringIO("a 1\nb 2\n"), g)
        assert cs.community_count == 2

    def test_incomplete_partition_lists_missing(self, g1):
        graph, _ = g1
        with pytest.raises(PartitionError, match="'d'"):
            load_communities(io.StringIO("a X\nb X\nc X\n"), graph)

    def test_duplicate_assignment(self, g1):
        graph, _ = g1
        with pytest.raises(PartitionError, match="twice"):
            load_communities(io.StringIO("a X\na Y\nb X\nc X\nd Y\n"), graph)

    def test_unknown_node(self, g1):
        graph, _ = g1
        with pytest.raises(UnknownNodeError):
            load_communities(io.StringIO("a X\nb X\nc X\nd Y\nzz Y\n"), graph)

    def test_labels_echoed_in_first_appearance_order(self, g1):
        graph, _ = g1
        cs = load_communities(io.StringIO("d other\na main\nb main\nc main\n"), graph)
        assert cs.label(1) == "other"
        assert cs.label(2) == "main"


class TestNodeProfile:
    def test_g1_node_a(self, g1):
        graph, cs = g1
        prof = node_profile(graph, cs, "a")
        assert prof.degree == 3
        assert prof.internal_degree == 2
        assert prof.degree_by_community == (2, 1)
        assert prof.internal_neighbor_links == 1

    def test_g1_node_b(self, g1):
        graph, cs = g1
        prof = node_profile(graph, cs, "b")
        assert (prof.degree, prof.internal_degree, prof.internal_neighbor_links) == (2, 2, 1)

    def test_isolated_node(self):
        graph = make_graph([], extra_nodes=["z"])
        cs = make_structure(graph, {"z": "only"})
        prof = node_profile(graph, cs, "z")
        assert (prof.degree, prof.internal_degree, prof.internal_neighbor_links) == (0, 0, 0)

    def test_unknown_node(self, g1):
        graph, cs = g1
        with pytest.raises(UnknownNodeError):
            node_profile(graph, cs, "nope")


class TestInvariants:
    def test_link_tallies_on_random_instances(self):
        rng = random.Random(42)
        for _ in range(200):
            nodes, edges, assignment = random_instance(rng)
            graph = make_graph(edges, extra_nodes=nodes)
            cs = make_structure(graph, assignment)
            internal, boundary = brute_edge_classification(edges, assignment)
            total = sum(cs.internal_links(i) for i in cs.communities()) \
                + sum(cs.boundary_half(i) for i in cs.communities())
            assert total == graph.m
            for i in cs.communities():
                label = int(cs.label(i))
                assert cs.internal_links(i) == internal[label]
                assert cs.boundary_links(i) == boundary[label]

    def test_degree_decomposition(self):
        rng = random.Random(13)
        for _ in range(50):
            nodes, edges, assignment = random_instance(rng)
            graph = make_graph(edges, extra_nodes=nodes)
            cs = make_structure(graph, assignment)
            for u in graph.nodes:
                prof = node_profile(graph, cs, u)
                assert sum(prof.degree_by_community) == prof.degree
                assert prof.internal_degree <= prof.degree
                k = prof.internal_degree
                assert 0 <= prof.internal_neighbor_links <= k * (k - 1) / 2

    def test_m_is_half_adjacency_sum(self, g1):
        graph, _ = g1
        assert 2 * graph.m == sum(graph.degree(u) for u in graph.nodes)


class TestAttributeTable:
    CSV = "node,color,age\na,red,30\nb,red,\nc,blue,41\nd,blue,29\n"

    def test_kind_inference(self, g1):
        graph, _ = g1
        attrs, warnings = load_attributes(io.StringIO(self.CSV), graph)
        assert attrs.kind("color") == "nominal"
        assert attrs.kind("age") == "numeric"
        assert attrs.get("age", "b") is None
        assert attrs.get("age", "c") == 41.0
        assert warnings == []

    def test_override_to_nominal(self, g1):
        graph, _ = g1
        attrs, _ = load_attributes(io.StringIO(self.CSV), graph,
                                   {"age": "nominal"})
        assert attrs.kind("age") == "nominal"
        assert attrs.get("age", "c") == "41"

    def test_unknown_node_rejected(self, g1):
        graph, _ = g1
        with pytest.raises(UnknownNodeError):
            load_attributes(io.StringIO("node,x\nqq,1\n"), graph)

    def test_missing_rows_warn(self, g1):
        graph, _ = g1
        _, warnings = load_attributes(io.StringIO("node,x\na,1\n"), graph)
        assert any("missing" in w for w in warnings)

    def test_header_must_start_with_node(self, g1):
        graph, _ = g1
        with pytest.raises(InputFormatError):
            load_attributes(io.StringIO("id,x\na,1\n"), graph)


class TestManifest:
    def test_strictly_increasing_times(self, tmp_path):
        (tmp_path / "e.txt").write_text("a b\n")
        (tmp_path / "p.txt").write_text("a\t1\nb\t1\n")
        manifest = "1\te.txt\tp.txt\n1\te.txt\tp.txt\n"
        with pytest.raises(InputFormatError, match="strictly increasing"):
            load_manifest(io.StringIO(manifest), base_dir=str(tmp_path))

    def test_missing_slice_file_names_slice(self, tmp_path):
        with pytest.raises(InputFormatError, match="t=3"):
            load_manifest(io.StringIO("3\tnope.txt\tnope.txt\n"),
                          base_dir=str(tmp_path))

    def test_loads_slices(self, tmp_path):
        (tmp_path / "e.txt").write_text("a b\nb c\n")
        (tmp_path / "p.txt").write_text("a\t1\nb\t1\nc\t2\n")
        dn, warnings = load_manifest(io.StringIO("0\te.txt\tp.txt\n5\te.txt\tp.txt\n"),
                                     base_dir=str(tmp_path))
        assert len(dn) == 2
        assert dn[1].t == 5
        assert dn[0].graph.m == 2
        assert warnings == []


def test_partition_constructor_rejects_sparse_indices(g1):
    graph, _ = g1
    with pytest.raises(PartitionError):
        CommunityStructure(graph, {"a": 1, "b": 1, "c": 1, "d": 3})
