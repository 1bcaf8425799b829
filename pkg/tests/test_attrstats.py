import itertools
import math

import pytest

from commscope import attrstats
from commscope.errors import AttributeKindError, CommscopeError, ConfigError
from commscope.graph import AttributeTable

from conftest import make_graph, make_structure


def two_groups(values_a, values_b, kind):
    """Two disconnected cliques as communities with one attribute column."""
    nodes_a = [f"a{i}" for i in range(len(values_a))]
    nodes_b = [f"b{i}" for i in range(len(values_b))]
    edges = [(u, v) for grp in (nodes_a, nodes_b)
             for u, v in itertools.combinations(grp, 2)]
    graph = make_graph(edges, extra_nodes=nodes_a + nodes_b)
    cs = make_structure(graph, {**{u: "A" for u in nodes_a},
                                **{u: "B" for u in nodes_b}})
    column = {}
    for node, value in zip(nodes_a + nodes_b, list(values_a) + list(values_b)):
        if value is not None:
            column[node] = value
    attrs = AttributeTable({"x": kind}, {"x": column})
    return graph, cs, attrs


class TestMajority:
    def test_simple_majority(self):
        _, cs, attrs = two_groups(["x", "x", "x", "y"], ["y"], "nominal")
        entry = attrstats.majority_profile(cs, attrs, "x")[0]
        assert (entry.value, entry.share) == ("x", 0.75)

    def test_tie_breaks_lexicographically(self):
        _, cs, attrs = two_groups(["x", "x", "y", "y"], ["y"], "nominal")
        entry = attrstats.majority_profile(cs, attrs, "x")[0]
        assert (entry.value, entry.share) == ("x", 0.5)

    def test_all_missing_undefined(self):
        _, cs, attrs = two_groups([None, None], ["y"], "nominal")
        entry = attrstats.majority_profile(cs, attrs, "x")[0]
        assert entry.value is None and entry.share is None

    def test_numeric_rejected(self):
        _, cs, attrs = two_groups([1.0, 2.0], [3.0], "numeric")
        with pytest.raises(AttributeKindError):
            attrstats.majority_profile(cs, attrs, "x")


class TestChiSquare:
    def test_2x2_closed_form(self):
        # Contingency [[10, 20], [20, 10]].
        _, cs, attrs = two_groups(["u"] * 10 + ["v"] * 20,
                                  ["u"] * 20 + ["v"] * 10, "nominal")
        res = attrstats.chi_square_association(cs, attrs, "x")
        n, a, b, c, d = 60, 10, 20, 20, 10
        expected = n * (a * d - b * c) ** 2 / ((a + b) * (c + d) * (a + c) * (b + d))
        assert res.statistic == pytest.approx(expected, abs=1e-9)
        assert res.dof == (1,)
        assert res.phi == pytest.approx(1 / 3, abs=1e-12)
        assert res.cramers_v == pytest.approx(1 / 3, abs=1e-12)
        assert res.phi == res.cramers_v  # always coincide on 2x2
        assert 0 <= res.p_value <= 1

    def test_identical_rows_independent(self):
        _, cs, attrs = two_groups(["u"] * 5 + ["v"] * 5,
                                  ["u"] * 5 + ["v"] * 5, "nominal")
        res = attrstats.chi_square_association(cs, attrs, "x")
        assert res.statistic == pytest.approx(0.0, abs=1e-12)
        assert res.cramers_v == pytest.approx(0.0, abs=1e-12)

    def test_diagonal_table_lambda_one(self):
        _, cs, attrs = two_groups(["u"] * 6, ["v"] * 6, "nominal")
        res = attrstats.chi_square_association(cs, attrs, "x")
        assert res.lambda_gk == 1.0

    def test_degenerate_table_rejected(self):
        _, cs, attrs = two_groups(["u", "u"], ["u", "u"], "nominal")
        with pytest.raises(CommscopeError, match="degenerate"):
            attrstats.chi_square_association(cs, attrs, "x")

    def test_low_expected_count_warning(self):
        _, cs, attrs = two_groups(["u", "v"], ["u", "u"], "nominal")
        res = attrstats.chi_square_association(cs, attrs, "x")
        assert any("below 5" in w for w in res.warnings)


class TestAnova:
    def test_identical_groups(self):
        _, cs, attrs = two_groups([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], "numeric")
        res = attrstats.anova_association(cs, attrs, "x")
        assert res.statistic == pytest.approx(0.0, abs=1e-12)
        assert res.eta_squared == pytest.approx(0.0, abs=1e-12)

    def test_all_variance_between(self):
        _, cs, attrs = two_groups([0.0, 0.0, 0.0], [1.0, 1.0, 1.0], "numeric")
        res = attrstats.anova_association(cs, attrs, "x")
        assert res.statistic is None  # infinite F rendered as undefined
        assert res.eta_squared == 1.0
        assert res.p_value == 0.0
        assert res.warnings

    def test_hand_computed_f(self):
        _, cs, attrs = two_groups([1.0, 2.0], [3.0, 4.0], "numeric")
        res = attrstats.anova_association(cs, attrs, "x")
        assert res.statistic == pytest.approx(8.0, abs=1e-12)
        assert res.dof == (1, 2)

    def test_insufficient_data(self):
        _, cs, attrs = two_groups([1.0], [2.0], "numeric")
        with pytest.raises(CommscopeError, match="insufficient"):
            attrstats.anova_association(cs, attrs, "x")

    def test_constant_attribute_undefined(self):
        _, cs, attrs = two_groups([2.0, 2.0], [2.0, 2.0], "numeric")
        res = attrstats.anova_association(cs, attrs, "x")
        assert res.statistic is None and res.p_value is None


class TestHypergeometric:
    def test_exact_extreme_case(self):
        p = attrstats.hypergeom_right_tail(20, 5, 5, 5)
        assert p == pytest.approx(1 / 15504, abs=1e-15)

    def test_zero_observed_is_one(self):
        assert attrstats.hypergeom_right_tail(20, 5, 5, 0) == 1.0

    def test_universal_value_is_one(self):
        assert attrstats.hypergeom_right_tail(10, 10, 4, 4) == 1.0

    def test_matches_definitional_sum(self):
        for n_pop, k_s, n_d in [(12, 4, 6), (30, 10, 7), (9, 3, 3)]:
            for x in range(0, min(k_s, n_d) + 1):
                direct = sum(
                    math.comb(k_s, j) * math.comb(n_pop - k_s, n_d - j)
                    for j in range(x, min(k_s, n_d) + 1)
                ) / math.comb(n_pop, n_d)
                got = attrstats.hypergeom_right_tail(n_pop, k_s, n_d, x)
                assert got == pytest.approx(direct, abs=1e-9)


class TestOverExpression:
    def test_concentrated_value_flagged(self):
        _, cs, attrs = two_groups(["hit"] * 5, ["other"] * 15, "nominal")
        findings = attrstats.over_expression(cs, attrs, "x", alpha=0.01)
        flagged = [f for f in findings if f.over_expressed]
        assert {(f.community_label, f.value) for f in flagged} == {
            ("A", "hit"), ("B", "other")}
        hit = next(f for f in findings
                   if f.community_label == "A" and f.value == "hit")
        assert hit.observed == 5
        assert hit.p_raw == pytest.approx(1 / 15504, abs=1e-15)
        assert hit.p_corrected == pytest.approx(4 / 15504, abs=1e-12)

    def test_correction_never_below_raw(self):
        _, cs, attrs = two_groups(["u", "v", "u"], ["v", "v", "u"], "nominal")
        for f in attrstats.over_expression(cs, attrs, "x"):
            assert f.p_corrected >= f.p_raw
            assert f.observed <= 3  # community size and value totals are all 3

    def test_alpha_validated(self):
        _, cs, attrs = two_groups(["u"] * 3, ["v"] * 3, "nominal")
        with pytest.raises(ConfigError):
            attrstats.over_expression(cs, attrs, "x", alpha=1.5)

    def test_invariant_under_relabeling(self):
        graph, cs, attrs = two_groups(["u", "v", "u"], ["v", "v", "u"], "nominal")
        swapped = make_structure(graph, {u: ("B" if cs.index_of(u) == 1 else "A")
                                         for u in graph.nodes})
        base = sorted((f.value, f.observed, f.p_raw, f.over_expressed)
                      for f in attrstats.over_expression(cs, attrs, "x"))
        other = sorted((f.value, f.observed, f.p_raw, f.over_expressed)
                       for f in attrstats.over_expression(swapped, attrs, "x"))
        assert base == other


class TestHomophily:
    def test_perfect_nominal(self):
        graph = make_graph([("a", "b"), ("c", "d")])
        attrs = AttributeTable({"x": "nominal"},
                               {"x": {"a": "u", "b": "u", "c": "v", "d": "v"}})
        res = attrstats.homophily(graph, attrs, "x")
        assert res.coefficient == 1.0
        assert res.links_used == 2

    def test_complete_bipartite_antihomophily(self):
        edges = [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")]
        graph = make_graph(edges)
        attrs = AttributeTable({"x": "nominal"},
                               {"x": {"a1": "u", "a2": "u", "b1": "v", "b2": "v"}})
        assert attrstats.homophily(graph, attrs, "x").coefficient == pytest.approx(-1.0)

    def test_numeric_equal_endpoints(self):
        graph = make_graph([("a", "b"), ("c", "d")])
        attrs = AttributeTable({"x": "numeric"},
                               {"x": {"a": 1.0, "b": 1.0, "c": 5.0, "d": 5.0}})
        assert attrstats.homophily(graph, attrs, "x").coefficient == pytest.approx(1.0)

    def test_constant_attribute_undefined(self):
        graph = make_graph([("a", "b")])
        attrs = AttributeTable({"x": "nominal"}, {"x": {"a": "u", "b": "u"}})
        assert attrstats.homophily(graph, attrs, "x").coefficient is None

    def test_missing_endpoints_skipped(self):
        graph = make_graph([("a", "b"), ("c", "d")])
        attrs = AttributeTable({"x": "nominal"}, {"x": {"a": "u", "b": "u", "c": "v"}})
        res = attrstats.homophily(graph, attrs, "x")
        assert res.links_skipped_missing == 1
        assert res.links_used == 1

    def test_community_scope_uses_internal_links_only(self):
        # Community A is homophilous, the inter-community link is not.
        graph = make_graph([("a", "b"), ("b", "x")])
        cs = make_structure(graph, {"a": "A", "b": "A", "x": "B"})
        attrs = AttributeTable({"x": "nominal"},
                               {"x": {"a": "u", "b": "u", "x": "v"}})
        res = attrstats.homophily(graph, attrs, "x", scope=1, cs=cs)
        assert res.links_used == 1
        assert res.coefficient is None  # single concordant value: chance = 1
        glob = attrstats.homophily(graph, attrs, "x")
        assert glob.links_used == 2

    def test_scope_requires_structure(self):
        graph = make_graph([("a", "b")])
        attrs = AttributeTable({"x": "nominal"}, {"x": {"a": "u", "b": "v"}})
        with pytest.raises(ConfigError):
            attrstats.homophily(graph, attrs, "x", scope=1)


def csd_fixture(interest_rows, topics=("t1", "t2", "t3")):
    """One community of len(interest_rows) members over binary topic columns."""
    nodes = [f"m{i}" for i in range(len(interest_rows))]
    edges = [(nodes[i], nodes[i + 1]) for i in range(len(nodes) - 1)]
    graph = make_graph(edges, extra_nodes=nodes)
    cs = make_structure(graph, {u: "c" for u in nodes})
    used = topics[: len(interest_rows[0])]
    values = {t: {} for t in used}
    for node, row in zip(nodes, interest_rows):
        for t, flag in zip(used, row):
            values[t][node] = float(flag)
    attrs = AttributeTable({t: "numeric" for t in used}, values)
    return cs, attrs, list(used)


class TestCsd:
    def test_identical_interest_sets(self):
        cs, attrs, topics = csd_fixture([(1, 1), (1, 1), (1, 1)])
        res = attrstats.community_similarity_degree(cs, attrs, topics)[0]
        assert (res.interest_count, res.active_topics, res.csd) == (6, 2, 1.0)

    def test_disjoint_single_interests(self):
        cs, attrs, topics = csd_fixture([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        res = attrstats.community_similarity_degree(cs, attrs, topics)[0]
        assert (res.interest_count, res.active_topics, res.csd) == (3, 3, 0.0)

    def test_partial_overlap(self):
        cs, attrs, topics = csd_fixture([(1, 1), (1, 0), (1, 0)])
        res = attrstats.community_similarity_degree(cs, attrs, topics)[0]
        assert (res.interest_count, res.active_topics) == (4, 2)
        assert res.csd == 0.5

    def test_no_interest_undefined(self):
        cs, attrs, topics = csd_fixture([(0, 0), (0, 0)])
        assert attrstats.community_similarity_degree(cs, attrs, topics)[0].csd is None

    def test_non_binary_rejected(self):
        cs, attrs, topics = csd_fixture([(1, 1), (1, 1)])
        bad = AttributeTable({"t": "numeric"}, {"t": {"m0": 2.0, "m1": 1.0}})
        with pytest.raises(AttributeKindError):
            attrstats.community_similarity_degree(cs, bad, ["t"])

    def test_empty_topic_list_rejected(self):
        cs, attrs, topics = csd_fixture([(1, 1), (1, 1)])
        with pytest.raises(ConfigError):
            attrstats.community_similarity_degree(cs, attrs, [])
