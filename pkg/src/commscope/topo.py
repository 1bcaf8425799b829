"""Static topological measures, per community and for the whole structure.

Undefined values (vanishing denominators, singleton communities) are returned
as None and rendered as null in reports, never as 0. Floating aggregates use
math.fsum so results do not depend on iteration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import CommunityStructure, Graph
from .ncp import conductance


def link_density(cs: CommunityStructure, i: int) -> float | None:
    """Proportion of existing to possible links inside community i."""
    n_i = cs.size(i)
    if n_i < 2:
        return None
    return cs.internal_links(i) / (n_i * (n_i - 1) / 2)


def scaled_density(cs: CommunityStructure, i: int) -> float | None:
    """Size-normalized density: 2 for a tree community, n_i for a clique."""
    delta = link_density(cs, i)
    if delta is None:
        return None
    return cs.size(i) * delta


def average_distance(graph: Graph, cs: CommunityStructure, i: int,
                     ) -> tuple[float | None, float | None]:
    """Mean geodesic distance inside the subgraph induced by community i.

    Unreachable pairs are excluded from the mean; the second element is the
    fraction of pairs that are reachable. Both are None for singletons.
    """
    members = cs.members(i)
    n_i = len(members)
    if n_i < 2:
        return None, None
    total = 0
    reachable = 0
    for u in sorted(members):
        dist = graph.bfs_distances(u, allowed=members)
        for v, d in dist.items():
            if v > u:
                total += d
                reachable += 1
    pairs = n_i * (n_i - 1) // 2
    mean = total / reachable if reachable else None
    return mean, reachable / pairs


def local_transitivity(graph: Graph, cs: CommunityStructure, node: str) -> float | None:
    """Fraction of realized links among a node's same-community neighbors."""
    own = cs.index_of(node)
    internal = sorted(v for v in graph.neighbors(node) if cs.index_of(v) == own)
    k_int = len(internal)
    if k_int < 2:
        return None
    t = 0
    for pos, a in enumerate(internal):
        adj_a = graph.neighbors(a)
        for b in internal[pos + 1:]:
            if b in adj_a:
                t += 1
    return t / (k_int * (k_int - 1) / 2)


def community_transitivity(graph: Graph, cs: CommunityStructure, i: int,
                           ) -> tuple[float | None, int, int]:
    """(mean local transitivity over defined nodes, defined count, skipped count)."""
    values = []
    skipped = 0
    for u in cs.members(i):
        t = local_transitivity(graph, cs, u)
        if t is None:
            skipped += 1
        else:
            values.append(t)
    if not values:
        return None, 0, skipped
    return math.fsum(values) / len(values), len(values), skipped


def inter_community_proportion(cs: CommunityStructure) -> float | None:
    m = cs.graph.m
    if m == 0:
        return None
    internal = sum(cs.internal_links(i) for i in cs.communities())
    return 1 - internal / m


def hub_dominance(cs: CommunityStructure, i: int) -> float | None:
    """Largest internal degree in the community over n_i - 1."""
    n_i = cs.size(i)
    if n_i < 2:
        return None
    best = max(cs.internal_degree(u) for u in cs.members(i))
    return best / (n_i - 1)


def embeddedness(cs: CommunityStructure, node: str) -> float | None:
    """Fraction of a node's neighbors inside its own community."""
    k = cs.graph.degree(node)
    if k == 0:
        return None
    return cs.internal_degree(node) / k


def internal_degree_stats(cs: CommunityStructure, i: int) -> tuple[float, float]:
    """Mean and population standard deviation of internal degree in community i."""
    ks = [cs.internal_degree(u) for u in cs.members(i)]
    mu = math.fsum(ks) / len(ks)
    var = math.fsum((k - mu) ** 2 for k in ks) / len(ks)
    return mu, math.sqrt(var)


def within_community_degree(cs: CommunityStructure, node: str) -> float:
    """Z-score of the node's internal degree within its community.

    A community with uniform internal degrees (sigma = 0) scores every member
    0: nobody stands out.
    """
    mu, sigma = internal_degree_stats(cs, cs.index_of(node))
    if sigma == 0:
        return 0.0
    return (cs.internal_degree(node) - mu) / sigma


def participation_coefficient(cs: CommunityStructure, node: str) -> float:
    """1 - sum over communities of squared degree fractions; 0 for isolated nodes."""
    k = cs.graph.degree(node)
    if k == 0:
        return 0.0
    by_comm = [0] * cs.community_count
    for v in cs.graph.neighbors(node):
        by_comm[cs.index_of(v) - 1] += 1
    return 1 - math.fsum((ki / k) ** 2 for ki in by_comm if ki)


def modularity(cs: CommunityStructure) -> tuple[float | None, list[float | None]]:
    """Newman modularity in the degree-volume form, with per-community terms.

    Q = sum_i [m_i/m - (vol(C_i)/2m)^2] where vol(C_i) sums whole-graph
    degrees over members. Returns (Q, [q_i...]); None when the graph has no
    links.
    """
    m = cs.graph.m
    if m == 0:
        return None, [None] * cs.community_count
    terms = [
        cs.internal_links(i) / m - (cs.volume(i) / (2 * m)) ** 2
        for i in cs.communities()
    ]
    return math.fsum(terms), terms


def modularity_literal(cs: CommunityStructure) -> float | None:
    """Alternate, boundary-only reading of the modularity formula.

    Uses q_i = m_i/m - (m_i+/m)^2 with m_i+ half the boundary link count.
    This does NOT reduce to the standard degree-volume null model (the
    squared term ignores internal link ends); it is reported only as a
    clearly flagged alternate. `modularity` is the source of truth.
    """
    m = cs.graph.m
    if m == 0:
        return None
    return math.fsum(
        cs.internal_links(i) / m - (cs.boundary_half(i) / m) ** 2
        for i in cs.communities()
    )


@dataclass(frozen=True)
class CommunitySummary:
    index: int
    label: str
    size: int
    internal_links: int
    boundary_half: float
    density: float | None
    scaled_density: float | None
    avg_distance: float | None
    reachable_pair_fraction: float | None
    transitivity_mean: float | None
    transitivity_defined_nodes: int
    transitivity_skipped_nodes: int
    hub_dominance: float | None
    mean_internal_degree: float
    std_internal_degree: float
    modularity_term: float | None
    conductance: float | None


@dataclass(frozen=True)
class StructureSummary:
    community_count: int
    sizes: list[int]
    size_histogram: dict[int, int]
    inter_community_link_proportion: float | None
    modularity: float | None
    modularity_literal: float | None


def community_summary(graph: Graph, cs: CommunityStructure, i: int) -> CommunitySummary:
    avg_dist, reach = average_distance(graph, cs, i)
    t_mean, t_defined, t_skipped = community_transitivity(graph, cs, i)
    mu, sigma = internal_degree_stats(cs, i)
    _, q_terms = modularity(cs)
    return CommunitySummary(
        index=i,
        label=cs.label(i),
        size=cs.size(i),
        internal_links=cs.internal_links(i),
        boundary_half=cs.boundary_half(i),
        density=link_density(cs, i),
        scaled_density=scaled_density(cs, i),
        avg_distance=avg_dist,
        reachable_pair_fraction=reach,
        transitivity_mean=t_mean,
        transitivity_defined_nodes=t_defined,
        transitivity_skipped_nodes=t_skipped,
        hub_dominance=hub_dominance(cs, i),
        mean_internal_degree=mu,
        std_internal_degree=sigma,
        modularity_term=q_terms[i - 1],
        conductance=conductance(graph, cs.members(i)),
    )


def structure_summary(graph: Graph, cs: CommunityStructure) -> StructureSummary:
    sizes = cs.sizes()
    histogram: dict[int, int] = {}
    for s in sorted(sizes):
        histogram[s] = histogram.get(s, 0) + 1
    q, _ = modularity(cs)
    return StructureSummary(
        community_count=cs.community_count,
        sizes=sizes,
        size_histogram=histogram,
        inter_community_link_proportion=inter_community_proportion(cs),
        modularity=q,
        modularity_literal=modularity_literal(cs),
    )
