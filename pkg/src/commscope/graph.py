"""Core containers: graph, community partition, node attributes, time slices.

Everything here is immutable after construction and validated eagerly, so the
measure modules can assume well-formed inputs and stay pure.
"""

from __future__ import annotations

import csv
import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    AttributeKindError,
    ConfigError,
    InputFormatError,
    PartitionError,
    UnknownNodeError,
)

NOMINAL = "nominal"
NUMERIC = "numeric"


class Graph:
    """Simple undirected graph over opaque string node ids.

    Node order is first-appearance order, which makes downstream iteration
    (and therefore serialized output) deterministic.
    """

    __slots__ = ("_nodes", "_index", "_adj", "_m")

    def __init__(self, edges: Iterable[tuple[str, str]], extra_nodes: Iterable[str] = ()):
        adj: dict[str, set[str]] = {}
        m = 0
        for u, v in edges:
            if u == v:
                raise InputFormatError(f"self-loop on node {u!r} is not allowed")
            if not u or not v:
                raise InputFormatError("empty node identifier")
            adj.setdefault(u, set())
            adj.setdefault(v, set())
            if v not in adj[u]:
                adj[u].add(v)
                adj[v].add(u)
                m += 1
        for x in extra_nodes:
            if not x:
                raise InputFormatError("empty node identifier")
            adj.setdefault(x, set())
        self._nodes: tuple[str, ...] = tuple(adj)
        self._index: dict[str, int] = {u: i for i, u in enumerate(self._nodes)}
        self._adj: dict[str, frozenset[str]] = {u: frozenset(ns) for u, ns in adj.items()}
        self._m = m

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def n(self) -> int:
        return len(self._nodes)

    @property
    def m(self) -> int:
        return self._m

    def has_node(self, u: str) -> bool:
        return u in self._adj

    def neighbors(self, u: str) -> frozenset[str]:
        try:
            return self._adj[u]
        except KeyError:
            raise UnknownNodeError(f"unknown node {u!r}") from None

    def degree(self, u: str) -> int:
        return len(self.neighbors(u))

    def has_edge(self, u: str, v: str) -> bool:
        return v in self.neighbors(u)

    def edges(self) -> Iterator[tuple[str, str]]:
        """Each edge once, endpoints and edges ordered by node appearance."""
        idx = self._index
        for u in self._nodes:
            for v in sorted(self._adj[u], key=idx.__getitem__):
                if idx[u] < idx[v]:
                    yield u, v

    def to_edge_list_text(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges())

    def bfs_distances(self, start: str, allowed: frozenset[str] | None = None) -> dict[str, int]:
        """Hop distances from `start`; restricted to `allowed` nodes if given."""
        if allowed is not None and start not in allowed:
            raise UnknownNodeError(f"start node {start!r} not in allowed set")
        dist = {start: 0}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            du = dist[u]
            for v in self._adj[u]:
                if v in dist:
                    continue
                if allowed is not None and v not in allowed:
                    continue
                dist[v] = du + 1
                queue.append(v)
        return dist

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return set(self._nodes) == set(other._nodes) and self._adj == other._adj

    def __hash__(self):  # pragma: no cover - not used as dict key
        return hash((frozenset(self._nodes), self._m))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class CommunityStructure:
    """A partition of a graph's node set, with cached per-community tallies.

    Community indices are dense and 1-based; original labels are kept for
    reporting. Caches: member sets, internal link counts m_i, boundary edge
    counts (m_i+ is half the boundary count, per the usual convention),
    degree volumes and internal degrees.
    """

    __slots__ = (
        "graph", "_assignment", "_labels", "_members",
        "_m_int", "_boundary", "_volume", "_k_int",
    )

    def __init__(self, graph: Graph, assignment: Mapping[str, int],
                 labels: Sequence[str] | None = None):
        extra = [u for u in assignment if not graph.has_node(u)]
        if extra:
            raise UnknownNodeError(f"assigned nodes not in graph: {sorted(extra)}")
        missing = [u for u in graph.nodes if u not in assignment]
        if missing:
            raise PartitionError(f"nodes missing from partition: {sorted(missing)}")

        indices = set(assignment.values())
        lam = len(indices)
        if lam == 0 or indices != set(range(1, lam + 1)):
            raise PartitionError("community indices must be dense in 1..lambda")
        if labels is None:
            labels = [str(i) for i in range(1, lam + 1)]
        if len(labels) != lam:
            raise PartitionError("one label per community required")

        self.graph = graph
        self._assignment = dict(assignment)
        self._labels = tuple(labels)

        members: list[set[str]] = [set() for _ in range(lam)]
        for u in graph.nodes:
            members[assignment[u] - 1].add(u)
        self._members = tuple(frozenset(ms) for ms in members)

        m_int = [0] * lam
        boundary = [0] * lam
        for u, v in graph.edges():
            ci, cj = assignment[u], assignment[v]
            if ci == cj:
                m_int[ci - 1] += 1
            else:
                boundary[ci - 1] += 1
                boundary[cj - 1] += 1
        self._m_int = tuple(m_int)
        self._boundary = tuple(boundary)

        volume = [0] * lam
        k_int: dict[str, int] = {}
        for u in graph.nodes:
            ci = assignment[u]
            volume[ci - 1] += graph.degree(u)
            k_int[u] = sum(1 for v in graph.neighbors(u) if assignment[v] == ci)
        self._volume = tuple(volume)
        self._k_int = k_int

    @property
    def community_count(self) -> int:
        return len(self._members)

    def communities(self) -> range:
        """Valid 1-based community indices."""
        return range(1, self.community_count + 1)

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.community_count:
            raise PartitionError(f"unknown community index {i}")

    def members(self, i: int) -> frozenset[str]:
        self._check(i)
        return self._members[i - 1]

    def size(self, i: int) -> int:
        self._check(i)
        return len(self._members[i - 1])

    def internal_links(self, i: int) -> int:
        self._check(i)
        return self._m_int[i - 1]

    def boundary_links(self, i: int) -> int:
        """Number of edges with exactly one endpoint in community i."""
        self._check(i)
        return self._boundary[i - 1]

    def boundary_half(self, i: int) -> float:
        return self.boundary_links(i) / 2

    def volume(self, i: int) -> int:
        """Sum of (whole-graph) degrees over the community's members."""
        self._check(i)
        return self._volume[i - 1]

    def label(self, i: int) -> str:
        self._check(i)
        return self._labels[i - 1]

    def index_of(self, node: str) -> int:
        try:
            return self._assignment[node]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node!r}") from None

    def internal_degree(self, node: str) -> int:
        try:
            return self._k_int[node]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node!r}") from None

    def sizes(self) -> list[int]:
        return [len(ms) for ms in self._members]

    def __repr__(self) -> str:
        return f"CommunityStructure(lambda={self.community_count}, n={self.graph.n})"


@dataclass(frozen=True)
class NodeCommunityProfile:
    """Degrees of one node broken down by community.

    `internal_neighbor_links` counts the links among the node's
    same-community neighbors (the triangle numerator of local transitivity).
    """

    node: str
    degree: int
    internal_degree: int
    degree_by_community: tuple[int, ...]
    internal_neighbor_links: int


def node_profile(graph: Graph, cs: CommunityStructure, node: str) -> NodeCommunityProfile:
    neighbors = graph.neighbors(node)
    own = cs.index_of(node)
    by_comm = [0] * cs.community_count
    for v in neighbors:
        by_comm[cs.index_of(v) - 1] += 1
    internal = sorted(v for v in neighbors if cs.index_of(v) == own)
    t = 0
    for a_pos, a in enumerate(internal):
        adj_a = graph.neighbors(a)
        for b in internal[a_pos + 1:]:
            if b in adj_a:
                t += 1
    return NodeCommunityProfile(
        node=node,
        degree=len(neighbors),
        internal_degree=by_comm[own - 1],
        degree_by_community=tuple(by_comm),
        internal_neighbor_links=t,
    )


class AttributeTable:
    """Per-node attribute values, each attribute typed nominal or numeric.

    The value maps are partial: a node absent from a map simply has a missing
    value for that attribute. Numeric values are floats, nominal values are
    strings.
    """

    def __init__(self, kinds: Mapping[str, str],
                 values: Mapping[str, Mapping[str, object]]):
        for name, kind in kinds.items():
            if kind not in (NOMINAL, NUMERIC):
                raise ConfigError(f"attribute {name!r}: unknown kind {kind!r}")
        if set(kinds) != set(values):
            raise ConfigError("kinds and values must cover the same attributes")
        self._names = tuple(kinds)
        self._kinds = dict(kinds)
        self._values = {name: dict(vals) for name, vals in values.items()}

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def kind(self, name: str) -> str:
        try:
            return self._kinds[name]
        except KeyError:
            raise ConfigError(f"unknown attribute {name!r}") from None

    def get(self, name: str, node: str):
        self.kind(name)
        return self._values[name].get(node)

    def items(self, name: str) -> Iterator[tuple[str, object]]:
        """(node, value) pairs with non-missing values, in table row order."""
        self.kind(name)
        return iter(self._values[name].items())


@dataclass(frozen=True)
class TimeSlice:
    t: int
    graph: Graph
    communities: CommunityStructure


class DynamicNetwork:
    """Ordered sequence of (graph, partition) time slices.

    Temporal measures use positional indices 0..T-1; the manifest's t values
    are kept as slice labels for reporting.
    """

    def __init__(self, slices: Sequence[TimeSlice]):
        if not slices:
            raise InputFormatError("a dynamic network needs at least one time slice")
        ts = [s.t for s in slices]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise InputFormatError("slice times must be strictly increasing")
        self.slices: tuple[TimeSlice, ...] = tuple(slices)

    def __len__(self) -> int:
        return len(self.slices)

    def __getitem__(self, pos: int) -> TimeSlice:
        return self.slices[pos]


# ---------------------------------------------------------------------------
# Loaders


def load_graph(source: Iterable[str]) -> tuple[Graph, list[str]]:
    """Parse an edge-list text stream.

    One edge per line, whitespace-separated endpoints, `#` comments. Extra
    tokens (e.g. weights) and duplicate edges are tolerated with a warning;
    self-loops are rejected.
    """
    edges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    duplicates = 0
    extra_token_lines = 0
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise InputFormatError(f"line {lineno}: expected two node ids, got {line!r}")
        if len(tokens) > 2:
            extra_token_lines += 1
        u, v = tokens[0], tokens[1]
        if u == v:
            raise InputFormatError(f"line {lineno}: self-loop on node {u!r}")
        key = (u, v) if u <= v else (v, u)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append((u, v))
    warnings = []
    if duplicates:
        warnings.append(f"{duplicates} duplicate edge(s) collapsed")
    if extra_token_lines:
        warnings.append(
            f"extra tokens ignored on {extra_token_lines} line(s); "
            "edge weights are not used"
        )
    return Graph(edges), warnings


def load_communities(source: Iterable[str], graph: Graph) -> CommunityStructure:
    """Parse "node<TAB>label" lines into a partition of the graph's nodes.

    Labels are arbitrary strings, densified to indices 1..lambda in
    first-appearance order; originals are echoed in reports.
    """
    assignment: dict[str, int] = {}
    labels: list[str] = []
    label_index: dict[str, int] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split("\t") if "\t" in line else line.split()
        if len(tokens) != 2 or not tokens[0] or not tokens[1]:
            raise InputFormatError(
                f"line {lineno}: expected 'node<TAB>community_label', got {line!r}"
            )
        node, label = tokens
        if node in assignment:
            raise PartitionError(f"line {lineno}: node {node!r} assigned twice")
        if not graph.has_node(node):
            raise UnknownNodeError(f"line {lineno}: node {node!r} not in graph")
        if label not in label_index:
            label_index[label] = len(labels) + 1
            labels.append(label)
        assignment[node] = label_index[label]
    missing = sorted(u for u in graph.nodes if u not in assignment)
    if missing:
        raise PartitionError(f"incomplete partition, nodes missing: {missing}")
    return CommunityStructure(graph, assignment, labels)


def _infer_kind(raw_values: Iterable[str]) -> str:
    saw_any = False
    for raw in raw_values:
        saw_any = True
        try:
            x = float(raw)
        except ValueError:
            return NOMINAL
        if x != x or x in (float("inf"), float("-inf")):
            return NOMINAL
    return NUMERIC if saw_any else NOMINAL


def load_attributes(source: Iterable[str], graph: Graph,
                    kind_overrides: Mapping[str, str] | None = None,
                    ) -> tuple[AttributeTable, list[str]]:
    """Parse an attribute CSV (header row, first column literally `node`).

    A column is numeric iff every non-missing value parses as a finite real,
    unless overridden. The missing marker is the empty field.
    """
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise InputFormatError("attribute CSV is empty") from None
    if not header or header[0] != "node":
        raise InputFormatError("attribute CSV must start with a 'node' column")
    names = header[1:]
    if len(set(names)) != len(names):
        raise InputFormatError("duplicate attribute column names")

    raw_cols: dict[str, dict[str, str]] = {name: {} for name in names}
    seen_nodes: set[str] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise InputFormatError(f"line {lineno}: expected {len(header)} fields")
        node = row[0]
        if not graph.has_node(node):
            raise UnknownNodeError(f"line {lineno}: node {node!r} not in graph")
        if node in seen_nodes:
            raise InputFormatError(f"line {lineno}: duplicate row for node {node!r}")
        seen_nodes.add(node)
        for name, cell in zip(names, row[1:]):
            if cell != "":
                raw_cols[name][node] = cell

    kind_overrides = dict(kind_overrides or {})
    for name in kind_overrides:
        if name not in raw_cols:
            raise ConfigError(f"type override names unknown column {name!r}")

    kinds: dict[str, str] = {}
    values: dict[str, dict[str, object]] = {}
    for name in names:
        kind = kind_overrides.get(name) or _infer_kind(raw_cols[name].values())
        if kind not in (NOMINAL, NUMERIC):
            raise ConfigError(f"attribute {name!r}: unknown kind {kind!r}")
        if kind == NUMERIC:
            col: dict[str, object] = {}
            for node, raw in raw_cols[name].items():
                try:
                    x = float(raw)
                except ValueError:
                    raise AttributeKindError(
                        f"attribute {name!r}: value {raw!r} is not numeric"
                    ) from None
                col[node] = x
            values[name] = col
        else:
            values[name] = dict(raw_cols[name])
        kinds[name] = kind

    warnings = []
    absent = graph.n - len(seen_nodes)
    if absent:
        warnings.append(f"{absent} graph node(s) have no attribute row (treated as missing)")
    return AttributeTable(kinds, values), warnings


def load_manifest(source: Iterable[str], base_dir: str = ".",
                  ) -> tuple[DynamicNetwork, list[str]]:
    """Parse a dynamic manifest: lines "t<TAB>edges_path<TAB>partition_path"."""
    slices: list[TimeSlice] = []
    warnings: list[str] = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        tokens = line.split("\t")
        if len(tokens) != 3:
            raise InputFormatError(
                f"manifest line {lineno}: expected 't<TAB>edges_path<TAB>partition_path'"
            )
        try:
            t = int(tokens[0])
        except ValueError:
            raise InputFormatError(
                f"manifest line {lineno}: slice time {tokens[0]!r} is not an integer"
            ) from None
        edges_path = os.path.join(base_dir, tokens[1])
        part_path = os.path.join(base_dir, tokens[2])
        try:
            with open(edges_path, encoding="utf-8") as fh:
                graph, gw = load_graph(fh)
            with open(part_path, encoding="utf-8") as fh:
                cs = load_communities(fh, graph)
        except OSError as exc:
            raise InputFormatError(f"slice t={t}: cannot read input ({exc})") from exc
        warnings.extend(f"slice t={t}: {w}" for w in gw)
        slices.append(TimeSlice(t, graph, cs))
    return DynamicNetwork(slices), warnings
