"""Conductance of node sets and the community profile curve.

The classical network community profile optimizes over all size-k sets; a
characterization tool only needs to profile the *detected* communities, so
the curve here keeps, for each community size present in the partition, the
extremal conductance among detected communities of that size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import CommscopeError, UnknownNodeError
from .graph import CommunityStructure, Graph


def conductance(graph: Graph, node_set: Iterable[str]) -> float | None:
    """Cut size of the set over the smaller of the two side volumes.

    0.0 when the set is a union of connected components (cut = 0); None when
    neither side has any link ends (edgeless graph).
    """
    nodes = frozenset(node_set)
    if not nodes:
        raise CommscopeError("conductance of the empty set is undefined")
    cut = 0
    vol = 0
    for u in nodes:
        for v in graph.neighbors(u):  # raises UnknownNodeError on bad ids
            vol += 1
            if v not in nodes:
                cut += 1
    vol_rest = 2 * graph.m - vol
    if vol == 0 and vol_rest == 0:
        return None
    if cut == 0:
        return 0.0
    return cut / min(vol, vol_rest)


@dataclass(frozen=True)
class NcpPoint:
    size: int
    conductance: float | None
    community_index: int | None
    community_label: str | None


def ncp_over_partition(graph: Graph, cs: CommunityStructure,
                       extremum: str = "min") -> list[NcpPoint]:
    """Extremal conductance per community size, over the detected communities.

    `extremum` selects the best (min, default) or worst (max) community of
    each size; ties go to the lowest community index. Points are ordered by
    strictly increasing size.
    """
    if extremum not in ("min", "max"):
        raise CommscopeError(f"extremum must be 'min' or 'max', got {extremum!r}")
    by_size: dict[int, list[tuple[float, int]]] = {}
    undefined_sizes: set[int] = set()
    for i in cs.communities():
        phi = conductance(graph, cs.members(i))
        size = cs.size(i)
        if phi is None:
            undefined_sizes.add(size)
        else:
            by_size.setdefault(size, []).append((phi, i))
    points = []
    for size in sorted(by_size.keys() | undefined_sizes):
        candidates = by_size.get(size)
        if not candidates:
            points.append(NcpPoint(size, None, None, None))
            continue
        if extremum == "min":
            phi, i = min(candidates)
        else:
            phi, i = max(candidates, key=lambda pair: (pair[0], -pair[1]))
        points.append(NcpPoint(size, phi, i, cs.label(i)))
    return points
