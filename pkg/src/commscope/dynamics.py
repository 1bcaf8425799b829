"""Temporal analysis: community matching across slices, event detection,
and the derived timeline measures (age, stationarity, popularity...).

The matcher (Jaccard threshold + one-to-one chaining) is deliberately
separated from the measures, so an alternative identity-tracking scheme can
be swapped in without touching them. A one-to-one stable match is the
"no event" case: it is recorded with kind "continuation" so joining/leaving
counts stay available, but it is not one of the six community events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import CommscopeError, ConfigError
from .graph import DynamicNetwork

EVENT_KINDS = ("birth", "death", "growth", "contraction", "merge", "split")
ALL_KINDS = EVENT_KINDS + ("continuation",)
ONE_TO_ONE_KINDS = ("growth", "contraction", "continuation")


def jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


@dataclass(frozen=True)
class TransitionMatches:
    """Qualified community matches for one slice transition (pos -> pos + 1)."""

    transition: int
    scores: dict[tuple[int, int], float]

    def targets_of(self, i: int) -> list[int]:
        return sorted(j for (a, j) in self.scores if a == i)

    def sources_of(self, j: int) -> list[int]:
        return sorted(i for (i, b) in self.scores if b == j)

    def one_to_one_pairs(self) -> list[tuple[int, int]]:
        return sorted(
            (i, j) for (i, j) in self.scores
            if self.targets_of(i) == [j] and self.sources_of(j) == [i]
        )


@dataclass
class CommunityTimeline:
    """The chained identity of one community across consecutive slices."""

    timeline_id: int
    presence: list[tuple[int, int]] = field(default_factory=list)  # (slice pos, community)

    @property
    def t0(self) -> int:
        return self.presence[0][0]

    @property
    def t_max(self) -> int:
        return self.presence[-1][0]

    @property
    def lifetime(self) -> int:
        return self.t_max - self.t0

    def age(self, t: int) -> int:
        if not self.t0 <= t <= self.t_max:
            raise CommscopeError(f"timeline {self.timeline_id} absent at slice {t}")
        return t - self.t0

    def community_at(self, t: int) -> int:
        for pos, i in self.presence:
            if pos == t:
                return i
        raise CommscopeError(f"timeline {self.timeline_id} absent at slice {t}")

    def members_at(self, dn: DynamicNetwork, t: int) -> frozenset[str]:
        return dn[t].communities.members(self.community_at(t))


def match_communities(dn: DynamicNetwork, theta: float = 0.3,
                      ) -> tuple[list[CommunityTimeline], list[TransitionMatches]]:
    """Jaccard-match communities across consecutive slices and chain timelines.

    A pair qualifies when the Jaccard overlap of its member sets is >= theta.
    Timelines only continue through one-to-one matches (the source's single
    qualified target, and vice versa); everything else starts a new timeline,
    so each (slice, community) belongs to exactly one timeline.
    """
    if not 0 < theta <= 1:
        raise ConfigError(f"theta must be in (0, 1], got {theta}")
    matches: list[TransitionMatches] = []
    for pos in range(len(dn) - 1):
        cs_a = dn[pos].communities
        cs_b = dn[pos + 1].communities
        scores: dict[tuple[int, int], float] = {}
        for i in cs_a.communities():
            members_i = cs_a.members(i)
            for j in cs_b.communities():
                score = jaccard(members_i, cs_b.members(j))
                if score >= theta:
                    scores[(i, j)] = score
        matches.append(TransitionMatches(pos, scores))

    timelines: list[CommunityTimeline] = []
    current: dict[int, CommunityTimeline] = {}
    for i in dn[0].communities.communities():
        tl = CommunityTimeline(len(timelines), [(0, i)])
        timelines.append(tl)
        current[i] = tl
    for pos in range(len(dn) - 1):
        continued = dict(matches[pos].one_to_one_pairs())
        nxt: dict[int, CommunityTimeline] = {}
        for i, j in continued.items():
            tl = current[i]
            tl.presence.append((pos + 1, j))
            nxt[j] = tl
        for j in dn[pos + 1].communities.communities():
            if j not in nxt:
                tl = CommunityTimeline(len(timelines), [(pos + 1, j)])
                timelines.append(tl)
                nxt[j] = tl
        current = nxt
    return timelines, matches


@dataclass(frozen=True)
class EventRecord:
    transition: int  # between slice positions `transition` and `transition + 1`
    kind: str
    sources: tuple[int, ...]
    targets: tuple[int, ...]
    joined: int | None = None  # one-to-one records only
    left: int | None = None


def detect_events(dn: DynamicNetwork, matches: Sequence[TransitionMatches],
                  gamma: float = 0.1) -> list[EventRecord]:
    """Classify every community of every transition.

    Merge/split take precedence over size-change classification. One-to-one
    matches are growth when the community gets more than (1 + gamma) times
    larger, contraction when smaller than (1 - gamma) times, continuation
    otherwise; gamma = 0 recovers strict inequality semantics.
    """
    if gamma < 0:
        raise ConfigError(f"gamma must be >= 0, got {gamma}")
    events: list[EventRecord] = []
    for tm in matches:
        pos = tm.transition
        cs_a = dn[pos].communities
        cs_b = dn[pos + 1].communities
        for i, j in tm.one_to_one_pairs():
            before = cs_a.members(i)
            after = cs_b.members(j)
            n_a, n_b = len(before), len(after)
            if n_b > n_a * (1 + gamma):
                kind = "growth"
            elif n_b < n_a * (1 - gamma):
                kind = "contraction"
            else:
                kind = "continuation"
            events.append(EventRecord(pos, kind, (i,), (j,),
                                      joined=len(after - before),
                                      left=len(before - after)))
        for i in cs_a.communities():
            targets = tm.targets_of(i)
            if not targets:
                events.append(EventRecord(pos, "death", (i,), ()))
            elif len(targets) >= 2:
                events.append(EventRecord(pos, "split", (i,), tuple(targets)))
        for j in cs_b.communities():
            sources = tm.sources_of(j)
            if not sources:
                events.append(EventRecord(pos, "birth", (), (j,)))
            elif len(sources) >= 2:
                events.append(EventRecord(pos, "merge", tuple(sources), (j,)))
    return events


def auto_correlation(tl: CommunityTimeline, dn: DynamicNetwork,
                     t1: int, t2: int) -> float:
    """Jaccard overlap of the timeline's member sets at two slices."""
    return jaccard(tl.members_at(dn, t1), tl.members_at(dn, t2))


def stationarity(tl: CommunityTimeline, dn: DynamicNetwork,
                 denominator_mode: str = "pairs") -> float | None:
    """Aggregate of consecutive-slice auto-correlations over the timeline.

    `pairs` divides by the number of consecutive-slice pairs (a true mean,
    1.0 for perfectly stable membership). `paper` divides by one less, a
    convention some published formulations use; it scores a constant 3-slice
    community 2.0 and is undefined over a single pair.
    """
    if denominator_mode not in ("pairs", "paper"):
        raise ConfigError(f"unknown stationarity denominator mode {denominator_mode!r}")
    span = tl.t_max - tl.t0
    if span < 1:
        return None
    numerator = math.fsum(
        auto_correlation(tl, dn, t, t + 1) for t in range(tl.t0, tl.t_max)
    )
    denominator = span if denominator_mode == "pairs" else span - 1
    if denominator == 0:
        return None
    return numerator / denominator


def _one_to_one_into(events: Sequence[EventRecord], tl: CommunityTimeline,
                     t: int) -> EventRecord | None:
    if t <= tl.t0 or t > tl.t_max:
        return None
    source = (tl.community_at(t - 1),)
    target = (tl.community_at(t),)
    for ev in events:
        if (ev.transition == t - 1 and ev.kind in ONE_TO_ONE_KINDS
                and ev.sources == source and ev.targets == target):
            return ev
    return None


def popularity_index(events: Sequence[EventRecord], tl: CommunityTimeline,
                     t: int) -> int | None:
    """Joining minus leaving node count at the transition into slice t."""
    ev = _one_to_one_into(events, tl, t)
    if ev is None:
        return None
    return ev.joined - ev.left


def member_stability(events: Sequence[EventRecord], tl: CommunityTimeline,
                     dn: DynamicNetwork, t: int) -> float | None:
    """1 - (leaving nodes / previous size) for the transition into slice t."""
    ev = _one_to_one_into(events, tl, t)
    if ev is None:
        return None
    n_prev = len(tl.members_at(dn, t - 1))
    return 1 - ev.left / n_prev


def event_census(events: Sequence[EventRecord],
                 ) -> tuple[dict[int, dict[str, int]], dict[str, int]]:
    """Counts by kind, per transition and in total. Continuation is counted
    separately as the no-event class."""
    per_transition: dict[int, dict[str, int]] = {}
    totals = {kind: 0 for kind in ALL_KINDS}
    for ev in events:
        row = per_transition.setdefault(
            ev.transition, {kind: 0 for kind in ALL_KINDS})
        row[ev.kind] += 1
        totals[ev.kind] += 1
    return per_transition, totals
