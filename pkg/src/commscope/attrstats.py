"""Attribute-based characterization: association tests, over-expression,
homophily and the community similarity degree.

Missing values are excluded test-by-test (listwise), with exclusion counts
reported. P-values come from exact combinatorics where feasible
(hypergeometric) and from the standard chi-square / F distributions
otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from scipy.stats import chi2 as chi2_dist
from scipy.stats import f as f_dist

from .errors import AttributeKindError, CommscopeError, ConfigError
from .graph import NOMINAL, NUMERIC, AttributeTable, CommunityStructure, Graph


@dataclass(frozen=True)
class MajorityEntry:
    community_index: int
    community_label: str
    value: str | None
    share: float | None
    non_missing: int


@dataclass
class AssociationResult:
    attribute: str
    test: str
    statistic: float | None
    dof: tuple[int, ...]
    p_value: float | None
    phi: float | None = None
    cramers_v: float | None = None
    lambda_gk: float | None = None
    eta_squared: float | None = None
    majority: list[MajorityEntry] | None = None
    excluded_missing: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class OverExpressionFinding:
    community_index: int
    community_label: str
    attribute: str
    value: str
    observed: int
    expected: float
    p_raw: float
    p_corrected: float
    over_expressed: bool


@dataclass(frozen=True)
class HomophilyResult:
    attribute: str
    scope: str  # "global" or a community label
    kind: str
    coefficient: float | None
    links_used: int
    links_skipped_missing: int


@dataclass(frozen=True)
class CsdResult:
    community_index: int
    community_label: str
    size: int
    interest_count: int   # r_i: manifestations of interest over all topics
    active_topics: int    # q_i: topics with at least one interested member
    csd: float | None


def _require_kind(attrs: AttributeTable, attribute: str, kind: str) -> None:
    actual = attrs.kind(attribute)
    if actual != kind:
        raise AttributeKindError(
            f"attribute {attribute!r} is {actual}, operation requires {kind}"
        )


def _community_values(cs: CommunityStructure, attrs: AttributeTable,
                      attribute: str) -> tuple[list[list], int]:
    """Non-missing values per community (index order) and the missing count."""
    groups: list[list] = [[] for _ in cs.communities()]
    missing = 0
    for i in cs.communities():
        for u in sorted(cs.members(i)):
            v = attrs.get(attribute, u)
            if v is None:
                missing += 1
            else:
                groups[i - 1].append(v)
    return groups, missing


def majority_profile(cs: CommunityStructure, attrs: AttributeTable,
                     attribute: str) -> list[MajorityEntry]:
    """Modal value and its share of non-missing members, per community.

    Ties are broken by the lexicographically smallest value.
    """
    _require_kind(attrs, attribute, NOMINAL)
    groups, _ = _community_values(cs, attrs, attribute)
    entries = []
    for i in cs.communities():
        values = groups[i - 1]
        if not values:
            entries.append(MajorityEntry(i, cs.label(i), None, None, 0))
            continue
        counts: dict[str, int] = {}
        for v in values:
            counts[v] = counts.get(v, 0) + 1
        best = min(counts, key=lambda v: (-counts[v], v))
        entries.append(MajorityEntry(i, cs.label(i), best,
                                     counts[best] / len(values), len(values)))
    return entries


def _contingency(cs: CommunityStructure, attrs: AttributeTable,
                 attribute: str) -> tuple[list[int], list[str], list[list[int]], int]:
    """(row community indices, column values, counts, missing) for communities
    with at least one non-missing entry."""
    groups, missing = _community_values(cs, attrs, attribute)
    rows = [i for i in cs.communities() if groups[i - 1]]
    values = sorted({v for i in rows for v in groups[i - 1]})
    col = {v: j for j, v in enumerate(values)}
    table = [[0] * len(values) for _ in rows]
    for r, i in enumerate(rows):
        for v in groups[i - 1]:
            table[r][col[v]] += 1
    return rows, values, table, missing


def chi_square_association(cs: CommunityStructure, attrs: AttributeTable,
                           attribute: str) -> AssociationResult:
    """Pearson chi-square test of community membership vs a nominal attribute,
    with Phi, Cramer's V and Goodman-Kruskal lambda effect sizes."""
    _require_kind(attrs, attribute, NOMINAL)
    rows, values, table, missing = _contingency(cs, attrs, attribute)
    r, c = len(rows), len(values)
    if r < 2 or c < 2:
        raise CommscopeError(
            f"attribute {attribute!r}: degenerate table "
            f"({r} communit{'y' if r == 1 else 'ies'} x {c} value(s))"
        )
    row_tot = [sum(row) for row in table]
    col_tot = [sum(table[a][b] for a in range(r)) for b in range(c)]
    n_total = sum(row_tot)

    stat = 0.0
    low_expected = False
    for a in range(r):
        for b in range(c):
            expected = row_tot[a] * col_tot[b] / n_total
            if expected < 5:
                low_expected = True
            stat += (table[a][b] - expected) ** 2 / expected
    dof = (r - 1) * (c - 1)
    p = float(chi2_dist.sf(stat, dof))

    phi = math.sqrt(stat / n_total)
    cramers_v = math.sqrt(stat / (n_total * min(r - 1, c - 1)))
    max_col = max(col_tot)
    if n_total == max_col:
        lambda_gk = None
    else:
        lambda_gk = (sum(max(row) for row in table) - max_col) / (n_total - max_col)

    warnings = []
    if low_expected:
        warnings.append(
            f"attribute {attribute!r}: some expected cell counts are below 5; "
            "chi-square p-value may be unreliable"
        )
    return AssociationResult(
        attribute=attribute,
        test="chi-square",
        statistic=stat,
        dof=(dof,),
        p_value=p,
        phi=phi,
        cramers_v=cramers_v,
        lambda_gk=lambda_gk,
        majority=majority_profile(cs, attrs, attribute),
        excluded_missing=missing,
        warnings=warnings,
    )


def anova_association(cs: CommunityStructure, attrs: AttributeTable,
                      attribute: str) -> AssociationResult:
    """One-way ANOVA of a numeric attribute across communities, with eta^2.

    An infinite F (all variance between groups) is reported as statistic None
    with eta^2 = 1 and a warning, so serialized reports stay finite-or-null.
    """
    _require_kind(attrs, attribute, NUMERIC)
    all_groups, missing = _community_values(cs, attrs, attribute)
    groups = [g for g in all_groups if g]
    g = len(groups)
    n_total = sum(len(grp) for grp in groups)
    if g < 2 or n_total <= g:
        raise CommscopeError(
            f"attribute {attribute!r}: insufficient data for ANOVA "
            f"({g} non-empty communities, {n_total} values)"
        )
    grand = math.fsum(math.fsum(grp) for grp in groups) / n_total
    ss_between = math.fsum(
        len(grp) * (math.fsum(grp) / len(grp) - grand) ** 2 for grp in groups
    )
    ss_within = math.fsum(
        math.fsum((x - math.fsum(grp) / len(grp)) ** 2 for x in grp) for grp in groups
    )
    ss_total = ss_between + ss_within
    dof = (g - 1, n_total - g)

    warnings: list[str] = []
    if ss_within == 0:
        if ss_between == 0:
            # All values identical: F is 0/0.
            return AssociationResult(
                attribute=attribute, test="anova", statistic=None, dof=dof,
                p_value=None, eta_squared=None, excluded_missing=missing,
                warnings=[f"attribute {attribute!r}: zero variance, F undefined"],
            )
        warnings.append(
            f"attribute {attribute!r}: zero within-group variance, F is infinite"
        )
        return AssociationResult(
            attribute=attribute, test="anova", statistic=None, dof=dof,
            p_value=0.0, eta_squared=1.0, excluded_missing=missing,
            warnings=warnings,
        )
    f_stat = (ss_between / dof[0]) / (ss_within / dof[1])
    return AssociationResult(
        attribute=attribute, test="anova", statistic=f_stat, dof=dof,
        p_value=float(f_dist.sf(f_stat, *dof)),
        eta_squared=ss_between / ss_total,
        excluded_missing=missing, warnings=warnings,
    )


def hypergeom_right_tail(n_pop: int, k_successes: int, n_draws: int, x: int) -> float:
    """P[X >= x] for X ~ Hypergeometric(N, K, n), via exact integer binomials."""
    if x <= 0:
        return 1.0
    total = math.comb(n_pop, n_draws)
    upper = min(k_successes, n_draws)
    acc = sum(
        math.comb(k_successes, j) * math.comb(n_pop - k_successes, n_draws - j)
        for j in range(x, upper + 1)
    )
    return float(Fraction(acc, total))


def over_expression(cs: CommunityStructure, attrs: AttributeTable,
                    attribute: str, alpha: float = 0.01,
                    ) -> list[OverExpressionFinding]:
    """Hypergeometric over-representation of each attribute value in each
    community, Bonferroni-corrected over all (community, value) pairs."""
    _require_kind(attrs, attribute, NOMINAL)
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    rows, values, table, _ = _contingency(cs, attrs, attribute)
    if not rows or not values:
        return []
    col_tot = [sum(table[a][b] for a in range(len(rows))) for b in range(len(values))]
    n_pop = sum(col_tot)
    family = len(rows) * len(values)
    findings = []
    for a, i in enumerate(rows):
        n_draws = sum(table[a])
        for b, v in enumerate(values):
            observed = table[a][b]
            p_raw = hypergeom_right_tail(n_pop, col_tot[b], n_draws, observed)
            p_corr = min(1.0, p_raw * family)
            findings.append(OverExpressionFinding(
                community_index=i,
                community_label=cs.label(i),
                attribute=attribute,
                value=v,
                observed=observed,
                expected=n_draws * col_tot[b] / n_pop,
                p_raw=p_raw,
                p_corrected=p_corr,
                over_expressed=p_corr <= alpha,
            ))
    return findings


def _edge_value_pairs(graph: Graph, attrs: AttributeTable, attribute: str,
                      members: frozenset[str] | None,
                      ) -> tuple[list[tuple], int]:
    """Symmetrized (value_u, value_v) pairs over usable links.

    With `members` given, only links internal to that node set are used.
    Links with a missing endpoint value are skipped and counted.
    """
    pairs: list[tuple] = []
    skipped = 0
    for u, v in graph.edges():
        if members is not None and (u not in members or v not in members):
            continue
        xu = attrs.get(attribute, u)
        xv = attrs.get(attribute, v)
        if xu is None or xv is None:
            skipped += 1
            continue
        pairs.append((xu, xv))
        pairs.append((xv, xu))
    return pairs, skipped


def _nominal_agreement(pairs: Sequence[tuple]) -> float | None:
    """Chance-corrected same-value agreement (Cohen's kappa on the symmetric
    edge mixing matrix; coincides with Newman's nominal assortativity)."""
    total = len(pairs)
    agree = sum(1 for x, y in pairs if x == y) / total
    margin: dict[object, int] = {}
    for x, _ in pairs:
        margin[x] = margin.get(x, 0) + 1
    chance = math.fsum((c / total) ** 2 for c in margin.values())
    if chance == 1.0:
        return None  # constant attribute on the used links
    return (agree - chance) / (1 - chance)


def _pearson(pairs: Sequence[tuple]) -> float | None:
    xs = [x for x, _ in pairs]
    ys = [y for _, y in pairs]
    n = len(pairs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return None  # zero variance
    sxy = math.fsum((x - mx) * (y - my) for x, y in pairs)
    return sxy / math.sqrt(sxx * syy)


def homophily(graph: Graph, attrs: AttributeTable, attribute: str,
              scope: int | None = None,
              cs: CommunityStructure | None = None) -> HomophilyResult:
    """Tendency of linked nodes to share an attribute value.

    Global scope (`scope=None`) uses every link; a community index restricts
    to that community's internal links (requires `cs`). Nominal attributes
    get a chance-corrected agreement coefficient, numeric ones the linear
    correlation across edge endpoints, both symmetrized over orientations.
    """
    if scope is None:
        members = None
        scope_name = "global"
    else:
        if cs is None:
            raise ConfigError("community-scoped homophily requires a community structure")
        members = cs.members(scope)
        scope_name = cs.label(scope)
    pairs, skipped = _edge_value_pairs(graph, attrs, attribute, members)
    kind = attrs.kind(attribute)
    if not pairs:
        coeff = None
    elif kind == NOMINAL:
        coeff = _nominal_agreement(pairs)
    else:
        coeff = _pearson(pairs)
    return HomophilyResult(
        attribute=attribute,
        scope=scope_name,
        kind=kind,
        coefficient=coeff,
        links_used=len(pairs) // 2,
        links_skipped_missing=skipped,
    )


def _interest_flag(attrs: AttributeTable, topic: str, node: str) -> int:
    v = attrs.get(topic, node)
    if v is None:
        return 0  # a missing flag reads as "not interested"
    if v in (0, 0.0, "0"):
        return 0
    if v in (1, 1.0, "1"):
        return 1
    raise AttributeKindError(
        f"topic attribute {topic!r} must be binary (0/1), got {v!r} for node {node!r}"
    )


def community_similarity_degree(cs: CommunityStructure, attrs: AttributeTable,
                                topic_attributes: Sequence[str],
                                ) -> list[CsdResult]:
    """Interest homogeneity of each community over binary topic attributes.

    Csd = (r/q - 1)/(n - 1) where r counts all manifestations of interest and
    q the topics with at least one interested member; 1 means identical
    nonempty interest sets, 0 means no shared interest. Undefined (None) for
    singletons or when no member is interested in anything.
    """
    if not topic_attributes:
        raise ConfigError("community similarity degree needs at least one topic attribute")
    for topic in topic_attributes:
        attrs.kind(topic)  # raises on unknown attribute
    results = []
    for i in cs.communities():
        members = sorted(cs.members(i))
        n_i = len(members)
        r_i = 0
        q_i = 0
        for topic in topic_attributes:
            topic_count = sum(_interest_flag(attrs, topic, u) for u in members)
            r_i += topic_count
            if topic_count:
                q_i += 1
        if n_i < 2 or q_i == 0:
            csd = None
        else:
            csd = (r_i / q_i - 1) / (n_i - 1)
        results.append(CsdResult(i, cs.label(i), n_i, r_i, q_i, csd))
    return results
