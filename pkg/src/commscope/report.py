"""Report assembly and serialization.

A report is a plain dict with deterministic key and element order, so that
identical inputs and configuration serialize to identical bytes. Undefined
measures are explicit nulls; non-finite floats never reach the output.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from typing import Sequence

from . import attrstats, dynamics, ncp, topo
from .errors import CommscopeError, ConfigError
from .graph import (
    NOMINAL,
    NUMERIC,
    AttributeTable,
    CommunityStructure,
    DynamicNetwork,
    Graph,
    node_profile,
)

SCHEMA = "commscope/1"


def file_digest(path: str) -> dict:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return {"path": path, "sha256": h.hexdigest()}


# ---------------------------------------------------------------------------
# Sections


def structure_section(graph: Graph, cs: CommunityStructure) -> dict:
    s = topo.structure_summary(graph, cs)
    return {
        "nodes": graph.n,
        "links": graph.m,
        "community_count": s.community_count,
        "sizes": s.sizes,
        "size_histogram": {str(k): v for k, v in s.size_histogram.items()},
        "inter_community_link_proportion": s.inter_community_link_proportion,
        "modularity": s.modularity,
        # Boundary-only alternate form; NOT the standard null model.
        "modularity_literal_form": s.modularity_literal,
    }


def communities_section(graph: Graph, cs: CommunityStructure) -> list[dict]:
    out = []
    for i in cs.communities():
        c = topo.community_summary(graph, cs, i)
        out.append({
            "index": c.index,
            "label": c.label,
            "size": c.size,
            "internal_links": c.internal_links,
            "boundary_half": c.boundary_half,
            "density": c.density,
            "scaled_density": c.scaled_density,
            "avg_distance": c.avg_distance,
            "reachable_pair_fraction": c.reachable_pair_fraction,
            "transitivity_mean": c.transitivity_mean,
            "transitivity_defined_nodes": c.transitivity_defined_nodes,
            "transitivity_skipped_nodes": c.transitivity_skipped_nodes,
            "hub_dominance": c.hub_dominance,
            "mean_internal_degree": c.mean_internal_degree,
            "std_internal_degree": c.std_internal_degree,
            "modularity_term": c.modularity_term,
            "conductance": c.conductance,
        })
    return out


def nodes_section(graph: Graph, cs: CommunityStructure) -> list[dict]:
    out = []
    for u in graph.nodes:
        prof = node_profile(graph, cs, u)
        out.append({
            "node": u,
            "community": cs.label(cs.index_of(u)),
            "degree": prof.degree,
            "internal_degree": prof.internal_degree,
            "embeddedness": topo.embeddedness(cs, u),
            "within_community_degree": topo.within_community_degree(cs, u),
            "participation": topo.participation_coefficient(cs, u),
            "local_transitivity": topo.local_transitivity(graph, cs, u),
        })
    return out


def ncp_section(graph: Graph, cs: CommunityStructure, extremum: str) -> list[dict]:
    return [
        {
            "size": p.size,
            "conductance": p.conductance,
            "community_label": p.community_label,
        }
        for p in ncp.ncp_over_partition(graph, cs, extremum)
    ]


def attributes_section(graph: Graph, cs: CommunityStructure,
                       attrs: AttributeTable, topics: Sequence[str],
                       alpha: float, warnings: list[str]) -> dict:
    associations = []
    over = []
    homo = []
    for name in attrs.names:
        kind = attrs.kind(name)
        try:
            if kind == NOMINAL:
                res = attrstats.chi_square_association(cs, attrs, name)
            else:
                res = attrstats.anova_association(cs, attrs, name)
        except CommscopeError as exc:
            warnings.append(f"association skipped: {exc}")
        else:
            warnings.extend(res.warnings)
            associations.append({
                "attribute": res.attribute,
                "test": res.test,
                "statistic": res.statistic,
                "dof": list(res.dof),
                "p_value": res.p_value,
                "phi": res.phi,
                "cramers_v": res.cramers_v,
                "lambda_gk": res.lambda_gk,
                "eta_squared": res.eta_squared,
                "excluded_missing": res.excluded_missing,
                "majority": None if res.majority is None else [
                    {
                        "community": e.community_label,
                        "value": e.value,
                        "share": e.share,
                        "non_missing": e.non_missing,
                    }
                    for e in res.majority
                ],
            })
        if kind == NOMINAL:
            over.extend(
                {
                    "community": f.community_label,
                    "attribute": f.attribute,
                    "value": f.value,
                    "observed": f.observed,
                    "expected": f.expected,
                    "p_raw": f.p_raw,
                    "p_corrected": f.p_corrected,
                    "over_expressed": f.over_expressed,
                }
                for f in attrstats.over_expression(cs, attrs, name, alpha)
            )
        scopes: list[int | None] = [None] + list(cs.communities())
        for scope in scopes:
            h = attrstats.homophily(graph, attrs, name, scope, cs)
            homo.append({
                "attribute": h.attribute,
                "scope": h.scope,
                "kind": h.kind,
                "coefficient": h.coefficient,
                "links_used": h.links_used,
                "links_skipped_missing": h.links_skipped_missing,
            })
    section = {
        "associations": associations,
        "over_expression": over,
        "homophily": homo,
    }
    if topics:
        section["community_similarity_degree"] = [
            {
                "community": r.community_label,
                "size": r.size,
                "interest_count": r.interest_count,
                "active_topics": r.active_topics,
                "csd": r.csd,
            }
            for r in attrstats.community_similarity_degree(cs, attrs, topics)
        ]
    return section


def dynamics_section(dn: DynamicNetwork, theta: float, gamma: float,
                     stationarity_mode: str, warnings: list[str],
                     per_slice: bool = False,
                     attrs_per_slice: Sequence[AttributeTable | None] | None = None,
                     ) -> dict:
    slice_labels = [s.t for s in dn.slices]
    timelines, matches = dynamics.match_communities(dn, theta)
    events = dynamics.detect_events(dn, matches, gamma)
    per_transition, totals = dynamics.event_census(events)
    if len(dn) < 2:
        warnings.append("single time slice: no transitions, dynamic section is empty")

    def label(pos: int, i: int) -> str:
        return dn[pos].communities.label(i)

    event_rows = [
        {
            "t_from": slice_labels[ev.transition],
            "t_to": slice_labels[ev.transition + 1],
            "kind": ev.kind,
            "sources": [label(ev.transition, i) for i in ev.sources],
            "targets": [label(ev.transition + 1, j) for j in ev.targets],
            "joined": ev.joined,
            "left": ev.left,
        }
        for ev in events
    ]

    timeline_rows = []
    for tl in timelines:
        pi_series = []
        for t in range(tl.t0 + 1, tl.t_max + 1):
            ev = dynamics._one_to_one_into(events, tl, t)
            if ev is None:
                continue
            pi_series.append({
                "t": slice_labels[t],
                "joined": ev.joined,
                "left": ev.left,
                "popularity": ev.joined - ev.left,
                "member_stability": dynamics.member_stability(events, tl, dn, t),
            })
        timeline_rows.append({
            "id": tl.timeline_id,
            "presence": [
                {"t": slice_labels[pos], "community": label(pos, i)}
                for pos, i in tl.presence
            ],
            "t0": slice_labels[tl.t0],
            "t_max": slice_labels[tl.t_max],
            "lifetime": tl.lifetime,
            "stationarity": dynamics.stationarity(tl, dn, stationarity_mode),
            "pi_series": pi_series,
        })

    section = {
        "slices": slice_labels,
        "timelines": timeline_rows,
        "events": event_rows,
        "census": {
            "per_transition": [
                {"t_from": slice_labels[t], "t_to": slice_labels[t + 1], **counts}
                for t, counts in sorted(per_transition.items())
            ],
            "totals": totals,
        },
    }
    if per_slice:
        rows = []
        for pos, sl in enumerate(dn.slices):
            row = {
                "t": sl.t,
                "structure": structure_section(sl.graph, sl.communities),
                "communities": communities_section(sl.graph, sl.communities),
            }
            attrs = attrs_per_slice[pos] if attrs_per_slice else None
            if attrs is not None:
                row["homophily"] = [
                    {
                        "attribute": h.attribute,
                        "coefficient": h.coefficient,
                        "links_used": h.links_used,
                    }
                    for h in (
                        attrstats.homophily(sl.graph, attrs, name)
                        for name in attrs.names
                    )
                ]
            rows.append(row)
        section["per_slice"] = rows
    return section


# ---------------------------------------------------------------------------
# Serialization


def _clean(obj, counter: list[int]):
    """Replace non-finite floats by None and count null leaves."""
    if isinstance(obj, dict):
        return {k: _clean(v, counter) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_clean(v, counter) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        obj = None
    if obj is None:
        counter[0] += 1
    return obj


def finalize(report: dict) -> dict:
    """Sanitize numerics and summarize undefined markers into the warnings."""
    warnings = report.pop("warnings", [])
    counter = [0]
    cleaned = _clean(report, counter)
    if counter[0]:
        warnings.append(
            f"{counter[0]} undefined value(s) reported as null"
        )
    cleaned["warnings"] = warnings
    return cleaned


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value)


def _write_table(path: str, columns: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(columns) + "\n")
        for row in rows:
            fh.write("\t".join(_cell(row.get(col)) for col in columns) + "\n")


def write_tsv(report: dict, out_dir: str) -> list[str]:
    """One TSV file per report table, with fixed column order."""
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []

    def table(name: str, columns: Sequence[str], rows: Sequence[dict]) -> None:
        path = os.path.join(out_dir, name)
        _write_table(path, columns, rows)
        written.append(path)

    meta_rows = [
        {"key": "schema", "value": report["schema"]},
        {"key": "version", "value": report["version"]},
        {"key": "config", "value": json.dumps(report["config"], sort_keys=True)},
        {"key": "inputs", "value": json.dumps(report["inputs"], sort_keys=True)},
    ]
    table("meta.tsv", ["key", "value"], meta_rows)

    if "structure" in report:
        struct = report["structure"]
        table("structure.tsv", ["key", "value"],
              [{"key": k, "value": json.dumps(v) if isinstance(v, (dict, list))
                else v} for k, v in struct.items()])
    if "communities" in report:
        cols = list(report["communities"][0]) if report["communities"] else [
            "index", "label", "size"]
        table("communities.tsv", cols, report["communities"])
    if "nodes" in report:
        cols = ["node", "community", "degree", "internal_degree", "embeddedness",
                "within_community_degree", "participation", "local_transitivity"]
        table("nodes.tsv", cols, report["nodes"])
    if "ncp" in report:
        table("ncp.tsv", ["size", "conductance", "community_label"], report["ncp"])
    if "attributes" in report:
        attrs = report["attributes"]
        table("associations.tsv",
              ["attribute", "test", "statistic", "dof", "p_value", "phi",
               "cramers_v", "lambda_gk", "eta_squared", "excluded_missing"],
              attrs["associations"])
        majority_rows = [
            {"attribute": a["attribute"], **entry}
            for a in attrs["associations"] if a["majority"]
            for entry in a["majority"]
        ]
        table("majority.tsv",
              ["attribute", "community", "value", "share", "non_missing"],
              majority_rows)
        table("over_expression.tsv",
              ["community", "attribute", "value", "observed", "expected",
               "p_raw", "p_corrected", "over_expressed"],
              attrs["over_expression"])
        table("homophily.tsv",
              ["attribute", "scope", "kind", "coefficient", "links_used",
               "links_skipped_missing"],
              attrs["homophily"])
        if "community_similarity_degree" in attrs:
            table("csd.tsv",
                  ["community", "size", "interest_count", "active_topics", "csd"],
                  attrs["community_similarity_degree"])
    if "dynamics" in report:
        dyn = report["dynamics"]
        table("events.tsv",
              ["t_from", "t_to", "kind", "sources", "targets", "joined", "left"],
              dyn["events"])
        table("timelines.tsv",
              ["id", "t0", "t_max", "lifetime", "stationarity"],
              dyn["timelines"])
        census_cols = ["t_from", "t_to", *dynamics.ALL_KINDS]
        table("event_census.tsv", census_cols, dyn["census"]["per_transition"])
    table("warnings.tsv", ["warning"],
          [{"warning": w} for w in report.get("warnings", [])])
    return written


def emit(report: dict, fmt: str, output: str | None) -> str | None:
    """Write the report; returns the JSON text when emitting to stdout."""
    if fmt == "json":
        text = render_json(report)
        if output is None:
            return text
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return None
    if fmt == "tsv":
        if output is None:
            raise ConfigError("TSV output requires --output DIRECTORY")
        write_tsv(report, output)
        return None
    raise ConfigError(f"unknown format {fmt!r}")
