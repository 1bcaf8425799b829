"""Command-line front end.

Subcommands: topo, attr, dyn, ncp, all. Every run produces a single report
(JSON by default, TSV tables with --format tsv) that echoes the configuration
and input digests, so the output is a self-describing provenance record.

Exit codes: 0 success, 2 input/configuration error, 1 internal error.
"""

from __future__ import annotations

import os
import sys

import click

from . import __version__, report as rep
from .errors import CommscopeError
from .graph import load_attributes, load_communities, load_graph, load_manifest


def _validate_alpha(ctx, param, value):
    if value is not None and not 0 < value < 1:
        raise click.BadParameter("must be in (0, 1)")
    return value


def _validate_theta(ctx, param, value):
    if value is not None and not 0 < value <= 1:
        raise click.BadParameter("must be in (0, 1]")
    return value


def _validate_gamma(ctx, param, value):
    if value is not None and value < 0:
        raise click.BadParameter("must be >= 0")
    return value


def _parse_attr_types(raw: str | None) -> dict[str, str]:
    overrides: dict[str, str] = {}
    if not raw:
        return overrides
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise click.BadParameter(
                f"--attr-types entries must look like name=nominal|numeric, got {item!r}")
        name, _, kind = item.partition("=")
        if kind not in ("nominal", "numeric"):
            raise click.BadParameter(f"unknown attribute kind {kind!r}")
        overrides[name] = kind
    return overrides


def _parse_topics(raw: str | None) -> list[str]:
    if not raw:
        return []
    return [t.strip() for t in raw.split(",") if t.strip()]


def output_options(f):
    f = click.option("--output", "output", type=click.Path(), default=None,
                     help="Destination file (json) or directory (tsv); "
                          "json defaults to stdout.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "tsv"]),
                     default="json", show_default=True)(f)
    return f


def static_input_options(f):
    f = click.option("--communities", "communities_path", required=True,
                     type=click.Path(), help="Partition file (node<TAB>label).")(f)
    f = click.option("--edges", "edges_path", required=True,
                     type=click.Path(), help="Edge-list file.")(f)
    return f


def attr_options(required: bool):
    def deco(f):
        f = click.option("--alpha", type=float, default=0.01, show_default=True,
                         callback=_validate_alpha,
                         help="Significance level for over-expression.")(f)
        f = click.option("--topics", "topics_raw", default=None,
                         help="Comma-separated binary topic columns for the "
                              "community similarity degree.")(f)
        f = click.option("--attr-types", "attr_types_raw", default=None,
                         help="Kind overrides, e.g. age=numeric,city=nominal.")(f)
        f = click.option("--attributes", "attributes_path", required=required,
                         type=click.Path(), help="Attribute CSV (node column first).")(f)
        return f
    return deco


def dyn_options(required: bool):
    def deco(f):
        f = click.option("--per-slice", is_flag=True,
                         help="Re-run topological (and homophily) measures on "
                              "every time slice.")(f)
        f = click.option("--stationarity-denominator", "stationarity_mode",
                         type=click.Choice(["pairs", "paper"]), default="pairs",
                         show_default=True)(f)
        f = click.option("--gamma", type=float, default=0.1, show_default=True,
                         callback=_validate_gamma,
                         help="Relative size dead-band for growth/contraction.")(f)
        f = click.option("--theta", type=float, default=0.3, show_default=True,
                         callback=_validate_theta,
                         help="Jaccard threshold for community matching.")(f)
        f = click.option("--manifest", "manifest_path", required=required,
                         type=click.Path(),
                         help="Dynamic manifest (t<TAB>edges<TAB>partition).")(f)
        return f
    return deco


@click.group()
@click.version_option(__version__, prog_name="commscope")
def cli():
    """Characterize a pre-detected community structure of a network."""


def _new_report(config: dict, inputs: dict) -> dict:
    return {
        "schema": rep.SCHEMA,
        "version": __version__,
        "inputs": inputs,
        "config": config,
        "warnings": [],
    }


def _load_static(edges_path: str, communities_path: str, warnings: list[str]):
    with open(edges_path, encoding="utf-8") as fh:
        graph, gw = load_graph(fh)
    warnings.extend(gw)
    with open(communities_path, encoding="utf-8") as fh:
        cs = load_communities(fh, graph)
    return graph, cs


def _load_attrs(attributes_path: str, graph, attr_types_raw: str | None,
                warnings: list[str]):
    overrides = _parse_attr_types(attr_types_raw)
    with open(attributes_path, encoding="utf-8") as fh:
        attrs, aw = load_attributes(fh, graph, overrides)
    warnings.extend(aw)
    return attrs


def _finish(report: dict, fmt: str, output: str | None) -> None:
    text = rep.emit(rep.finalize(report), fmt, output)
    if text is not None:
        click.echo(text, nl=False)


def _run(body) -> None:
    try:
        body()
    except (CommscopeError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@cli.command()
@static_input_options
@click.option("--node-level", is_flag=True, help="Include the per-node profile table.")
@output_options
def topo(edges_path, communities_path, node_level, fmt, output):
    """Topological characterization of the communities and the structure."""
    def body():
        report = _new_report(
            config={"command": "topo", "node_level": node_level, "format": fmt},
            inputs={"edges": rep.file_digest(edges_path),
                    "communities": rep.file_digest(communities_path)},
        )
        graph, cs = _load_static(edges_path, communities_path, report["warnings"])
        report["structure"] = rep.structure_section(graph, cs)
        report["communities"] = rep.communities_section(graph, cs)
        if node_level:
            report["nodes"] = rep.nodes_section(graph, cs)
        _finish(report, fmt, output)
    _run(body)


@cli.command()
@static_input_options
@click.option("--ncp-extremum", type=click.Choice(["min", "max"]), default="min",
              show_default=True, help="Keep the best or worst community per size.")
@output_options
def ncp(edges_path, communities_path, ncp_extremum, fmt, output):
    """Conductance profile of the detected communities by size."""
    def body():
        report = _new_report(
            config={"command": "ncp", "ncp_extremum": ncp_extremum, "format": fmt},
            inputs={"edges": rep.file_digest(edges_path),
                    "communities": rep.file_digest(communities_path)},
        )
        graph, cs = _load_static(edges_path, communities_path, report["warnings"])
        report["ncp"] = rep.ncp_section(graph, cs, ncp_extremum)
        _finish(report, fmt, output)
    _run(body)


@cli.command()
@static_input_options
@attr_options(required=True)
@output_options
def attr(edges_path, communities_path, attributes_path, attr_types_raw,
         topics_raw, alpha, fmt, output):
    """Attribute statistics: association tests, over-expression, homophily, Csd."""
    def body():
        topics = _parse_topics(topics_raw)
        report = _new_report(
            config={"command": "attr", "attr_types": attr_types_raw,
                    "topics": topics, "alpha": alpha, "format": fmt},
            inputs={"edges": rep.file_digest(edges_path),
                    "communities": rep.file_digest(communities_path),
                    "attributes": rep.file_digest(attributes_path)},
        )
        graph, cs = _load_static(edges_path, communities_path, report["warnings"])
        attrs = _load_attrs(attributes_path, graph, attr_types_raw,
                            report["warnings"])
        report["attributes"] = rep.attributes_section(
            graph, cs, attrs, topics, alpha, report["warnings"])
        _finish(report, fmt, output)
    _run(body)


@cli.command()
@dyn_options(required=True)
@attr_options(required=False)
@output_options
def dyn(manifest_path, theta, gamma, stationarity_mode, per_slice,
        attributes_path, attr_types_raw, topics_raw, alpha, fmt, output):
    """Temporal analysis: community matching, events, timeline measures."""
    def body():
        report = _new_report(
            config={"command": "dyn", "theta": theta, "gamma": gamma,
                    "stationarity_denominator": stationarity_mode,
                    "per_slice": per_slice, "format": fmt},
            inputs={"manifest": rep.file_digest(manifest_path)},
        )
        dn = _load_dn(manifest_path, report["warnings"])
        attrs_per_slice = None
        if per_slice and attributes_path:
            attrs_per_slice = [
                _load_attrs_lenient(attributes_path, sl.graph, attr_types_raw,
                                    report["warnings"])
                for sl in dn.slices
            ]
        report["dynamics"] = rep.dynamics_section(
            dn, theta, gamma, stationarity_mode, report["warnings"],
            per_slice=per_slice, attrs_per_slice=attrs_per_slice)
        _finish(report, fmt, output)
    _run(body)


@cli.command(name="all")
@static_input_options
@click.option("--node-level", is_flag=True, help="Include the per-node profile table.")
@click.option("--ncp-extremum", type=click.Choice(["min", "max"]), default="min",
              show_default=True)
@attr_options(required=False)
@dyn_options(required=False)
@output_options
def run_all(edges_path, communities_path, node_level, ncp_extremum,
            attributes_path, attr_types_raw, topics_raw, alpha,
            manifest_path, theta, gamma, stationarity_mode, per_slice,
            fmt, output):
    """Run every applicable analysis and emit a single report."""
    def body():
        topics = _parse_topics(topics_raw)
        inputs = {"edges": rep.file_digest(edges_path),
                  "communities": rep.file_digest(communities_path)}
        if attributes_path:
            inputs["attributes"] = rep.file_digest(attributes_path)
        if manifest_path:
            inputs["manifest"] = rep.file_digest(manifest_path)
        report = _new_report(
            config={"command": "all", "node_level": node_level,
                    "ncp_extremum": ncp_extremum, "attr_types": attr_types_raw,
                    "topics": topics, "alpha": alpha, "theta": theta,
                    "gamma": gamma, "stationarity_denominator": stationarity_mode,
                    "per_slice": per_slice, "format": fmt},
            inputs=inputs,
        )
        graph, cs = _load_static(edges_path, communities_path, report["warnings"])
        report["structure"] = rep.structure_section(graph, cs)
        report["communities"] = rep.communities_section(graph, cs)
        if node_level:
            report["nodes"] = rep.nodes_section(graph, cs)
        report["ncp"] = rep.ncp_section(graph, cs, ncp_extremum)
        if attributes_path:
            attrs = _load_attrs(attributes_path, graph, attr_types_raw,
                                report["warnings"])
            report["attributes"] = rep.attributes_section(
                graph, cs, attrs, topics, alpha, report["warnings"])
        if manifest_path:
            dn = _load_dn(manifest_path, report["warnings"])
            attrs_per_slice = None
            if per_slice and attributes_path:
                attrs_per_slice = [
                    _load_attrs_lenient(attributes_path, sl.graph,
                                        attr_types_raw, report["warnings"])
                    for sl in dn.slices
                ]
            report["dynamics"] = rep.dynamics_section(
                dn, theta, gamma, stationarity_mode, report["warnings"],
                per_slice=per_slice, attrs_per_slice=attrs_per_slice)
        _finish(report, fmt, output)
    _run(body)


def _load_dn(manifest_path: str, warnings: list[str]):
    with open(manifest_path, encoding="utf-8") as fh:
        dn, dw = load_manifest(fh, base_dir=os.path.dirname(manifest_path) or ".")
    warnings.extend(dw)
    return dn


def _load_attrs_lenient(attributes_path: str, graph, attr_types_raw: str | None,
                        warnings: list[str]):
    """Per-slice attribute load: rows for nodes absent from this slice are
    dropped instead of rejected (nodes come and go across slices)."""
    import csv
    import io
    overrides = _parse_attr_types(attr_types_raw)
    with open(attributes_path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CommscopeError("attribute CSV is empty")
    kept = [rows[0]]
    dropped = 0
    for row in rows[1:]:
        if row and graph.has_node(row[0]):
            kept.append(row)
        elif row:
            dropped += 1
    if dropped:
        warnings.append(
            f"{dropped} attribute row(s) for nodes absent from a slice were ignored")
    buf = io.StringIO()
    csv.writer(buf).writerows(kept)
    buf.seek(0)
    attrs, aw = load_attributes(buf, graph, overrides)
    warnings.extend(aw)
    return attrs


def main() -> None:  # pragma: no cover - console entry point
    cli()


if __name__ == "__main__":  # pragma: no cover
    main()
