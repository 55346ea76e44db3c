"""Combining transparency properties of the same kind across services.

Each vocabulary kind has one aggregation function. Retention statements join
on the scale volatile < finite durations < unlimited, keeping the winning
operand verbatim so no unit conversion leaks into output. Set-like kinds
union; yes/no kinds OR. All functions are insensitive to input order, which
makes system-wide aggregation independent of registration order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .resolver import EffectiveProperties
from .sites import SitePath
from .vocabulary import (
    Duration,
    Kind,
    Profiling,
    RetentionTime,
    SpecialCategory,
    ThirdCountryTransfer,
    TransparencyProperty,
    value_to_dict,
)


# ---------------------------------------------------------------------------
# Retention lattice
# ---------------------------------------------------------------------------

_RANK_UNSTATED = 0
_RANK_VOLATILE = 1
_RANK_PERIOD = 2
_RANK_NO_LIMIT = 3


def _scale_key(rt: RetentionTime) -> tuple[int, int, int, int, int]:
    if rt.no_limit:
        return (_RANK_NO_LIMIT, 0, 0, 0, 0)
    if rt.period is not None:
        return (_RANK_PERIOD, *rt.period.sort_key())
    if rt.volatile:
        return (_RANK_VOLATILE, 0, 0, 0, 0)
    return (_RANK_UNSTATED, 0, 0, 0, 0)


def _shorter(a: Duration | None, b: Duration | None) -> Duration | None:
    if a is None:
        return b
    if b is None:
        return a
    return a if a.sort_key() <= b.sort_key() else b


def merge_retention(a: RetentionTime, b: RetentionTime) -> RetentionTime:
    """Join of two retention statements.

    The longer statement wins verbatim (unlimited absorbs everything, volatile
    yields to any stated period). Review obligations combine: the flags OR and
    the stricter (shorter) review frequency survives.
    """
    base = a if _scale_key(a) >= _scale_key(b) else b
    return RetentionTime(
        period=base.period,
        volatile=base.volatile,
        no_limit=base.no_limit,
        periodic_review=a.periodic_review or b.periodic_review,
        review_frequency=_shorter(a.review_frequency, b.review_frequency),
    )


# ---------------------------------------------------------------------------
# Per-kind aggregation
# ---------------------------------------------------------------------------


def _canonical(kind: Kind, value: object) -> str:
    return json.dumps(value_to_dict(kind, value), sort_keys=True)


def _union_by_key(kind: Kind, values: Sequence, key_of, notes: list[str]) -> list:
    ordered = sorted(values, key=lambda v: (key_of(v), _canonical(kind, v)))
    groups: dict[str, list] = {}
    for value in ordered:
        groups.setdefault(key_of(value), []).append(value)
    merged = []
    for key, group in sorted(groups.items()):
        distinct = list(dict.fromkeys(_canonical(kind, v) for v in group))
        merged.append(group[0])
        if len(distinct) > 1:
            notes.append(
                f"{kind.value} {key!r}: {len(distinct)} differing declarations; kept the first"
            )
    return merged


def _joined_notes(texts: Iterable[str | None]) -> str | None:
    distinct = sorted({t for t in texts if t})
    if not distinct:
        return None
    return "; ".join(distinct)


def merge_kind(kind: Kind, values: Sequence) -> tuple[object, list[str]]:
    """Aggregate same-kind vocabulary records into one merged value.

    Returns the merged value and any merge notes (recorded when set-union
    finds same-named elements that disagree on other fields).
    """
    if not values:
        raise ValueError("merge_kind needs at least one value")
    notes: list[str] = []

    if kind is Kind.RETENTION_TIME:
        merged: RetentionTime = values[0]
        for value in values[1:]:
            merged = merge_retention(merged, value)
        return merged, notes

    if kind is Kind.RECIPIENT:
        return _union_by_key(kind, values, lambda r: r.name, notes), notes

    if kind is Kind.PURPOSE:
        return _union_by_key(kind, values, lambda p: p.id, notes), notes

    if kind is Kind.DATA_CATEGORY:
        return _union_by_key(kind, values, lambda c: c.name, notes), notes

    if kind is Kind.THIRD_COUNTRY_TRANSFER:
        countries = sorted({c for t in values for c in t.countries})
        occurs = any(t.occurs for t in values)
        return (
            ThirdCountryTransfer(
                occurs=occurs,
                countries=tuple(countries) if occurs else (),
                safeguards_note=_joined_notes(t.safeguards_note for t in values),
            ),
            notes,
        )

    if kind is Kind.PROFILING:
        return (
            Profiling(
                performed=any(p.performed for p in values),
                explanation=_joined_notes(p.explanation for p in values),
            ),
            notes,
        )

    if kind is Kind.SPECIAL_CATEGORY:
        return (
            SpecialCategory(
                applies=any(s.applies for s in values),
                ground=_joined_notes(s.ground for s in values),
            ),
            notes,
        )

    if kind is Kind.SOURCE:
        return _union_by_key(kind, values, lambda s: s.origin.value, notes), notes

    raise ValueError(f"unknown kind {kind!r}")  # pragma: no cover


def merged_to_json(kind: Kind, merged: object) -> object:
    if isinstance(merged, list):
        return [value_to_dict(kind, v) for v in merged]
    return value_to_dict(kind, merged)


# ---------------------------------------------------------------------------
# System-wide aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Contribution:
    service_id: str
    site: SitePath
    prop: TransparencyProperty


@dataclass
class AggregatedDatum:
    datum_name: str
    processing_services: tuple[str, ...]
    merged: dict[Kind, object] = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    contributions: tuple[Contribution, ...] = ()


def _normalize(name: str) -> str:
    return name.casefold().strip()


def aggregate(
    services: Sequence[tuple[str, Sequence[EffectiveProperties]]],
    aliases: Mapping[str, str] | None = None,
) -> list[AggregatedDatum]:
    """Group same-named indicators across services into aggregated datums.

    Datum identity is the case-insensitive indicator name; the optional alias
    table maps divergent spellings onto one canonical datum name before
    grouping. Output is sorted by datum name and independent of the order the
    services are given in.
    """
    alias_lookup = { _normalize(k): v for k, v in (aliases or {}).items() }

    groups: dict[str, dict] = {}
    for service_id, effectives in services:
        for effective in effectives:
            display = alias_lookup.get(_normalize(effective.indicator.name), effective.indicator.name)
            key = _normalize(display)
            group = groups.setdefault(key, {"names": set(), "services": set(), "props": []})
            group["names"].add(display)
            group["services"].add(service_id)
            for kind, props in effective.by_kind.items():
                for prop in props:
                    group["props"].append(Contribution(service_id, prop.declared_at, prop))

    datums: list[AggregatedDatum] = []
    for key in sorted(groups):
        group = groups[key]
        by_kind: dict[Kind, list] = {}
        for contribution in group["props"]:
            by_kind.setdefault(contribution.prop.kind, []).append(contribution.prop.value)
        merged: dict[Kind, object] = {}
        notes: list[str] = []
        for kind in Kind:
            if kind in by_kind:
                merged_value, kind_notes = merge_kind(kind, by_kind[kind])
                merged[kind] = merged_value
                notes.extend(kind_notes)
        contributions = tuple(
            sorted(
                group["props"],
                key=lambda c: (c.service_id, c.prop.kind.value, c.site.text(), _canonical(c.prop.kind, c.prop.value)),
            )
        )
        datums.append(
            AggregatedDatum(
                datum_name=min(group["names"]),
                processing_services=tuple(sorted(group["services"])),
                merged=merged,
                notes=tuple(sorted(set(notes))),
                contributions=contributions,
            )
        )
    return datums


def _inverted_index(
    services: Sequence[tuple[str, Sequence[EffectiveProperties]]],
    kind: Kind,
    key_of,
) -> dict[str, dict]:
    index: dict[str, dict] = {}
    for service_id, effectives in services:
        for effective in effectives:
            for prop in effective.by_kind.get(kind, ()):
                entry = index.setdefault(
                    key_of(prop.value),
                    {"services": set(), "datum_names": set(), "contributions": set(), "descriptions": set()},
                )
                entry["services"].add(service_id)
                entry["datum_names"].add(effective.indicator.name)
                entry["contributions"].add((service_id, prop.declared_at.text()))
                description = getattr(prop.value, "description", None)
                if description:
                    entry["descriptions"].add(description)
    return {
        key: {
            "services": sorted(entry["services"]),
            "datum_names": sorted(entry["datum_names"]),
            "contributions": [
                {"service": s, "site": site} for s, site in sorted(entry["contributions"])
            ],
            "descriptions": sorted(entry["descriptions"]),
        }
        for key, entry in sorted(index.items())
    }


def purpose_index(
    services: Sequence[tuple[str, Sequence[EffectiveProperties]]]
) -> dict[str, dict]:
    """purpose id -> the services and datums it is declared for."""
    return _inverted_index(services, Kind.PURPOSE, lambda p: p.id)


def recipient_index(
    services: Sequence[tuple[str, Sequence[EffectiveProperties]]]
) -> dict[str, dict]:
    """recipient name -> the services and datums disclosed to it."""
    return _inverted_index(services, Kind.RECIPIENT, lambda r: r.name)


# ---------------------------------------------------------------------------
# Data-flow graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowEdge:
    sender: str
    receiver: str
    datum_names: tuple[str, ...] = ()


@dataclass(frozen=True)
class FlowGraph:
    nodes: tuple[str, ...]
    edges: tuple[FlowEdge, ...]


def build_flow_graph(nodes: Iterable[str], edges: Iterable[FlowEdge]) -> FlowGraph:
    """Normalize an edge list: collapse multi-edges, validate endpoints."""
    node_tuple = tuple(sorted(set(nodes)))
    known = set(node_tuple)
    collapsed: dict[tuple[str, str], set[str]] = {}
    for edge in edges:
        if edge.sender not in known:
            raise ValueError(f"unknown flow endpoint {edge.sender!r}")
        if edge.receiver not in known:
            raise ValueError(f"unknown flow endpoint {edge.receiver!r}")
        collapsed.setdefault((edge.sender, edge.receiver), set()).update(edge.datum_names)
    edge_tuple = tuple(
        FlowEdge(sender, receiver, tuple(sorted(names)))
        for (sender, receiver), names in sorted(collapsed.items())
    )
    return FlowGraph(nodes=node_tuple, edges=edge_tuple)


def flow_closure(graph: FlowGraph) -> set[tuple[str, str]]:
    """Transitive reachability over the flow edges, without self-pairs."""
    adjacency: dict[str, set[str]] = {node: set() for node in graph.nodes}
    for edge in graph.edges:
        adjacency[edge.sender].add(edge.receiver)
    closure: set[tuple[str, str]] = set()
    for start in graph.nodes:
        seen: set[str] = set()
        stack = list(adjacency[start])
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            stack.extend(adjacency[node])
        closure.update((start, target) for target in seen if target != start)
    return closure


def flow_graph_dot(graph: FlowGraph, closure: set[tuple[str, str]] | None = None) -> str:
    """GraphViz rendering of the flow graph, edges labeled with datum names."""
    lines = ["digraph dataflow {", "  rankdir=LR;"]
    for node in graph.nodes:
        lines.append(f'  "{node}";')
    for edge in graph.edges:
        label = ", ".join(edge.datum_names)
        lines.append(f'  "{edge.sender}" -> "{edge.receiver}" [label="{label}"];')
    if closure:
        for sender, receiver in sorted(closure):
            if not any(e.sender == sender and e.receiver == receiver for e in graph.edges):
                lines.append(f'  "{sender}" -> "{receiver}" [style=dotted, color=gray];')
    lines.append("}")
    return "\n".join(lines) + "\n"
