"""Deterministic report emission and DOT graph export.

Reports are canonical JSON -- schema-versioned, key-sorted, ASCII -- so that
identical inputs produce byte-identical output, which makes reports diffable
and safe to hash.  :func:`to_jsonable` knows how to flatten every analysis
result in the package; :func:`emit_report` wraps one in the report envelope.

:func:`export_dot` renders a model as Graphviz text with one cluster per
layer; given an impact report it annotates each node with the posterior
probability of its degraded state.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, is_dataclass

from .cascade import CriticalityEntry, ImpactReport, LevelClassification, NodeImpact
from .graph import ValidationReport, Violation
from .model import BayesianModel, Marginal
from .roadmap import BoundRoadmap, TierGap
from .uncontrollable import StateCatalogue

REPORT_SCHEMA_VERSION = 1


def input_digest(*chunks: bytes) -> str:
    """A stable fingerprint of the inputs that produced a report."""
    h = hashlib.sha256()
    for chunk in chunks:
        h.update(chunk)
    return f"sha256:{h.hexdigest()}"


def to_jsonable(obj):
    """Flatten analysis results into JSON-ready structures, deterministically."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, Marginal):
        return {"node": obj.node,
                "distribution": {s: p for s, p in zip(obj.states, obj.probabilities)}}
    if isinstance(obj, ValidationReport):
        return {"ok": obj.ok,
                "violations": [to_jsonable(v) for v in obj.violations],
                "warnings": [to_jsonable(v) for v in obj.warnings]}
    if isinstance(obj, Violation):
        return {"kind": obj.kind, "message": obj.message}
    if isinstance(obj, ImpactReport):
        return {
            "origins": dict(sorted(obj.scenario.origins.items())),
            "impact_set": sorted(obj.impact_set),
            "nodes": {nid: to_jsonable(entry)
                      for nid, entry in sorted(obj.per_node.items())},
            "ranking": [to_jsonable(e) for e in obj.ranking] if obj.ranking else None,
        }
    if isinstance(obj, NodeImpact):
        return {
            "distribution": to_jsonable(obj.distribution)["distribution"],
            "dependency_order": obj.dependency_order,
            "level": obj.level.value if obj.level else None,
            "relation": obj.relation.value,
        }
    if isinstance(obj, LevelClassification):
        return {"levels": {nid: lvl.value for nid, lvl in sorted(obj.levels.items())},
                "unclassified": sorted(obj.unclassified)}
    if isinstance(obj, CriticalityEntry):
        return {"node": obj.node, "impaired_state": obj.impaired_state,
                "score": obj.score, "error": obj.error}
    if isinstance(obj, TierGap):
        return {"element": obj.element_id, "current": obj.current,
                "target": obj.target, "steps": obj.steps, "path": list(obj.path)}
    if isinstance(obj, StateCatalogue):
        return {"node": obj.node, "prior": list(obj.prior), "source": obj.source.value}
    if isinstance(obj, BoundRoadmap):
        return {"bindings": dict(sorted(obj.bindings.items())),
                "data_gaps": list(obj.data_gaps)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else list(obj)
        return [to_jsonable(v) for v in items]
    if is_dataclass(obj):
        return to_jsonable(asdict(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def emit_report(kind: str, result, digest: str | None = None) -> str:
    """Wrap an analysis result in the canonical report envelope."""
    envelope = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": kind,
        "input_digest": digest,
        "result": to_jsonable(result),
    }
    return json.dumps(envelope, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


# ------------------------------------------------------------------ DOT export

def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_label(lines) -> str:
    # Escape each line, then join with DOT's \n line-break escape.
    escaped = [line.replace("\\", "\\\\").replace('"', '\\"') for line in lines]
    return '"' + "\\n".join(escaped) + '"'


def export_dot(model: BayesianModel, report: ImpactReport | None = None,
               graph_name: str = "dependency_model") -> str:
    """Graphviz text: layers as clusters, nodes/edges in sorted order.

    With an impact report, each node label gains the posterior probability of
    its degraded state (the last state of its domain) and origins/impacted
    nodes are visually marked.  Output is deterministic byte-for-byte.
    """
    graph = model.graph
    lines = [f"digraph {_dot_quote(graph_name)} {{", "  rankdir=LR;"]

    by_layer: dict[str, list] = {}
    for node in graph.nodes:
        by_layer.setdefault(node.layer, []).append(node)

    for i, layer in enumerate(sorted(by_layer)):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f"    label={_dot_quote(layer)};")
        for node in by_layer[layer]:
            attrs = []
            label_lines = [node.id]
            if report is not None and node.id in report.per_node:
                entry = report.per_node[node.id]
                degraded = tuple(node.domain)[-1]
                p = entry.distribution.p(degraded)
                label_lines.append(f"P({degraded})={p:.4f}")
                if entry.relation.value == "origin":
                    attrs.append("style=filled")
                    attrs.append("fillcolor=lightcoral")
                elif node.id in report.impact_set:
                    attrs.append("style=filled")
                    attrs.append("fillcolor=lightyellow")
            attrs.insert(0, f"label={_dot_label(label_lines)}")
            if node.is_service_goal:
                attrs.append("shape=doubleoctagon")
            lines.append(f"    {_dot_quote(node.id)} [{', '.join(attrs)}];")
        lines.append("  }")

    for edge in graph.edges:
        lines.append(f"  {_dot_quote(edge.source)} -> {_dot_quote(edge.target)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
