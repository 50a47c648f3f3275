"""Time-sliced models: a slice template replicated over discrete time.

The template is a complete static model of one instant; inter-slice edges add
first-order dynamics (slice t feeds slice t+1, never further).  All temporal
queries are *defined* by unrolling: :func:`unroll` produces a flat model with
one copy of the template per slice (ids suffixed ``@0``, ``@1``, ...), and
:func:`filter_marginals` / :func:`smooth_marginals` / :func:`predict_marginals`
are exact inference on that flat model.  The three differ only in which slices
carry evidence relative to the queried slice:

* filter  -- estimate *now* from everything observed so far,
* smooth  -- re-estimate a *past* slice using later observations too,
* predict -- extrapolate an unobserved *future* slice.

Slice parameters are shared across time (slice >= 1 all use the transition
tables), so the dynamics are time-homogeneous by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    InvalidHorizon,
    ObservationBeyondHorizon,
    UnknownState,
    ValidationFailed,
)
from .graph import ComponentNode, DependencyGraph, InfluenceEdge
from .inference import eliminate_marginal
from .model import BayesianModel, Cpt, Marginal

SLICE_SEP = "@"

# Unrolling is exponential in memory with slice count; keep a guard rail.
DEFAULT_MAX_HORIZON = 64


def slice_id(node_id: str, t: int) -> str:
    """Unrolled id of a template node at slice ``t``."""
    return f"{node_id}{SLICE_SEP}{t}"


@dataclass(frozen=True)
class SliceTemplate:
    """One slice's nodes, edges and CPTs (a fully specified static model)."""

    model: BayesianModel

    def __post_init__(self):
        self.model.require_fully_specified()
        bad = [n.id for n in self.model.graph.nodes if SLICE_SEP in n.id]
        if bad:
            raise ValidationFailed(
                [("$.template", f"node ids may not contain {SLICE_SEP!r}: {bad}")])


@dataclass(frozen=True)
class TemporalEdge:
    """Link from ``source`` at slice t to ``target`` at slice t+1.

    ``cpt`` is the target's complete transition table: its parents are the
    target's intra-slice parents plus every temporal source feeding it, all
    referenced by plain template ids and sorted ascending.  When several
    temporal edges share a target they must carry equal tables.
    """

    source: str
    target: str
    cpt: Cpt


@dataclass(frozen=True)
class TemporalModel:
    """Slice template + inter-slice edges + optional slice-0 priors."""

    template: SliceTemplate
    temporal_edges: tuple[TemporalEdge, ...]
    initial_cpts: dict = field(default_factory=dict)
    max_horizon: int = DEFAULT_MAX_HORIZON

    def __init__(self, template, temporal_edges, initial_cpts=None,
                 max_horizon: int = DEFAULT_MAX_HORIZON):
        object.__setattr__(self, "template", template)
        object.__setattr__(self, "temporal_edges",
                           tuple(sorted(temporal_edges,
                                        key=lambda e: (e.target, e.source))))
        object.__setattr__(self, "initial_cpts", dict(initial_cpts or {}))
        object.__setattr__(self, "max_horizon", int(max_horizon))
        self._check()

    def _check(self) -> None:
        issues: list[tuple[str, str]] = []
        model = self.template.model
        graph = model.graph
        transitions: dict[str, Cpt] = {}
        sources_by_target: dict[str, list[str]] = {}

        for edge in self.temporal_edges:
            path = f"$.temporal.edges[{edge.source}->{edge.target}]"
            for endpoint in (edge.source, edge.target):
                if endpoint not in graph:
                    issues.append((path, f"unknown template node {endpoint!r}"))
            if edge.target in transitions and transitions[edge.target] != edge.cpt:
                issues.append((path, "temporal edges into one target carry different "
                                     "transition tables"))
            transitions.setdefault(edge.target, edge.cpt)
            sources_by_target.setdefault(edge.target, []).append(edge.source)

        if not issues:
            for target, cpt in sorted(transitions.items()):
                path = f"$.temporal.transition_cpts.{target}"
                intra = graph.parents(target)
                temporal = tuple(sorted(set(sources_by_target[target])))
                overlap = set(intra) & set(temporal)
                if overlap:
                    issues.append((path,
                                   f"{sorted(overlap)} are both intra-slice and temporal "
                                   f"parents of {target!r}; this is not supported"))
                    continue
                expected = tuple(sorted(intra + temporal))
                if cpt.node != target or cpt.parent_order != expected:
                    issues.append((path,
                                   f"transition table must be for {target!r} with parents "
                                   f"{expected!r}, got node {cpt.node!r} parents "
                                   f"{cpt.parent_order!r}"))
                    continue
                issues.extend(_check_rows(model, cpt, path))

            for node_id, cpt in sorted(self.initial_cpts.items()):
                path = f"$.temporal.initial_cpts.{node_id}"
                if node_id not in transitions:
                    issues.append((path,
                                   f"{node_id!r} has no incoming temporal edge; "
                                   "initial priors apply only to temporal targets"))
                    continue
                intra = graph.parents(node_id)
                if cpt.node != node_id or cpt.parent_order != intra:
                    issues.append((path,
                                   f"slice-0 table must be for {node_id!r} with parents "
                                   f"{intra!r}"))
                    continue
                issues.extend(_check_rows(model, cpt, path))

        if issues:
            raise ValidationFailed(issues)

    # ------------------------------------------------------------- accessors

    @property
    def transition_cpts(self) -> dict:
        out: dict[str, Cpt] = {}
        for edge in self.temporal_edges:
            out.setdefault(edge.target, edge.cpt)
        return out

    def temporal_sources(self, target: str) -> tuple[str, ...]:
        return tuple(sorted({e.source for e in self.temporal_edges
                             if e.target == target}))


def _check_rows(model: BayesianModel, cpt: Cpt, path: str):
    graph = model.graph
    issues = []
    domains = [tuple(graph.node(p).domain) for p in cpt.parent_order]
    node_card = len(graph.node(cpt.node).domain)
    expected = set(itertools.product(*domains))
    got = set(cpt.rows)
    for combo in sorted(expected - got):
        issues.append((path, f"missing row for parent states {combo!r}"))
    for combo in sorted(got - expected):
        issues.append((path, f"unexpected row key {combo!r}"))
    for combo in sorted(got & expected):
        if len(cpt.rows[combo]) != node_card:
            issues.append((path, f"row {combo!r} has {len(cpt.rows[combo])} entries, "
                                 f"domain has {node_card}"))
    return issues


@dataclass(frozen=True)
class ObservationSeries:
    """Time-indexed evidence: an ordered list of (slice index, evidence)."""

    entries: tuple

    def __init__(self, entries=()):
        flat: list[tuple[int, str, str]] = []
        last_t = None
        seen: set[tuple[str, int]] = set()
        for t, evidence in entries:
            t = int(t)
            if t < 0:
                raise InvalidHorizon(f"observation time {t} is negative")
            if last_t is not None and t < last_t:
                raise InvalidHorizon("observation times must be non-decreasing")
            last_t = t
            for node_id, state in sorted(dict(evidence).items()):
                if (node_id, t) in seen:
                    raise InvalidHorizon(
                        f"duplicate observation for node {node_id!r} at time {t}")
                seen.add((node_id, t))
                flat.append((t, node_id, state))
        object.__setattr__(self, "entries", tuple(flat))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def max_time(self) -> int | None:
        return max((t for t, _, _ in self.entries), default=None)

    def unrolled_evidence(self) -> dict:
        return {slice_id(node_id, t): state for t, node_id, state in self.entries}


# ---------------------------------------------------------------- operations

def unroll(model: TemporalModel, horizon: int) -> BayesianModel:
    """Flatten ``horizon`` slices into one static model.

    Slice 0 uses the initial priors where given (template tables otherwise);
    every later slice uses the transition tables for temporal targets and the
    template tables for everything else.
    """
    horizon = int(horizon)
    if horizon < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {horizon}")
    if horizon > model.max_horizon:
        raise InvalidHorizon(
            f"horizon {horizon} exceeds the configured limit {model.max_horizon}")

    template_model = model.template.model
    graph = template_model.graph
    transitions = model.transition_cpts

    nodes = []
    edges = []
    cpts: dict[str, Cpt] = {}
    for t in range(horizon):
        for node in graph.nodes:
            nodes.append(ComponentNode(slice_id(node.id, t), node.layer, node.domain,
                                       node.is_service_goal, node.description))
        for edge in graph.edges:
            edges.append(InfluenceEdge(slice_id(edge.source, t), slice_id(edge.target, t)))
        if t > 0:
            for tedge in model.temporal_edges:
                edges.append(InfluenceEdge(slice_id(tedge.source, t - 1),
                                           slice_id(tedge.target, t)))
        for node in graph.nodes:
            if t == 0:
                cpt = model.initial_cpts.get(node.id, template_model.cpts[node.id])
                rename = {p: slice_id(p, 0) for p in cpt.parent_order}
            elif node.id in transitions:
                cpt = transitions[node.id]
                temporal_sources = set(model.temporal_sources(node.id))
                rename = {p: slice_id(p, t - 1) if p in temporal_sources else slice_id(p, t)
                          for p in cpt.parent_order}
            else:
                cpt = template_model.cpts[node.id]
                rename = {p: slice_id(p, t) for p in cpt.parent_order}
            cpts[slice_id(node.id, t)] = _rename_parents(cpt, slice_id(node.id, t), rename)

    return BayesianModel(DependencyGraph(nodes, edges), cpts)


def _rename_parents(cpt: Cpt, new_node: str, rename: dict) -> Cpt:
    """Rebuild a CPT under a parent renaming, keeping parent_order sorted."""
    renamed = [rename[p] for p in cpt.parent_order]
    order = sorted(range(len(renamed)), key=lambda k: renamed[k])
    new_parents = tuple(renamed[k] for k in order)
    new_rows = {tuple(key[k] for k in order): dist for key, dist in cpt.rows.items()}
    return Cpt(new_node, new_parents, new_rows)


def _prepare(model: TemporalModel, obs: ObservationSeries, last_obs_time: int):
    graph = model.template.model.graph
    for t, node_id, state in obs:
        node = graph.node(node_id)  # raises UnknownNode for foreign ids
        if state not in node.domain:
            raise UnknownState(
                f"node {node_id!r} has no state {state!r}; domain is {tuple(node.domain)}")
        if t > last_obs_time:
            raise ObservationBeyondHorizon(
                f"observation at time {t} is beyond the query time {last_obs_time}")
    return obs.unrolled_evidence()


def _slice_marginals(unrolled: BayesianModel, template_model: BayesianModel,
                     evidence: dict, t: int) -> dict:
    out = {}
    for node in template_model.graph.nodes:
        marg = eliminate_marginal(unrolled, slice_id(node.id, t), evidence)
        out[node.id] = Marginal(node.id, marg.states, marg.probabilities)
    return out


def filter_marginals(model: TemporalModel, obs: ObservationSeries, t: int) -> dict:
    """Current-state estimate: P(node@t | observations through t), per node."""
    t = int(t)
    if t < 0:
        raise InvalidHorizon(f"time index must be >= 0, got {t}")
    evidence = _prepare(model, obs, t)
    unrolled = unroll(model, t + 1)
    return _slice_marginals(unrolled, model.template.model, evidence, t)


def smooth_marginals(model: TemporalModel, obs: ObservationSeries,
                     k: int, t: int) -> dict:
    """Past-state estimate: P(node@k | observations through t), k <= t."""
    k, t = int(k), int(t)
    if k < 0 or k > t:
        raise InvalidHorizon(f"smoothing requires 0 <= k <= t, got k={k}, t={t}")
    evidence = _prepare(model, obs, t)
    unrolled = unroll(model, t + 1)
    return _slice_marginals(unrolled, model.template.model, evidence, k)


def predict_marginals(model: TemporalModel, obs: ObservationSeries,
                      t: int, h: int) -> dict:
    """Future-state estimate: P(node@(t+h) | observations through t), h >= 1."""
    t, h = int(t), int(h)
    if t < 0:
        raise InvalidHorizon(f"time index must be >= 0, got {t}")
    if h < 1:
        raise InvalidHorizon(f"prediction horizon must be >= 1, got {h}")
    evidence = _prepare(model, obs, t)
    unrolled = unroll(model, t + h + 1)
    return _slice_marginals(unrolled, model.template.model, evidence, t + h)
