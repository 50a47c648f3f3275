"""Incident-scenario analysis over a dependency model.

An :class:`IncidentScenario` fixes one or more origin nodes to an impaired
state.  Treating those origins as *evidence* (observed compromise, not a
causal intervention), this module answers three questions:

* which nodes the impairment can reach (:func:`impact_set`, pure reachability),
* how strongly each node's state distribution shifts
  (:func:`impact_probabilities`, exact posterior inference), and
* which candidate origin would hurt the service goals most
  (:func:`rank_criticality`).

Because origins are evidence, the ancestors of an origin update too -- that is
diagnostic reasoning, useful but distinct from the forward cascade.  Reports
keep the two apart: ``impact_set`` is strictly downstream, and each node entry
carries a relation tag (origin / impacted / upstream / unrelated).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ImpossibleEvidence, UnknownNode, UnknownState
from .graph import DependencyGraph, ancestors, dependency_order, descendants
from .inference import eliminate_marginal, posterior_update
from .model import BayesianModel, Marginal


class EventLevel(enum.Enum):
    """Role of a node within one incident scenario."""

    ATOMIC = "atomic"           # origin of the abnormal activity
    PROPAGATION = "propagation" # conduit between an origin and a service goal
    SERVICE = "service"         # where the system's final function lives


class NodeRelation(enum.Enum):
    """How a node stands relative to the scenario origins."""

    ORIGIN = "origin"
    IMPACTED = "impacted"     # downstream of an origin
    UPSTREAM = "upstream"     # ancestor of an origin (diagnostic update only)
    UNRELATED = "unrelated"


@dataclass(frozen=True)
class IncidentScenario:
    """Origin nodes mapped to the impaired state observed on each."""

    origins: dict

    def __init__(self, origins):
        origins = dict(origins)
        if not origins:
            raise ValueError("scenario needs at least one origin")
        object.__setattr__(self, "origins", origins)

    def check_against(self, graph: DependencyGraph) -> None:
        for node_id, state in self.origins.items():
            node = graph.node(node_id)
            if state not in node.domain:
                raise UnknownState(
                    f"node {node_id!r} has no state {state!r}; domain is {tuple(node.domain)}")


@dataclass(frozen=True)
class LevelClassification:
    """Per-node event levels plus the nodes no level applies to."""

    levels: dict
    unclassified: frozenset


@dataclass(frozen=True)
class NodeImpact:
    """One node's entry in an impact report."""

    distribution: Marginal
    dependency_order: int | None  # shortest influence distance from an origin
    level: EventLevel | None
    relation: NodeRelation


@dataclass(frozen=True)
class CriticalityEntry:
    node: str
    impaired_state: str
    score: float | None
    error: str | None = None


@dataclass(frozen=True)
class ImpactReport:
    scenario: IncidentScenario
    per_node: dict
    impact_set: frozenset
    ranking: tuple | None = None


def _service_nodes(graph: DependencyGraph) -> tuple[str, ...]:
    """Flagged service goals, or every sink when nothing is flagged."""
    flagged = graph.service_goals()
    return flagged if flagged else graph.sinks()


def classify_levels(graph: DependencyGraph, scenario: IncidentScenario) -> LevelClassification:
    """Assign each node its event level for the scenario.

    Origins are atomic (this wins every tie).  Service goals -- the flagged
    nodes, or all sinks when none are flagged -- are service level.  Everything
    else sitting on a directed path from an origin to a service node is
    propagation.  Nodes on no such path are reported as unclassified.
    """
    scenario.check_against(graph)
    origins = set(scenario.origins)
    service = set(_service_nodes(graph))

    downstream: set[str] = set()
    for origin in origins:
        downstream |= descendants(graph, origin)
    feeds_service: set[str] = set()
    for s in service:
        feeds_service |= ancestors(graph, s)

    levels: dict[str, EventLevel] = {}
    unclassified = []
    for node in graph.nodes:
        nid = node.id
        if nid in origins:
            levels[nid] = EventLevel.ATOMIC
        elif nid in service:
            levels[nid] = EventLevel.SERVICE
        elif nid in downstream and nid in feeds_service:
            levels[nid] = EventLevel.PROPAGATION
        else:
            unclassified.append(nid)
    return LevelClassification(levels, frozenset(unclassified))


def impact_set(graph: DependencyGraph, scenario: IncidentScenario) -> frozenset:
    """Union of the origins' descendants; the origins themselves excluded."""
    scenario.check_against(graph)
    reached: set[str] = set()
    for origin in scenario.origins:
        reached |= descendants(graph, origin)
    return frozenset(reached - set(scenario.origins))


def impact_probabilities(model: BayesianModel, scenario: IncidentScenario) -> ImpactReport:
    """Posterior state distributions for every node under the scenario.

    The origins enter as evidence, so the report covers the whole graph:
    downstream nodes show the forward cascade, ancestors show the diagnostic
    update, and nodes sharing no ancestry with any origin keep their priors.
    Each entry carries the shortest influence distance from an origin (0 for
    origins themselves).
    """
    graph = model.graph
    scenario.check_against(graph)
    posteriors = posterior_update(model, dict(scenario.origins))
    classification = classify_levels(graph, scenario)
    affected = impact_set(graph, scenario)
    upstream: set[str] = set()
    for origin in scenario.origins:
        upstream |= ancestors(graph, origin)
    upstream -= set(scenario.origins)

    per_node = {}
    for node in graph.nodes:
        nid = node.id
        if nid in scenario.origins:
            order: int | None = 0
            relation = NodeRelation.ORIGIN
        else:
            orders = [dependency_order(graph, origin, nid) for origin in scenario.origins]
            orders = [o for o in orders if o is not None]
            order = min(orders) if orders else None
            if nid in affected:
                relation = NodeRelation.IMPACTED
            elif nid in upstream:
                relation = NodeRelation.UPSTREAM
            else:
                relation = NodeRelation.UNRELATED
        per_node[nid] = NodeImpact(posteriors[nid], order,
                                   classification.levels.get(nid), relation)
    return ImpactReport(scenario, per_node, affected)


def default_degraded_states(model: BayesianModel, node_id: str) -> frozenset:
    """When no degraded state is declared, the domain's last state is degraded."""
    return frozenset({tuple(model.domain(node_id))[-1]})


def rank_criticality(model: BayesianModel, candidates, service_nodes=None,
                     degraded_states=None, aggregate: str = "mean",
                     weights=None) -> tuple:
    """Order candidate origins by how badly they degrade the service goals.

    Each candidate ``(node, impaired_state)`` is scored as the aggregated
    probability, over the service nodes, of landing in a degraded state given
    the candidate's impairment.  ``aggregate`` is ``"mean"`` (default),
    ``"max"``, or ``"weighted"`` (supply ``weights`` per service node).
    Candidates whose evidence is impossible get an error entry instead of a
    score and sort last.  Ties break by ascending node id.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("at least one candidate is required")
    graph = model.graph
    if service_nodes is None:
        service_nodes = _service_nodes(graph)
    service_nodes = sorted(service_nodes)
    if not service_nodes:
        raise UnknownNode("no service nodes: flag is_service_goal or pass service_nodes")
    for s in service_nodes:
        graph.node(s)
    degraded_states = dict(degraded_states or {})
    for s in service_nodes:
        degraded_states.setdefault(s, default_degraded_states(model, s))

    if aggregate not in ("mean", "max", "weighted"):
        raise ValueError(f"unknown aggregate {aggregate!r}")
    if aggregate == "weighted":
        if not weights:
            raise ValueError("aggregate='weighted' requires weights per service node")
        total = sum(weights[s] for s in service_nodes)
        norm = {s: weights[s] / total for s in service_nodes}

    entries = []
    for node_id, state in candidates:
        node = graph.node(node_id)
        if state not in node.domain:
            raise UnknownState(
                f"node {node_id!r} has no state {state!r}; domain is {tuple(node.domain)}")
        try:
            per_service = []
            for s in service_nodes:
                marg = eliminate_marginal(model, s, {node_id: state})
                per_service.append(sum(marg.p(d) for d in degraded_states[s]))
            if aggregate == "mean":
                score = sum(per_service) / len(per_service)
            elif aggregate == "max":
                score = max(per_service)
            else:
                score = sum(norm[s] * p for s, p in zip(service_nodes, per_service))
            entries.append(CriticalityEntry(node_id, state, score))
        except ImpossibleEvidence as exc:
            entries.append(CriticalityEntry(node_id, state, None, str(exc)))

    entries.sort(key=lambda e: (e.score is None, -(e.score or 0.0), e.node))
    return tuple(entries)
