"""Shared fixtures: small hand-built models and seeded random generators.

``random_model`` / ``random_temporal_model`` build arbitrary valid models for
the equivalence suites; ``brute_posteriors`` is the slowest possible oracle
(pure-python sum of joint_probability over every completion) used to anchor
the faster paths on tiny models.
"""

from __future__ import annotations

import itertools
import math
import random

import pytest

from iotrisk.graph import ComponentNode, DependencyGraph, InfluenceEdge, StateDomain
from iotrisk.inference import joint_probability
from iotrisk.model import BayesianModel, Cpt
from iotrisk.temporal import SliceTemplate, TemporalEdge, TemporalModel

TF = StateDomain(["T", "F"])


def make_chain2() -> BayesianModel:
    """A -> B with P(A=T)=0.3, P(B=T|A=T)=0.9, P(B=T|A=F)=0.1."""
    graph = DependencyGraph(
        [ComponentNode("A", "perception", TF), ComponentNode("B", "network", TF)],
        [InfluenceEdge("A", "B")])
    return BayesianModel(graph, {
        "A": Cpt.prior("A", (0.3, 0.7)),
        "B": Cpt("B", ("A",), {("T",): (0.9, 0.1), ("F",): (0.1, 0.9)}),
    })


def make_chain3() -> BayesianModel:
    """chain2 extended with C: P(C=T|B=T)=0.8, P(C=T|B=F)=0.2."""
    graph = DependencyGraph(
        [ComponentNode("A", "perception", TF), ComponentNode("B", "network", TF),
         ComponentNode("C", "application", TF)],
        [InfluenceEdge("A", "B"), InfluenceEdge("B", "C")])
    return BayesianModel(graph, {
        "A": Cpt.prior("A", (0.3, 0.7)),
        "B": Cpt("B", ("A",), {("T",): (0.9, 0.1), ("F",): (0.1, 0.9)}),
        "C": Cpt("C", ("B",), {("T",): (0.8, 0.2), ("F",): (0.2, 0.8)}),
    })


def make_sensor_dbn() -> TemporalModel:
    """Hidden health X (ok/fail) with observed alarm child O and a sticky
    failure transition; the standard filtering example."""
    graph = DependencyGraph(
        [ComponentNode("X", "perception", StateDomain(["ok", "fail"])),
         ComponentNode("O", "network", StateDomain(["quiet", "alarm"]))],
        [InfluenceEdge("X", "O")])
    template = BayesianModel(graph, {
        "X": Cpt.prior("X", (0.9, 0.1)),
        "O": Cpt("O", ("X",), {("ok",): (0.9, 0.1), ("fail",): (0.3, 0.7)}),
    })
    transition = Cpt("X", ("X",), {("ok",): (0.8, 0.2), ("fail",): (0.05, 0.95)})
    return TemporalModel(SliceTemplate(template), [TemporalEdge("X", "X", transition)])


@pytest.fixture
def chain2() -> BayesianModel:
    return make_chain2()


@pytest.fixture
def chain3() -> BayesianModel:
    return make_chain3()


@pytest.fixture
def sensor_dbn() -> TemporalModel:
    return make_sensor_dbn()


# --------------------------------------------------------- random generators

def random_model(rng: random.Random, max_nodes: int = 12, max_states: int = 4,
                 max_joint: int = 2 ** 16, edge_p: float = 0.4,
                 min_nodes: int = 2, min_states: int = 2,
                 max_parents: int = 5) -> BayesianModel:
    """A random valid fully-specified model within the given bounds.

    The joint size (product of all cardinalities) stays within ``max_joint``
    and in-degree within ``max_parents`` so the enumeration oracle and table
    generation stay tractable.
    """
    n = rng.randint(min_nodes, max_nodes)
    while True:
        cards = [rng.randint(min_states, max_states) for _ in range(n)]
        if math.prod(cards) <= max_joint:
            break
    ids = [f"n{i:02d}" for i in range(n)]
    layer_pool = ("perception", "network", "application")
    nodes = [ComponentNode(ids[i], rng.choice(layer_pool),
                           StateDomain([f"s{k}" for k in range(cards[i])]),
                           is_service_goal=rng.random() < 0.2)
             for i in range(n)]
    # Edges only from earlier to later in a shuffled order: acyclic by build.
    order = ids[:]
    rng.shuffle(order)
    edges = []
    indegree = {nid: 0 for nid in ids}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_p and indegree[order[j]] < max_parents:
                edges.append(InfluenceEdge(order[i], order[j]))
                indegree[order[j]] += 1
    graph = DependencyGraph(nodes, edges)
    return BayesianModel(graph, {nid: random_cpt(rng, graph, nid) for nid in ids})


def random_cpt(rng: random.Random, graph: DependencyGraph, node_id: str) -> Cpt:
    """Random strictly-positive rows (so any evidence stays possible)."""
    parents = graph.parents(node_id)
    domains = [tuple(graph.node(p).domain) for p in parents]
    card = len(graph.node(node_id).domain)
    rows = {}
    for combo in itertools.product(*domains):
        raw = [rng.uniform(0.05, 1.0) for _ in range(card)]
        total = math.fsum(raw)
        rows[combo] = tuple(v / total for v in raw)
    return Cpt(node_id, parents, rows)


def random_evidence(rng: random.Random, model: BayesianModel,
                    max_observed: int = 3) -> dict:
    ids = [n.id for n in model.graph.nodes]
    k = rng.randint(0, min(max_observed, len(ids) - 1))
    chosen = rng.sample(ids, k)
    return {nid: rng.choice(tuple(model.domain(nid))) for nid in chosen}


def random_temporal_model(rng: random.Random, max_template_nodes: int = 4,
                          max_states: int = 3) -> TemporalModel:
    """A random slice template plus 1..n temporal edges with consistent tables."""
    template = random_model(rng, max_nodes=max_template_nodes, max_states=max_states,
                            edge_p=0.35, min_nodes=1)
    graph = template.graph
    ids = [n.id for n in graph.nodes]
    targets = rng.sample(ids, rng.randint(1, len(ids)))

    edges = []
    initial_cpts = {}
    for target in targets:
        intra = set(graph.parents(target))
        pool = [nid for nid in ids if nid not in intra]
        sources = rng.sample(pool, rng.randint(1, min(2, len(pool))))
        parent_order = tuple(sorted(tuple(intra) + tuple(sources)))
        domains = [tuple(graph.node(p).domain) for p in parent_order]
        card = len(graph.node(target).domain)
        rows = {}
        for combo in itertools.product(*domains):
            raw = [rng.uniform(0.05, 1.0) for _ in range(card)]
            total = math.fsum(raw)
            rows[combo] = tuple(v / total for v in raw)
        cpt = Cpt(target, parent_order, rows)
        for source in sources:
            edges.append(TemporalEdge(source, target, cpt))
        if rng.random() < 0.5:
            initial_cpts[target] = random_cpt(rng, graph, target)
    return TemporalModel(SliceTemplate(template), edges, initial_cpts)


# ------------------------------------------------------------- brute oracle

def brute_posteriors(model: BayesianModel, evidence=None) -> dict:
    """Pure-python posterior oracle: iterate every full assignment.

    Independent of both production query paths; only usable on tiny models.
    """
    evidence = dict(evidence or {})
    ids = [n.id for n in model.graph.nodes]
    domains = [tuple(model.domain(nid)) for nid in ids]
    weight: dict[str, dict[str, float]] = {nid: {s: 0.0 for s in dom}
                                           for nid, dom in zip(ids, domains)}
    z = 0.0
    for combo in itertools.product(*domains):
        assignment = dict(zip(ids, combo))
        if any(assignment[nid] != state for nid, state in evidence.items()):
            continue
        p = joint_probability(model, assignment)
        z += p
        for nid, state in assignment.items():
            weight[nid][state] += p
    if z <= 0:
        raise AssertionError("evidence impossible under brute-force oracle")
    return {nid: {s: w / z for s, w in states.items()}
            for nid, states in weight.items()}
