"""Incident scenarios: level classification, impact sets, posteriors, ranking."""

from __future__ import annotations

import random

import pytest

from iotrisk.bundled import load_bundled_model
from iotrisk.cascade import (
    EventLevel,
    IncidentScenario,
    NodeRelation,
    classify_levels,
    impact_probabilities,
    impact_set,
    rank_criticality,
)
from iotrisk.errors import UnknownNode, UnknownState
from iotrisk.graph import ComponentNode, DependencyGraph, InfluenceEdge, StateDomain, descendants
from iotrisk.inference import enumerate_marginal
from iotrisk.model import BayesianModel, Cpt

from conftest import random_model

TF = StateDomain(["T", "F"])


def graph_of(ids, edges, service=()):
    return DependencyGraph(
        [ComponentNode(i, "network", TF, is_service_goal=i in service) for i in ids],
        [InfluenceEdge(a, b) for a, b in edges])


@pytest.fixture(scope="module")
def layered():
    return load_bundled_model("layered_iot")


class TestClassifyLevels:
    def test_chain_forced_levels(self):
        graph = graph_of("ABC", [("A", "B"), ("B", "C")])
        out = classify_levels(graph, IncidentScenario({"A": "F"}))
        assert out.levels == {"A": EventLevel.ATOMIC, "B": EventLevel.PROPAGATION,
                              "C": EventLevel.SERVICE}
        assert out.unclassified == frozenset()

    def test_layered_example_classification(self, layered):
        out = classify_levels(layered.graph, IncidentScenario({"a14": "impaired"}))
        assert out.levels["a14"] is EventLevel.ATOMIC
        for nid in ("a12", "a10", "a7", "a6"):
            assert out.levels[nid] is EventLevel.PROPAGATION
        for nid in ("a4", "a3", "a2", "a1"):
            assert out.levels[nid] is EventLevel.SERVICE
        assert out.unclassified == frozenset()

    def test_origin_that_is_a_sink_stays_atomic(self):
        graph = graph_of("AB", [("A", "B")])
        out = classify_levels(graph, IncidentScenario({"B": "F"}))
        assert out.levels["B"] is EventLevel.ATOMIC

    def test_flagged_service_goal_beats_sink_rule(self):
        graph = graph_of("ABC", [("A", "B"), ("B", "C")], service=("B",))
        out = classify_levels(graph, IncidentScenario({"A": "F"}))
        assert out.levels["B"] is EventLevel.SERVICE
        # C is a sink but unflagged while a flag exists elsewhere, and it
        # cannot reach any service node: unclassified
        assert "C" in out.unclassified

    def test_node_off_any_origin_service_path_is_unclassified(self):
        graph = graph_of("ABCD", [("A", "B"), ("D", "B")])
        out = classify_levels(graph, IncidentScenario({"A": "F"}))
        assert out.levels["B"] is EventLevel.SERVICE
        assert "D" in out.unclassified

    def test_total_and_deterministic(self):
        graph = graph_of("ABCD", [("A", "B"), ("B", "C"), ("B", "D")])
        first = classify_levels(graph, IncidentScenario({"A": "F"}))
        second = classify_levels(graph, IncidentScenario({"A": "F"}))
        assert first == second
        assert len(first.levels) + len(first.unclassified) == 4


class TestImpactSet:
    def test_layered_example_impact_set(self, layered):
        out = impact_set(layered.graph, IncidentScenario({"a14": "impaired"}))
        assert out == {"a12", "a10", "a7", "a6", "a4", "a3", "a2", "a1"}

    def test_sink_origin_has_empty_impact(self, layered):
        assert impact_set(layered.graph, IncidentScenario({"a1": "impaired"})) == frozenset()

    def test_two_origins_union_without_duplicates(self):
        graph = graph_of("ABCD", [("A", "C"), ("B", "C"), ("C", "D")])
        scenario = IncidentScenario({"A": "F", "B": "F"})
        expected = (descendants(graph, "A") | descendants(graph, "B")) - {"A", "B"}
        assert impact_set(graph, scenario) == expected == {"C", "D"}

    def test_unknown_origin_raises(self, layered):
        with pytest.raises(UnknownNode):
            impact_set(layered.graph, IncidentScenario({"ghost": "impaired"}))
        with pytest.raises(UnknownState):
            impact_set(layered.graph, IncidentScenario({"a14": "melted"}))


class TestImpactProbabilities:
    def test_chain_posterior_reads_cpt_row(self, chain2):
        report = impact_probabilities(chain2, IncidentScenario({"A": "T"}))
        assert report.per_node["B"].distribution.p("T") == pytest.approx(0.9, abs=1e-12)
        assert report.per_node["A"].dependency_order == 0
        assert report.per_node["B"].dependency_order == 1
        assert report.per_node["A"].relation is NodeRelation.ORIGIN
        assert report.per_node["B"].relation is NodeRelation.IMPACTED

    def test_d_separated_nodes_keep_priors(self):
        # With evidence only on the origin, a node is independent of it
        # exactly when the two share no ancestor (each counting as its own):
        # any common ancestor opens a collider-free path.
        from iotrisk.graph import ancestors

        rng = random.Random(11)
        for _ in range(8):
            model = random_model(rng, max_nodes=7, max_joint=2 ** 10)
            origin = model.graph.nodes[0].id
            state = tuple(model.domain(origin))[-1]
            report = impact_probabilities(model, IncidentScenario({origin: state}))
            origin_ancestry = ancestors(model.graph, origin) | {origin}
            for node in model.graph.nodes:
                node_ancestry = ancestors(model.graph, node.id) | {node.id}
                if node_ancestry & origin_ancestry:
                    continue  # d-connected: a common ancestor exists
                prior = enumerate_marginal(model, node.id)
                got = report.per_node[node.id].distribution
                assert got.probabilities == pytest.approx(prior.probabilities, abs=1e-9)
                assert report.per_node[node.id].relation is NodeRelation.UNRELATED

    def test_deterministic_chain_propagates_indicators(self):
        graph = graph_of("ABC", [("A", "B"), ("B", "C")])
        det = {("T",): (1.0, 0.0), ("F",): (0.0, 1.0)}
        model = BayesianModel(graph, {
            "A": Cpt.prior("A", (0.5, 0.5)),
            "B": Cpt("B", ("A",), dict(det)),
            "C": Cpt("C", ("B",), dict(det)),
        })
        report = impact_probabilities(model, IncidentScenario({"A": "F"}))
        assert report.per_node["B"].distribution.probabilities == (0.0, 1.0)
        assert report.per_node["C"].distribution.probabilities == (0.0, 1.0)

    def test_ancestors_flagged_upstream(self, chain2):
        report = impact_probabilities(chain2, IncidentScenario({"B": "T"}))
        assert report.per_node["A"].relation is NodeRelation.UPSTREAM
        assert report.per_node["A"].distribution.p("T") == pytest.approx(27 / 34, abs=1e-12)
        assert "A" not in report.impact_set

    def test_impact_set_matches_reachability(self, layered):
        scenario = IncidentScenario({"a10": "impaired"})
        report = impact_probabilities(layered.model, scenario)
        assert report.impact_set == impact_set(layered.graph, scenario)


class TestRankCriticality:
    def test_single_candidate(self, layered):
        ranking = rank_criticality(layered.model, [("a14", "impaired")])
        assert len(ranking) == 1
        assert ranking[0].node == "a14"
        assert 0.0 <= ranking[0].score <= 1.0

    def test_ancestor_outranks_disconnected(self):
        graph = graph_of("ABZ", [("A", "B")], service=("B",))
        model = BayesianModel(graph, {
            "A": Cpt.prior("A", (0.7, 0.3)),
            "B": Cpt("B", ("A",), {("T",): (0.95, 0.05), ("F",): (0.2, 0.8)}),
            "Z": Cpt.prior("Z", (0.5, 0.5)),
        })
        ranking = rank_criticality(model, [("Z", "F"), ("A", "F")])
        assert [e.node for e in ranking] == ["A", "Z"]
        # the disconnected candidate's score equals the service prior P(B=F)
        prior = enumerate_marginal(model, "B").p("F")
        assert ranking[1].score == pytest.approx(prior, abs=1e-9)

    def test_equal_scores_tie_break_by_id(self):
        graph = graph_of("XYS", [("X", "S"), ("Y", "S")], service=("S",))
        symmetric = {("T", "T"): (0.9, 0.1), ("T", "F"): (0.4, 0.6),
                     ("F", "T"): (0.4, 0.6), ("F", "F"): (0.1, 0.9)}
        model = BayesianModel(graph, {
            "X": Cpt.prior("X", (0.5, 0.5)),
            "Y": Cpt.prior("Y", (0.5, 0.5)),
            "S": Cpt("S", ("X", "Y"), symmetric),
        })
        ranking = rank_criticality(model, [("Y", "F"), ("X", "F")])
        assert [e.node for e in ranking] == ["X", "Y"]
        assert ranking[0].score == pytest.approx(ranking[1].score, abs=1e-12)

    def test_impossible_candidate_reported_not_fatal(self):
        graph = graph_of("AB", [("A", "B")], service=("B",))
        model = BayesianModel(graph, {
            "A": Cpt.prior("A", (1.0, 0.0)),
            "B": Cpt("B", ("A",), {("T",): (0.8, 0.2), ("F",): (0.1, 0.9)}),
        })
        ranking = rank_criticality(model, [("A", "F"), ("A", "T")])
        by_state = {e.impaired_state: e for e in ranking}
        assert by_state["F"].score is None and by_state["F"].error
        assert by_state["T"].score is not None
        assert ranking[-1].impaired_state == "F"  # errored candidates sort last

    def test_aggregate_knobs(self, layered):
        candidates = [("a14", "impaired")]
        service = ("a1", "a4")
        mean = rank_criticality(layered.model, candidates, service)[0].score
        peak = rank_criticality(layered.model, candidates, service,
                                aggregate="max")[0].score
        weighted = rank_criticality(layered.model, candidates, service,
                                    aggregate="weighted",
                                    weights={"a1": 1.0, "a4": 3.0})[0].score
        assert peak >= mean
        assert 0.0 <= weighted <= 1.0
        p1 = enumerate_marginal(layered.model, "a1", {"a14": "impaired"}).p("impaired")
        p4 = enumerate_marginal(layered.model, "a4", {"a14": "impaired"}).p("impaired")
        assert mean == pytest.approx((p1 + p4) / 2, abs=1e-9)
        assert peak == pytest.approx(max(p1, p4), abs=1e-9)
        assert weighted == pytest.approx((p1 + 3 * p4) / 4, abs=1e-9)
