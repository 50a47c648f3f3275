"""Exact inference: worked values, oracle agreement, and error contracts.

Expected numbers were derived by hand and double-checked with an independent
brute-force enumeration before being frozen here (0.03, 0.34, 27/34, 0.404).
"""

from __future__ import annotations

import itertools
import math
import random

import pytest

from iotrisk.errors import (
    ImpossibleEvidence,
    IncompleteAssignment,
    MissingCpt,
    UnknownNode,
    UnknownState,
    ValidationFailed,
)
from iotrisk.graph import ComponentNode, DependencyGraph, InfluenceEdge, StateDomain
from iotrisk.inference import (
    eliminate_marginal,
    enumerate_marginal,
    enumerate_posteriors,
    joint_probability,
    posterior_update,
)
from iotrisk.model import BayesianModel, Cpt

from conftest import brute_posteriors, random_evidence, random_model

TF = StateDomain(["T", "F"])


class TestJointProbability:
    def test_chain_product(self, chain2):
        assert joint_probability(chain2, {"A": "T", "B": "F"}) == pytest.approx(0.03, abs=1e-15)

    def test_deterministic_prior(self):
        graph = DependencyGraph([ComponentNode("A", "network", TF)], [])
        model = BayesianModel(graph, {"A": Cpt.prior("A", (1.0, 0.0))})
        assert joint_probability(model, {"A": "T"}) == 1.0

    def test_joint_sums_to_one(self, chain2):
        total = math.fsum(
            joint_probability(chain2, {"A": a, "B": b})
            for a, b in itertools.product("TF", repeat=2))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_incomplete_assignment_raises(self, chain2):
        with pytest.raises(IncompleteAssignment):
            joint_probability(chain2, {"A": "T"})

    def test_unknown_state_raises(self, chain2):
        with pytest.raises(UnknownState):
            joint_probability(chain2, {"A": "T", "B": "maybe"})

    def test_missing_cpt_raises(self, chain2):
        partial = BayesianModel(chain2.graph, {"A": chain2.cpts["A"]})
        with pytest.raises(MissingCpt):
            joint_probability(partial, {"A": "T", "B": "T"})


class TestEnumerateMarginal:
    def test_chain_prior_marginal(self, chain2):
        assert enumerate_marginal(chain2, "B").p("T") == pytest.approx(0.34, abs=1e-12)

    def test_conditioning_on_self_gives_indicator(self, chain2):
        marginal = enumerate_marginal(chain2, "A", {"A": "T"})
        assert marginal.probabilities == (1.0, 0.0)

    def test_three_chain_marginal(self, chain3):
        assert enumerate_marginal(chain3, "C").p("T") == pytest.approx(0.404, abs=1e-12)

    def test_agrees_with_pure_python_summation(self, chain3):
        # chain-rule consistency: the numpy joint equals the literal sum of
        # joint_probability over completions
        for evidence in ({}, {"A": "T"}, {"C": "F"}, {"A": "F", "C": "T"}):
            brute = brute_posteriors(chain3, evidence)
            out = enumerate_posteriors(chain3, evidence)
            for nid, states in brute.items():
                for state, p in states.items():
                    assert out[nid].p(state) == pytest.approx(p, abs=1e-12)

    def test_impossible_evidence_raises(self):
        graph = DependencyGraph(
            [ComponentNode("A", "network", TF), ComponentNode("B", "network", TF)],
            [InfluenceEdge("A", "B")])
        model = BayesianModel(graph, {
            "A": Cpt.prior("A", (1.0, 0.0)),
            "B": Cpt("B", ("A",), {("T",): (1.0, 0.0), ("F",): (0.0, 1.0)}),
        })
        with pytest.raises(ImpossibleEvidence):
            enumerate_marginal(model, "A", {"B": "F"})

    def test_unknown_query_raises(self, chain2):
        with pytest.raises(UnknownNode):
            enumerate_marginal(chain2, "Z")


class TestEliminateMarginal:
    def test_reproduces_enumeration_examples(self, chain2, chain3):
        assert eliminate_marginal(chain2, "B").p("T") == pytest.approx(0.34, abs=1e-12)
        assert eliminate_marginal(chain2, "A", {"A": "T"}).probabilities == (1.0, 0.0)
        assert eliminate_marginal(chain3, "C").p("T") == pytest.approx(0.404, abs=1e-12)

    def test_disconnected_node_keeps_prior_under_unrelated_evidence(self):
        graph = DependencyGraph(
            [ComponentNode("A", "network", TF), ComponentNode("B", "network", TF),
             ComponentNode("Z", "network", TF)],
            [InfluenceEdge("A", "B")])
        model = BayesianModel(graph, {
            "A": Cpt.prior("A", (0.3, 0.7)),
            "B": Cpt("B", ("A",), {("T",): (0.9, 0.1), ("F",): (0.1, 0.9)}),
            "Z": Cpt.prior("Z", (0.25, 0.75)),
        })
        marginal = eliminate_marginal(model, "Z", {"B": "T"})
        assert marginal.probabilities == pytest.approx((0.25, 0.75), abs=1e-12)

    def test_matches_enumeration_on_random_models(self):
        rng = random.Random(2024)
        for _ in range(40):
            model = random_model(rng, max_nodes=8, max_joint=2 ** 12)
            evidence = random_evidence(rng, model)
            expected = enumerate_posteriors(model, evidence)
            for node in model.graph.nodes:
                got = eliminate_marginal(model, node.id, evidence)
                for state, p in zip(got.states, got.probabilities):
                    assert p == pytest.approx(expected[node.id].p(state), abs=1e-9)

    def test_impossible_evidence_raised_by_both_paths(self):
        graph = DependencyGraph(
            [ComponentNode("A", "network", TF), ComponentNode("B", "network", TF)],
            [InfluenceEdge("A", "B")])
        model = BayesianModel(graph, {
            "A": Cpt.prior("A", (1.0, 0.0)),
            "B": Cpt("B", ("A",), {("T",): (1.0, 0.0), ("F",): (0.0, 1.0)}),
        })
        with pytest.raises(ImpossibleEvidence):
            eliminate_marginal(model, "A", {"B": "F"})
        with pytest.raises(ImpossibleEvidence):
            eliminate_marginal(model, "B", {"B": "F"})


class TestPosteriorUpdate:
    def test_bayes_update_from_child(self, chain2):
        posteriors = posterior_update(chain2, {"B": "T"})
        assert posteriors["A"].p("T") == pytest.approx(27 / 34, abs=1e-12)
        assert posteriors["B"].probabilities == (1.0, 0.0)

    def test_empty_evidence_gives_priors(self, chain2):
        posteriors = posterior_update(chain2)
        assert posteriors["A"].p("T") == pytest.approx(0.3, abs=1e-12)
        assert posteriors["B"].p("T") == pytest.approx(0.34, abs=1e-12)

    def test_evidence_on_root_reads_cpt_row(self, chain2):
        posteriors = posterior_update(chain2, {"A": "T"})
        assert posteriors["B"].p("T") == pytest.approx(0.9, abs=1e-12)

    def test_marginals_are_normalized_distributions(self):
        rng = random.Random(99)
        for _ in range(10):
            model = random_model(rng, max_nodes=6, max_joint=2 ** 10)
            evidence = random_evidence(rng, model)
            for marginal in posterior_update(model, evidence).values():
                assert all(p >= 0.0 for p in marginal.probabilities)
                assert math.fsum(marginal.probabilities) == pytest.approx(1.0, abs=1e-12)


class TestCptValidation:
    def test_row_sum_off_by_one_percent_rejected(self):
        with pytest.raises(Exception) as err:
            Cpt.prior("A", (0.66, 0.33))
        assert "sums to" in str(err.value)

    def test_parent_order_must_match_graph(self):
        graph = DependencyGraph(
            [ComponentNode("A", "network", TF), ComponentNode("B", "network", TF),
             ComponentNode("C", "network", TF)],
            [InfluenceEdge("B", "C"), InfluenceEdge("A", "C")])
        bad = Cpt("C", ("B", "A"), {
            ("T", "T"): (0.5, 0.5), ("T", "F"): (0.5, 0.5),
            ("F", "T"): (0.5, 0.5), ("F", "F"): (0.5, 0.5)})
        with pytest.raises(ValidationFailed) as err:
            BayesianModel(graph, {"A": Cpt.prior("A", (0.5, 0.5)),
                                  "B": Cpt.prior("B", (0.5, 0.5)), "C": bad})
        assert any("parent order" in msg for _, msg in err.value.issues)

    def test_missing_row_named_in_error(self):
        graph = DependencyGraph(
            [ComponentNode("A", "network", TF), ComponentNode("B", "network", TF)],
            [InfluenceEdge("A", "B")])
        sparse = Cpt("B", ("A",), {("T",): (0.5, 0.5)})
        with pytest.raises(ValidationFailed) as err:
            BayesianModel(graph, {"A": Cpt.prior("A", (0.5, 0.5)), "B": sparse})
        assert any("missing row" in msg and "'F'" in msg for _, msg in err.value.issues)

    def test_cyclic_graph_rejected_at_model_construction(self):
        graph = DependencyGraph(
            [ComponentNode("A", "network", TF), ComponentNode("B", "network", TF)],
            [InfluenceEdge("A", "B"), InfluenceEdge("B", "A")])
        with pytest.raises(ValidationFailed):
            BayesianModel(graph, {})
