"""From vulnerability scores to model priors.

Environmental CVSS v2 metrics (collateral damage potential, target
distribution, per-asset security requirements) adapt a vulnerability's score
to a deployment; a prior mapping then turns the score into the compromise
probability of a root node, which is where scanner output enters the
dependency model.
"""

import iotrisk as ir

# A remotely exploitable full-compromise vulnerability, patched upstream,
# sitting on a high-value asset.
text = "AV:N/AC:L/Au:N/C:C/I:C/A:C/E:F/RL:OF/RC:C/CDP:H/TD:H/CR:M/IR:M/AR:L"
vector = ir.CvssVector.from_string(text)
print("vector        :", vector.to_string())
print("base score    :", ir.base_score(vector))
print("temporal      :", ir.temporal_score(vector))
print("environmental :", ir.environmental_score(vector))

# ---------------------------------------------------------------------------
# The same flaw in a deployment with no vulnerable targets is a non-event.
none_deployed = ir.CvssVector.from_string(
    "AV:N/AC:L/Au:N/C:C/I:C/A:C/TD:N")
print("\nwith TD=None  :", ir.environmental_score(none_deployed))

# ---------------------------------------------------------------------------
# score -> prior: linear by default (p = score/10), logistic as an option.
score = ir.environmental_score(vector)
print(f"\nlinear prior   : {ir.score_to_prior(score):.3f}")
logistic = ir.LogisticPriorMapping(midpoint=6.0, steepness=0.8)
print(f"logistic prior : {ir.score_to_prior(score, logistic):.3f}")

# ---------------------------------------------------------------------------
# Plug the prior into a model: the scored device is a root whose compromise
# feeds a dependent service.
domain = ir.StateDomain(["secure", "compromised"])
OF = ir.StateDomain(["ok", "fail"])
graph = ir.DependencyGraph(
    [ir.ComponentNode("edge_device", "perception", domain),
     ir.ComponentNode("telemetry", "application", OF, is_service_goal=True)],
    [ir.InfluenceEdge("edge_device", "telemetry")])
model = ir.BayesianModel(graph, {
    "edge_device": ir.prior_cpt_from_score("edge_device", domain, score),
    "telemetry": ir.Cpt("telemetry", ("edge_device",),
                        {("secure",): (0.98, 0.02), ("compromised",): (0.25, 0.75)}),
})

marginal = ir.eliminate_marginal(model, "telemetry")
print(f"\nP(telemetry fails) with the scored prior: {marginal.p('fail'):.4f}")
clean = ir.eliminate_marginal(model, "telemetry", {"edge_device": "secure"})
print(f"P(telemetry fails | device secure)     : {clean.p('fail'):.4f}")
