"""Assessing components that nobody has quantified.

The ``uncontrolled_sensor`` model contains a legacy PLC with no conditional
probability table at all: its behaviour is *uncontrollable*.  A declared
state catalogue (here 50/50) stands in as its prior, and observing its
dependents pulls the posterior into shape: after the SCADA uplink fails,
the PLC is bad with probability 8/9.
"""

import iotrisk as ir

doc = ir.load_bundled_model("uncontrolled_sensor")
model = doc.model

gaps = ir.detect_uncontrollable(model)
print("uncontrollable nodes:", sorted(gaps))

cat = doc.catalogues["legacy_plc"]
print(f"declared catalogue for legacy_plc: {dict(zip(model.domain('legacy_plc'), cat.prior))}")

# ---------------------------------------------------------------------------
# With no evidence the catalogue prior is all we can say.
prior = ir.resolve_uncontrollable(model, "legacy_plc", {}, doc.catalogues)
print(f"\nno evidence:        P(bad) = {prior.p('bad'):.4f}")

# One failed dependent later, Bayes' rule has an opinion:
# P(bad | link fail) = 0.5*0.8 / (0.5*0.8 + 0.5*0.1) = 8/9.
posterior = ir.resolve_uncontrollable(model, "legacy_plc", {"scada_link": "fail"},
                                      doc.catalogues)
print(f"after link failure: P(bad) = {posterior.p('bad'):.4f}  (8/9 = {8/9:.4f})")

# The control room degrading too sharpens it further.
both = ir.resolve_uncontrollable(
    model, "legacy_plc",
    {"scada_link": "fail", "control_room": "degraded"}, doc.catalogues)
print(f"plus control room : P(bad) = {both.p('bad'):.4f}")

# ---------------------------------------------------------------------------
# complete_model substitutes catalogue-backed tables for every gap, after
# which the model is fully specified and every other query works on it.
completed = ir.complete_model(model, doc.catalogues)
print("\ngaps after completion:", sorted(ir.detect_uncontrollable(completed)) or "none")

# Deterministic gate tables are handy for goals that are pure logic of
# their inputs: this alarm is healthy only if both feeds are.
OF = ir.StateDomain(["ok", "fail"])
gate = ir.and_cpt("alarm", OF, {"feed_a": OF, "feed_b": OF})
print("\nAND-gate rows (alarm ok iff both feeds ok):")
for given, dist in sorted(gate.rows.items()):
    print(f"  {given} -> {dist}")
