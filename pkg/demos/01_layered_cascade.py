"""Cascading impact through a layered IoT dependency chain.

The bundled ``layered_iot`` model is a nine-component system in three layers:
a perception-layer service flow (a14) feeds four network-layer services
(a12, a10, a7, a6) which feed four application-layer goals (a4, a3, a2, a1).
We impair a14 and watch the impact ripple to every service goal.
"""

import iotrisk as ir

doc = ir.load_bundled_model("layered_iot")
print(f"model: {len(doc.graph.nodes)} nodes across layers {doc.graph.layers()}")

report = ir.validate(doc.graph)
print(f"structurally valid: {report.ok}\n")

# ---------------------------------------------------------------------------
# An incident scenario fixes origins to an impaired state.  Reachability
# alone tells us which components *can* be affected...
scenario = ir.IncidentScenario({"a14": "impaired"})
affected = ir.impact_set(doc.graph, scenario)
print("impact set (everything downstream of a14):")
print(" ", sorted(affected))

# ...and each node plays one of three roles: the atomic origin, the
# propagation conduits, or the service goals where the damage lands.
levels = ir.classify_levels(doc.graph, scenario)
for level in (ir.EventLevel.ATOMIC, ir.EventLevel.PROPAGATION, ir.EventLevel.SERVICE):
    members = sorted(nid for nid, lvl in levels.levels.items() if lvl is level)
    print(f"{level.value:>12}: {members}")

# ---------------------------------------------------------------------------
# Probabilities: the origins enter as evidence and every posterior updates.
impact = ir.impact_probabilities(doc.model, scenario)
print("\nP(impaired) by dependency order from the origin:")
for nid in sorted(impact.per_node, key=lambda n: (impact.per_node[n].dependency_order or 0, n)):
    entry = impact.per_node[nid]
    p = entry.distribution.p("impaired")
    print(f"  order {entry.dependency_order}: {nid:<4} P(impaired)={p:.4f} [{entry.relation.value}]")

# Which origin would hurt the service goals most?  Rank a few candidates.
ranking = ir.rank_criticality(
    doc.model, [("a14", "impaired"), ("a6", "impaired"), ("a2", "impaired")])
print("\ncriticality ranking (mean service degradation):")
for entry in ranking:
    print(f"  {entry.node:<4} score={entry.score:.4f}")

# ---------------------------------------------------------------------------
# The annotated graph renders with Graphviz: dot -Tpng cascade.dot -o cascade.png
dot_text = ir.export_dot(doc.model, impact)
print(f"\nDOT export: {len(dot_text.splitlines())} lines; first edge line:")
print(" ", next(line for line in dot_text.splitlines() if "->" in line))
