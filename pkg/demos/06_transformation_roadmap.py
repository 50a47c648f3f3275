"""Tracking security posture with a transformation roadmap.

Control goals break into objectives and bottom out in measurable elements.
Maturity lives on an ordered tier scale; the gap report between a current and
a target assignment is the transformation work queue.  Binding an element to
a model node upgrades it from asserted ("we understand this") to evidential
("the model measures this").
"""

import iotrisk as ir

roadmap = ir.load_bundled_roadmap()  # the training-and-awareness section
print(f"{len(roadmap.goals)} control goals:")
for goal in roadmap.goals:
    print(f"  {goal.id}: {goal.title}")
    for objective in goal.objectives:
        for element in objective.elements:
            print(f"      element {element.id} (measurable={element.measurable})")

# ---------------------------------------------------------------------------
# Current vs target maturity on the default four-tier scale.
current = {"ta-g1-o1-e1": "NotImplemented",
           "ta-g2-o1-e1": "Understood",
           "ta-g3-o1-e1": "Implemented"}
target = {"ta-g1-o1-e1": "Evidenced",
          "ta-g2-o1-e1": "Implemented",
          "ta-g3-o1-e1": "Evidenced"}

print(f"\ntier scale: {' < '.join(ir.DEFAULT_TIER_SCALE)}")
print("gap report (widest gap first):")
for gap in ir.gap_report(roadmap, current, target):
    print(f"  {gap.element_id}: {gap.current} -> {gap.target} "
          f"({gap.steps} steps via {list(gap.path)})")

# ---------------------------------------------------------------------------
# Epistemic status: only measurable elements with data attached count as
# evidential; everything else is mere understanding.
element = roadmap.element("ta-g2-o1-e1")
print(f"\n{element.id} with data: {ir.classify_epistemic(element, True).value}")
print(f"{element.id} without  : {ir.classify_epistemic(element, False).value}")

# ---------------------------------------------------------------------------
# Binding elements to model nodes: the smart-home document ships a mini
# roadmap whose telemetry element is wired to the alarm service, so its
# achievement is read off as a posterior instead of asserted.
doc = ir.load_bundled_model("smart_home")
bound = ir.bind_elements(doc.roadmap, doc.model, doc.bindings)
print(f"\nsmart-home bindings: {bound.bindings}")
print(f"remaining data gaps: {list(bound.data_gaps) or 'none'}")

quiet = ir.achievement_states(bound, doc.model)
noisy = ir.achievement_states(bound, doc.model, {"wifi_gateway": "down"})
eid = "sh-g1-o1-e1"
print(f"\nachievement of {eid} (P alarm service armed):")
print(f"  nominal            : {quiet[eid].p('armed'):.4f}")
print(f"  with gateway down  : {noisy[eid].p('armed'):.4f}")
