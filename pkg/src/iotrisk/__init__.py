"""iotrisk: goal-oriented dependency risk analytics for layered IoT systems.

The library models a networked system as a layered dependency graph with a
conditional probability table per component, then answers risk questions with
exact Bayesian inference: posterior updating from evidence, time-sliced
filtering/smoothing/prediction, cascading-impact analysis of incident
scenarios, resolution of components that lack probabilistic data, and
CVSS v2-derived compromise priors.  A transformation-roadmap layer tracks
control goals against maturity tiers and binds measurable controls to model
nodes so their achievement is read as a posterior instead of asserted.
"""

from .errors import (
    CyclicGraph,
    DocumentError,
    DuplicateId,
    EmptyGoal,
    ImpossibleEvidence,
    IncompleteAssignment,
    InvalidDistribution,
    InvalidHorizon,
    InvalidMetricValue,
    IotRiskError,
    MissingAssignment,
    MissingCpt,
    ModelError,
    ModelSyntaxError,
    NotMeasurable,
    NotUncontrollable,
    ObservationBeyondHorizon,
    OutOfRange,
    SchemaVersionMismatch,
    UnknownNode,
    UnknownState,
    UnknownTierLabel,
    UnresolvableNode,
    ValidationFailed,
)
from .graph import (
    APPLICATION,
    BUILTIN_LAYERS,
    NETWORK,
    PERCEPTION,
    ComponentNode,
    DependencyGraph,
    InfluenceEdge,
    StateDomain,
    ValidationReport,
    Violation,
    ancestors,
    dependency_order,
    descendants,
    topological_order,
    validate,
)
from .model import BayesianModel, Cpt, Marginal, ROW_SUM_TOL
from .inference import (
    ORACLE_TOL,
    eliminate_marginal,
    enumerate_marginal,
    enumerate_posteriors,
    joint_probability,
    posterior_update,
)
from .temporal import (
    DEFAULT_MAX_HORIZON,
    ObservationSeries,
    SliceTemplate,
    TemporalEdge,
    TemporalModel,
    filter_marginals,
    predict_marginals,
    slice_id,
    smooth_marginals,
    unroll,
)
from .cascade import (
    CriticalityEntry,
    EventLevel,
    ImpactReport,
    IncidentScenario,
    LevelClassification,
    NodeImpact,
    NodeRelation,
    classify_levels,
    impact_probabilities,
    impact_set,
    rank_criticality,
)
from .uncontrollable import (
    CatalogueSource,
    StateCatalogue,
    and_cpt,
    catalogue,
    complete_model,
    detect_uncontrollable,
    logic_gate_cpt,
    or_cpt,
    resolve_uncontrollable,
)
from .cvss import (
    CvssVector,
    LinearPriorMapping,
    LogisticPriorMapping,
    base_score,
    environmental_score,
    prior_cpt_from_score,
    score_summary,
    score_to_prior,
    temporal_score,
)
from .roadmap import (
    DEFAULT_TIER_SCALE,
    BoundRoadmap,
    ControlElement,
    ControlGoal,
    ControlObjective,
    Epistemic,
    RoadmapModel,
    TierGap,
    achievement_states,
    bind_elements,
    build_roadmap,
    classify_epistemic,
    gap_report,
)
from .documents import (
    SCHEMA_VERSION,
    EvidenceRecord,
    ModelDocument,
    TemporalSpec,
    ingest_evidence,
    parse_model,
    read_evidence,
    serialize_model,
)
from .sampling import monte_carlo_sample
from .reporting import emit_report, export_dot, input_digest, to_jsonable
from .bundled import (
    DEFAULT_ROADMAP_SECTION,
    bundled_model_names,
    load_bundled_model,
    load_bundled_roadmap,
    parse_roadmap_document,
    roadmap_section_keys,
)

__version__ = "0.1.0"
