"""Provenance graphs read as structural causal models.

Finite-domain causal models and interventions, Halpern-Pearl actual causes
by exhaustive search, OPM edge inference with a causal audit, and grades of
approximation for provenance semantics.
"""

from .approximation import (BlackBoxFunction, CausalFunction, PredictivePowerRelation,
                            ProvenanceSemantics, case_split_semantics, causal_function_of_model,
                            compare_power, constant_semantics, fixed_semantics, is_global_approx,
                            is_local_approx, is_pointwise_approx, predictive_power)
from .cause import (CausalSituation, CauseQuery, WitnessedCause, actual_causes, is_part_of_cause,
                    is_weak_cause, part_of_cause_relation, replay)
from .domain import BOTTOM, Domain
from .dsl import ParseError, parse_graph, parse_interp, parse_model, print_model
from .model import (CausalGraph, CausalModel, evaluate, intervene, is_consistent,
                    least_causal_graph)
from .opm import AuditReport, EdgeFact, FactBase, audit, base_facts, datalog_closure, semantic_edges
from .provenance import (Interpretation, ProvenanceGraph, interpret_graph, to_causal_situation,
                         validate)

__version__ = "0.1.0"

__all__ = [
    "AuditReport", "BOTTOM", "BlackBoxFunction", "CausalFunction", "CausalGraph", "CausalModel",
    "CausalSituation", "CauseQuery", "Domain", "EdgeFact", "FactBase", "Interpretation",
    "ParseError", "PredictivePowerRelation", "ProvenanceGraph", "ProvenanceSemantics",
    "WitnessedCause", "actual_causes", "audit", "base_facts", "case_split_semantics",
    "causal_function_of_model", "compare_power", "constant_semantics", "datalog_closure",
    "evaluate", "fixed_semantics", "intervene", "interpret_graph", "is_consistent",
    "is_global_approx", "is_local_approx", "is_part_of_cause", "is_pointwise_approx",
    "is_weak_cause", "least_causal_graph", "parse_graph", "parse_interp", "parse_model",
    "part_of_cause_relation", "predictive_power", "print_model", "replay", "semantic_edges",
    "to_causal_situation", "validate",
]
