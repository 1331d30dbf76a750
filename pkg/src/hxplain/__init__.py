"""Exact history explanations for small stochastic environments.

Actions of a recorded history are scored by how much they raise the
probability of a predicate, and a backward pass turns each important action
into an intermediate sub-goal described by a minimal set of state features.
"""

__version__ = "0.1.0"

from .bhxp import BhxpConfig, Explanation, Step, explain_backward, window_argmax
from .core import (
    Dynamics,
    Feature,
    FeatureSchema,
    History,
    Policy,
    TabularModel,
    TabularPolicy,
    TransitionModel,
    WeightedStates,
    next_states,
    succ,
    support,
)
from .errors import (
    BudgetExhausted,
    EmptyHistory,
    EmptyMatchSet,
    HxplainError,
    IllegalAction,
    MissingReference,
    SchemaMismatch,
    SpaceTooLarge,
    TerminalState,
    UnknownPredicate,
)
from .fhxp import ForwardExplanation, explain_forward
from .paxp import (
    BhxpClassifier,
    PaxpConfig,
    enumerate_paxp,
    find_lm_paxp,
    is_locally_minimal,
    is_weak_paxp,
    paxpred,
    proportion,
)
from .predicate import Dnf, Literal, Native, Predicate, Term, predicate_from_json
from .scoring import ScoringBudget, importance, state_utility, utility
from .simulate import rollout

__all__ = [
    "BhxpClassifier", "BhxpConfig", "BudgetExhausted", "Dnf", "Dynamics", "EmptyHistory",
    "EmptyMatchSet", "Explanation", "Feature", "FeatureSchema", "ForwardExplanation", "History",
    "HxplainError", "IllegalAction", "Literal", "MissingReference", "Native", "PaxpConfig",
    "Policy", "Predicate", "SchemaMismatch", "ScoringBudget", "SpaceTooLarge", "Step",
    "TabularModel", "TabularPolicy", "Term", "TerminalState", "TransitionModel",
    "UnknownPredicate", "WeightedStates", "enumerate_paxp", "explain_backward", "explain_forward",
    "find_lm_paxp", "importance", "is_locally_minimal", "is_weak_paxp", "next_states", "paxpred",
    "predicate_from_json", "proportion", "rollout", "state_utility", "succ", "support", "utility",
    "window_argmax",
]
