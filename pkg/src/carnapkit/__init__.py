"""carnapkit: inductive updating with a decision-theoretic backbone.

Utilities and subjective probabilities are elicited from indifference
queries, preference axioms run as executable checks, the mixing-rule
parameters are identified from conditional preferences, and nonadditive
decision weights are measured, debiased, and contrasted with belief
functions.
"""

from .core import (
    Act,
    CarnapkitError,
    DESK_INTERVAL,
    DiseaseSpace,
    DomainError,
    Event,
    Evidence,
    IndifferenceRecord,
    NumericalError,
    OutcomeInterval,
    SchemaError,
    TruncationError,
    binary_act,
    counts,
    splice,
)
from .utility import LinearUtility, PowerUtility, UtilityCurve, utility_from_json
from .carnap import (
    CarnapModel,
    IdentificationResult,
    PosteriorReport,
    check_disjoint_causality,
    check_exchangeability,
    check_positive_relatedness,
    check_utility_stability,
    combine_evidence,
    dirichlet_posterior_mean,
    identify,
    sequence_probability,
    update,
)
from .agents import (
    ActTemplate,
    CarnapAgent,
    ChoquetAgent,
    MixtureAgent,
    SEUAgent,
    UrnAgent,
    agent_from_json,
    certainty_equivalent,
    indifference_point,
    seu_value,
)
from .tradeoff import (
    PreferenceTable,
    StandardSequence,
    TradeoffPair,
    TradeoffRecord,
    check_order_axioms,
    detect_tradeoff_inconsistency,
    elicit_standard_sequence,
    is_null,
    preference_table_from_agent,
    probability_from_exchange,
    probe_tradeoff_records,
    tradeoff_pairs,
    utility_from_sequence,
)
from .nonadditive import (
    CapacityTable,
    CERecord,
    MassFunction,
    StreamSpec,
    WeightingFamily,
    WeightingFit,
    additivity_report,
    bel_pl,
    binary_value,
    debias,
    degeneracy_experiment,
    dempster_combine,
    fit_w,
    measure_W,
    nonadditivity_flags,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
