"""Epistemic uncertainty models over finite outcome spaces: mass and
belief tables with fast lattice transforms, gamble pricing under three
buy-price model families, and consistency audits with verifiable
violation certificates."""

__version__ = "0.1.0"

from .errors import (
    EndpointViolationError,
    BeliefBetError,
    DuplicateLabelError,
    FamilyTooLargeError,
    NoGapError,
    NotNegativeError,
    SchemaError,
    SingletonCoreError,
    SizeOutOfRangeError,
    SpaceMismatchError,
)
from .setfn import (
    DEFAULT_TOL,
    EXACT_TOL,
    MAX_FAMILY_SIZE,
    MAX_OUTCOMES,
    BeliefCheck,
    BeliefFunction,
    MassFunction,
    NegativeMassReport,
    OutcomeSpace,
    SetFunction,
    belief_to_mass,
    inclusion_exclusion_slack,
    is_belief_function,
    make_space,
    mass_to_belief,
    mobius_transform,
    plausibility,
    zeta_transform,
)
from .previsions import (
    BeliefValuation,
    ChoquetModel,
    Gamble,
    LinearModel,
    LowerEnvelopeModel,
    PriceModel,
    ValuationCheck,
    accepts,
    buy,
    buy_batch,
    choquet_expectation,
    choquet_layer_cake,
    constant_gamble,
    guaranteed_revenue,
    indicator,
    induced_set_function,
    is_belief_valuation,
    payoff_layers,
    sell,
)
from .audit import (
    AuditReport,
    CertificateWitness,
    ChoquetGapWitness,
    CoherenceProbeReport,
    NegativeMassWitness,
    ProbabilityCheck,
    PropertyProbe,
    SamplePlan,
    TransactionLedger,
    ViolationCertificate,
    belief_consistency_audit,
    certificate_from_choquet_gap,
    certificate_from_negative_mass,
    coherence_probe,
    exposure_profile,
    probability_check,
    sample_gambles,
    sure_loss_exposure,
    verify_certificate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
