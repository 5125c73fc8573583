"""Consistency audits for buy-price models.

The audit answers four questions about a model: do seeded probes confirm
the coherence properties (worst-case bound, scale invariance,
superadditivity), can a ledger priced at the model's own quotes lose at
every outcome, are the indicator prices additive (a probability), and do
all prices come from a belief function via the Choquet integral.

The last verdict is decided through a finite characterization: invert the
indicator prices on the subset lattice and demand a nonnegative result,
then demand Choquet agreement on all indicators plus a seeded sample of
general gambles. Failures ship a :class:`ViolationCertificate`, two lists
of gambles whose summed worst-case revenue is ordered one way for every
two-valued valuation while the summed buy prices are ordered strictly the
other way; :func:`verify_certificate` rechecks both facts from scratch.

Audits are pure functions of (model, plan); the plan's seed pins every
random draw, so any report can be replayed bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Union

import numpy as np

from .errors import (
    BeliefBetError,
    NoGapError,
    NotNegativeError,
    SingletonCoreError,
)
from .previsions import (
    ChoquetModel,
    Gamble,
    LinearModel,
    LowerEnvelopeModel,
    PriceModel,
    buy,
    buy_batch,
    choquet_expectation,
    indicator,
    induced_set_function,
    payoff_layers,
    sell,
    _check_same_space,
)
from .setfn import (
    DEFAULT_TOL,
    EXACT_TOL,
    MassFunction,
    NegativeMassReport,
    OutcomeSpace,
    SetFunction,
    _mobius_at,
    belief_to_mass,
    mobius_transform,
)

_PROBE_STREAM = 0
_SAMPLE_STREAM = 1
_LEDGER_STREAM = 2


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic probe plan. One seed fixes every draw of an audit."""

    num_samples: int = 256
    payoff_range: tuple[float, float] = (-1.0, 1.0)
    seed: int = 0
    num_ledgers: int = 32

    def __post_init__(self) -> None:
        if self.num_samples < 1:
            raise BeliefBetError("num_samples must be at least 1")
        lo, hi = self.payoff_range
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise BeliefBetError(f"payoff_range must be a finite (low, high) pair, got {self.payoff_range}")
        if self.num_ledgers < 0:
            raise BeliefBetError("num_ledgers cannot be negative")


def _rng(plan: SamplePlan, stream: int) -> np.random.Generator:
    return np.random.default_rng([plan.seed, stream])


def sample_gambles(space: OutcomeSpace, plan: SamplePlan) -> np.ndarray:
    """The exact (num_samples, n) payoff matrix an audit checks Choquet
    agreement on. Exposed so third parties can replay the sample."""
    lo, hi = plan.payoff_range
    return _rng(plan, _SAMPLE_STREAM).uniform(lo, hi, size=(plan.num_samples, space.n))


@dataclass(frozen=True, eq=False)
class TransactionLedger:
    """Positions taken at quoted prices: buys pay out their gamble, sells
    owe theirs."""

    buys: tuple[tuple[Gamble, float], ...]
    sells: tuple[tuple[Gamble, float], ...]

    def __post_init__(self) -> None:
        entries = list(self.buys) + list(self.sells)
        if not entries:
            raise BeliefBetError("a ledger needs at least one transaction")
        space = entries[0][0].space
        for g, price in entries:
            _check_same_space(space, g.space)
            if not math.isfinite(price):
                raise BeliefBetError("ledger prices must be finite")
        object.__setattr__(self, "buys", tuple((g, float(p)) for g, p in self.buys))
        object.__setattr__(self, "sells", tuple((g, float(p)) for g, p in self.sells))

    @property
    def space(self) -> OutcomeSpace:
        return (self.buys or self.sells)[0][0].space

    @classmethod
    def at_model_prices(
        cls,
        pm: PriceModel,
        buy_gambles: tuple[Gamble, ...] | list[Gamble] = (),
        sell_gambles: tuple[Gamble, ...] | list[Gamble] = (),
    ) -> "TransactionLedger":
        return cls(
            tuple((g, buy(pm, g)) for g in buy_gambles),
            tuple((g, sell(pm, g)) for g in sell_gambles),
        )


def exposure_profile(ledger: TransactionLedger) -> np.ndarray:
    """Net revenue of the ledger holder at each outcome."""
    profile = np.zeros(ledger.space.n)
    for g, price in ledger.buys:
        profile += g.payoff - price
    for g, price in ledger.sells:
        profile += price - g.payoff
    return profile


def sure_loss_exposure(pm: PriceModel, ledger: TransactionLedger) -> float:
    """Best-case net revenue of the ledger across outcomes.

    Nonnegative whenever the prices are the model's own quotes; a strictly
    negative value means the quoted prices lose at every outcome.
    """
    _check_same_space(pm.space, ledger.space)
    return float(exposure_profile(ledger).max())


@dataclass(frozen=True)
class PropertyProbe:
    worst_slack: float
    checked: int
    passed: int


@dataclass(frozen=True, eq=False)
class CoherenceProbeReport:
    """Worst slack and pass counts per probed pricing property."""

    plan: SamplePlan
    tol: float
    probes: dict[str, PropertyProbe]

    @property
    def all_passed(self) -> bool:
        return all(p.passed == p.checked for p in self.probes.values())

    @property
    def worst_slack(self) -> float:
        return min(p.worst_slack for p in self.probes.values())


_PROBE_LAMBDAS = (0.5, 2.0, 10.0)


def coherence_probe(
    pm: PriceModel, plan: SamplePlan = SamplePlan(), *, tol: float = DEFAULT_TOL
) -> CoherenceProbeReport:
    """Probe the pricing properties of a coherent model on seeded gambles.

    Evaluates, per sampled gamble pair: buy above the worst payoff, buy
    below the best payoff, positive homogeneity at factors 0.5, 2 and 10,
    superadditivity, constant-shift equivariance, and buy/sell duality.
    Equality-style properties report slack as minus the absolute deviation,
    so every slack should sit above -tol.
    """
    rng = _rng(plan, _PROBE_STREAM)
    lo, hi = plan.payoff_range
    num = plan.num_samples
    n = pm.space.n
    xs = rng.uniform(lo, hi, size=(num, n))
    ys = rng.uniform(lo, hi, size=(num, n))
    shifts = rng.uniform(lo, hi, size=num)

    bx = buy_batch(pm, xs)
    by = buy_batch(pm, ys)

    def probe(slacks: np.ndarray) -> PropertyProbe:
        slacks = np.asarray(slacks, dtype=float)
        return PropertyProbe(
            worst_slack=float(slacks.min()),
            checked=int(slacks.size),
            passed=int(np.count_nonzero(slacks >= -tol)),
        )

    lower = np.concatenate([bx - xs.min(axis=1), by - ys.min(axis=1)])
    upper = np.concatenate([xs.max(axis=1) - bx, ys.max(axis=1) - by])
    homog = np.concatenate(
        [-np.abs(buy_batch(pm, lam * xs) - lam * bx) for lam in _PROBE_LAMBDAS]
    )
    superadd = buy_batch(pm, xs + ys) - bx - by
    translation = -np.abs(buy_batch(pm, xs + shifts[:, None]) - bx - shifts)
    # duality compares the batch route against the scalar sell route
    dual_rhs = np.array([-sell(pm, Gamble(pm.space, -x)) for x in xs])
    duality = -np.abs(bx - dual_rhs)

    probes = {
        "lower_bound": probe(lower),
        "upper_bound": probe(upper),
        "homogeneity": probe(homog),
        "superadditivity": probe(superadd),
        "translation": probe(translation),
        "duality": probe(duality),
    }
    return CoherenceProbeReport(plan=plan, tol=tol, probes=probes)


@dataclass(frozen=True)
class ProbabilityCheck:
    is_probability: bool
    witness: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.is_probability


def _probability_verdict(
    space: OutcomeSpace, values: np.ndarray, mob: np.ndarray, tol: float
) -> ProbabilityCheck:
    counts = np.bitwise_count(np.arange(space.size))
    offenders = np.flatnonzero((counts >= 2) & (np.abs(mob) > tol))
    if not offenders.size:
        return ProbabilityCheck(True)
    star = int(min(offenders, key=lambda m: (int(m).bit_count(), int(m))))
    a = star & -star
    b = star ^ a
    if abs(values[star] - values[a] - values[b]) > tol:
        return ProbabilityCheck(False, (a, b))
    # interference from sub-tolerance weights; fall back to a direct scan
    for union in range(3, space.size):
        if int(union).bit_count() < 2:
            continue
        sub = (union - 1) & union
        while sub:
            rest = union ^ sub
            if rest and sub < rest and abs(values[union] - values[sub] - values[rest]) > tol:
                return ProbabilityCheck(False, (sub, rest))
            sub = (sub - 1) & union
    return ProbabilityCheck(False, (a, b))


def probability_check(pm: PriceModel, *, tol: float = DEFAULT_TOL) -> ProbabilityCheck:
    """Decide whether the model prices indicators additively.

    True iff the inversion of the indicator prices is carried by
    singletons; on failure the witness is a disjoint pair whose union is
    priced away from the sum of its parts.
    """
    induced = induced_set_function(pm)
    mob = mobius_transform(induced.values)
    return _probability_verdict(pm.space, induced.values, mob, tol)


@dataclass(frozen=True)
class NegativeMassWitness:
    subset: int
    mass: float

    kind = "negative_mass"


@dataclass(frozen=True, eq=False)
class ChoquetGapWitness:
    gamble: Gamble
    model_price: float
    choquet_price: float

    kind = "choquet_gap"


CertificateWitness = Union[NegativeMassWitness, ChoquetGapWitness]


@dataclass(frozen=True, eq=False)
class ViolationCertificate:
    """Two gamble lists falsifying belief-consistent pricing.

    For every nonempty core the summed worst-case revenue of ``xs`` never
    exceeds that of ``ys``, yet the model pays strictly more for ``xs``
    than for ``ys``; ``buy_gap`` is that strictly positive difference.
    """

    space: OutcomeSpace
    xs: tuple[Gamble, ...]
    ys: tuple[Gamble, ...]
    buy_gap: float
    witness: CertificateWitness

    @property
    def kind(self) -> str:
        return self.witness.kind


def _subset_minima(payoff: np.ndarray) -> np.ndarray:
    """mins[mask] = min of payoff over the outcomes of mask (inf at 0)."""
    n = payoff.shape[0]
    mins = np.full(1 << n, np.inf)
    for b in range(n):
        v = mins.reshape(-1, 2, 1 << b)
        v[:, 1, :] = np.minimum(v[:, 0, :], payoff[b])
    return mins


def certificate_from_negative_mass(
    f: SetFunction, subset: int, *, tol: float = DEFAULT_TOL
) -> ViolationCertificate:
    """Build a certificate from a subset with negative inverted weight.

    The generating family removes one outcome of ``subset`` at a time; its
    inclusion-exclusion slack equals the negative weight. ``ys`` holds the
    union and the even-order intersections, ``xs`` the odd-order ones.
    When some two family members already violate the pair inequality, that
    minimal two-set instance is emitted instead.
    """
    space = f.space
    space.check_mask(subset)
    if subset.bit_count() < 2:
        raise SingletonCoreError(
            f"subset {subset} has fewer than two outcomes; no family can witness it"
        )
    mass_value = _mobius_at(f.values, subset)
    if mass_value >= -tol:
        raise NotNegativeError(
            f"inverted weight at subset {subset} is {mass_value!r}, not below {-tol}"
        )
    family = sorted(subset ^ (1 << i) for i in range(space.n) if subset >> i & 1)

    best_pair = None
    best_slack = -tol
    for a, b in combinations(family, 2):
        pair_slack = float(f.values[subset] + f.values[a & b] - f.values[a] - f.values[b])
        if pair_slack < best_slack:
            best_pair, best_slack = (a, b), pair_slack
    if best_pair is not None:
        a, b = best_pair
        xs = (indicator(space, a), indicator(space, b))
        ys = (indicator(space, subset), indicator(space, a & b))
        gap = -best_slack
    else:
        count = len(family)
        xs_masks: list[int] = []
        ys_masks: list[int] = [subset]  # the union of the family
        for picks in range(1, 1 << count):
            inter = space.full_mask
            for i in range(count):
                if picks >> i & 1:
                    inter &= family[i]
            (xs_masks if picks.bit_count() & 1 else ys_masks).append(inter)
        xs = tuple(indicator(space, m) for m in xs_masks)
        ys = tuple(indicator(space, m) for m in ys_masks)
        gap = math.fsum(float(f.values[m]) for m in xs_masks) - math.fsum(
            float(f.values[m]) for m in ys_masks
        )
    return ViolationCertificate(
        space=space,
        xs=xs,
        ys=ys,
        buy_gap=float(gap),
        witness=NegativeMassWitness(subset=subset, mass=float(mass_value)),
    )


def certificate_from_choquet_gap(
    pm: PriceModel, gamble: Gamble, *, tol: float = DEFAULT_TOL
) -> ViolationCertificate:
    """Build a certificate from a gamble priced away from its layer value.

    The gamble is shifted to a zero minimum so all layer widths are
    nonnegative; its worst-case revenue then equals the summed worst-case
    revenue of the scaled indicator layers on every core, while the buy
    prices differ. Requires the model's inverted indicator prices to be
    nonnegative.
    """
    _check_same_space(pm.space, gamble.space)
    space = pm.space
    inverted = belief_to_mass(induced_set_function(pm), tol=tol)
    if isinstance(inverted, NegativeMassReport):
        raise BeliefBetError(
            "inverted indicator prices are negative; use certificate_from_negative_mass"
        )
    shift = float(gamble.payoff.min())
    shifted = Gamble(space, gamble.payoff - shift)
    layers = [
        (level, upper) for level, upper in payoff_layers(shifted.payoff) if level > 0.0
    ]
    layer_gambles: list[Gamble] = []
    prev = 0.0
    for level, upper in layers:
        layer_gambles.append((level - prev) * indicator(space, upper))
        prev = level
    model_price = buy(pm, shifted)
    layer_price = math.fsum(buy(pm, layer) for layer in layer_gambles)
    gap = model_price - layer_price
    if abs(gap) <= tol:
        raise NoGapError(
            f"model and layer prices agree within {tol} on this gamble ({gap!r})"
        )
    if gap > 0:
        xs: tuple[Gamble, ...] = (shifted,)
        ys: tuple[Gamble, ...] = tuple(layer_gambles)
    else:
        xs = tuple(layer_gambles)
        ys = (shifted,)
    return ViolationCertificate(
        space=space,
        xs=xs,
        ys=ys,
        buy_gap=abs(gap),
        witness=ChoquetGapWitness(
            gamble=gamble,
            model_price=buy(pm, gamble),
            choquet_price=choquet_expectation(inverted, gamble),
        ),
    )


def verify_certificate(
    pm: PriceModel,
    cert: ViolationCertificate,
    *,
    tol: float = DEFAULT_TOL,
    exact_tol: float = EXACT_TOL,
) -> bool:
    """Recheck a certificate against a model from scratch.

    True iff, over every one of the 2^n - 1 nonempty cores, the summed
    worst-case revenue of ``xs`` stays below that of ``ys`` (within
    ``exact_tol``), and the model's summed buy price of ``xs`` strictly
    exceeds that of ``ys`` by more than ``tol``.
    """
    _check_same_space(pm.space, cert.space)
    size = cert.space.size
    revenue_x = np.zeros(size)
    revenue_y = np.zeros(size)
    for g in cert.xs:
        _check_same_space(cert.space, g.space)
        revenue_x += _subset_minima(g.payoff)
    for g in cert.ys:
        _check_same_space(cert.space, g.space)
        revenue_y += _subset_minima(g.payoff)
    if cert.xs and cert.ys:
        dominated = bool(np.all(revenue_x[1:] <= revenue_y[1:] + exact_tol))
    else:
        # an empty side contributes an empty sum, i.e. zero revenue
        empty_side = np.zeros(size - 1)
        lhs = revenue_x[1:] if cert.xs else empty_side
        rhs = revenue_y[1:] if cert.ys else empty_side
        dominated = bool(np.all(lhs <= rhs + exact_tol))
    if not dominated:
        return False
    bought_x = math.fsum(buy(pm, g) for g in cert.xs)
    bought_y = math.fsum(buy(pm, g) for g in cert.ys)
    return bought_x > bought_y + tol


@dataclass(frozen=True, eq=False)
class AuditReport:
    """Everything one audit run established, replayable from plan + seed."""

    space: OutcomeSpace
    model_kind: str
    plan: SamplePlan
    tolerances: dict[str, float]
    coherence: CoherenceProbeReport
    sure_loss_worst: float | None
    is_probability: bool
    probability_witness: tuple[int, int] | None
    is_belief_consistent: bool
    induced_mass: MassFunction | NegativeMassReport
    certificate: ViolationCertificate | None
    certificate_verified: bool | None

    def __post_init__(self) -> None:
        if (self.certificate is None) == (not self.is_belief_consistent):
            raise BeliefBetError("a certificate must accompany exactly the failing verdicts")


def _sampled_sure_loss(pm: PriceModel, plan: SamplePlan) -> float | None:
    """Worst exposure over seeded ledgers priced at the model's own quotes."""
    if plan.num_ledgers == 0:
        return None
    rng = _rng(plan, _LEDGER_STREAM)
    lo, hi = plan.payoff_range
    n = pm.space.n
    worst = math.inf
    for _ in range(plan.num_ledgers):
        num_buys, num_sells = 0, 0
        while num_buys + num_sells == 0:
            num_buys = int(rng.integers(0, 6))
            num_sells = int(rng.integers(0, 6))
        profile = np.zeros(n)
        if num_buys:
            payoffs = rng.uniform(lo, hi, size=(num_buys, n))
            prices = buy_batch(pm, payoffs)
            profile += (payoffs - prices[:, None]).sum(axis=0)
        if num_sells:
            payoffs = rng.uniform(lo, hi, size=(num_sells, n))
            prices = -buy_batch(pm, -payoffs)
            profile += (prices[:, None] - payoffs).sum(axis=0)
        worst = min(worst, float(profile.max()))
    return worst


def _model_kind(pm: PriceModel) -> str:
    if isinstance(pm, LinearModel):
        return "linear"
    if isinstance(pm, ChoquetModel):
        return "choquet"
    if isinstance(pm, LowerEnvelopeModel):
        return "lower_envelope"
    return type(pm).__name__


_AGREEMENT_CHUNK = 1 << 14


def _indicator_matrix(space: OutcomeSpace, start: int, stop: int) -> np.ndarray:
    masks = np.arange(start, stop)[:, None]
    return ((masks >> np.arange(space.n)) & 1).astype(float)


def _choquet_batch(mass: MassFunction, payoffs: np.ndarray) -> np.ndarray:
    out = np.zeros(payoffs.shape[0])
    for mask, w in mass.weights.items():
        idx = [i for i in range(mass.space.n) if mask >> i & 1]
        out += w * payoffs[:, idx].min(axis=1)
    return out


def _worst_indicator_gap(pm: PriceModel, mass: MassFunction) -> tuple[float, int]:
    """Largest |model - Choquet| over all indicators, chunked to keep the
    indicator matrix small on wide spaces."""
    worst, worst_mask = -1.0, 0
    for start in range(0, pm.space.size, _AGREEMENT_CHUNK):
        stop = min(start + _AGREEMENT_CHUNK, pm.space.size)
        block = _indicator_matrix(pm.space, start, stop)
        gaps = np.abs(buy_batch(pm, block) - _choquet_batch(mass, block))
        idx = int(np.argmax(gaps))
        if gaps[idx] > worst:
            worst, worst_mask = float(gaps[idx]), start + idx
    return worst, worst_mask


def belief_consistency_audit(
    pm: PriceModel,
    plan: SamplePlan = SamplePlan(),
    *,
    tol: float = DEFAULT_TOL,
    exact_tol: float = EXACT_TOL,
) -> AuditReport:
    """Full audit: probes, sure-loss sampling, probability check, and the
    belief-consistency verdict with a verified certificate on failure.

    Verdict steps: invert the indicator prices; any weight below -tol
    yields a negative-mass certificate at the smallest offending subset
    (ties broken toward later outcomes). Otherwise the model's prices are
    compared with the Choquet prices of the recovered weights on all
    indicators plus the plan's sampled gambles; the largest disagreement
    beyond tol yields a pricing-gap certificate. Certificates are verified
    before they are returned.
    """
    space = pm.space
    probe_report = coherence_probe(pm, plan, tol=tol)
    induced = induced_set_function(pm)
    inverted = belief_to_mass(induced, tol=tol)
    mob = mobius_transform(induced.values)
    prob = _probability_verdict(space, induced.values, mob, tol)
    sure_worst = _sampled_sure_loss(pm, plan)

    certificate: ViolationCertificate | None = None
    if isinstance(inverted, NegativeMassReport):
        candidates = [(m, v) for m, v in inverted.entries if m.bit_count() >= 2]
        if not candidates:
            raise BeliefBetError(
                "only singleton weights are negative; the model is outside the coherent family"
            )
        subset = min(candidates, key=lambda e: (e[0].bit_count(), -e[0]))[0]
        certificate = certificate_from_negative_mass(induced, subset, tol=tol)
        consistent = False
    else:
        samples = sample_gambles(space, plan)
        sample_gaps = np.abs(buy_batch(pm, samples) - _choquet_batch(inverted, samples))
        sample_idx = int(np.argmax(sample_gaps))
        indicator_gap, indicator_mask = _worst_indicator_gap(pm, inverted)
        if max(float(sample_gaps[sample_idx]), indicator_gap) > tol:
            if sample_gaps[sample_idx] >= indicator_gap:
                bad = Gamble(space, samples[sample_idx])
            else:
                bad = indicator(space, indicator_mask)
            certificate = certificate_from_choquet_gap(pm, bad, tol=tol)
            consistent = False
        else:
            consistent = True

    verified: bool | None = None
    if certificate is not None:
        verified = verify_certificate(pm, certificate, tol=tol, exact_tol=exact_tol)
        if not verified:
            raise BeliefBetError("internal error: emitted certificate failed verification")

    return AuditReport(
        space=space,
        model_kind=_model_kind(pm),
        plan=plan,
        tolerances={"tol": tol, "exact_tol": exact_tol},
        coherence=probe_report,
        sure_loss_worst=sure_worst,
        is_probability=prob.is_probability,
        probability_witness=prob.witness,
        is_belief_consistent=consistent,
        induced_mass=inverted,
        certificate=certificate,
        certificate_verified=verified,
    )
