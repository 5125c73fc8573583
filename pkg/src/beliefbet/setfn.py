"""Finite outcome spaces and set functions on the subset lattice.

Subsets of an n-outcome space are plain ints in [0, 2^n): bit i is set iff
outcome i belongs to the subset. Set functions are stored densely as float
arrays of length 2^n indexed by that mask, which keeps the O(n 2^n)
subset-sum (zeta) and Moebius transforms contiguous and cache friendly.

Every value here is immutable after construction and every operation is a
pure function of its inputs, so concurrent use needs no locking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    EndpointViolationError,
    BeliefBetError,
    DuplicateLabelError,
    FamilyTooLargeError,
    SizeOutOfRangeError,
)

#: Hard cap on outcomes so dense 2^n tables stay desk scale.
MAX_OUTCOMES = 24

#: Largest family accepted by inclusion_exclusion_slack (2^N - 1 subfamilies are scanned).
MAX_FAMILY_SIZE = 20

#: Default absolute tolerance separating arithmetic noise from structural failure.
DEFAULT_TOL = 1e-9

#: Tolerance used where exact cancellation is expected.
EXACT_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OutcomeSpace:
    """An ordered finite set of distinct outcome labels.

    The position of a label is its canonical identity: outcome i occupies
    bit i of every subset mask over this space.
    """

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.labels) <= MAX_OUTCOMES:
            raise SizeOutOfRangeError(
                f"need between 1 and {MAX_OUTCOMES} outcomes, got {len(self.labels)}"
            )
        if len(set(self.labels)) != len(self.labels):
            raise DuplicateLabelError(f"outcome labels must be distinct: {self.labels!r}")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        """Number of subsets, 2^n."""
        return 1 << len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown outcome label {label!r}") from None

    def mask_of(self, names: Iterable[str]) -> int:
        """Mask of the subset holding the named outcomes."""
        mask = 0
        for name in names:
            mask |= 1 << self.index_of(name)
        return mask

    def members(self, mask: int) -> tuple[str, ...]:
        """Labels of the outcomes in ``mask``, in canonical order."""
        self.check_mask(mask)
        return tuple(lab for i, lab in enumerate(self.labels) if mask >> i & 1)

    def check_mask(self, mask: int) -> int:
        if not 0 <= mask < self.size:
            raise BeliefBetError(f"mask {mask} out of range for a {self.n}-outcome space")
        return mask


def make_space(labels: Sequence[str]) -> OutcomeSpace:
    """Build an outcome space with canonical indexing in the order given."""
    return OutcomeSpace(tuple(labels))


def _table_bits(size: int) -> int:
    n = size.bit_length() - 1
    if size <= 0 or 1 << n != size:
        raise BeliefBetError(f"table length must be a power of two, got {size}")
    if n > MAX_OUTCOMES:
        raise SizeOutOfRangeError(f"table for {n} outcomes exceeds the {MAX_OUTCOMES} cap")
    return n


def zeta_transform(values: np.ndarray) -> np.ndarray:
    """Subset-sum transform: out[A] = sum of values[B] over all B inside A.

    One butterfly pass per bit, O(n 2^n) on the dense table.
    """
    out = np.array(values, dtype=float)
    n = _table_bits(out.shape[0])
    for b in range(n):
        v = out.reshape(-1, 2, 1 << b)
        v[:, 1, :] += v[:, 0, :]
    return out


def mobius_transform(values: np.ndarray) -> np.ndarray:
    """Inverse of :func:`zeta_transform`, the alternating subset sum.

    out[A] = sum over B inside A of (-1)^|A minus B| values[B].
    """
    out = np.array(values, dtype=float)
    n = _table_bits(out.shape[0])
    for b in range(n):
        v = out.reshape(-1, 2, 1 << b)
        v[:, 1, :] -= v[:, 0, :]
    return out


def _mobius_at(values: np.ndarray, subset: int) -> float:
    """Single Moebius coefficient, evaluated by direct alternating sum."""
    size = values.shape[0]
    idx = np.arange(size)
    sub = idx[(idx & ~subset) == 0]
    signs = np.where((np.bitwise_count(subset ^ sub) & 1).astype(bool), -1.0, 1.0)
    return float(np.dot(signs, values[sub]))


@dataclass(frozen=True, eq=False)
class SetFunction:
    """A raw real-valued function on all subsets; no axioms assumed."""

    space: OutcomeSpace
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.shape != (self.space.size,):
            raise BeliefBetError(
                f"need {self.space.size} values for a {self.space.n}-outcome space, "
                f"got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise BeliefBetError("set function values must be finite")
        object.__setattr__(self, "values", _frozen(v))


@dataclass(frozen=True, eq=False)
class MassFunction:
    """Positive weights on nonempty focal sets, summing to one.

    Only focal sets are stored; iteration order is ascending mask.
    """

    space: OutcomeSpace
    weights: Mapping[int, float]
    _masks: np.ndarray = field(init=False, repr=False)
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        clean: dict[int, float] = {}
        for mask in sorted(self.weights):
            self.space.check_mask(mask)
            w = float(self.weights[mask])
            if mask == 0:
                raise BeliefBetError("the empty set cannot carry mass")
            if not w > 0.0:
                raise BeliefBetError(f"focal weights must be positive, got {w!r} on mask {mask}")
            clean[mask] = w
        total = math.fsum(clean.values())
        if abs(total - 1.0) > EXACT_TOL:
            raise BeliefBetError(f"focal weights must sum to 1, got {total!r}")
        object.__setattr__(self, "weights", clean)
        object.__setattr__(self, "_masks", _frozen(np.fromiter(clean, dtype=np.int64, count=len(clean))))
        object.__setattr__(self, "_weights", _frozen(np.fromiter(clean.values(), dtype=float, count=len(clean))))

    @property
    def mask_array(self) -> np.ndarray:
        return self._masks

    @property
    def weight_array(self) -> np.ndarray:
        return self._weights

    def as_dense(self) -> np.ndarray:
        dense = np.zeros(self.space.size)
        dense[self._masks] = self._weights
        return dense

    def focal_sets(self) -> tuple[int, ...]:
        return tuple(self.weights)


@dataclass(frozen=True, eq=False)
class BeliefFunction:
    """A totally monotone set function pinned to 0 on the empty set and 1
    on the full set, stored densely.

    Construct through :func:`mass_to_belief`, or run a raw
    :class:`SetFunction` through :func:`is_belief_function` first; the
    constructor enforces only the endpoint axiom.
    """

    space: OutcomeSpace
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.shape != (self.space.size,):
            raise BeliefBetError(
                f"need {self.space.size} values for a {self.space.n}-outcome space, "
                f"got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise BeliefBetError("belief values must be finite")
        if abs(v[0]) > EXACT_TOL or abs(v[-1] - 1.0) > EXACT_TOL:
            raise EndpointViolationError(
                f"endpoints must be 0 and 1, got {v[0]!r} and {v[-1]!r}"
            )
        object.__setattr__(self, "values", _frozen(v))

    def as_set_function(self) -> SetFunction:
        return SetFunction(self.space, self.values)


@dataclass(frozen=True, eq=False)
class NegativeMassReport:
    """Subsets whose Moebius weight falls below the negativity tolerance."""

    space: OutcomeSpace
    entries: tuple[tuple[int, float], ...]  # (mask, weight), ascending mask
    tol: float

    def worst(self) -> tuple[int, float]:
        return min(self.entries, key=lambda e: e[1])

    def witness(self) -> int:
        """Canonical offending subset: fewest outcomes first, ties broken
        toward the subset containing later outcomes."""
        return min(self.entries, key=lambda e: (e[0].bit_count(), -e[0]))[0]


@dataclass(frozen=True, eq=False)
class BeliefCheck:
    """Verdict of :func:`is_belief_function`, with a witness on failure."""

    ok: bool
    reason: str | None = None
    negative_subset: int | None = None
    negative_mass: float | None = None
    family: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


_TableLike = Union[SetFunction, BeliefFunction]


def mass_to_belief(m: MassFunction) -> BeliefFunction:
    """Accumulate focal weights over the lattice: Bel(A) = sum of m(C) for C inside A."""
    return BeliefFunction(m.space, zeta_transform(m.as_dense()))


def belief_to_mass(
    f: _TableLike, *, tol: float = DEFAULT_TOL
) -> MassFunction | NegativeMassReport:
    """Invert the subset-sum transform and classify the result.

    Tiny negatives in [-tol, 0) are clamped to zero as arithmetic noise
    and the weights renormalized; anything below -tol is reported as a
    genuine violation, one entry per offending subset.
    """
    values = f.values
    if abs(values[0]) > EXACT_TOL or abs(values[-1] - 1.0) > EXACT_TOL:
        raise EndpointViolationError(
            f"endpoints must be 0 and 1, got {values[0]!r} and {values[-1]!r}"
        )
    mob = mobius_transform(values)
    bad = np.flatnonzero(mob < -tol)
    if bad.size:
        entries = tuple((int(mask), float(mob[mask])) for mask in bad)
        return NegativeMassReport(f.space, entries, tol)
    mob[mob < 0.0] = 0.0
    weights = {int(mask): float(mob[mask]) for mask in np.flatnonzero(mob > 0.0) if mask != 0}
    total = math.fsum(weights.values())
    if abs(total - 1.0) > tol:
        raise BeliefBetError(f"recovered weights sum to {total!r}, too far from 1")
    if total != 1.0:
        weights = {mask: w / total for mask, w in weights.items()}
    return MassFunction(f.space, weights)


def is_belief_function(f: _TableLike, *, tol: float = DEFAULT_TOL) -> BeliefCheck:
    """Decide whether a set function is a belief function.

    Passes iff the endpoints are 0 and 1 and the Moebius transform is
    nowhere below -tol. On failure the check carries the offending subset
    and, when it has at least two outcomes, the family of its one-element
    deletions, whose inclusion-exclusion slack equals the negative weight.
    """
    values = f.values
    if abs(values[0]) > EXACT_TOL:
        return BeliefCheck(False, reason=f"empty set must map to 0, got {values[0]!r}")
    if abs(values[-1] - 1.0) > EXACT_TOL:
        return BeliefCheck(False, reason=f"full set must map to 1, got {values[-1]!r}")
    mob = mobius_transform(values)
    bad = np.flatnonzero(mob < -tol)
    if not bad.size:
        return BeliefCheck(True)
    subset = int(min(bad, key=lambda m: (int(m).bit_count(), -int(m))))
    family = tuple(
        sorted(subset ^ (1 << i) for i in range(f.space.n) if subset >> i & 1)
    ) if subset.bit_count() >= 2 else ()
    return BeliefCheck(
        False,
        reason=f"subset {subset} carries weight {mob[subset]!r}",
        negative_subset=subset,
        negative_mass=float(mob[subset]),
        family=family,
    )


def inclusion_exclusion_slack(f: _TableLike, family: Sequence[int]) -> float:
    """Slack of one inclusion-exclusion inequality instance.

    Returns f(union) minus the alternating sum, over every nonempty
    subfamily I, of (-1)^(|I|+1) f(intersection over I). Belief functions
    keep this nonnegative for every family; probabilities make it zero.
    """
    masks = [f.space.check_mask(int(a)) for a in family]
    if len(masks) < 1:
        raise BeliefBetError("the family must contain at least one subset")
    if len(masks) > MAX_FAMILY_SIZE:
        raise FamilyTooLargeError(
            f"family of {len(masks)} sets exceeds the {MAX_FAMILY_SIZE} cap"
        )
    count = len(masks)
    inter = np.empty(1 << count, dtype=np.int64)
    inter[0] = f.space.full_mask
    union = 0
    for i, a in enumerate(masks):
        lo = 1 << i
        inter[lo : 2 * lo] = inter[:lo] & a
        union |= a
    idx = np.arange(1, 1 << count)
    signs = np.where((np.bitwise_count(idx) & 1).astype(bool), 1.0, -1.0)
    alternating = float(np.dot(signs, f.values[inter[1:]]))
    return float(f.values[union]) - alternating


def plausibility(bel: BeliefFunction, mask: int) -> float:
    """Conjugate value 1 - Bel(complement): the selling-price side of belief."""
    bel.space.check_mask(mask)
    return 1.0 - float(bel.values[bel.space.full_mask ^ mask])
