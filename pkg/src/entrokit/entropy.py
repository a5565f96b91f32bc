"""Plug-in entropy functionals on explicit distributions.

Implements the collision probability, Renyi entropy of any positive
order, its Shannon (order -> 1) and min-entropy (order -> infinity)
limits, and the conditional collision entropy of a joint count table.

Conventions shared by every functional here:

* all reported values are in bits; internal work uses natural logs with
  a single final conversion,
* terms with p_i = 0 contribute 0 for every order (continuity
  convention), so estimates stay finite,
* reductions run over sorted term vectors, which makes every functional
  exactly invariant under permutation of the input.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from .errors import DomainError, EmptyJoint
from .histogram import JointHistogram

_LN2 = math.log(2.0)

# Sum tolerance for probability vectors.
_SUM_ATOL = 1e-12


class EstimatorKind(str, enum.Enum):
    """Which estimation route produced a value."""

    PLUGIN = "plugin"
    BAYES_CLOSED_FORM = "bayes_closed_form"
    BAYES_MONTE_CARLO = "bayes_monte_carlo"


@dataclass(frozen=True)
class RenyiOrder:
    """Entropy order: a finite gamma > 0, or a limit marker.

    ``RenyiOrder.finite(1.0)`` normalizes to the Shannon marker, so a
    finite instance always satisfies gamma > 0 and gamma != 1.
    """

    kind: str  # "finite" | "shannon" | "min"
    gamma: float | None = None

    @classmethod
    def finite(cls, gamma: float) -> "RenyiOrder":
        gamma = float(gamma)
        if not math.isfinite(gamma):
            if gamma == math.inf:
                return MIN_ENTROPY
            raise DomainError(f"entropy order must be finite and > 0, got {gamma}")
        if gamma <= 0.0:
            raise DomainError(f"entropy order must be > 0, got {gamma}")
        if gamma == 1.0:
            return SHANNON
        return cls("finite", gamma)

    @classmethod
    def parse(cls, text: str) -> "RenyiOrder":
        """Parse 'shannon', 'min', or a positive float literal."""
        lowered = text.strip().lower()
        if lowered == "shannon":
            return SHANNON
        if lowered in ("min", "inf"):
            return MIN_ENTROPY
        try:
            gamma = float(lowered)
        except ValueError:
            raise DomainError(f"unrecognized entropy order {text!r}") from None
        return cls.finite(gamma)

    def describe(self) -> str:
        return self.kind if self.gamma is None else repr(self.gamma)


SHANNON = RenyiOrder("shannon")
MIN_ENTROPY = RenyiOrder("min")


@dataclass(frozen=True)
class Distribution:
    """An explicit probability vector over s symbols."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 1:
            raise ValueError("probs must be a non-empty 1-d vector")
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite and non-negative")
        total = float(np.sort(probs).sum())
        if abs(total - 1.0) > _SUM_ATOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, s: int) -> "Distribution":
        return cls(np.full(s, 1.0 / s))

    @classmethod
    def from_histogram(cls, h) -> "Distribution":
        """Empirical frequencies of a histogram with n >= 1."""
        return cls(h.frequencies())

    @property
    def s(self) -> int:
        return int(self.probs.size)


@dataclass(frozen=True)
class EntropyEstimate:
    """An entropy value in bits together with how it was obtained."""

    value_bits: float
    order: RenyiOrder
    estimator: EstimatorKind
    n: int
    stderr_bits: float | None = None

    def __post_init__(self):
        if not (self.value_bits >= 0.0):
            raise ValueError(f"entropy must be >= 0, got {self.value_bits}")
        has_err = self.stderr_bits is not None
        if has_err != (self.estimator is EstimatorKind.BAYES_MONTE_CARLO):
            raise ValueError("stderr_bits is present iff the estimator is Monte Carlo")
        if has_err and not (self.stderr_bits >= 0.0):
            raise ValueError("stderr_bits must be >= 0")


def _clamp_tiny_negative(value: float) -> float:
    # Rounding can push a mathematically non-negative entropy a few ulps
    # below zero (e.g. near point masses); anything worse is a bug.
    if -1e-9 < value < 0.0:
        return 0.0
    return value


def collision_probability(p: Distribution) -> float:
    """Probability that two independent draws of X coincide: sum p_i^2."""
    terms = np.sort(p.probs * p.probs)
    return float(terms.sum())


def _renyi_bits(probs: np.ndarray, order: RenyiOrder) -> float:
    """Renyi entropy in bits of a bare probability vector."""
    if order.kind == "min":
        return _clamp_tiny_negative(-math.log2(float(probs.max())))
    positive = probs[probs > 0.0]
    if order.kind == "shannon":
        terms = np.sort(xlogy(positive, positive))
        return _clamp_tiny_negative(-float(terms.sum()) / _LN2)
    gamma = order.gamma
    log_sum = float(logsumexp(np.sort(gamma * np.log(positive))))
    return _clamp_tiny_negative(log_sum / ((1.0 - gamma) * _LN2))


def renyi_entropy(p: Distribution, order: RenyiOrder) -> EntropyEstimate:
    """Renyi entropy of an explicit distribution, in bits.

    Finite order gamma gives (1/(1-gamma)) * log2(sum p_i^gamma); the
    Shannon and min-entropy markers give the corresponding limits.
    """
    return EntropyEstimate(
        value_bits=_renyi_bits(p.probs, order),
        order=order,
        estimator=EstimatorKind.PLUGIN,
        n=0,
    )


def order_profile(p: Distribution, orders: list[RenyiOrder]) -> list[EntropyEstimate]:
    """Evaluate ``renyi_entropy`` for each order, preserving input order."""
    if not orders:
        raise ValueError("orders must be non-empty")
    return [renyi_entropy(p, order) for order in orders]


def conditional_collision_entropy(joint: JointHistogram) -> EntropyEstimate:
    """Expected collision entropy of X given Y, from plug-in conditionals.

    Columns are conditioning outcomes; a column with zero total has
    estimated P(Y=y) = 0 and is skipped.
    """
    if joint.n == 0:
        raise EmptyJoint("conditional collision entropy needs n >= 1")
    counts = joint.counts.astype(np.float64)
    column_totals = counts.sum(axis=0)
    terms = []
    for y in range(joint.s_y):
        total = column_totals[y]
        if total == 0.0:
            continue
        conditional = counts[:, y] / total
        collision = float(np.sort(conditional * conditional).sum())
        terms.append((total / joint.n) * (-math.log2(collision)))
    value = float(np.sort(np.array(terms)).sum())
    return EntropyEstimate(
        value_bits=_clamp_tiny_negative(value),
        order=RenyiOrder.finite(2.0),
        estimator=EstimatorKind.PLUGIN,
        n=joint.n,
    )
