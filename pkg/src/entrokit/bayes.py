"""Conjugate Dirichlet-multinomial estimation of Renyi and Shannon entropy.

A Dirichlet prior over the probability simplex is conjugate for
multinomial counts: observing counts n_i moves prior parameters a_i to
posterior parameters c_i = a_i + n_i. Every estimator in this module is
an exact posterior expectation under that Dirichlet posterior.

The central quantity is the posterior moment of the power sum,

    E[sum_i p_i^gamma] = sum_i Gamma(C) Gamma(c_i + gamma)
                               / (Gamma(C + gamma) Gamma(c_i)),

with C = sum_i c_i. The Renyi estimate of order gamma != 1 is
(1/(1-gamma)) * log2 of this moment; its gamma -> 1 limit is the
closed-form posterior mean of Shannon entropy,

    psi(C + 1) - sum_i (c_i / C) psi(c_i + 1)    (nats),

where psi is the digamma function. All Gamma arithmetic is done in the
log domain, so counts up to 1e9 per symbol and alphabets up to 2**16
stay finite, and per-symbol reductions are sorted so that jointly
permuting (base measure, counts) leaves every scalar estimate unchanged
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gammaln, logsumexp

from .entropy import Distribution, EntropyEstimate, EstimatorKind, RenyiOrder, SHANNON
from .errors import AlphabetMismatch, DomainError
from .histogram import Histogram

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class DirichletPrior:
    """Dirichlet prior with concentration ``alpha`` and base measure ``base``.

    Per-symbol parameters are a_i = alpha * base_i; the base measure must
    be strictly positive so every a_i > 0 and unseen symbols keep mass.
    """

    alpha: float
    base: Distribution

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise DomainError(f"concentration alpha must be > 0, got {self.alpha}")
        if np.any(self.base.probs <= 0.0):
            raise DomainError("prior base measure must be strictly positive")

    @classmethod
    def add_one(cls, s: int) -> "DirichletPrior":
        """Uniform base with alpha = s, i.e. one pseudocount per symbol."""
        return cls(float(s), Distribution.uniform(s))

    @classmethod
    def jeffreys(cls, s: int) -> "DirichletPrior":
        """Uniform base with alpha = s/2, i.e. half a pseudocount per symbol."""
        return cls(s / 2.0, Distribution.uniform(s))

    @property
    def s(self) -> int:
        return self.base.s

    @property
    def pseudocounts(self) -> np.ndarray:
        return self.alpha * self.base.probs


@dataclass(frozen=True)
class DirichletPosterior:
    """Dirichlet distribution with parameters c_i > 0 and total C = sum c_i."""

    params: np.ndarray
    total: float = 0.0

    def __post_init__(self):
        params = np.asarray(self.params, dtype=np.float64)
        if params.ndim != 1 or params.size < 1:
            raise ValueError("posterior params must be a non-empty 1-d vector")
        if np.any(params <= 0.0) or not np.all(np.isfinite(params)):
            raise DomainError("posterior params must be finite and > 0")
        params.flags.writeable = False
        object.__setattr__(self, "params", params)
        # Sorted accumulation keeps the total exactly permutation-invariant.
        object.__setattr__(self, "total", float(np.sort(params).sum()))

    @property
    def s(self) -> int:
        return int(self.params.size)

    def updated(self, h: Histogram) -> "DirichletPosterior":
        """Absorb further counts; conjugacy makes this closed under updates."""
        if h.s != self.s:
            raise AlphabetMismatch(f"histogram has s={h.s}, posterior has s={self.s}")
        return DirichletPosterior(self.params + h.counts)


@dataclass(frozen=True)
class MomentEstimate:
    """Posterior mean of sum_i p_i^gamma; ``log_value`` is the primary field."""

    value: float
    log_value: float
    gamma: float


def posterior(prior: DirichletPrior, h: Histogram) -> DirichletPosterior:
    """Bayes update: counts n_i move prior parameters a_i to a_i + n_i."""
    if prior.s != h.s:
        raise AlphabetMismatch(f"prior has s={prior.s}, histogram has s={h.s}")
    return DirichletPosterior(prior.pseudocounts + h.counts)


def moment(post: DirichletPosterior, gamma: float) -> MomentEstimate:
    """Exact posterior mean of sum_i p_i^gamma under a Dirichlet posterior.

    Parameters
    ----------
    post : DirichletPosterior
        Posterior with parameters c_i > 0.
    gamma : float
        Power, > 0. gamma = 1 gives exactly 1 (the p_i sum to 1).

    Returns
    -------
    MomentEstimate
        Computed entirely in the log-Gamma domain with a log-sum-exp
        accumulation, so extreme counts cannot overflow.
    """
    gamma = float(gamma)
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise DomainError(f"moment power gamma must be > 0, got {gamma}")
    c = post.params
    shared = gammaln(post.total) - gammaln(post.total + gamma)
    log_terms = np.sort(shared + gammaln(c + gamma) - gammaln(c))
    log_value = float(logsumexp(log_terms))
    return MomentEstimate(value=math.exp(log_value), log_value=log_value, gamma=gamma)


def renyi_bayes(
    prior: DirichletPrior, h: Histogram, gamma: float
) -> EntropyEstimate:
    """Bayesian Renyi entropy of order gamma != 1, in bits.

    The estimate is (1/(1-gamma)) * log2 E[sum p_i^gamma] under the
    posterior for the observed counts. For the order -> 1 limit use
    ``shannon_bayes``; no closed form is exposed for the min-entropy
    limit (use Monte Carlo or a large finite order as an approximation).
    """
    gamma = float(gamma)
    if gamma == 1.0:
        raise DomainError("gamma = 1 is the Shannon limit; use shannon_bayes")
    est = moment(posterior(prior, h), gamma)
    value = est.log_value / ((1.0 - gamma) * _LN2)
    if -1e-9 < value < 0.0:
        value = 0.0
    return EntropyEstimate(
        value_bits=value,
        order=RenyiOrder.finite(gamma),
        estimator=EstimatorKind.BAYES_CLOSED_FORM,
        n=h.n,
    )


def shannon_bayes(prior: DirichletPrior, h: Histogram) -> EntropyEstimate:
    """Closed-form posterior mean of Shannon entropy, in bits.

    With posterior parameters c_i and C = sum c_i the value in nats is
    psi(C + 1) - sum_i (c_i / C) psi(c_i + 1); this is the gamma -> 1
    limit of ``renyi_bayes``.
    """
    post = posterior(prior, h)
    c = post.params
    terms = np.sort((c / post.total) * digamma(c + 1.0))
    nats = float(digamma(post.total + 1.0) - terms.sum())
    if -1e-9 < nats < 0.0:
        nats = 0.0
    return EntropyEstimate(
        value_bits=nats / _LN2,
        order=SHANNON,
        estimator=EstimatorKind.BAYES_CLOSED_FORM,
        n=h.n,
    )


def collision_bayes(prior: DirichletPrior, h: Histogram) -> EntropyEstimate:
    """Bayesian collision entropy: ``renyi_bayes`` at order 2.

    Named separately because order 2 is the security measure of interest
    for key agreement and privacy amplification.
    """
    return renyi_bayes(prior, h, 2.0)
