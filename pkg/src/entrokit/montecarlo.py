"""Monte Carlo estimation on the Dirichlet posterior.

Sampling the posterior exactly (no MCMC) gives two estimators: the
sample mean of the power sum ``sum_i p_i^gamma``, which cross-validates
the closed form in :mod:`entrokit.bayes`, and the sample distribution of
the entropy itself, which yields a posterior mean, standard error, and
credible quantiles for any order including min-entropy.

Reproducibility contract: the generator is Philox (philox4x64, counter
based, published reference output). Chunk ``i`` of a run owns the
substream keyed ``seed XOR i``, and draws are generated in fixed-size
row blocks, so results are bit-identical for a given (seed, samples,
chunks) regardless of execution interleaving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .bayes import DirichletPosterior
from .entropy import Distribution, RenyiOrder
from .errors import DomainError

_LN2 = math.log(2.0)

GENERATOR_NAME = "philox4x64"

# Rows per generation block; fixed as a function of the alphabet size so
# the draw stream is independent of memory pressure.
_BLOCK_ELEMENTS = 1 << 18

_MAX_SAMPLES = 10**7


@dataclass(frozen=True)
class McConfig:
    """Sample count, seed, and chunk partition for one Monte Carlo run."""

    samples: int = 10000
    seed: int = 0
    chunks: int = 1

    def __post_init__(self):
        if not (2 <= self.samples <= _MAX_SAMPLES):
            raise ValueError(f"samples must be in [2, {_MAX_SAMPLES}]")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not (1 <= self.chunks <= self.samples):
            raise ValueError("chunks must be in [1, samples]")


@dataclass(frozen=True)
class McResult:
    """Sample mean, standard error, and optional credible quantiles."""

    mean: float
    stderr: float
    samples: int
    quantiles: tuple[float, float, float] | None = None  # 2.5%, 50%, 97.5%


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed ^ chunk_index))


def _chunk_sizes(samples: int, chunks: int) -> list[int]:
    base, extra = divmod(samples, chunks)
    return [base + (1 if i < extra else 0) for i in range(chunks)]


def _draw_block(rng: np.random.Generator, params: np.ndarray, rows: int) -> np.ndarray:
    """One block of Dirichlet draws, one draw per row.

    Independent Gamma(c_i, 1) variates normalized by their row sum; for
    c_i < 1 the boost identity Gamma(c) = Gamma(c+1) * U^(1/c) avoids
    rejection pathologies at small shape.
    """
    small = params < 1.0
    shapes = np.where(small, params + 1.0, params)
    gammas = rng.standard_gamma(shapes, size=(rows, params.size))
    if small.any():
        u = rng.random(size=(rows, int(small.sum())))
        gammas[:, small] *= u ** (1.0 / params[small])
    return gammas / gammas.sum(axis=1, keepdims=True)


def _block_rows(s: int) -> int:
    return max(1, _BLOCK_ELEMENTS // s)


def sample_dirichlet(
    post: DirichletPosterior, rng: np.random.Generator
) -> Distribution:
    """One exact draw from the posterior; marginally p_i ~ Beta(c_i, C - c_i)."""
    return Distribution(_draw_block(rng, post.params, 1)[0])


def _statistic_over_draws(post, cfg: McConfig, statistic) -> np.ndarray:
    """Evaluate ``statistic`` on every posterior draw, chunk by chunk."""
    values = np.empty(cfg.samples, dtype=np.float64)
    rows_per_block = _block_rows(post.s)
    offset = 0
    for index, size in enumerate(_chunk_sizes(cfg.samples, cfg.chunks)):
        rng = _chunk_rng(cfg.seed, index)
        remaining = size
        while remaining > 0:
            rows = min(rows_per_block, remaining)
            block = _draw_block(rng, post.params, rows)
            values[offset : offset + rows] = statistic(block)
            offset += rows
            remaining -= rows
    return values


def _summarize(values: np.ndarray, with_quantiles: bool) -> McResult:
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(values.size))
    quantiles = None
    if with_quantiles:
        q = np.quantile(np.sort(values), [0.025, 0.5, 0.975])
        quantiles = (float(q[0]), float(q[1]), float(q[2]))
    return McResult(mean=mean, stderr=stderr, samples=int(values.size), quantiles=quantiles)


def estimate_moment(
    post: DirichletPosterior, gamma: float, cfg: McConfig
) -> McResult:
    """Monte Carlo mean of sum_i p_i^gamma over posterior draws.

    Deterministic given (seed, samples, chunks). At gamma = 1 the
    statistic is identically 1 (the p_i sum to 1), so the exact constant
    is reported rather than float rounding noise.
    """
    gamma = float(gamma)
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise DomainError(f"moment power gamma must be > 0, got {gamma}")
    if gamma == 1.0:
        return McResult(mean=1.0, stderr=0.0, samples=cfg.samples, quantiles=None)
    values = _statistic_over_draws(post, cfg, lambda block: (block**gamma).sum(axis=1))
    return _summarize(values, with_quantiles=False)


def _entropy_bits_rows(block: np.ndarray, order: RenyiOrder) -> np.ndarray:
    """Row-wise Renyi entropy in bits of a matrix of probability vectors."""
    if order.kind == "min":
        return -np.log2(block.max(axis=1))
    if order.kind == "shannon":
        return -xlogy(block, block).sum(axis=1) / _LN2
    gamma = order.gamma
    with np.errstate(divide="ignore"):  # zero draws contribute zero terms
        powers = np.where(block > 0.0, block**gamma, 0.0)
    return np.log(powers.sum(axis=1)) / ((1.0 - gamma) * _LN2)


def estimate_entropy_posterior(
    post: DirichletPosterior, order: RenyiOrder, cfg: McConfig
) -> McResult:
    """Posterior mean, standard error, and quantiles of the entropy itself.

    Works for every order, including the min-entropy limit that has no
    closed form; for the Shannon order the mean is the sampling oracle
    for the digamma formula in :func:`entrokit.bayes.shannon_bayes`.
    """
    values = _statistic_over_draws(
        post, cfg, lambda block: _entropy_bits_rows(block, order)
    )
    return _summarize(values, with_quantiles=True)
