"""Block-level source approximation and effective key size.

A symbol stream over a base alphabet of size s0 is modeled through the
distribution of its length-L blocks: entropy per block divided by L
approximates the per-symbol entropy rate, and the rate times a key
length in symbols gives the effective key size in bits. Estimates use
either the plug-in functionals or the Dirichlet-Bayes closed forms over
the block alphabet of size s0**L.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import bayes
from .entropy import Distribution, EstimatorKind, RenyiOrder, renyi_entropy
from .errors import (
    AlphabetMismatch,
    AlphabetTooLarge,
    DomainError,
    EmptyHistogram,
    IndexOutOfAlphabet,
    StreamTooShort,
)
from .histogram import Histogram

# Block alphabets beyond this need sparse counting, which is out of scope.
_MAX_BLOCK_ALPHABET = 1 << 24

PLUGIN = "plugin"
BAYES = "bayes"


class Windowing(str, enum.Enum):
    OVERLAPPING = "overlapping"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class SourceConfig:
    """Block order L, base alphabet size, and windowing mode."""

    order: int
    base_alphabet: int
    windowing: Windowing = Windowing.OVERLAPPING

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("block order L must be >= 1")
        if self.base_alphabet < 1:
            raise ValueError("base alphabet size must be >= 1")
        if self.base_alphabet**self.order > _MAX_BLOCK_ALPHABET:
            raise AlphabetTooLarge(
                f"block alphabet {self.base_alphabet}**{self.order} exceeds "
                f"{_MAX_BLOCK_ALPHABET}"
            )

    @property
    def block_alphabet(self) -> int:
        return self.base_alphabet**self.order


@dataclass(frozen=True)
class RateReport:
    """Entropy rate of a stream under an L-block approximation."""

    order: int
    base_alphabet: int
    grams: int
    entropy_per_gram_bits: float
    rate_bits_per_symbol: float
    estimator: EstimatorKind
    entropy_order: RenyiOrder


@dataclass(frozen=True)
class KeySizeReport:
    """Effective vs nominal size in bits of a key of b symbols."""

    key_length_symbols: int
    rate_bits_per_symbol: float
    effective_bits: float
    nominal_bits: float


def lgram_histogram(stream, cfg: SourceConfig) -> Histogram:
    """Histogram of length-L blocks over the alphabet of size s0**L.

    Overlapping windows step by 1 (length - L + 1 grams); disjoint
    windows step by L (floor(length / L) grams). A block maps to the
    big-endian base-s0 composition of its symbols.
    """
    stream = np.asarray(stream, dtype=np.int64).reshape(-1)
    L = cfg.order
    s0 = cfg.base_alphabet
    if stream.size < L:
        raise StreamTooShort(f"stream of length {stream.size} has no {L}-grams")
    if stream.size and (stream.min() < 0 or stream.max() >= s0):
        raise IndexOutOfAlphabet(f"stream symbol outside alphabet [0, {s0})")
    if cfg.windowing is Windowing.OVERLAPPING:
        windows = np.lib.stride_tricks.sliding_window_view(stream, L)
    else:
        usable = (stream.size // L) * L
        windows = stream[:usable].reshape(-1, L)
    weights = s0 ** np.arange(L - 1, -1, -1, dtype=np.int64)
    grams = windows @ weights
    return Histogram(np.bincount(grams, minlength=cfg.block_alphabet))


def rate_from_histogram(
    grams: Histogram,
    cfg: SourceConfig,
    estimator: str = BAYES,
    prior: bayes.DirichletPrior | None = None,
    order: RenyiOrder | None = None,
) -> RateReport:
    """Entropy rate from an already-built L-gram histogram."""
    if order is None:
        order = RenyiOrder.finite(2.0)
    if estimator == PLUGIN:
        if grams.n == 0:
            raise EmptyHistogram("plug-in rate needs at least one gram")
        per_gram = renyi_entropy(Distribution.from_histogram(grams), order).value_bits
        kind = EstimatorKind.PLUGIN
    elif estimator == BAYES:
        if prior is None:
            prior = bayes.DirichletPrior.add_one(cfg.block_alphabet)
        if prior.s != cfg.block_alphabet:
            raise AlphabetMismatch(
                f"prior has s={prior.s}, block alphabet is {cfg.block_alphabet}"
            )
        if order.kind == "shannon":
            per_gram = bayes.shannon_bayes(prior, grams).value_bits
        elif order.kind == "finite":
            per_gram = bayes.renyi_bayes(prior, grams, order.gamma).value_bits
        else:
            raise DomainError(
                "no closed-form Bayesian min-entropy exists; use the plug-in "
                "estimator or a large finite order"
            )
        kind = EstimatorKind.BAYES_CLOSED_FORM
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    return RateReport(
        order=cfg.order,
        base_alphabet=cfg.base_alphabet,
        grams=grams.n,
        entropy_per_gram_bits=per_gram,
        rate_bits_per_symbol=per_gram / cfg.order,
        estimator=kind,
        entropy_order=order,
    )


def entropy_rate(
    stream,
    cfg: SourceConfig,
    estimator: str = BAYES,
    prior: bayes.DirichletPrior | None = None,
    order: RenyiOrder | None = None,
) -> RateReport:
    """Per-symbol entropy rate of a stream under the L-block approximation."""
    return rate_from_histogram(lgram_histogram(stream, cfg), cfg, estimator, prior, order)


def convergence_curve(
    stream,
    cfg: SourceConfig,
    checkpoints,
    estimator: str = BAYES,
    prior: bayes.DirichletPrior | None = None,
    order: RenyiOrder | None = None,
) -> list[tuple[int, float]]:
    """Entropy rate on growing stream prefixes, to exhibit convergence.

    Checkpoints must be strictly increasing prefix lengths, each >= L and
    at most the stream length.
    """
    stream = np.asarray(stream, dtype=np.int64).reshape(-1)
    points = [int(c) for c in checkpoints]
    if points != sorted(set(points)):
        raise ValueError("checkpoints must be strictly increasing")
    curve = []
    for n in points:
        if n < cfg.order:
            raise StreamTooShort(f"checkpoint {n} is shorter than L={cfg.order}")
        if n > stream.size:
            raise StreamTooShort(f"checkpoint {n} exceeds stream length {stream.size}")
        report = entropy_rate(stream[:n], cfg, estimator, prior, order)
        curve.append((n, report.rate_bits_per_symbol))
    return curve


def effective_key_size(rate: RateReport, key_length_symbols: int) -> KeySizeReport:
    """Effective bits of a key of b symbols: b times the entropy rate.

    The nominal size is b * log2(s0), the key's raw length in bits.
    """
    if key_length_symbols < 1:
        raise ValueError("key length must be >= 1 symbol")
    return KeySizeReport(
        key_length_symbols=key_length_symbols,
        rate_bits_per_symbol=rate.rate_bits_per_symbol,
        effective_bits=key_length_symbols * rate.rate_bits_per_symbol,
        nominal_bits=key_length_symbols * math.log2(rate.base_alphabet),
    )
