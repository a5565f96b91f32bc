"""Symbol-count ingestion.

Everything downstream (plug-in functionals, Bayesian estimators, source
models) consumes the two count structures defined here. Alphabet size is
always declared explicitly, never inferred from the largest symbol seen:
zero-count symbols change every estimator, so silent inference is unsafe.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateSymbol,
    EmptyHistogram,
    IndexOutOfAlphabet,
    NegativeCount,
    ParseError,
)

_COUNT_RE = re.compile(r"^-?[0-9]+$")

# Raw-byte symbolization is limited to widths that tile a byte evenly.
SYMBOL_BITS = (1, 2, 4, 8)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Histogram:
    """Observed counts over an alphabet of ``s`` symbols.

    Immutable after construction; ``s`` and ``n`` are derived from
    ``counts``. Totals up to 2**63 - 1 are supported exactly.
    """

    counts: np.ndarray
    labels: tuple[str, ...] | None = None
    s: int = 0
    n: int = 0

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size < 1:
            raise ValueError("counts must be a non-empty 1-d vector")
        if np.any(counts < 0):
            raise NegativeCount("histogram counts must be non-negative")
        object.__setattr__(self, "counts", _freeze(counts))
        object.__setattr__(self, "s", int(counts.size))
        object.__setattr__(self, "n", int(counts.sum()))
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.s:
                raise ValueError("labels must have one entry per symbol")
            if len(set(labels)) != self.s:
                raise DuplicateSymbol("symbol labels must be distinct")
            object.__setattr__(self, "labels", labels)

    def frequencies(self) -> np.ndarray:
        """Empirical frequencies counts / n. Requires n >= 1."""
        if self.n == 0:
            raise EmptyHistogram("histogram has no observations")
        return self.counts / self.n


@dataclass(frozen=True, eq=False)
class JointHistogram:
    """Counts over symbol pairs; rows index X, columns index Y."""

    counts: np.ndarray
    labels_x: tuple[str, ...] | None = None
    labels_y: tuple[str, ...] | None = None
    s_x: int = 0
    s_y: int = 0
    n: int = 0

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.size < 1:
            raise ValueError("joint counts must be a non-empty 2-d matrix")
        if np.any(counts < 0):
            raise NegativeCount("joint counts must be non-negative")
        object.__setattr__(self, "counts", _freeze(counts))
        object.__setattr__(self, "s_x", int(counts.shape[0]))
        object.__setattr__(self, "s_y", int(counts.shape[1]))
        object.__setattr__(self, "n", int(counts.sum()))
        for attr, labels, size in (
            ("labels_x", self.labels_x, self.s_x),
            ("labels_y", self.labels_y, self.s_y),
        ):
            if labels is not None:
                labels = tuple(labels)
                if len(labels) != size or len(set(labels)) != size:
                    raise DuplicateSymbol(f"{attr} must be {size} distinct names")
                object.__setattr__(self, attr, labels)


def from_samples(samples, s: int) -> Histogram:
    """Count occurrences of each symbol index in ``samples``.

    Every sample must lie in [0, s); the alphabet size is the caller's
    declaration, not an inference.
    """
    if s < 1:
        raise ValueError("alphabet size must be >= 1")
    arr = np.asarray(samples, dtype=np.int64)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size:
        lo, hi = int(arr.min()), int(arr.max())
        if lo < 0 or hi >= s:
            raise IndexOutOfAlphabet(
                f"sample index {lo if lo < 0 else hi} outside alphabet [0, {s})"
            )
    return Histogram(np.bincount(arr, minlength=s))


def from_counts_csv(text: str) -> Histogram:
    """Parse a counts CSV: one ``symbol,count`` record per line, no header.

    Symbols are arbitrary non-empty comma-free strings and must be
    distinct; counts are base-10 non-negative integers.
    """
    labels: list[str] = []
    counts: list[int] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError("expected exactly one 'symbol,count' pair", lineno)
        symbol, count_text = parts
        if not symbol:
            raise ParseError("empty symbol name", lineno)
        if not _COUNT_RE.match(count_text):
            raise ParseError(f"malformed count {count_text!r}", lineno)
        count = int(count_text)
        if count < 0:
            raise NegativeCount(f"line {lineno}: negative count for {symbol!r}")
        if symbol in seen:
            raise DuplicateSymbol(f"line {lineno}: symbol {symbol!r} repeated")
        seen.add(symbol)
        labels.append(symbol)
        counts.append(count)
    if not counts:
        raise ParseError("counts file contains no records", None)
    return Histogram(np.array(counts, dtype=np.int64), labels=tuple(labels))


def from_joint_counts_csv(text: str) -> JointHistogram:
    """Parse a joint counts CSV of ``x,y,count`` triples.

    Absent pairs default to 0. Alphabets are ordered by first appearance
    of each x and y label.
    """
    xs: dict[str, int] = {}
    ys: dict[str, int] = {}
    entries: dict[tuple[str, str], int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError("expected an 'x,y,count' triple", lineno)
        x, y, count_text = parts
        if not x or not y:
            raise ParseError("empty symbol name", lineno)
        if not _COUNT_RE.match(count_text):
            raise ParseError(f"malformed count {count_text!r}", lineno)
        count = int(count_text)
        if count < 0:
            raise NegativeCount(f"line {lineno}: negative count for ({x!r},{y!r})")
        if (x, y) in entries:
            raise DuplicateSymbol(f"line {lineno}: pair ({x!r},{y!r}) repeated")
        xs.setdefault(x, len(xs))
        ys.setdefault(y, len(ys))
        entries[(x, y)] = count
    if not entries:
        raise ParseError("joint counts file contains no records", None)
    counts = np.zeros((len(xs), len(ys)), dtype=np.int64)
    for (x, y), count in entries.items():
        counts[xs[x], ys[y]] = count
    return JointHistogram(counts, labels_x=tuple(xs), labels_y=tuple(ys))


def symbols_from_bytes(data: bytes, symbol_bits: int) -> np.ndarray:
    """Split a byte stream MSB-first into ``symbol_bits``-wide symbols.

    Bit-slicing is most-significant-bit-first so reports are bit-exact
    across implementations.
    """
    if symbol_bits not in SYMBOL_BITS:
        raise ValueError(f"symbol_bits must be one of {SYMBOL_BITS}")
    raw = np.frombuffer(data, dtype=np.uint8)
    if symbol_bits == 8:
        return raw.astype(np.int64)
    per_byte = 8 // symbol_bits
    mask = (1 << symbol_bits) - 1
    out = np.empty(raw.size * per_byte, dtype=np.int64)
    for k in range(per_byte):
        shift = 8 - symbol_bits * (k + 1)
        out[k::per_byte] = (raw >> shift) & mask
    return out


def from_raw_bytes(data: bytes, symbol_bits: int) -> Histogram:
    """Histogram of a raw byte stream under MSB-first bit slicing."""
    symbols = symbols_from_bytes(data, symbol_bits)
    return from_samples(symbols, 2**symbol_bits)


def marginals(joint: JointHistogram) -> tuple[Histogram, Histogram]:
    """Row-sum (X) and column-sum (Y) marginal histograms of a joint table."""
    x = Histogram(joint.counts.sum(axis=1), labels=joint.labels_x)
    y = Histogram(joint.counts.sum(axis=0), labels=joint.labels_y)
    return x, y


def counts_to_csv(h: Histogram) -> str:
    """Serialize a histogram in the counts-CSV format (round-trippable).

    Histograms without labels get decimal symbol indices as labels.
    """
    labels = h.labels if h.labels is not None else tuple(str(i) for i in range(h.s))
    return "".join(f"{sym},{int(c)}\n" for sym, c in zip(labels, h.counts))
