"""Two-receiver broadcast channels as dense probability tables.

A channel W(y1 y2 | x) is stored as a float array of shape (|X|, |Y1|, |Y2|)
whose rows (fixed x) are probability distributions.  Deterministic channels
get a compact representation mapping each input to its output pair, plus the
bipartite graph on Y1 x Y2 whose edges are the reachable output pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NegativeProbabilityError,
    NotDeterministicError,
    RowNotNormalizedError,
    SizeCapExceededError,
    ValidationError,
)
from .graphs import BipartiteGraph, make_graph

NORMALIZATION_TOL = 1e-9
POINT_MASS_TOL = 1e-12
DEFAULT_ENTRY_CAP = 10**8


@dataclass(frozen=True)
class ChannelTable:
    """Dense channel table, entries probs[x, y1, y2], rows normalized."""

    input_size: int
    out1_size: int
    out2_size: int
    probs: np.ndarray

    def __post_init__(self):
        if self.probs.shape != (self.input_size, self.out1_size, self.out2_size):
            raise DimensionMismatchError(
                f"table shape {self.probs.shape} does not match declared sizes"
            )


@dataclass(frozen=True)
class MarginalTable:
    """Single-receiver view, entries probs[x, y]."""

    input_size: int
    out_size: int
    probs: np.ndarray


@dataclass(frozen=True)
class DeterministicChannel:
    """Channel where input x always produces the output pair pairs[x]."""

    input_size: int
    out1_size: int
    out2_size: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.pairs) != self.input_size:
            raise DimensionMismatchError("need one output pair per input")
        for x, (y1, y2) in enumerate(self.pairs):
            if not (0 <= y1 < self.out1_size and 0 <= y2 < self.out2_size):
                raise ValidationError(f"output pair {self.pairs[x]} of input {x} out of range")

    def to_table(self) -> ChannelTable:
        probs = np.zeros((self.input_size, self.out1_size, self.out2_size))
        for x, (y1, y2) in enumerate(self.pairs):
            probs[x, y1, y2] = 1.0
        return validate_channel(probs)


def validate_channel(table, input_size=None, out1_size=None, out2_size=None,
                     tol: float = NORMALIZATION_TOL) -> ChannelTable:
    """Check shape, nonnegativity, and row normalization; freeze the array."""
    probs = np.asarray(table, dtype=float)
    if probs.ndim != 3:
        raise DimensionMismatchError(f"expected a 3d table, got ndim={probs.ndim}")
    nx, n1, n2 = probs.shape
    for name, declared, actual in (("input", input_size, nx),
                                   ("out1", out1_size, n1),
                                   ("out2", out2_size, n2)):
        if declared is not None and declared != actual:
            raise DimensionMismatchError(f"{name} size {declared} != table axis {actual}")
    if min(nx, n1, n2) < 1:
        raise DimensionMismatchError("alphabets must be nonempty")
    neg = np.argwhere(probs < -tol)
    if len(neg):
        x, y1, y2 = neg[0]
        raise NegativeProbabilityError(int(x), int(y1), int(y2), float(probs[x, y1, y2]))
    row_sums = probs.sum(axis=(1, 2))
    bad = np.argwhere(np.abs(row_sums - 1.0) > tol)
    if len(bad):
        x = int(bad[0][0])
        raise RowNotNormalizedError(x, float(row_sums[x]))
    probs = probs.copy()
    probs[probs < 0] = 0.0  # clip the tolerated sub-tol noise
    probs.setflags(write=False)
    return ChannelTable(nx, n1, n2, probs)


def marginals(w: ChannelTable) -> tuple[MarginalTable, MarginalTable]:
    """Per-receiver marginal tables W1(y1|x) and W2(y2|x)."""
    m1 = w.probs.sum(axis=2)
    m2 = w.probs.sum(axis=1)
    m1.setflags(write=False)
    m2.setflags(write=False)
    return (MarginalTable(w.input_size, w.out1_size, m1),
            MarginalTable(w.input_size, w.out2_size, m2))


def tensor_power(w: ChannelTable, n: int, cap: int = DEFAULT_ENTRY_CAP) -> ChannelTable:
    """n independent uses of w as one channel.

    Composite indices are row-major over the factors with position 0 most
    significant, so input (x_0, ..., x_{n-1}) becomes sum x_i |X|^(n-1-i).
    """
    if n < 1:
        raise ValidationError("tensor power needs n >= 1")
    entries = (w.input_size * w.out1_size * w.out2_size) ** n
    if entries > cap:
        raise SizeCapExceededError(entries, cap)
    result = w.probs
    for _ in range(n - 1):
        result = np.einsum("abc,def->adbecf", result, w.probs).reshape(
            result.shape[0] * w.input_size,
            result.shape[1] * w.out1_size,
            result.shape[2] * w.out2_size,
        )
    return validate_channel(result)


def to_deterministic(w: ChannelTable, tol: float = POINT_MASS_TOL) -> DeterministicChannel:
    """Recover the pair map of a channel whose rows are 0/1 point masses."""
    pairs = []
    for x in range(w.input_size):
        row = w.probs[x]
        ones = np.argwhere(np.abs(row - 1.0) <= tol)
        near_zero = np.abs(row) <= tol
        if len(ones) != 1 or near_zero.sum() != row.size - 1:
            raise NotDeterministicError(x)
        pairs.append((int(ones[0][0]), int(ones[0][1])))
    return DeterministicChannel(w.input_size, w.out1_size, w.out2_size, tuple(pairs))


def channel_graph(dc: DeterministicChannel) -> BipartiteGraph:
    """Bipartite graph on Y1 x Y2 with an edge per reachable output pair."""
    return make_graph(dc.out1_size, dc.out2_size, dc.pairs)
