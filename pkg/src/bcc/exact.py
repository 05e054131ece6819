"""Exact small-instance solvers by explicit enumeration.

Joint and sum success are maximized by enumerating deterministic decoder
pairs (k1^|Y1| * k2^|Y2| candidates) and optimizing the encoder cell by cell;
per-cell optima come from precomputed subset-sum tables, so each candidate
costs k1*k2 lookups.  The densest-quotient solver shares the machinery with
an adjacency indicator table.  The decoder-box solver enumerates
deterministic encoders and solves one linear program per encoder.

Ties between optimal candidates resolve to the lexicographically smallest
assignment tuple, scanning first-decoder (or left-partition) assignments in
the outer position.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .channels import ChannelTable, DeterministicChannel, marginals
from .errors import DimensionMismatchError, EnumerationCapExceededError, SizeCapExceededError
from .graphs import BipartiteGraph, Partition
from .nsprograms import build_decoder_box_lp
from .simplex import lp_solve

DEFAULT_ENUM_CAP = 10**7
TABLE_ENTRY_CAP = 10**8


@dataclass(frozen=True)
class Code:
    """Deterministic code: encoder cell map plus one decoder per receiver."""

    k1: int
    k2: int
    encoder: tuple[tuple[int, ...], ...]  # encoder[i1][i2] = input symbol
    decoder1: tuple[int, ...]             # decoder1[y1] = decoded first message
    decoder2: tuple[int, ...]


@dataclass
class SolveReport:
    value: float
    witness: object | None
    enumerated: int


def _check_code(w: ChannelTable, code: Code):
    enc = np.asarray(code.encoder, dtype=int)
    if enc.shape != (code.k1, code.k2):
        raise DimensionMismatchError("encoder shape does not match (k1, k2)")
    if enc.size and (enc.min() < 0 or enc.max() >= w.input_size):
        raise DimensionMismatchError("encoder symbol out of range")
    if len(code.decoder1) != w.out1_size or len(code.decoder2) != w.out2_size:
        raise DimensionMismatchError("decoder length does not match output alphabet")
    if any(d < 0 or d >= code.k1 for d in code.decoder1):
        raise DimensionMismatchError("decoder1 message out of range")
    if any(d < 0 or d >= code.k2 for d in code.decoder2):
        raise DimensionMismatchError("decoder2 message out of range")
    return enc


def _onehot(assignment, num_parts):
    out = np.zeros((len(assignment), num_parts))
    out[np.arange(len(assignment)), list(assignment)] = 1.0
    return out


def joint_success(w: ChannelTable, code: Code) -> float:
    """Probability that both receivers decode a uniform message pair."""
    enc = _check_code(w, code)
    d1 = _onehot(code.decoder1, code.k1)
    d2 = _onehot(code.decoder2, code.k2)
    cell = np.einsum("yk,xyz,zl->xkl", d1, w.probs, d2)
    i1, i2 = np.indices((code.k1, code.k2))
    return float(cell[enc, i1, i2].sum() / (code.k1 * code.k2))


def sum_success(w: ChannelTable, code: Code) -> float:
    """Average of the two receivers' individual success probabilities."""
    enc = _check_code(w, code)
    w1, w2 = marginals(w)
    m1 = w1.probs @ _onehot(code.decoder1, code.k1)
    m2 = w2.probs @ _onehot(code.decoder2, code.k2)
    i1, i2 = np.indices((code.k1, code.k2))
    total = m1[enc, i1].sum() + m2[enc, i2].sum()
    return float(total / (2 * code.k1 * code.k2))


def _subset_sums(mat: np.ndarray) -> np.ndarray:
    """Sum over subsets of the last axis: out[..., s] = sum of mat[..., b] for b in s."""
    nb = mat.shape[-1]
    out = np.zeros(mat.shape[:-1] + (1 << nb,))
    for s in range(1, 1 << nb):
        low = s & -s
        out[..., s] = out[..., s ^ low] + mat[..., low.bit_length() - 1]
    return out


def _pair_subset_table(mat: np.ndarray) -> np.ndarray:
    """out[s1, s2] = sum of mat[a, b] over a in s1, b in s2."""
    over_b = _subset_sums(mat)                # (A, 2^B)
    return _subset_sums(over_b.T).T           # (2^A, 2^B)


def _assignment_rows(num_items: int, num_parts: int) -> np.ndarray:
    """All assignments as rows, lexicographic with position 0 most significant."""
    count = num_parts**num_items
    codes = np.arange(count, dtype=np.int64)
    out = np.empty((count, num_items), dtype=np.int64)
    for pos in range(num_items):
        power = num_parts ** (num_items - 1 - pos)
        out[:, pos] = (codes // power) % num_parts
    return out


def _part_masks(rows: np.ndarray, num_parts: int) -> np.ndarray:
    bits = 1 << np.arange(rows.shape[1], dtype=np.int64)
    masks = np.empty((rows.shape[0], num_parts), dtype=np.int64)
    for part in range(num_parts):
        masks[:, part] = ((rows == part) * bits).sum(axis=1)
    return masks


def _best_pair(table: np.ndarray, masks1: np.ndarray, masks2: np.ndarray,
               progress=None) -> tuple[float, int, int]:
    """Maximize sum of table[masks1[a, i1], masks2[b, i2]] over pairs (a, b).

    Scans a-major so the first maximum is the lexicographically smallest
    witness; chunking keeps the value grid within memory.
    """
    n1c, k1 = masks1.shape
    n2c, k2 = masks2.shape
    best_val, best_a, best_b = -np.inf, -1, -1
    chunk = max(1, int(5_000_000 // max(n2c, 1)))
    for a0 in range(0, n1c, chunk):
        m1 = masks1[a0:a0 + chunk]
        grid = np.zeros((m1.shape[0], n2c))
        for i1 in range(k1):
            col = m1[:, i1][:, None]
            for i2 in range(k2):
                grid += table[col, masks2[:, i2][None, :]]
        flat = int(np.argmax(grid))
        val = float(grid.flat[flat])
        if val > best_val:
            best_val = val
            best_a = a0 + flat // n2c
            best_b = flat % n2c
        if progress is not None:
            progress(min(a0 + chunk, n1c) * n2c, n1c * n2c)
    return best_val, best_a, best_b


def _guard_enumeration(candidates: int, cap: int, table_bits: int):
    if candidates > cap:
        raise EnumerationCapExceededError(candidates, cap)
    if 1 << table_bits > TABLE_ENTRY_CAP:
        raise SizeCapExceededError(1 << table_bits, TABLE_ENTRY_CAP)


def solve_joint(w: ChannelTable, k1: int, k2: int, cap: int = DEFAULT_ENUM_CAP,
                progress=None) -> SolveReport:
    """Best deterministic code for joint success, by decoder enumeration."""
    n1, n2 = w.out1_size, w.out2_size
    candidates = k1**n1 * k2**n2
    _guard_enumeration(candidates, cap, n1 + n2)

    table = np.full((1 << n1, 1 << n2), -np.inf)
    argmax_x = np.zeros((1 << n1, 1 << n2), dtype=np.int64)
    for x in range(w.input_size):
        gx = _pair_subset_table(w.probs[x])
        better = gx > table
        table[better] = gx[better]
        argmax_x[better] = x

    rows1 = _assignment_rows(n1, k1)
    rows2 = _assignment_rows(n2, k2)
    masks1 = _part_masks(rows1, k1)
    masks2 = _part_masks(rows2, k2)
    best_val, a, b = _best_pair(table, masks1, masks2, progress)

    enc = tuple(tuple(int(argmax_x[masks1[a, i1], masks2[b, i2]]) for i2 in range(k2))
                for i1 in range(k1))
    code = Code(k1, k2, enc, tuple(int(v) for v in rows1[a]),
                tuple(int(v) for v in rows2[b]))
    return SolveReport(best_val / (k1 * k2), code, candidates)


def solve_sum(w: ChannelTable, k1: int, k2: int, cap: int = DEFAULT_ENUM_CAP,
              progress=None) -> SolveReport:
    """Best deterministic code for sum success, by decoder enumeration."""
    n1, n2 = w.out1_size, w.out2_size
    candidates = k1**n1 * k2**n2
    _guard_enumeration(candidates, cap, n1 + n2)

    w1, w2 = marginals(w)
    g1 = _subset_sums(w1.probs)  # (|X|, 2^|Y1|)
    g2 = _subset_sums(w2.probs)
    table = np.full((1 << n1, 1 << n2), -np.inf)
    argmax_x = np.zeros((1 << n1, 1 << n2), dtype=np.int64)
    for x in range(w.input_size):
        gx = 0.5 * (g1[x][:, None] + g2[x][None, :])
        better = gx > table
        table[better] = gx[better]
        argmax_x[better] = x

    rows1 = _assignment_rows(n1, k1)
    rows2 = _assignment_rows(n2, k2)
    masks1 = _part_masks(rows1, k1)
    masks2 = _part_masks(rows2, k2)
    best_val, a, b = _best_pair(table, masks1, masks2, progress)

    enc = tuple(tuple(int(argmax_x[masks1[a, i1], masks2[b, i2]]) for i2 in range(k2))
                for i1 in range(k1))
    code = Code(k1, k2, enc, tuple(int(v) for v in rows1[a]),
                tuple(int(v) for v in rows2[b]))
    return SolveReport(best_val / (k1 * k2), code, candidates)


def solve_dqg(g: BipartiteGraph, k1: int, k2: int, cap: int = DEFAULT_ENUM_CAP,
              progress=None) -> SolveReport:
    """Densest quotient: maximize quotient edges over all partition pairs."""
    v1, v2 = g.left_size, g.right_size
    candidates = k1**v1 * k2**v2
    _guard_enumeration(candidates, cap, v1 + v2)

    adj = np.zeros((v1, v2))
    for u, v in g.edges():
        adj[u, v] = 1.0
    table = (_pair_subset_table(adj) > 0).astype(float)

    rows1 = _assignment_rows(v1, k1)
    rows2 = _assignment_rows(v2, k2)
    masks1 = _part_masks(rows1, k1)
    masks2 = _part_masks(rows2, k2)
    best_val, a, b = _best_pair(table, masks1, masks2, progress)

    witness = (Partition(v1, k1, tuple(int(v) for v in rows1[a])),
               Partition(v2, k2, tuple(int(v) for v in rows2[b])))
    return SolveReport(int(round(best_val)), witness, candidates)


def solve_ns_dec(w: ChannelTable, k1: int, k2: int, objective: str = "joint",
                 cap: int = DEFAULT_ENUM_CAP, exact: bool = False,
                 progress=None) -> SolveReport:
    """Best deterministic encoder with an optimal shared decoder box.

    For each encoder the box optimum is a linear program; the overall optimum
    over stochastic encoders is attained at a deterministic one because the
    objective is bilinear, so enumerating |X|^(k1 k2) encoders is exhaustive.
    """
    nx = w.input_size
    candidates = nx ** (k1 * k2)
    if candidates > cap:
        raise EnumerationCapExceededError(candidates, cap)

    best_val, best_enc = None, None
    done = 0
    for flat in product(range(nx), repeat=k1 * k2):
        enc = np.asarray(flat, dtype=int).reshape(k1, k2)
        sol = lp_solve(build_decoder_box_lp(w, enc, k1, k2, objective), exact=exact)
        if best_val is None or sol.value > best_val:
            best_val = sol.value
            best_enc = tuple(tuple(int(v) for v in row) for row in enc)
        done += 1
        if progress is not None:
            progress(done, candidates)
    return SolveReport(best_val, best_enc, candidates)


def code_from_partitions(dc: DeterministicChannel, p1: Partition, p2: Partition) -> Code:
    """Turn a partition pair into a code for the underlying channel.

    Decoders output the part index of the received symbol; each message cell
    encodes with the smallest input landing in its part pair, or input 0 when
    the cell is empty (an empty cell cannot succeed under any input).
    """
    if p1.ground_size != dc.out1_size or p2.ground_size != dc.out2_size:
        raise DimensionMismatchError("partitions must cover the output alphabets")
    k1, k2 = p1.num_parts, p2.num_parts
    enc = [[ -1 ] * k2 for _ in range(k1)]
    for x, (y1, y2) in enumerate(dc.pairs):
        a, b = p1.assignment[y1], p2.assignment[y2]
        if enc[a][b] < 0:
            enc[a][b] = x
    encoder = tuple(tuple(v if v >= 0 else 0 for v in row) for row in enc)
    return Code(k1, k2, encoder, p1.assignment, p2.assignment)
