"""Privacy-preserving exact edit distance via shared dynamic programming.

Both strings live as per-character arithmetic shares over Z_2^16. Phase 1
computes the full L x L mismatch matrix in 3 rounds (stacked equality, one
conversion, local complement). Phase 2 sweeps the 2L - 1 anti-diagonals of
the DP table; every cell of a diagonal is independent, so each diagonal is
a single batched 3-Min (4 rounds), giving exactly 8L - 1 rounds total.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dealer import Dealer, MaterialStore, Need
from .errors import DomainError, ShapeError
from .protocols import (
    b2a,
    b2a_manifest,
    equality,
    equality_manifest,
    min3,
    min3_manifest,
)
from .ring import (
    Share,
    SharePair,
    Z16,
    add,
    concat_pairs,
    const_add,
    const_pair,
    neg,
    slice_pair,
    split_pair,
)

ALPHABET = 4  # characters encoded 0..3 (A, T, G, C)
RING = Z16
MAX_LENGTH = 1 << 13  # distances stay far below the comparison domain


@dataclass
class GenomeShareString:
    """P strings of length L, character shares flattened row-major."""

    length: int
    pairs: int
    shares: SharePair

    def __post_init__(self):
        if not 1 <= self.length <= MAX_LENGTH:
            raise DomainError(f"length {self.length} outside [1, {MAX_LENGTH}]")
        if self.shares[0].ring != RING:
            raise DomainError("genome shares must live over Z_2^16")
        if len(self.shares[0]) != self.length * self.pairs:
            raise ShapeError("share batch does not match length * pairs")


def encode_strings(strings) -> np.ndarray:
    """Validate and stack plaintext code sequences into a (P, L) array."""
    arr = np.atleast_2d(np.asarray(strings, dtype=np.uint64))
    if arr.size and arr.max() >= ALPHABET:
        raise DomainError(f"character codes must be < {ALPHABET}")
    return arr


def share_strings(strings, dealer: Dealer) -> GenomeShareString:
    arr = encode_strings(strings)
    pairs, length = arr.shape
    return GenomeShareString(length, pairs, dealer.share_input(arr.ravel(), RING))


def _gather(pair: SharePair, idx: np.ndarray) -> SharePair:
    """Party-local fancy indexing: pure data movement, no communication."""
    ring = pair[0].ring
    return tuple(Share(i, ring, pair[i].values[idx]) for i in (0, 1))


def _diag_cells(length: int, d: int) -> list[tuple[int, int]]:
    return [(i, d - i) for i in range(max(1, d - length), min(length, d - 1) + 1)]


def mismatch_matrix(store: MaterialStore, s: GenomeShareString,
                    t: GenomeShareString):
    """Arithmetic shares of e[i][j] = 0 iff s[i] == t[j], for every cell of
    every string pair; cell (i, j) occupies segment (i*L + j) * P. 3 rounds."""
    if (s.length, s.pairs) != (t.length, t.pairs):
        raise ShapeError("string collections must have equal shape")
    length, pairs = s.length, s.pairs
    ii, jj = np.meshgrid(np.arange(length), np.arange(length), indexing="ij")
    p_base = np.arange(pairs) * length
    s_idx = (p_base[None, :] + ii.ravel()[:, None]).ravel()
    t_idx = (p_base[None, :] + jj.ravel()[:, None]).ravel()
    eq = yield from equality(store, _gather(s.shares, s_idx), _gather(t.shares, t_idx))
    m = yield from b2a(store, eq, RING)
    return const_add(1, neg(m))  # e = 1 - [equal]


def mismatch_manifest(length: int, pairs: int = 1) -> list[Need]:
    batch = length * length * pairs
    return equality_manifest(RING, batch) + b2a_manifest(RING, batch)


def edit_distance(store: MaterialStore, s: GenomeShareString,
                  t: GenomeShareString):
    """Levenshtein distance of each string pair, as a Z_2^16 share of
    batch P. Exactly 8L - 1 rounds."""
    length, pairs = s.length, s.pairs
    e = yield from mismatch_matrix(store, s, t)

    def e_cell(i, j):  # 1-based DP indices
        off = ((i - 1) * length + (j - 1)) * pairs
        return slice_pair(e, off, off + pairs)

    dp = {}
    for i in range(length + 1):
        dp[(i, 0)] = const_pair(i, RING, pairs)
    for j in range(1, length + 1):
        dp[(0, j)] = const_pair(j, RING, pairs)

    for d in range(2, 2 * length + 1):
        cells = _diag_cells(length, d)
        up = concat_pairs([const_add(1, dp[(i - 1, j)]) for i, j in cells])
        left = concat_pairs([const_add(1, dp[(i, j - 1)]) for i, j in cells])
        diag = concat_pairs([add(dp[(i - 1, j - 1)], e_cell(i, j)) for i, j in cells])
        best = yield from min3(store, [up, left, diag])
        for (i, j), part in zip(cells, split_pair(best, len(cells))):
            dp[(i, j)] = part
    return dp[(length, length)]


def edit_distance_manifest(length: int, pairs: int = 1) -> list[Need]:
    needs = mismatch_manifest(length, pairs)
    for d in range(2, 2 * length + 1):
        needs += min3_manifest(RING, len(_diag_cells(length, d)) * pairs)
    return needs


def edit_distance_rounds(length: int) -> int:
    return 8 * length - 1
