"""Shared plaintext oracles and helpers for the test suite."""
import numpy as np


def edit_distance_oracle(a, b) -> int:
    """Classic dynamic-programming Levenshtein distance."""
    la, lb = len(a), len(b)
    row = np.arange(lb + 1)
    for i in range(1, la + 1):
        prev = row.copy()
        row[0] = i
        for j in range(1, lb + 1):
            row[j] = min(prev[j] + 1, row[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] != b[j - 1]))
    return int(row[lb])


def msb_index(v: int) -> int:
    """Index of the most significant set bit, or -1 for zero."""
    return v.bit_length() - 1
