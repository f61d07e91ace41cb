"""Independent reference implementations used to freeze expected values.

Nothing here imports the package: expansions are recomputed by direct
quadrant/halving recursion over explicit layout tables, entropies by closed
forms, and chain marginals by literal matrix powers, so agreement with the
library is a real cross-check.
"""

from __future__ import annotations

import math

import numpy as np

# layout[row][col] = (child label, traversal index); row 0 is the top row,
# x grows rightward, y upward.
HILBERT_LAYOUT = {
    "U": [[("L", 1), ("R", 4)], [("U", 2), ("U", 3)]],
    "R": [[("R", 3), ("U", 4)], [("R", 2), ("D", 1)]],
    "L": [[("U", 1), ("L", 2)], [("D", 4), ("L", 3)]],
    "D": [[("D", 3), ("D", 2)], [("L", 4), ("R", 1)]],
}


def hilbert_cells(label: str, k: int) -> list:
    """Traversal order of the level-k square curve, by direct recursion."""
    if k == 0:
        return [(0, 0)]
    half = 2 ** (k - 1)
    by_index = {}
    for row in (0, 1):
        for col in (0, 1):
            child, idx = HILBERT_LAYOUT[label][row][col]
            dx = col * half
            dy = half if row == 0 else 0
            by_index[idx] = [(x + dx, y + dy) for x, y in hilbert_cells(child, k - 1)]
    out = []
    for idx in (1, 2, 3, 4):
        out.extend(by_index[idx])
    return out


def dyadic_cells(k: int, alternating: bool) -> list:
    """Traversal order of the level-k interval, by direct halving."""
    if k == 0:
        return [0]
    half = 2 ** (k - 1)
    lower = dyadic_cells(k - 1, alternating)
    left = list(lower)
    right = [x + half for x in lower]
    if alternating and k % 2 == 1:
        return right + left
    return left + right


def integer_runs(cells) -> int:
    """Number of maximal runs of consecutive integers in a set of 1d cells."""
    xs = sorted(x if isinstance(x, int) else x[0] for x in cells)
    return 1 + sum(1 for a, b in zip(xs, xs[1:]) if b - a > 1)


def binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entropy_bits(probs) -> float:
    return float(sum(-p * math.log2(p) for p in probs if p > 0))


def markov_rate(P) -> float:
    """Entropy rate of a stationary chain: sum_i pi_i H(row_i)."""
    P = np.asarray(P, dtype=float)
    w, v = np.linalg.eig(P.T)
    pi = np.real(v[:, np.argmin(np.abs(w - 1))])
    pi = pi / pi.sum()
    return float(sum(pi[i] * entropy_bits(P[i]) for i in range(len(pi))))


def markov_joint_law(P, pi, cells) -> dict:
    """Exact joint law on sorted 1d cells via literal matrix powers."""
    P = np.asarray(P, dtype=float)
    pi = np.asarray(pi, dtype=float)
    xs = sorted(int(c) if isinstance(c, int) else int(c[0]) for c in cells)
    k = P.shape[0]
    out = {}

    def rec(prefix, prob, pos):
        if prob == 0.0:
            return
        if pos == len(xs):
            out[tuple(prefix)] = out.get(tuple(prefix), 0.0) + prob
            return
        if pos == 0:
            step = pi
            for s in range(k):
                rec(prefix + [s], prob * step[s], pos + 1)
        else:
            gap = xs[pos] - xs[pos - 1]
            M = np.linalg.matrix_power(P, gap)
            for s in range(k):
                rec(prefix + [s], prob * M[prefix[-1], s], pos + 1)

    rec([], 1.0, 0)
    return out


def flip_chain_power_offdiag(q: float, n: int) -> float:
    """n-step flip probability of the symmetric binary chain."""
    return (1 - (1 - 2 * q) ** n) / 2
