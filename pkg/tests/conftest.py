"""Shared helpers for the test suites."""

from itertools import combinations

import numpy as np


def brute_direction_value(w1, w2, c1, c2, k, coeff):
    """Exhaustive max-min direction oracle: best of min(A, B) over every
    hypersimplex vertex and every pairwise equalizing mix of two vertices."""
    n = len(w1)
    base1 = coeff * c1
    base2 = coeff * c2 + float(np.sum(w2))
    verts = []
    for comb in combinations(range(n), k):
        I = np.zeros(n)
        I[list(comb)] = 1.0
        a = base1 + float(np.dot(w1, I))
        b = base2 - float(np.dot(w2, I))
        verts.append((a, b))
    best = max(min(a, b) for a, b in verts)
    for (a1, b1), (a2, b2) in combinations(verts, 2):
        d1, d2 = a1 - b1, a2 - b2
        if d1 == d2:
            continue
        theta = d1 / (d1 - d2)
        if 0.0 <= theta <= 1.0:
            best = max(best, (1 - theta) * a1 + theta * a2)
    return best
