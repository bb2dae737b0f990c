"""Independent reference arithmetic used as oracles by the test suite.

Deliberately written from the textbook definitions, step by step, without
reusing any code from the package under test.
"""

import itertools

import numpy as np


def reference_topsis_closeness(values, directions, weights=None):
    """Classical TOPSIS closeness, computed one step at a time.

    values: m x n array; directions: list of 'max'/'min' per column.
    """
    x = np.asarray(values, dtype=float)
    m, n = x.shape
    if weights is None:
        weights = [1.0] * n
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    # step 1: vector normalization, column by column
    r = np.zeros_like(x)
    for j in range(n):
        norm = np.sqrt(sum(x[i, j] ** 2 for i in range(m)))
        for i in range(m):
            r[i, j] = x[i, j] / norm if norm > 0 else 0.0
    # step 2: weighting
    v = r * w
    # step 3: ideal and anti-ideal vectors
    pis = np.array([v[:, j].max() if directions[j] == "max" else v[:, j].min()
                    for j in range(n)])
    nis = np.array([v[:, j].min() if directions[j] == "max" else v[:, j].max()
                    for j in range(n)])
    # step 4: Euclidean separations
    d_pos = np.array([np.sqrt(sum((v[i, j] - pis[j]) ** 2 for j in range(n)))
                      for i in range(m)])
    d_neg = np.array([np.sqrt(sum((v[i, j] - nis[j]) ** 2 for j in range(n)))
                      for i in range(m)])
    # step 5: relative closeness
    closeness = np.zeros(m)
    for i in range(m):
        total = d_pos[i] + d_neg[i]
        closeness[i] = 0.5 if total == 0 else d_neg[i] / total
    return closeness


def brute_force_pareto(values, directions):
    """Non-dominated indices via exhaustive pairwise dominance checks."""
    x = np.asarray(values, dtype=float)
    m, n = x.shape
    sign = [1.0 if d == "max" else -1.0 for d in directions]
    y = x * sign
    keep = set()
    for i in range(m):
        dominated = False
        for j in range(m):
            if j == i:
                continue
            if all(y[j, c] >= y[i, c] for c in range(n)) and \
                    any(y[j, c] > y[i, c] for c in range(n)):
                dominated = True
                break
        if not dominated:
            keep.add(i)
    return keep


def enumerate_wilcoxon_p(d):
    """Exact two-sided p by enumerating all 2^n sign patterns.

    d: nonzero paired differences. Ranks of |d| use average ranks on ties.
    """
    d = np.asarray(d, dtype=float)
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return 1.0
    order = np.abs(d)
    # average ranks computed by hand
    ranks = np.zeros(n)
    for i in range(n):
        less = np.sum(order < order[i])
        equal = np.sum(order == order[i])
        ranks[i] = less + (equal + 1) / 2.0
    w_obs = float(ranks[d > 0].sum())
    count_le = 0
    count_ge = 0
    for signs in itertools.product([0, 1], repeat=n):
        w = sum(r for r, s in zip(ranks, signs) if s)
        # ranks are half-integers, so sums compare exactly in binary floats
        if w <= w_obs:
            count_le += 1
        if w >= w_obs:
            count_ge += 1
    total = 2 ** n
    return min(1.0, 2.0 * min(count_le, count_ge) / total)


def pairwise_disagreement(values):
    """Mean absolute difference over all unordered pairs of set accuracies."""
    pairs = list(itertools.combinations(values, 2))
    return sum(abs(a - b) for a, b in pairs) / len(pairs)
