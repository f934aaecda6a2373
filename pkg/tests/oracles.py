"""Brute-force references that share no code with the package under test."""

import itertools


def nearest(p, locs):
    return min(abs(p - l) for l in locs)


def dense_grid(m=10001):
    return [i / (m - 1) for i in range(m)]


def grid_min(f, m=10001):
    """Minimum of f over an m-point grid on [0,1]."""
    return min(f(t) for t in dense_grid(m))


def assignments(n, k):
    """Every map of n points into at most k clusters."""
    return itertools.product(range(k), repeat=n)


def brute_kcenter(points, k):
    best = float("inf")
    for labels in assignments(len(points), k):
        worst = 0.0
        for c in range(k):
            block = [p for p, l in zip(points, labels) if l == c]
            if block:
                worst = max(worst, (max(block) - min(block)) / 2)
        best = min(best, worst)
    return best


def brute_kmedian(points, k):
    """Mean distance; each block is served from its best member point."""
    best = float("inf")
    for labels in assignments(len(points), k):
        total = 0.0
        for c in range(k):
            block = [p for p, l in zip(points, labels) if l == c]
            if block:
                total += min(sum(abs(q - f) for q in block) for f in block)
        best = min(best, total)
    return best / len(points)


def expected_cost(p, atoms):
    """atoms: iterable of (locations, probability)."""
    return sum(w * nearest(p, locs) for locs, w in atoms)
