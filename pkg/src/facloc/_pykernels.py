"""Pure-Python versions of the numeric kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and bit-for-bit identical results on the same inputs.  Points passed to the
solver kernels must already be sorted.
"""


def nearest(p, locs):
    best = abs(locs[0] - p)
    for loc in locs:
        d = abs(loc - p)
        if d < best:
            best = d
    return best


def max_nearest(points, locs):
    worst = 0.0
    for p in points:
        d = nearest(p, locs)
        if d > worst:
            worst = d
    return worst


def sum_nearest(points, locs):
    total = 0.0
    for p in points:
        total += nearest(p, locs)
    return total


def expected_nearest(p, atom_locs, probs):
    total = 0.0
    for locs, w in zip(atom_locs, probs):
        total += w * nearest(p, locs)
    return total


def _pad(locs, k):
    while len(locs) < k:
        locs.append(locs[-1])
    return tuple(locs)


def _distinct(points):
    out = [points[0]]
    for p in points[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def _greedy_clusters(points, diameter):
    """Left-to-right cover; returns (first, last) index pairs."""
    clusters = []
    n = len(points)
    i = 0
    while i < n:
        start = points[i]
        j = i
        while j + 1 < n and points[j + 1] - start <= diameter:
            j += 1
        clusters.append((i, j))
        i = j + 1
    return clusters


def kcenter(points, k):
    """Exact k-center on a sorted point list: (radius, facility tuple)."""
    n = len(points)
    if k >= n:
        return 0.0, _pad(_distinct(list(points)), k)
    diameters = sorted({points[j] - points[i] for i in range(n) for j in range(i, n)})
    lo, hi = 0, len(diameters) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if len(_greedy_clusters(points, diameters[mid])) <= k:
            hi = mid
        else:
            lo = mid + 1
    d = diameters[lo]
    locs = [(points[a] + points[b]) / 2.0 for a, b in _greedy_clusters(points, d)]
    return d / 2.0, _pad(locs, k)


def _cluster_cost(points, prefix, i, j):
    m = (i + j) // 2
    med = points[m]
    left = med * (m - i + 1) - (prefix[m + 1] - prefix[i])
    right = (prefix[j + 1] - prefix[m + 1]) - med * (j - m)
    return left + right


def kmedian(points, k):
    """Exact k-median on a sorted point list: (total distance, facility tuple)."""
    n = len(points)
    if k >= n:
        return 0.0, _pad(_distinct(list(points)), k)
    prefix = [0.0]
    for p in points:
        prefix.append(prefix[-1] + p)
    inf = float("inf")
    # best[c][t]: cheapest split of the first t points into c clusters
    best = [[inf] * (n + 1) for _ in range(k + 1)]
    split = [[0] * (n + 1) for _ in range(k + 1)]
    best[0][0] = 0.0
    for c in range(1, k + 1):
        row, prev = best[c], best[c - 1]
        for t in range(c, n + 1):
            for s in range(c - 1, t):
                if prev[s] == inf:
                    continue
                v = prev[s] + _cluster_cost(points, prefix, s, t - 1)
                if v < row[t]:
                    row[t] = v
                    split[c][t] = s
    locs = []
    t = n
    for c in range(k, 0, -1):
        s = split[c][t]
        locs.append(points[(s + t - 1) // 2])
        t = s
    locs.reverse()
    return best[k][n], tuple(locs)
