"""Independent oracles shared by the test modules.

Everything here is deliberately written from scratch, without calling into
the package, so the tests compare two genuinely different routes to the same
value.
"""

from __future__ import annotations

import math

import numpy as np


def all_pairings(items):
    """Yield every way to split ``items`` into unordered pairs."""
    items = list(items)
    if not items:
        yield []
        return
    first = items[0]
    for k in range(1, len(items)):
        partner = items[k]
        rest = items[1:k] + items[k + 1:]
        for tail in all_pairings(rest):
            yield [(first, partner)] + tail


def count_matchings_bruteforce(a: np.ndarray) -> int:
    """Perfect matchings by generate-and-test over all pairings."""
    n = a.shape[0]
    if n % 2:
        return 0
    count = 0
    for pairing in all_pairings(range(n)):
        if all(a[u, v] != 0 for u, v in pairing):
            count += 1
    return count


def hafnian_bruteforce(b: np.ndarray) -> float:
    """Hafnian by summing products over all pairings."""
    n = b.shape[0]
    if n % 2:
        return 0.0
    total = 0.0
    for pairing in all_pairings(range(n)):
        prod = 1.0
        for u, v in pairing:
            prod *= b[u, v]
        total += prod
    return total


class MultisetHafnian:
    """Hafnian of a matrix with repeated rows/columns, shared memo per matrix.

    Walks multiplicity vectors: take one copy of the first live index and
    pair it with a remaining copy of the same index (diagonal entry) or of a
    later index.  The memo persists across patterns of the same matrix so a
    whole cutoff lattice is cheap to sweep.
    """

    def __init__(self, b: np.ndarray):
        self.b = np.asarray(b, dtype=float)
        self.memo: dict[tuple[int, ...], float] = {}

    def value(self, counts) -> float:
        counts = tuple(int(c) for c in counts)
        if sum(counts) % 2:
            return 0.0
        return self._rec(counts)

    def _rec(self, m: tuple[int, ...]) -> float:
        if sum(m) == 0:
            return 1.0
        cached = self.memo.get(m)
        if cached is not None:
            return cached
        i = next(k for k, c in enumerate(m) if c > 0)
        rest = list(m)
        rest[i] -= 1
        total = 0.0
        if rest[i] > 0 and self.b[i, i] != 0.0:
            m2 = list(rest)
            m2[i] -= 1
            total += rest[i] * self.b[i, i] * self._rec(tuple(m2))
        for j in range(i + 1, len(m)):
            if rest[j] > 0 and self.b[i, j] != 0.0:
                m2 = list(rest)
                m2[j] -= 1
                total += rest[j] * self.b[i, j] * self._rec(tuple(m2))
        self.memo[m] = total
        return total


def pnr_support_masses(a: np.ndarray, c: float, cutoff: int) -> dict[frozenset, float]:
    """Photon-pattern probability mass per detector support, brute force.

    Sums c^s Haf(A_pattern)^2 / pattern! over all patterns with every count
    at most ``cutoff`` (the constant 1/sqrt(det sigma_Q) is left out, so the
    result is an unnormalized mass per support).
    """
    import itertools

    m = a.shape[0]
    haf = MultisetHafnian(a)
    masses: dict[frozenset, float] = {}
    for pattern in itertools.product(range(cutoff + 1), repeat=m):
        h = haf.value(pattern)
        if h == 0.0:
            continue
        s = sum(pattern)
        nfact = 1.0
        for p in pattern:
            nfact *= math.factorial(p)
        weight = c ** s * h * h / nfact
        support = frozenset(i for i, p in enumerate(pattern) if p > 0)
        masses[support] = masses.get(support, 0.0) + weight
    return masses


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Adjusted Rand index between two partitions given as label arrays."""
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    n = labels_a.size
    classes_a = np.unique(labels_a)
    classes_b = np.unique(labels_b)
    table = np.zeros((classes_a.size, classes_b.size), dtype=np.int64)
    for i, ca in enumerate(classes_a):
        for j, cb in enumerate(classes_b):
            table[i, j] = np.sum((labels_a == ca) & (labels_b == cb))

    def comb2(x):
        return x * (x - 1) / 2.0

    index = comb2(table).sum()
    sum_a = comb2(table.sum(axis=1)).sum()
    sum_b = comb2(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / comb2(n)
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def total_variation_distance(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def graph_from_edges(n: int, edges) -> np.ndarray:
    a = np.zeros((n, n))
    for u, v in edges:
        a[u, v] = a[v, u] = 1.0
    return a
