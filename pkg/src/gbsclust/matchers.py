"""Hafnian and Torontonian kernels.

The hafnian of a symmetric 2m-square matrix sums, over all perfect-matching
pairings of the indices, the product of the matched entries.  On a 0/1
adjacency matrix it counts perfect matchings of the graph.  Two evaluation
routes are provided: a direct enumeration used as the oracle, and a
subset-dynamic-programming path that is exponentially cheaper and doubles as
a table of hafnians over every induced subgraph, which is what the sampler
consumes.

The torontonian is the inclusion-exclusion companion used for threshold
(click / no-click) detection.  Its value on the 2m-square coupling matrix O
is

    sum over Z subset of {1..m} of (-1)^(m-|Z|) / sqrt(det(I - O_Z))

where O_Z keeps rows and columns z and z+m for z in Z, and the empty subset
contributes (-1)^m.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import InvalidInputError, NumericError

__all__ = [
    "hafnian",
    "hafnian_fast",
    "hafnian_all_subsets",
    "hafnian_with_repeats",
    "count_perfect_matchings",
    "torontonian",
]

SYMMETRY_ATOL = 1e-12


def _check_symmetric(b: np.ndarray) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise InvalidInputError("matrix must be square")
    if b.size and not np.allclose(b, b.T, rtol=0.0, atol=SYMMETRY_ATOL):
        raise InvalidInputError("matrix must be symmetric within 1e-12")
    return b


def hafnian(b: np.ndarray) -> float:
    """Reference hafnian by direct perfect-matching enumeration.

    Cost grows as (n-1)!!, so keep n small (n <= 14 or so).  Returns 1 for
    the empty matrix and 0 for odd dimension.
    """
    b = _check_symmetric(b)
    n = b.shape[0]
    if n % 2:
        return 0.0

    def rec(idx: tuple[int, ...]) -> float:
        if not idx:
            return 1.0
        i0 = idx[0]
        rest = idx[1:]
        total = 0.0
        for k, j in enumerate(rest):
            bij = b[i0, j]
            if bij != 0.0:
                total += bij * rec(rest[:k] + rest[k + 1:])
        return total

    return rec(tuple(range(n)))


def hafnian_all_subsets(b: np.ndarray) -> np.ndarray:
    """Hafnians of every principal submatrix of ``b`` in one sweep.

    Returns an array ``t`` of length 2**n with ``t[mask]`` equal to the
    hafnian of ``b`` restricted to the index set encoded by ``mask``.
    Entry (i, j) contributes to every mask whose lowest set bit is i, so
    masks are filled in decreasing order of their lowest bit; odd-popcount
    masks stay at zero.  O(n * 2^n) time and O(2^n) memory.
    """
    b = _check_symmetric(b)
    n = b.shape[0]
    table = np.zeros(1 << n)
    table[0] = 1.0
    for i in range(n - 1, -1, -1):
        bit_i = 1 << i
        for j in range(i + 1, n):
            bij = b[i, j]
            if bij == 0.0:
                continue
            # free masks: any bit pattern over positions above i, excluding j
            lo = np.arange(1 << (j - i - 1), dtype=np.int64) << (i + 1)
            hi = np.arange(1 << (n - j - 1), dtype=np.int64) << (j + 1)
            free = (hi[:, None] | lo[None, :]).ravel()
            vals = table[free]
            nz = vals != 0.0
            if not nz.any():
                continue
            free = free[nz]
            table[free | bit_i | (1 << j)] += bij * vals[nz]
    return table


def hafnian_fast(b: np.ndarray) -> float:
    """Hafnian via the subset dynamic program; equals :func:`hafnian`.

    Memory is O(2^n), so this is the production path up to n around 26.
    """
    b = _check_symmetric(b)
    n = b.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    return float(hafnian_all_subsets(b)[(1 << n) - 1])


def hafnian_with_repeats(b: np.ndarray, counts) -> float:
    """Hafnian of ``b`` with row/column i duplicated ``counts[i]`` times.

    Equivalent to expanding the matrix explicitly and calling
    :func:`hafnian`, but the recursion runs over multiplicity vectors, so
    large photon patterns over few modes stay cheap (state space is the
    product of counts+1, not 2^total).
    """
    b = _check_symmetric(b)
    counts = tuple(int(c) for c in counts)
    if len(counts) != b.shape[0]:
        raise InvalidInputError("counts length must match matrix dimension")
    if any(c < 0 for c in counts):
        raise InvalidInputError("repeat counts must be nonnegative")
    if sum(counts) % 2:
        return 0.0
    memo: dict[tuple[int, ...], float] = {}

    def rec(m: tuple[int, ...]) -> float:
        if sum(m) == 0:
            return 1.0
        cached = memo.get(m)
        if cached is not None:
            return cached
        i = next(k for k, c in enumerate(m) if c > 0)
        rest = list(m)
        rest[i] -= 1
        total = 0.0
        if rest[i] > 0 and b[i, i] != 0.0:
            m2 = list(rest)
            m2[i] -= 1
            total += rest[i] * b[i, i] * rec(tuple(m2))
        for j in range(i + 1, len(m)):
            if rest[j] > 0 and b[i, j] != 0.0:
                m2 = list(rest)
                m2[j] -= 1
                total += rest[j] * b[i, j] * rec(tuple(m2))
        memo[m] = total
        return total

    return rec(counts)


def count_perfect_matchings(a: np.ndarray) -> int:
    """Number of perfect matchings of the graph with adjacency ``a``.

    The hafnian of a 0/1 adjacency matrix is exactly this count; the result
    is checked to be a nonnegative integer.
    """
    value = hafnian_fast(a)
    nearest = round(value)
    if abs(value - nearest) > 1e-6 or nearest < 0:
        raise NumericError(f"matching count came out non-integral: {value}")
    return int(nearest)


def torontonian(o: np.ndarray) -> float:
    """Torontonian of a symmetric 2m-square matrix with spectral radius < 1.

    Evaluates the inclusion-exclusion sum over index subsets; the spectral
    radius condition keeps every determinant under the square root positive
    (eigenvalues of principal submatrices interlace).
    """
    o = _check_symmetric(o)
    n = o.shape[0]
    if n % 2:
        raise InvalidInputError("torontonian input must be 2m-square")
    m = n // 2
    if n:
        radius = float(np.abs(np.linalg.eigvalsh(o)).max())
        if radius >= 1.0:
            raise InvalidInputError(
                f"torontonian needs spectral radius < 1, got {radius:.6g}"
            )
    total = 0.0
    for r in range(m + 1):
        sign = (-1.0) ** (m - r)
        for z in itertools.combinations(range(m), r):
            idx = list(z) + [k + m for k in z]
            sub = np.eye(2 * r) - o[np.ix_(idx, idx)]
            det = float(np.linalg.det(sub))
            if det <= 0.0:
                raise InvalidInputError("nonpositive determinant under the root")
            total += sign / np.sqrt(det)
    return total
