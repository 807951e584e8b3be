"""Exact simulation of graph-encoded Gaussian boson sampling.

A symmetric matrix A is encoded through its Takagi factorization and a
rescaling c chosen so that the squeezed modes carry a target mean photon
number.  Restricted to binary photon patterns, the outcome distribution over
node subsets S of the encoded graph is

    pnr_postselected:  P(S) proportional to c^|S| * Haf(A_S)^2
    threshold:         P(S) proportional to Tor(O_S),  O = [[0, cA], [cA, 0]]

where A_S is the induced submatrix and O_S keeps the paired rows/columns of
S.  At the scales this package targets (M <= 26 nodes) the sampler simply
enumerates every subset weight, normalizes, and draws from the exact
categorical distribution, which makes every downstream result reproducible
from a seed.

``probability_pnr`` evaluates the full photon-number-resolved probability of
an arbitrary pattern (repetitions allowed) and exists as the oracle that
normalization and threshold-mode tests are checked against.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapacityError,
    DegenerateGraphError,
    InvalidInputError,
    NoSolutionError,
    NumericError,
)
from .matchers import (
    _check_symmetric,
    hafnian_all_subsets,
    hafnian_fast,
    hafnian_with_repeats,
    torontonian,
)

__all__ = [
    "MODE_PNR",
    "MODE_THRESHOLD",
    "TakagiFactors",
    "GbsEncoding",
    "SampleBatch",
    "takagi",
    "calibrate_scaling",
    "encode",
    "subset_weight",
    "sample",
    "subset_distribution",
    "probability_pnr",
]

MODE_PNR = "pnr_postselected"
MODE_THRESHOLD = "threshold"

# exact subset enumeration bounds; threshold mode is tighter because every
# subset needs a pair of determinants rather than one shared DP sweep
PNR_MAX_NODES = 26
THRESHOLD_MAX_NODES = 20

RECONSTRUCTION_RTOL = 1e-10
CALIBRATION_ATOL = 1e-9


@dataclass
class TakagiFactors:
    """Takagi factorization A = U diag(lam) U^T with lam >= 0 descending.

    For a real symmetric A the factors come from the eigendecomposition,
    with the sign of each negative eigenvalue absorbed into a phase of the
    corresponding column, so U is unitary with real or purely imaginary
    columns.
    """

    u: np.ndarray = field(repr=False)
    lam: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.real(self.u @ np.diag(self.lam) @ self.u.T)


@dataclass
class GbsEncoding:
    """A Takagi-encoded matrix plus the squeezing scale for a photon budget."""

    takagi: TakagiFactors
    c: float
    n_mean: float
    mode: str = MODE_PNR

    def __post_init__(self):
        if self.mode not in (MODE_PNR, MODE_THRESHOLD):
            raise InvalidInputError(f"unknown sampling mode {self.mode!r}")
        x = (self.c * self.takagi.lam) ** 2
        if np.any(x >= 1.0):
            raise InvalidInputError("rescaling violates c * lambda_max < 1")
        implied = float(np.sum(x / (1.0 - x)))
        if abs(implied - self.n_mean) > CALIBRATION_ATOL:
            raise InvalidInputError(
                f"c implies mean photons {implied!r}, expected {self.n_mean!r}"
            )

    @property
    def det_sigma_q(self) -> float:
        """det(sigma_Q) of the pure encoded state: prod 1/(1 - (c lam_i)^2)."""
        x = (self.c * self.takagi.lam) ** 2
        return float(np.prod(1.0 / (1.0 - x)))


@dataclass
class SampleBatch:
    """Node subsets drawn from the GBS distribution of one graph."""

    samples: list[tuple[int, ...]]
    n: int
    seed: int | None
    mode: str

    def __post_init__(self):
        if len(self.samples) != self.n:
            raise InvalidInputError("sample count does not match request")
        if self.mode == MODE_PNR and any(len(s) % 2 for s in self.samples):
            raise InvalidInputError("odd-size subset in pnr_postselected batch")


def takagi(a: np.ndarray) -> TakagiFactors:
    """Takagi factors of a real symmetric matrix.

    Eigenvalues give the singular values up to sign; negative ones are
    rotated into the columns with a factor of 1j, which keeps U unitary and
    the reconstruction U diag(lam) U^T exact.
    """
    a = _check_symmetric(a)
    if a.shape[0] == 0:
        return TakagiFactors(u=np.zeros((0, 0), dtype=complex), lam=np.zeros(0))
    evals, evecs = np.linalg.eigh(a)
    lam = np.abs(evals)
    phases = np.where(evals < 0.0, 1j, 1.0 + 0j)
    u = evecs.astype(complex) * phases[None, :]
    order = np.argsort(-lam, kind="stable")
    factors = TakagiFactors(u=u[:, order], lam=lam[order])
    err = np.linalg.norm(factors.reconstruct() - a)
    if err > RECONSTRUCTION_RTOL * max(1.0, np.linalg.norm(a)):
        raise InvalidInputError(f"takagi reconstruction failed, residual {err:.3e}")
    return factors


def calibrate_scaling(lam: np.ndarray, n_mean: float) -> float:
    """Rescaling c in (0, 1/lam_max) hitting a target mean photon number.

    Solves sum_i (c lam_i)^2 / (1 - (c lam_i)^2) = n_mean by bisection; the
    left side is strictly increasing in c and diverges at 1/lam_max, so the
    root exists and is unique for any positive target.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.size == 0 or float(lam.max()) <= 0.0:
        raise NoSolutionError("cannot calibrate scaling: all singular values are 0")
    if n_mean <= 0.0:
        raise InvalidInputError(f"mean photon target must be positive, got {n_mean}")
    lam_max = float(lam.max())

    def mean_photons(c: float) -> float:
        x = (c * lam) ** 2
        return float(np.sum(x / (1.0 - x)))

    lo, hi = 0.0, (1.0 - 1e-14) / lam_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean_photons(mid) < n_mean:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * hi:
            break
    return 0.5 * (lo + hi)


def encode(a: np.ndarray, n_mean: float, mode: str = MODE_PNR) -> GbsEncoding:
    """Takagi-encode ``a`` and calibrate the rescaling for ``n_mean`` photons."""
    factors = takagi(a)
    c = calibrate_scaling(factors.lam, n_mean)
    return GbsEncoding(takagi=factors, c=c, n_mean=n_mean, mode=mode)


def subset_weight(a: np.ndarray, enc: GbsEncoding, subset) -> float:
    """Unnormalized sampling weight of one node subset.

    pnr_postselected: c^|S| Haf(A_S)^2, zero for odd |S|.  threshold:
    torontonian of the paired coupling block of cA restricted to S.
    """
    a = _check_symmetric(a)
    idx = sorted(set(int(i) for i in subset))
    if idx and (idx[0] < 0 or idx[-1] >= a.shape[0]):
        raise InvalidInputError("subset index out of range")
    if enc.mode == MODE_PNR:
        if len(idx) % 2:
            return 0.0
        haf = hafnian_fast(a[np.ix_(idx, idx)]) if idx else 1.0
        return float(enc.c ** len(idx) * haf * haf)
    b = enc.c * a[np.ix_(idx, idx)]
    k = len(idx)
    o = np.zeros((2 * k, 2 * k))
    o[:k, k:] = b
    o[k:, :k] = b
    return float(torontonian(o))


# ---------------------------------------------------------------------------
# exact subset distribution
# ---------------------------------------------------------------------------

def _popcounts(n_bits: int) -> np.ndarray:
    pc = np.zeros(1, dtype=np.uint8)
    for _ in range(n_bits):
        pc = np.concatenate([pc, pc + 1])
    return pc


def _pnr_weights(a: np.ndarray, c: float) -> np.ndarray:
    """c^|S| Haf(A_S)^2 for every subset mask."""
    table = hafnian_all_subsets(a)
    table *= table
    pc = _popcounts(a.shape[0])
    table *= (c ** np.arange(a.shape[0] + 1, dtype=float))[pc]
    return table


def _threshold_weights(a: np.ndarray, c: float) -> np.ndarray:
    """Tor(O_S) for every subset mask, via batched determinants.

    Uses det(I - O_Z) = det(I - B_Z) det(I + B_Z) for the paired coupling
    block of B = cA, then a signed subset-sum (Moebius) transform turns the
    per-subset vacuum factors into inclusion-exclusion weights.
    """
    n = a.shape[0]
    b = c * a
    z = np.empty(1 << n)
    z[0] = 1.0
    for k in range(1, n + 1):
        combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
        masks = (1 << combos).sum(axis=1)
        eye = np.eye(k)
        for s in range(0, combos.shape[0], 65536):
            idx = combos[s:s + 65536]
            sub = b[idx[:, :, None], idx[:, None, :]]
            dets = np.linalg.det(eye - sub) * np.linalg.det(eye + sub)
            if np.any(dets <= 0.0):
                raise InvalidInputError("threshold coupling is not physical")
            z[masks[s:s + 65536]] = 1.0 / np.sqrt(dets)
    pc = _popcounts(n)
    sign = np.where(pc % 2 == 0, 1.0, -1.0)
    h = z * sign
    for bit in range(n):
        view = h.reshape(-1, 2, 1 << bit)
        view[:, 1, :] += view[:, 0, :]
    w = h * sign
    # inclusion-exclusion cancellation leaves float dust around zero
    floor = float(w.min())
    if floor < -1e-8 * max(1.0, float(w.max())):
        raise NumericError(f"threshold weight went negative: {floor:.3e}")
    np.clip(w, 0.0, None, out=w)
    return w


class _WeightCache:
    """Tiny LRU keyed by (matrix bytes, c, mode) holding cumulative weights."""

    def __init__(self, capacity: int = 2):
        self.capacity = capacity
        self._store: OrderedDict[tuple, np.ndarray] = OrderedDict()

    def key(self, a: np.ndarray, c: float, mode: str) -> tuple:
        digest = hashlib.sha256(np.ascontiguousarray(a).tobytes()).hexdigest()
        return (digest, a.shape[0], float(c).hex(), mode)

    def get(self, key: tuple) -> np.ndarray | None:
        if key in self._store:
            self._store.move_to_end(key)
            return self._store[key]
        return None

    def put(self, key: tuple, value: np.ndarray) -> None:
        self._store[key] = value
        self._store.move_to_end(key)
        while len(self._store) > self.capacity:
            self._store.popitem(last=False)


_cache = _WeightCache()


def _cumulative_weights(a: np.ndarray, c: float, mode: str) -> np.ndarray:
    key = _cache.key(a, c, mode)
    cached = _cache.get(key)
    if cached is not None:
        return cached
    weights = _pnr_weights(a, c) if mode == MODE_PNR else _threshold_weights(a, c)
    np.cumsum(weights, out=weights)
    _cache.put(key, weights)
    return weights


def sample(
    a: np.ndarray,
    n_mean: float,
    n_samples: int,
    mode: str = MODE_PNR,
    seed: int | None = None,
) -> SampleBatch:
    """Draw ``n_samples`` node subsets from the exact GBS distribution.

    Subset weights for the whole 2^M lattice are enumerated once per
    (matrix, scale, mode) and cached, so repeated sampling rounds on the
    same graph cost O(n_samples).  Raises CapacityError beyond the
    enumeration bound and DegenerateGraphError when no subset carries mass
    (edgeless graph in pnr mode).
    """
    a = _check_symmetric(a)
    m = a.shape[0]
    if mode not in (MODE_PNR, MODE_THRESHOLD):
        raise InvalidInputError(f"unknown sampling mode {mode!r}")
    limit = PNR_MAX_NODES if mode == MODE_PNR else THRESHOLD_MAX_NODES
    if m > limit:
        raise CapacityError(f"{m} nodes exceeds the {mode} enumeration bound {limit}")
    if n_samples < 1:
        raise InvalidInputError("need at least one sample")
    if float(np.abs(a).sum()) == 0.0:
        # only the empty subset would carry mass, and calibration has no root
        raise DegenerateGraphError("graph has no edges, nothing to sample")
    enc = encode(a, n_mean, mode)
    cum = _cumulative_weights(a, enc.c, mode)
    total = float(cum[-1])
    if total <= 0.0:
        raise DegenerateGraphError("zero total sampling weight")
    rng = np.random.default_rng(seed)
    u = rng.random(n_samples) * total
    masks = np.searchsorted(cum, u, side="right")
    samples = [
        tuple(i for i in range(m) if (int(mask) >> i) & 1) for mask in masks
    ]
    return SampleBatch(samples=samples, n=n_samples, seed=seed, mode=mode)


def subset_distribution(a: np.ndarray, n_mean: float, mode: str = MODE_PNR) -> dict[tuple[int, ...], float]:
    """Normalized subset probabilities, keyed by sorted node tuple.

    Exposed for tests and diagnostics; zero-probability subsets are omitted.
    """
    a = _check_symmetric(a)
    enc = encode(a, n_mean, mode)
    cum = _cumulative_weights(a, enc.c, mode)
    weights = np.diff(cum, prepend=0.0)
    total = float(cum[-1])
    out: dict[tuple[int, ...], float] = {}
    for mask in np.nonzero(weights > 0.0)[0]:
        subset = tuple(i for i in range(a.shape[0]) if (int(mask) >> i) & 1)
        out[subset] = float(weights[mask] / total)
    return out


def probability_pnr(a: np.ndarray, enc: GbsEncoding, pattern) -> float:
    """Photon-number-resolved probability of an arbitrary output pattern.

    Evaluates c^s Haf(A_pattern)^2 / (pattern! sqrt(det sigma_Q)) with the
    matrix built by dropping silent modes and repeating row/column i by the
    photon count n_i.  This is the oracle that anchors normalization and
    threshold-mode consistency; it is not on the sampling path.
    """
    a = _check_symmetric(a)
    pattern = tuple(int(p) for p in pattern)
    if len(pattern) != a.shape[0]:
        raise InvalidInputError("pattern length must match mode count")
    if any(p < 0 for p in pattern):
        raise InvalidInputError("photon counts must be nonnegative")
    s = sum(pattern)
    haf = hafnian_with_repeats(a, pattern)
    pattern_factorial = 1.0
    for p in pattern:
        pattern_factorial *= math.factorial(p)
    return float(
        enc.c ** s * haf * haf / (pattern_factorial * math.sqrt(enc.det_sigma_q))
    )
