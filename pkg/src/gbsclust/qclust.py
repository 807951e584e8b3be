"""Iterative densest-subgraph clustering driven by GBS samples.

The driver builds a threshold graph over the input points and repeatedly
samples node subsets from the GBS distribution of the remaining graph.  Each
round keeps only subsets of at least L nodes, takes the densest one (ties go
to the larger subset), and accepts it as a cluster when its density clears a
threshold that decays geometrically over failed rounds.  Accepted clusters
leave the graph; when the leftover graph is too small or too sparse, the
remaining nodes are attached to clusters by a connectivity-ratio rule, with
fully disconnected nodes becoming singletons.

Two stall guards keep the loop finite on awkward graphs.  If a third of the
per-cluster round budget passes with no acceptance, the post-selection size
L is halved (floor 2): in photon-counting mode only even-size subsets ever
appear, so an odd minimum can silently exclude every dense candidate.  If a
full budget of rounds passes without any acceptance, extraction stops and
whatever is left goes straight to post-processing.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import gbs_engine, graph_core
from .errors import InvalidInputError
from .gbs_engine import MODE_PNR, MODE_THRESHOLD, SampleBatch

__all__ = [
    "ClusterParams",
    "Clustering",
    "compute_threshold",
    "find_densest_candidate",
    "post_process",
    "gbs_cluster",
]


@dataclass
class ClusterParams:
    """Knobs of the GBS clustering loop.

    Defaults follow the benchmark settings: the graph threshold is the 35th
    percentile of pairwise distances, the photon budget is half the current
    graph size, 50 samples per round, and post-selection at a third of the
    current graph size.  ``d_tilde`` overrides the percentile rule with an
    explicit distance threshold.  With ``recompute_sizes`` off, n_mean and L
    stay fixed at their initial-graph values.
    """

    d_percentile: float = 0.35
    d_tilde: float | None = None
    n_mean_factor: float = 0.5
    n_samples: int = 50
    l_factor: float = 1.0 / 3.0
    t0: float = 0.90
    gamma: float = 0.95
    t_min: float = 0.50
    min_remaining: int = 3
    max_rounds_per_cluster: int = 50
    recompute_sizes: bool = True
    mode: str = MODE_PNR
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 < self.d_percentile < 1.0:
            raise InvalidInputError("d_percentile must lie strictly in (0, 1)")
        if not 0.0 < self.gamma < 1.0:
            raise InvalidInputError("gamma must lie strictly in (0, 1)")
        if not self.t_min <= self.t0 <= 1.0:
            raise InvalidInputError("need t_min <= t0 <= 1")
        if self.n_samples < 1:
            raise InvalidInputError("n_samples must be at least 1")
        if self.mode not in (MODE_PNR, MODE_THRESHOLD):
            raise InvalidInputError(f"unknown sampling mode {self.mode!r}")


@dataclass
class Clustering:
    """A full partition of point indices into clusters."""

    clusters: list[list[int]]
    n_points: int
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        seen: set[int] = set()
        for cluster in self.clusters:
            if not cluster:
                raise InvalidInputError("empty cluster in partition")
            for node in cluster:
                if node in seen:
                    raise InvalidInputError(f"node {node} assigned twice")
                seen.add(node)
        if seen != set(range(self.n_points)):
            raise InvalidInputError("clusters do not partition the point set")
        self.clusters = [sorted(int(i) for i in c) for c in self.clusters]

    @property
    def labels(self) -> np.ndarray:
        out = np.empty(self.n_points, dtype=int)
        for cid, cluster in enumerate(self.clusters):
            out[cluster] = cid
        return out

    def to_json_dict(self, points: graph_core.PointSet | None = None) -> dict:
        if points is not None:
            clusters = [[points.ids[i] for i in c] for c in self.clusters]
        else:
            clusters = [list(c) for c in self.clusters]
        return {"method": self.method, "params": self.params, "clusters": clusters}


def compute_threshold(i: int, params: ClusterParams) -> float:
    """Density acceptance threshold after ``i`` failed rounds."""
    if i < 0:
        raise InvalidInputError("round index must be nonnegative")
    return max(params.t_min, params.t0 * params.gamma ** i)


def find_densest_candidate(
    batch: SampleBatch, a: np.ndarray, l_min: int
) -> tuple[int, ...] | None:
    """Densest post-selected subset of a batch, or None if all are too small.

    Keeps subsets with at least ``l_min`` nodes; ranks by density, then by
    size, then by lexicographically smallest node list so the choice is
    deterministic.
    """
    best: tuple[float, int, tuple[int, ...]] | None = None
    for subset in batch.samples:
        if len(subset) < l_min:
            continue
        key = (
            -graph_core.graph_density(a, subset),
            -len(subset),
            tuple(sorted(subset)),
        )
        if best is None or key < best:
            best = key
    return best[2] if best is not None else None


def post_process(
    unclustered,
    clusters: list[list[int]],
    a: np.ndarray,
) -> list[list[int]]:
    """Attach leftover nodes to clusters by connectivity ratio.

    A node with no edge into any cluster becomes a singleton.  Otherwise it
    joins the cluster maximizing edges(node, cluster) / |cluster|, ties
    broken by the smaller cluster index.  Nodes are handled in ascending
    index order against the cluster sizes as they were on entry, so the
    order of processing never changes a ratio denominator.
    """
    result = [list(c) for c in clusters]
    base = [sorted(c) for c in clusters]
    for node in sorted(int(n) for n in unclustered):
        best_cid = None
        best_ratio = 0.0
        for cid, members in enumerate(base):
            links = float(a[node, members].sum()) if members else 0.0
            if links <= 0.0:
                continue
            ratio = links / len(members)
            if best_cid is None or ratio > best_ratio:
                best_cid, best_ratio = cid, ratio
        if best_cid is None:
            result.append([node])
        else:
            result[best_cid].append(node)
    return [sorted(c) for c in result if c]


def _derive_round_seed(seed: int | None, round_index: int) -> int:
    entropy = [round_index] if seed is None else [seed, round_index]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def gbs_cluster(points: graph_core.PointSet, params: ClusterParams | None = None) -> Clustering:
    """Cluster a point set with the GBS densest-subgraph loop.

    Deterministic given (points, params, seed).  The returned clustering is
    always a full partition; accepted clusters have density above the decay
    floor, everything else is attached in post-processing.
    """
    params = params or ClusterParams()
    d = graph_core.compute_distance_matrix(points)
    if params.d_tilde is not None:
        d_tilde = params.d_tilde
    else:
        d_tilde = graph_core.percentile(
            graph_core.upper_triangle_values(d), params.d_percentile
        )
    a = graph_core.build_adjacency(d, d_tilde) if d_tilde > 0 else np.zeros_like(d)
    m_total = len(points)

    remaining = list(range(m_total))
    clusters: list[list[int]] = []
    round_index = 0
    initial_n_mean = max(params.n_mean_factor * m_total, 1e-9)
    initial_l = max(1, math.ceil(params.l_factor * m_total))
    halving_patience = max(1, params.max_rounds_per_cluster // 3)
    # a 2-point input must still reach the sampler, so the stop size never
    # exceeds the input size (and never drops below a samplable pair)
    stop_size = max(2, min(params.min_remaining, m_total))

    while len(remaining) >= stop_size:
        sub = graph_core.induced_subgraph(a, remaining)
        if sub.sum() == 0:
            break  # leftover graph has no edges, nothing left to sample
        if params.recompute_sizes:
            n_mean = max(params.n_mean_factor * len(remaining), 1e-9)
            l_min = max(1, math.ceil(params.l_factor * len(remaining)))
        else:
            n_mean = initial_n_mean
            l_min = initial_l

        accepted: tuple[int, ...] | None = None
        failed_rounds = 0
        stalled_rounds = 0
        for _ in range(params.max_rounds_per_cluster):
            batch = gbs_engine.sample(
                sub,
                n_mean,
                params.n_samples,
                mode=params.mode,
                seed=_derive_round_seed(params.seed, round_index),
            )
            round_index += 1
            candidate = find_densest_candidate(batch, sub, l_min)
            if candidate is not None:
                t = compute_threshold(failed_rounds, params)
                if graph_core.graph_density(sub, candidate) > t:
                    accepted = candidate
                    break
            failed_rounds += 1
            stalled_rounds += 1
            if stalled_rounds >= halving_patience and l_min > 2:
                l_min = max(2, math.ceil(l_min / 2))
                stalled_rounds = 0

        if accepted is None:
            break  # budget exhausted with nothing dense enough; post-process
        cluster_nodes = sorted(remaining[i] for i in accepted)
        clusters.append(cluster_nodes)
        remaining = [n for n in remaining if n not in set(cluster_nodes)]

    final = post_process(remaining, clusters, a)
    return Clustering(
        clusters=final,
        n_points=m_total,
        method="gbs",
        params=asdict(params),
    )
