"""Synthetic datasets and the three-way benchmark harness.

Datasets are seeded point layouts on a small latitude/longitude patch,
scaled so the DBSCAN preset (eps = 0.005, 2 points) is meaningful.  Each
dataset is clustered by the GBS driver, k-means with elbow-selected k, and
DBSCAN with noise reattachment; all three are scored with the same graph
and distance matrix.  Per-dataset failures are recorded on their row and
excluded from the aggregates rather than aborting the run.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from . import baselines, graph_core, metrics, qclust
from .errors import CapacityError, InvalidInputError
from .gbs_engine import MODE_PNR, PNR_MAX_NODES

__all__ = [
    "BenchConfig",
    "BenchRow",
    "BenchReport",
    "generate_dataset",
    "run_benchmark",
    "emit_report",
]

METHODS = ("gbs", "kmeans", "dbscan")


@dataclass
class BenchConfig:
    """Benchmark settings; field names match the JSON config exactly.

    Datasets cycle through two location profiles.  Three of every four are
    "strip" datasets: two road-like point strips with different point
    spacings, far apart, the regime where density chaining and graph
    density disagree.  The fourth is a "blob" dataset: 2 to 4 isotropic
    Gaussian blobs whose spread straddles the DBSCAN radius.
    """

    dataset_count: int = 30
    m_min: int = 15
    m_max: int = 25
    box_lat: float = 45.0
    box_lon: float = 7.0
    strip_box: float = 0.08
    strip_separation: float = 0.045
    strip_spacing_short: tuple = (0.0022, 0.0028)
    strip_spacing_long: tuple = (0.0040, 0.0046)
    strip_jitter: float = 0.0005
    blob_min: int = 2
    blob_max: int = 4
    blob_box: float = 0.05
    blob_separation: float = 0.02
    jitter_sigma: float = 0.006
    blob_every: int = 4
    d_percentile: float = 0.35
    gbs_samples: int = 50
    gbs_mode: str = MODE_PNR
    kmeans_k_max: int = 8
    dbscan_eps: float = 0.005
    dbscan_min_pts: int = 2
    master_seed: int = 6

    def __post_init__(self):
        if self.dataset_count < 1:
            raise InvalidInputError("dataset_count must be at least 1")
        if not 2 <= self.m_min <= self.m_max:
            raise InvalidInputError("need 2 <= m_min <= m_max")
        if self.m_max > PNR_MAX_NODES:
            raise CapacityError(
                f"m_max {self.m_max} exceeds the sampler bound {PNR_MAX_NODES}"
            )
        if not 1 <= self.blob_min <= self.blob_max:
            raise InvalidInputError("need 1 <= blob_min <= blob_max")
        if self.blob_every < 1:
            raise InvalidInputError("blob_every must be at least 1")
        self.strip_spacing_short = tuple(self.strip_spacing_short)
        self.strip_spacing_long = tuple(self.strip_spacing_long)
        if self.blob_box <= 0 or self.strip_box <= 0 or self.jitter_sigma <= 0:
            raise InvalidInputError("degenerate bounding box or jitter")

    @classmethod
    def from_json(cls, path) -> "BenchConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise InvalidInputError(f"unknown config fields: {sorted(unknown)}")
        return cls(**raw)


@dataclass
class BenchRow:
    dataset_id: int
    method: str
    silhouette: float | None = None
    weighted_density: float | None = None
    cohesion: float | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.error == ""


@dataclass
class BenchReport:
    config: BenchConfig
    rows: list[BenchRow] = field(default_factory=list)

    def summary(self) -> dict:
        out: dict = {"dataset_count": self.config.dataset_count, "methods": {}}
        for method in METHODS:
            good = [r for r in self.rows if r.method == method and r.ok]
            stats = {}
            for name in ("silhouette", "weighted_density", "cohesion"):
                vals = np.array([getattr(r, name) for r in good], dtype=float)
                stats[name] = {
                    "mean": float(vals.mean()) if vals.size else None,
                    "std": float(vals.std()) if vals.size else None,
                }
            stats["rows_ok"] = len(good)
            out["methods"][method] = stats
        out["failed_rows"] = sum(1 for r in self.rows if not r.ok)
        return out


def _derive_seed(master_seed: int, *path: int) -> int:
    return int(
        np.random.SeedSequence([master_seed, *path]).generate_state(1, np.uint64)[0]
    )


def generate_dataset(
    seed: int, m: int, config: BenchConfig, profile: str = "strip"
) -> graph_core.PointSet:
    """One synthetic dataset, deterministic per seed.

    ``profile`` picks the shape family.  "strip": two line-shaped point
    strips (round-robin split) with one short and one long spacing, placed
    at least ``strip_separation`` apart.  "blob": 2 to 4 isotropic Gaussian
    blobs, round-robin points, shared jitter sigma.
    """
    if m < 2:
        raise InvalidInputError("need at least 2 points")
    rng = np.random.default_rng(seed)
    if profile == "strip":
        return _strip_dataset(rng, m, config)
    if profile == "blob":
        return _blob_dataset(rng, m, config)
    raise InvalidInputError(f"unknown dataset profile {profile!r}")


def _ids(m: int) -> list[str]:
    return [f"p{i:03d}" for i in range(m)]


def _strip_dataset(rng, m, config: BenchConfig) -> graph_core.PointSet:
    lo, hi = config.box_lat, config.box_lat + config.strip_box
    lo2, hi2 = config.box_lon, config.box_lon + config.strip_box
    for _ in range(200):
        centers = np.column_stack([rng.uniform(lo, hi, 2), rng.uniform(lo2, hi2, 2)])
        if np.linalg.norm(centers[0] - centers[1]) >= config.strip_separation:
            break
    assignment = np.arange(m) % 2
    spacings = [
        rng.uniform(*config.strip_spacing_short),
        rng.uniform(*config.strip_spacing_long),
    ]
    coords = np.empty((m, 2))
    for b in range(2):
        members = np.nonzero(assignment == b)[0]
        theta = rng.uniform(0.0, np.pi)
        direction = np.array([np.cos(theta), np.sin(theta)])
        normal = np.array([-direction[1], direction[0]])
        offsets = (np.arange(members.size) - (members.size - 1) / 2.0) * spacings[b]
        coords[members] = (
            centers[b][None, :]
            + offsets[:, None] * direction[None, :]
            + rng.normal(0.0, config.strip_jitter, (members.size, 1)) * normal[None, :]
        )
    return graph_core.PointSet(ids=_ids(m), coords=coords)


def _blob_dataset(rng, m, config: BenchConfig) -> graph_core.PointSet:
    n_blobs = int(rng.integers(config.blob_min, config.blob_max + 1))
    for _ in range(300):
        centers = np.column_stack(
            [
                rng.uniform(config.box_lat, config.box_lat + config.blob_box, n_blobs),
                rng.uniform(config.box_lon, config.box_lon + config.blob_box, n_blobs),
            ]
        )
        gaps = np.sqrt(((centers[:, None] - centers[None]) ** 2).sum(-1))
        if n_blobs == 1 or gaps[np.triu_indices(n_blobs, 1)].min() >= config.blob_separation:
            break
    assignment = np.arange(m) % n_blobs
    coords = centers[assignment] + rng.normal(0.0, config.jitter_sigma, (m, 2))
    return graph_core.PointSet(ids=_ids(m), coords=coords)


def _run_one(
    method: str,
    points: graph_core.PointSet,
    a: np.ndarray,
    config: BenchConfig,
    seed: int,
) -> qclust.Clustering:
    if method == "gbs":
        params = qclust.ClusterParams(
            d_percentile=config.d_percentile,
            n_samples=config.gbs_samples,
            mode=config.gbs_mode,
            seed=seed,
        )
        return qclust.gbs_cluster(points, params)
    if method == "kmeans":
        k_max = min(config.kmeans_k_max, len(points))
        k = baselines.elbow_select_k(points, k_max, seed=seed)
        return baselines.kmeans(points, k, seed=seed).to_clustering()
    if method == "dbscan":
        return baselines.dbscan_with_postprocess(
            points, config.dbscan_eps, config.dbscan_min_pts, a
        )
    raise InvalidInputError(f"unknown method {method!r}")


def run_benchmark(config: BenchConfig) -> BenchReport:
    """Score every method on every generated dataset.

    Deterministic: per-dataset seeds derive from the master seed and the
    dataset index, and all methods of one dataset see the identical graph.
    """
    report = BenchReport(config=config)
    for idx in range(config.dataset_count):
        data_seed = _derive_seed(config.master_seed, idx)
        rng = np.random.default_rng(data_seed)
        m = int(rng.integers(config.m_min, config.m_max + 1))
        profile = "blob" if (idx + 1) % config.blob_every == 0 else "strip"
        points = generate_dataset(
            _derive_seed(config.master_seed, idx, 1), m, config, profile=profile
        )
        d = graph_core.compute_distance_matrix(points)
        d_tilde = graph_core.percentile(
            graph_core.upper_triangle_values(d), config.d_percentile
        )
        a = (
            graph_core.build_adjacency(d, d_tilde)
            if d_tilde > 0
            else np.zeros_like(d)
        )
        for method in METHODS:
            row = BenchRow(dataset_id=idx, method=method)
            try:
                clustering = _run_one(
                    method, points, a, config, _derive_seed(config.master_seed, idx, 2)
                )
                scores = metrics.compute_report(points, clustering, a)
                row.silhouette = scores.silhouette
                row.weighted_density = scores.weighted_density
                row.cohesion = scores.cohesion
            except Exception as exc:  # fail-soft: keep the run alive
                row.error = f"{type(exc).__name__}: {exc}"
            report.rows.append(row)
    return report


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.17g}"


def emit_report(report: BenchReport, out_dir) -> tuple[str, str]:
    """Write report.csv (one row per dataset and method) and summary.json."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    json_path = os.path.join(out_dir, "summary.json")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["dataset_id", "method", "silhouette", "weighted_density", "cohesion", "error"]
        )
        for row in report.rows:
            writer.writerow(
                [
                    row.dataset_id,
                    row.method,
                    _fmt(row.silhouette),
                    _fmt(row.weighted_density),
                    _fmt(row.cohesion),
                    row.error,
                ]
            )
    payload = {"config": asdict(report.config), "summary": report.summary()}
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path
