"""Offline placement: density maps, balanced AP clustering, EDC placement and sizing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .devs import ConfigurationError
from .mobility import MobilityTrace


@dataclass
class DensityMap:
    """Peak number of distinct UEs seen in each square cell during any window."""

    cell_size: float
    window: float
    origin: tuple[float, float]  # lower-left corner of cell (0, 0)
    counts: np.ndarray  # shape (nx, ny)

    def center(self, i: int, j: int) -> tuple[float, float]:
        return (self.origin[0] + (i + 0.5) * self.cell_size, self.origin[1] + (j + 0.5) * self.cell_size)

    def nonzero(self) -> tuple[np.ndarray, np.ndarray]:
        """Centres and weights of the occupied cells, in row-major order."""
        idx = np.argwhere(self.counts > 0)
        centers = np.array([self.center(i, j) for i, j in idx], dtype=float).reshape(-1, 2)
        return centers, self.counts[self.counts > 0].astype(float)

    @property
    def peak(self) -> int:
        return int(self.counts.max(initial=0))


def build_density_map(traces: Sequence[MobilityTrace], cell_size: float, window: float) -> DensityMap:
    if cell_size <= 0 or window <= 0:
        raise ConfigurationError("cell size and window must be positive")
    samples = [(tr.ue_id, t, x, y) for tr in traces for t, (x, y) in zip(tr.times, tr.points)]
    if not samples:
        raise ConfigurationError("no trace samples")
    xs = np.array([s[2] for s in samples])
    ys = np.array([s[3] for s in samples])
    ts = np.array([s[1] for s in samples])
    x0, y0 = float(xs.min()), float(ys.min())
    ci = np.floor((xs - x0) / cell_size).astype(int)
    cj = np.floor((ys - y0) / cell_size).astype(int)
    wk = np.floor((ts - ts.min()) / window).astype(int)
    seen: dict[tuple[int, int, int], set[str]] = {}
    for (ue, *_), i, j, w in zip(samples, ci, cj, wk):
        seen.setdefault((int(i), int(j), int(w)), set()).add(ue)
    counts = np.zeros((ci.max() + 1, cj.max() + 1), dtype=int)
    for (i, j, _), ues in seen.items():
        counts[i, j] = max(counts[i, j], len(ues))
    return DensityMap(cell_size, window, (x0, y0), counts)


def peak_concurrent_ues(traces: Sequence[MobilityTrace], window: float) -> int:
    """Largest number of distinct UEs present anywhere during one window."""
    per_window: dict[int, set[str]] = {}
    t0 = min(tr.start for tr in traces)
    for tr in traces:
        for t in tr.times:
            per_window.setdefault(int((t - t0) // window), set()).add(tr.ue_id)
    return max(len(v) for v in per_window.values())


# ---------------------------------------------------------------------------
# clustering

def _kmeanspp(points: np.ndarray, weights: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    first = rng.choice(len(points), p=weights / weights.sum())
    centers = [points[first]]
    for _ in range(1, k):
        d2 = np.min(((points[:, None, :] - np.array(centers)[None]) ** 2).sum(-1), axis=1)
        p = weights * d2
        if p.sum() <= 0:
            taken = {tuple(c) for c in centers}
            rest = [i for i in range(len(points)) if tuple(points[i]) not in taken]
            centers.append(points[rest[0]] if rest else points[0])
            continue
        centers.append(points[rng.choice(len(points), p=p / p.sum())])
    return np.array(centers, dtype=float)


def _assign(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = ((points[:, None, :] - centers[None]) ** 2).sum(-1)
    return np.argmin(d2, axis=1)


def _centroids(points, weights, labels, k, previous) -> np.ndarray:
    centers = previous.copy()
    for c in range(k):
        mask = labels == c
        if weights[mask].sum() > 0:
            centers[c] = np.average(points[mask], axis=0, weights=weights[mask])
    return centers


def weighted_sse(points, weights, labels, centers) -> float:
    return float((weights * ((points - centers[labels]) ** 2).sum(-1)).sum())


def lloyd(points: np.ndarray, weights: np.ndarray, centers: np.ndarray, max_iter: int = 100):
    """Weighted Lloyd iterations; returns centres, labels and the SSE after each step."""
    k = len(centers)
    history = []
    labels = _assign(points, centers)
    for _ in range(max_iter):
        centers = _centroids(points, weights, labels, k, centers)
        history.append(weighted_sse(points, weights, labels, centers))
        new = _assign(points, centers)
        if np.array_equal(new, labels):
            break
        labels = new
    return centers, labels, history


@dataclass
class BalancedClusters:
    centroids: np.ndarray
    labels: np.ndarray
    weights: np.ndarray  # per cluster
    imbalance: float  # (max - min) / total weight
    converged: bool


def imbalance(cluster_weights: np.ndarray) -> float:
    total = cluster_weights.sum()
    return float((cluster_weights.max() - cluster_weights.min()) / total) if total else 0.0


def _repair(points, weights, labels, k, tolerance, max_moves):
    """Move boundary cells from the heaviest to the lightest cluster."""
    labels = labels.copy()
    cw = np.bincount(labels, weights=weights, minlength=k)
    for _ in range(max_moves):
        if imbalance(cw) <= tolerance:
            break
        heavy, light = int(np.argmax(cw)), int(np.argmin(cw))
        gap = cw[heavy] - cw[light]
        centers = _centroids(points, weights, labels, k, np.zeros((k, 2)))
        movable = np.flatnonzero((labels == heavy) & (weights < gap))
        if len(movable) == 0:
            break
        cost = (np.linalg.norm(points[movable] - centers[light], axis=1)
                - np.linalg.norm(points[movable] - centers[heavy], axis=1))
        cell = movable[np.lexsort((movable, cost))[0]]
        labels[cell] = light
        cw[heavy] -= weights[cell]
        cw[light] += weights[cell]
    return labels, cw


def balanced_kmeans(points, weights=None, k: int = 2, tolerance: float = 0.1, max_iter: int = 100,
                    seed: int = 0, n_init: int = 5) -> BalancedClusters:
    """K-means over weighted cells, then a balancing repair pass.

    ``points`` may be a :class:`DensityMap`, in which case its occupied
    cells and counts are used.
    """
    if isinstance(points, DensityMap):
        points, weights = points.nonzero()
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    weights = np.ones(len(points)) if weights is None else np.asarray(weights, dtype=float)
    occupied = int((weights > 0).sum())
    if k < 1 or k > occupied:
        raise ConfigurationError(f"k={k} needs 1 <= k <= {occupied} occupied cells")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        centers, labels, history = lloyd(points, weights, _kmeanspp(points, weights, k, rng), max_iter)
        labels, cw = _repair(points, weights, labels, k, tolerance, max_moves=10 * len(points))
        centers = _centroids(points, weights, labels, k, centers)
        score = (imbalance(cw) > tolerance, weighted_sse(points, weights, labels, centers))
        if best is None or score < best[0]:
            best = (score, centers, labels, cw)
    _, centers, labels, cw = best
    return BalancedClusters(centers, labels, cw, imbalance(cw), imbalance(cw) <= tolerance)


@dataclass
class KMeansResult:
    centroids: np.ndarray
    labels: np.ndarray
    sse: float
    history: list[float] = field(default_factory=list)


def place_edcs(ap_locations, n_edcs: int, seed: int = 0, n_init: int = 20,
               max_iter: int = 100) -> KMeansResult:
    """Standard k-means over AP locations, best of ``n_init`` seeded restarts."""
    points = np.asarray(ap_locations, dtype=float).reshape(-1, 2)
    if not 1 <= n_edcs <= len(points):
        raise ConfigurationError(f"need 1 <= EDCs <= {len(points)} APs, got {n_edcs}")
    weights = np.ones(len(points))
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        centers, labels, history = lloyd(points, weights, _kmeanspp(points, weights, n_edcs, rng),
                                         max_iter)
        sse = weighted_sse(points, weights, labels, centers)
        if best is None or sse < best.sse - 1e-9:
            best = KMeansResult(centers, labels, sse, history)
    return best


def size_federation(peak_sessions: int, sessions_per_pu: int, replication: int) -> tuple[int, int]:
    """(EDC count, PUs per EDC): every EDC can absorb the whole peak on its own."""
    if min(peak_sessions, sessions_per_pu, replication) < 1:
        raise ConfigurationError("federation sizing inputs must be >= 1")
    return replication, math.ceil(peak_sessions / sessions_per_pu)


def suggest_ap_count(peak_ues: int, ues_per_ap: int = 10) -> int:
    return max(1, math.ceil(peak_ues / ues_per_ap))


@dataclass
class Placement:
    aps: list[tuple[float, float]]
    edcs: list[tuple[float, float]]
    pus_per_edc: int
    density: DensityMap | None = None

    @property
    def edc_count(self) -> int:
        return len(self.edcs)

    def to_config(self) -> dict:
        """Fragment with ``aps`` and ``edcs`` tables, mergeable into a scenario."""
        return {
            "aps": [{"id": f"ap_{i}", "location": [float(x), float(y)]} for i, (x, y) in enumerate(self.aps)],
            "edcs": [{"id": f"edc_{i}", "location": [float(x), float(y)], "pus": self.pus_per_edc}
                     for i, (x, y) in enumerate(self.edcs)],
        }


def allocate(traces: Sequence[MobilityTrace], cell_size: float, window: float, aps: int | None,
             replication: int, sessions_per_pu: int = 5, sessions_per_ue: int = 1,
             tolerance: float = 0.1, seed: int = 0) -> Placement:
    density = build_density_map(traces, cell_size, window)
    peak = peak_concurrent_ues(traces, window)
    if aps is None:
        aps = suggest_ap_count(peak)
    clusters = balanced_kmeans(density, k=aps, tolerance=tolerance, seed=seed)
    edc_count, pus = size_federation(peak * sessions_per_ue, sessions_per_pu, replication)
    edcs = place_edcs(clusters.centroids, min(edc_count, aps), seed=seed)
    return Placement([tuple(c) for c in clusters.centroids], [tuple(c) for c in edcs.centroids], pus,
                     density)
