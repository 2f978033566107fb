"""Bidirectional nearest-neighbor matching between two clouds.

Two interchangeable routes: an exhaustive O(n*m) scan and a kd-tree
accelerated one. Both break distance ties toward the smallest target
index and store squared distances computed with the same arithmetic
(((a - b)**2).sum(-1)), so their results are bit-identical; tests hold
them to that.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud

WORKERS_ENV_VAR = "CHAMFERKIT_WORKERS"

_CHUNK_BYTES = 1 << 26  # scratch budget per brute-force row chunk

# Relative gap below which the two nearest kd-tree candidates are treated
# as a potential tie and re-resolved exactly.
_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class MatchResult:
    """Nearest-neighbor correspondence in both directions.

    fwd_idx[j] is the index in b of the point nearest to a[j] (smallest
    index on exact ties) and fwd_sq[j] its squared Euclidean distance;
    bwd_* is the same with the clouds swapped. Squared distance is the
    canonical stored quantity; callers take square roots when they need
    the raw distance.
    """

    fwd_idx: np.ndarray
    fwd_sq: np.ndarray
    bwd_idx: np.ndarray
    bwd_sq: np.ndarray


def pair_sq(points_a: np.ndarray, points_b: np.ndarray) -> np.ndarray:
    """Canonical squared distance between aligned rows of two (N, 3) arrays."""
    diff = points_a - points_b
    return (diff * diff).sum(axis=-1)


def resolve_workers(workers: int | None = None) -> int:
    """Worker-thread count for the accelerated route.

    Explicit argument wins, then the CHAMFERKIT_WORKERS environment
    variable, then 1. -1 means all cores (passed through to the index).
    """
    if workers is None:
        raw = os.environ.get(WORKERS_ENV_VAR, "").strip()
        if raw:
            try:
                workers = int(raw)
            except ValueError:
                raise ValueError(
                    f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}"
                ) from None
        else:
            workers = 1
    if workers == 0 or workers < -1:
        raise ValueError(f"workers must be a positive count or -1, got {workers}")
    return workers


def match_brute(a: PointCloud, b: PointCloud) -> MatchResult:
    """Exhaustive matching; the reference the accelerated route is held to."""
    fwd_idx, fwd_sq, bwd_idx, bwd_sq = _brute_nearest_both(a.points, b.points)
    return MatchResult(fwd_idx, fwd_sq, bwd_idx, bwd_sq)


def _brute_nearest_both(A: np.ndarray, B: np.ndarray):
    n, m = len(A), len(B)
    fwd_idx = np.empty(n, dtype=np.int64)
    fwd_sq = np.empty(n)
    bwd_idx = np.zeros(m, dtype=np.int64)
    bwd_sq = np.full(m, np.inf)
    chunk = max(1, _CHUNK_BYTES // (m * 3 * 8))
    for start in range(0, n, chunk):
        rows = A[start : start + chunk]
        diff = rows[:, None, :] - B[None, :, :]
        sq = (diff * diff).sum(axis=2)
        idx = sq.argmin(axis=1)  # argmin takes the first (lowest) index on ties
        fwd_idx[start : start + len(rows)] = idx
        fwd_sq[start : start + len(rows)] = sq[np.arange(len(rows)), idx]
        col_min = sq.min(axis=0)
        col_idx = sq.argmin(axis=0) + start
        better = col_min < bwd_sq  # strict, so earlier (lower) rows keep ties
        bwd_idx[better] = col_idx[better]
        bwd_sq[better] = col_min[better]
    return fwd_idx, fwd_sq, bwd_idx, bwd_sq


def match_indexed(a: PointCloud, b: PointCloud, workers: int | None = None) -> MatchResult:
    """Spatial-index matching, index-exact with match_brute.

    The index does not promise any tie order, so queries whose two
    nearest distances are not clearly separated are re-resolved with an
    exact candidate scan, and all squared distances are recomputed from
    the chosen indices with the canonical arithmetic.
    """
    w = resolve_workers(workers)
    fwd_idx, fwd_sq = _indexed_nearest(a.points, b.points, w)
    bwd_idx, bwd_sq = _indexed_nearest(b.points, a.points, w)
    return MatchResult(fwd_idx, fwd_sq, bwd_idx, bwd_sq)


def _indexed_nearest(Q: np.ndarray, T: np.ndarray, workers: int):
    tree = cKDTree(T)
    k = min(2, len(T))
    dist, idx = tree.query(Q, k=k, workers=workers)
    if k == 1:
        best = np.zeros(len(Q), dtype=np.int64)  # single candidate, nothing to break
    else:
        best = idx[:, 0].astype(np.int64)
        gap = dist[:, 1] - dist[:, 0]
        # catches exact ties (gap 0) and near-ties the tree may have ordered
        # by its own rounding; 1e-9 is far above kd arithmetic error
        ambiguous = gap <= _TIE_RTOL * dist[:, 0]
        if ambiguous.any():
            queries = np.flatnonzero(ambiguous)
            radii = dist[queries, 0] * (1.0 + _TIE_RTOL)
            hits = tree.query_ball_point(Q[queries], radii, workers=workers)
            for q, cand in zip(queries, hits):
                cand = np.asarray(cand, dtype=np.int64)
                sq = pair_sq(Q[q], T[cand])
                best[q] = cand[sq == sq.min()].min()
    return best, pair_sq(Q, T[best])
