"""Gaussian-kernel primitives: bandwidth selection, Gram matrices, and exact
squared MMD between finite discrete measures.

The kernel is fixed to the Gaussian k(x, y) = exp(-||x - y||^2 / (2 ell^2)),
which is bounded by M = 1 and characteristic. All distances computed here are
squared Euclidean. The squared MMD between discrete measures is evaluated in
its exact V-statistic form (diagonal terms included), which is the exact MMD
of the two discrete measures rather than an unbiased estimate of anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, DimensionMismatchError, InternalConsistencyError

# Largest negative value of mmd_sq attributable to round-off; anything below
# this indicates a bug rather than floating-point noise.
NEGATIVE_MMD_TOL = 1e-10

# Row block size for chunked Gram accumulation (keeps peak memory ~O(block * n)).
_BLOCK_ROWS = 2048


@dataclass(frozen=True)
class Bandwidth:
    """Length-scale of the Gaussian kernel, in data units."""

    ell: float

    def __post_init__(self):
        if not (math.isfinite(self.ell) and self.ell > 0):
            raise ValueError(f"bandwidth must be positive and finite, got {self.ell!r}")


def as_points(data) -> np.ndarray:
    """Coerce a point list to a float (n, D) array; 1-D input becomes (n, 1)."""
    pts = np.asarray(data, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"expected a non-empty (n, D) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


@dataclass(frozen=True)
class WeightedMeasure:
    """Finite discrete probability measure: atoms in R^D plus nonnegative weights."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = as_points(self.atoms)
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.shape[0] != atoms.shape[0]:
            raise ValueError("weights must be a vector matching the number of atoms")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        total = weights.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {total!r}")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points) -> "WeightedMeasure":
        pts = as_points(points)
        n = pts.shape[0]
        return cls(pts, np.full(n, 1.0 / n))

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def canonical(self) -> dict[tuple, float]:
        """Aggregate weights over coinciding atoms (the induced atom -> weight map).

        Zero-weight atoms are dropped; two measures are equal as distributions
        iff their canonical maps agree.
        """
        agg: dict[tuple, float] = {}
        for atom, w in zip(self.atoms, self.weights):
            if w == 0.0:
                continue
            key = tuple(atom.tolist())
            agg[key] = agg.get(key, 0.0) + float(w)
        return agg


def _check_common_dim(a: np.ndarray, b: np.ndarray):
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(
            f"point sets have dimensions {a.shape[1]} and {b.shape[1]}"
        )


def median_heuristic(data) -> Bandwidth:
    """Bandwidth from the median heuristic: ell^2 = median(||xi - xj||^2, i < j) / 2.

    The median of an even count is the mean of the two central order statistics
    (numpy's convention). All-identical points have zero median distance and
    raise DegenerateDataError.
    """
    pts = as_points(data)
    n = pts.shape[0]
    if n < 2:
        raise DegenerateDataError("degenerate data: need at least 2 points")
    sq = _sq_dists(pts, pts)
    iu = np.triu_indices(n, k=1)
    med = float(np.median(sq[iu]))
    if med <= 0.0:
        raise DegenerateDataError("degenerate data: all points identical (zero bandwidth)")
    return Bandwidth(math.sqrt(med / 2.0))


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # ||x - y||^2 via the expansion; clipped at 0 against round-off.
    aa = np.einsum("ij,ij->i", a, a)[:, None]
    bb = np.einsum("ij,ij->i", b, b)[None, :]
    sq = aa + bb - 2.0 * (a @ b.T)
    np.maximum(sq, 0.0, out=sq)
    return sq


def kernel_eval(x, y, bw: Bandwidth) -> float:
    """Gaussian kernel value exp(-||x - y||^2 / (2 ell^2)); in (0, 1]."""
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    if xv.shape != yv.shape:
        raise DimensionMismatchError(f"point shapes differ: {xv.shape} vs {yv.shape}")
    d2 = float(np.sum((xv - yv) ** 2))
    return math.exp(-d2 / (2.0 * bw.ell**2))


def gram(a, b, bw: Bandwidth) -> np.ndarray:
    """Dense Gram matrix K[i, j] = k(a_i, b_j).

    Entries are accumulated row-major, left-to-right, so results are
    bitwise-deterministic for given inputs.
    """
    pa = as_points(a)
    pb = as_points(b)
    _check_common_dim(pa, pb)
    inv = 1.0 / (2.0 * bw.ell**2)
    out = np.empty((pa.shape[0], pb.shape[0]))
    for start in range(0, pa.shape[0], _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, pa.shape[0])
        out[start:stop] = np.exp(-_sq_dists(pa[start:stop], pb) * inv)
    return out


def _quad_form(a: np.ndarray, wa: np.ndarray, b: np.ndarray, wb: np.ndarray, inv: float) -> float:
    # wa' K(a, b) wb accumulated in row blocks to bound memory on large inputs.
    total = 0.0
    for start in range(0, a.shape[0], _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, a.shape[0])
        kb = np.exp(-_sq_dists(a[start:stop], b) * inv)
        total += float(wa[start:stop] @ (kb @ wb))
    return total


def mmd_sq(p: WeightedMeasure, q: WeightedMeasure, bw: Bandwidth) -> float:
    """Exact squared MMD between two discrete measures.

    Returns w_P' K_PP w_P - 2 w_P' K_PQ w_Q + w_Q' K_QQ w_Q, clamped to 0 if a
    round-off-sized negative appears. Negatives beyond round-off raise.
    """
    _check_common_dim(p.atoms, q.atoms)
    inv = 1.0 / (2.0 * bw.ell**2)
    pp = _quad_form(p.atoms, p.weights, p.atoms, p.weights, inv)
    qq = _quad_form(q.atoms, q.weights, q.atoms, q.weights, inv)
    pq = _quad_form(p.atoms, p.weights, q.atoms, q.weights, inv)
    val = pp - 2.0 * pq + qq
    if val < -NEGATIVE_MMD_TOL:
        raise InternalConsistencyError(f"mmd_sq produced {val!r} < -{NEGATIVE_MMD_TOL}")
    return max(val, 0.0)


def mmd(p: WeightedMeasure, q: WeightedMeasure, bw: Bandwidth) -> float:
    """sqrt of mmd_sq."""
    return math.sqrt(mmd_sq(p, q, bw))
