"""Decision problems expressed as pointwise maxima of affine functions.

The worst-case dual builder needs each cost f(x, xi) as max_l a_l(xi)'x + b_l(xi)
jointly with the decision constraints. Two problems are provided:

  - Newsvendor: f(x, xi) = sum_d [h max(x_d - xi_d, 0) + b max(xi_d - x_d, 0)],
    x >= 0. In one dimension the cost is itself a 2-piece max; for D >= 2 it
    separates per coordinate, so the builder receives per-coordinate 2-piece
    groups and sums them through auxiliary epigraph variables (exponentially
    smaller than enumerating 2^D joint pieces, same optimum).
  - Portfolio: f(x, xi) = -xi'x with x on the probability simplex (one piece).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConstraintViolationError


class XConstraint(Enum):
    NONNEGATIVE = "nonnegative"
    SIMPLEX = "simplex"


@dataclass(frozen=True)
class ProblemSpec:
    """A cost given by affine pieces plus decision-variable constraints.

    separable is True when the cost splits as a sum over coordinates of
    per-coordinate piece maxima (the builder then adds epigraph auxiliaries
    for D >= 2); otherwise the pieces apply to x jointly.
    """

    name: str
    dim: int
    x_constraint: XConstraint
    separable: bool
    backorder: float = 0.0
    holding: float = 0.0

    def pieces(self, xi: np.ndarray):
        """Affine pieces at one data point.

        Joint problems return a list of (a, b) with a of length dim; separable
        problems return, per coordinate, the list of scalar pieces (a_d, b_d).
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if xi.shape[0] != self.dim:
            raise ValueError(f"point dimension {xi.shape[0]} != problem dim {self.dim}")
        if self.name == "portfolio":
            return [(-xi, 0.0)]
        if self.name == "newsvendor":
            return [
                [(self.holding, -self.holding * x), (-self.backorder, self.backorder * x)]
                for x in xi
            ]
        raise ValueError(f"unknown problem {self.name!r}")

    def check_x(self, x: np.ndarray, tol: float = 1e-8) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape[0] != self.dim:
            raise ConstraintViolationError(f"decision dimension {x.shape[0]} != {self.dim}")
        if np.any(x < -tol):
            raise ConstraintViolationError(f"decision must be nonnegative, got min {x.min()}")
        if self.x_constraint is XConstraint.SIMPLEX and abs(x.sum() - 1.0) > tol:
            raise ConstraintViolationError(f"decision must sum to 1, got {x.sum()}")
        return x


def newsvendor(backorder: float = 8.0, holding: float = 3.0, dim: int = 1) -> ProblemSpec:
    """Newsvendor with backorder cost b and holding cost h per unit."""
    if backorder <= 0 or holding <= 0:
        raise ValueError("backorder and holding costs must be positive")
    return ProblemSpec(
        name="newsvendor",
        dim=dim,
        x_constraint=XConstraint.NONNEGATIVE,
        separable=True,
        backorder=backorder,
        holding=holding,
    )


def portfolio(dim: int) -> ProblemSpec:
    """Portfolio return maximization as cost -xi'x over the simplex."""
    return ProblemSpec(
        name="portfolio",
        dim=dim,
        x_constraint=XConstraint.SIMPLEX,
        separable=False,
    )


def newsvendor_pieces(xi, backorder: float, holding: float, dim: int = 1):
    """Per-coordinate affine pieces of the newsvendor cost at one point."""
    return newsvendor(backorder, holding, dim).pieces(xi)


def portfolio_pieces(xi, dim: int):
    """The single affine piece of the portfolio cost at one point."""
    return portfolio(dim).pieces(xi)


def cost_eval(problem: ProblemSpec, x, xi) -> float:
    """Exact cost f(x, xi); validates the decision constraints."""
    x = problem.check_x(x)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape[0] != problem.dim:
        raise ValueError(f"point dimension {xi.shape[0]} != problem dim {problem.dim}")
    if problem.name == "portfolio":
        return float(-xi @ x)
    over = np.maximum(x - xi, 0.0)
    under = np.maximum(xi - x, 0.0)
    return float(problem.holding * over.sum() + problem.backorder * under.sum())


def cost_eval_many(problem: ProblemSpec, x, points: np.ndarray) -> np.ndarray:
    """Vectorized cost over rows of points (validates x once)."""
    x = problem.check_x(x)
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if problem.name == "portfolio":
        return -(pts @ x)
    over = np.maximum(x[None, :] - pts, 0.0)
    under = np.maximum(pts - x[None, :], 0.0)
    return problem.holding * over.sum(axis=1) + problem.backorder * under.sum(axis=1)


def piece_max(problem: ProblemSpec, x, xi) -> float:
    """Cost reconstructed from the piece representation (for fidelity checks)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pieces = problem.pieces(xi)
    if problem.separable:
        total = 0.0
        for d, group in enumerate(pieces):
            total += max(a * x[d] + b for a, b in group)
        return float(total)
    return float(max(np.dot(a, x) + b for a, b in pieces))
