"""Worst-case expected cost over an MMD ball, via its finite dual program.

The ambiguity set is an MMD ball of radius epsilon around a nominal discrete
measure (either a posterior-predictive sample pool or the raw empirical
measure). The worst-case problem dualizes to

    min_{x, g0, g}  g0 + mean_i g(xi_hat_i) + epsilon ||g||_k
    s.t.            f(x, zeta_j) <= g0 + g(zeta_j)   for all constraint points,

with g parameterized by kernel coefficients over the SAA points and the
discretization points (the representer expansion). The semi-infinite
constraint is discretized at zeta UNION the SAA points themselves; including
the SAA points costs little and makes the solved objective a certified upper
bound on the nominal SAA cost. The resulting program is linear plus one
second-order cone and is solved by the internal interior-point method, with a
projected-subgradient fallback if the IPM stalls.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .errors import (
    ConfigError,
    GramFactorizationError,
    InternalConsistencyError,
    SolverError,
)
from .kernel import Bandwidth, WeightedMeasure, as_points, gram, mmd_sq
from .problems import ProblemSpec, XConstraint, cost_eval_many
from .socp import ConeDims, solve_conic

GRAM_JITTERS = (1e-8, 1e-6)


@dataclass(frozen=True)
class NominalSpec:
    """Centre of the ambiguity set: uniform SAA points plus their provenance.

    kind "robas" uses a posterior-predictive pool; kind "empirical" uses the
    observations themselves (the MMD ball around the empirical measure). data
    holds the raw observations in both cases; the resample discretization
    strategy draws from points and data combined.
    """

    kind: str
    points: np.ndarray
    data: np.ndarray
    bandwidth: Bandwidth

    def __post_init__(self):
        if self.kind not in ("robas", "empirical"):
            raise ConfigError(f"unknown nominal kind {self.kind!r}")
        object.__setattr__(self, "points", as_points(self.points))
        object.__setattr__(self, "data", as_points(self.data))

    def measure(self) -> WeightedMeasure:
        return WeightedMeasure.uniform(self.points)


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    accept_tol: float = 1e-6
    max_iter: int = 200
    fallback: bool = True
    fallback_iters: int = 20000


@dataclass
class DualProgram:
    """Assembled dual skeleton; epsilon enters only the objective.

    The solver works in the whitened coordinates beta = L' alpha (L the
    jittered Cholesky factor), where the cone is isotropic and the kernel
    column space is not fighting the jitter; constraint_matrix maps beta to
    the exact constraint values K alpha = (L - jitter L^-T) beta.
    """

    all_points: np.ndarray  # unique SAA + discretization points
    gram_matrix: np.ndarray  # kernel matrix over all_points (no jitter)
    chol_factor: np.ndarray  # lower Cholesky factor of gram + jitter I
    constraint_matrix: np.ndarray  # K L^-T, exactly L - jitter L^-T
    jitter: float
    saa_weights: np.ndarray  # multiplicity/N over all_points rows
    epsilon: float
    problem: ProblemSpec
    bandwidth: Bandwidth
    n_saa: int  # number of (possibly duplicated) SAA samples

    def with_epsilon(self, epsilon: float) -> "DualProgram":
        if epsilon < 0:
            raise ConfigError("epsilon must be nonnegative")
        return replace(self, epsilon=epsilon)

    @property
    def n_points(self) -> int:
        return self.all_points.shape[0]


@dataclass
class DualSolution:
    x: np.ndarray
    g0: float
    coeffs: np.ndarray
    objective: float
    stats: dict = field(default_factory=dict)


def discretization_points(
    nominal: NominalSpec,
    m: int = 200,
    strategy: str = "auto",
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Constraint points for the discretized semi-infinite dual.

    "grid" (1-D only) spreads m points over the nominal range extended by 25%
    on each side; "resample" draws m points from the nominal pool plus the raw
    data (without replacement unless m exceeds that pool). "auto" picks grid
    in one dimension and resample otherwise.
    """
    if m < 1:
        raise ConfigError("m must be >= 1")
    dim = nominal.points.shape[1]
    if strategy == "auto":
        strategy = "grid" if dim == 1 else "resample"
    if strategy == "grid":
        if dim != 1:
            raise ConfigError("grid discretization is 1-D only")
        lo = float(nominal.points.min())
        hi = float(nominal.points.max())
        span = hi - lo
        return np.linspace(lo - 0.25 * span, hi + 0.25 * span, m)[:, None]
    if strategy == "resample":
        if rng is None:
            raise ConfigError("resample strategy needs an rng")
        pool = np.vstack([nominal.points, nominal.data])
        idx = rng.choice(pool.shape[0], size=m, replace=m > pool.shape[0])
        return pool[idx]
    raise ConfigError(f"unknown discretization strategy {strategy!r}")


def _dedup_rows(points: np.ndarray):
    """First-occurrence unique rows (exact coordinate match) plus an index map."""
    seen: dict[bytes, int] = {}
    unique = []
    index = np.empty(points.shape[0], dtype=int)
    for i, row in enumerate(points):
        key = row.tobytes()
        at = seen.get(key)
        if at is None:
            at = len(unique)
            seen[key] = at
            unique.append(row)
        index[i] = at
    return np.asarray(unique), index


def build_dual(
    nominal: NominalSpec,
    zeta: np.ndarray,
    epsilon: float,
    problem: ProblemSpec,
    bw: Bandwidth | None = None,
) -> DualProgram:
    """Assemble the kernel data of the dual program.

    Constraint points are the union of the SAA points and zeta, deduplicated
    by exact coordinate match; duplicated SAA samples fold into multiplicity
    weights so the SAA average is unchanged.
    """
    if epsilon < 0:
        raise ConfigError("epsilon must be nonnegative")
    bw = bw or nominal.bandwidth
    saa = nominal.points
    zeta = as_points(zeta) if len(zeta) else np.empty((0, saa.shape[1]))
    if zeta.shape[0] and zeta.shape[1] != saa.shape[1]:
        raise ConfigError("discretization dimension mismatch")
    stacked = np.vstack([saa, zeta]) if zeta.shape[0] else saa
    all_points, index = _dedup_rows(stacked)
    n_saa = saa.shape[0]
    weights = np.zeros(all_points.shape[0])
    np.add.at(weights, index[:n_saa], 1.0 / n_saa)

    kmat = gram(all_points, all_points, bw)
    factor = None
    jitter_used = GRAM_JITTERS[-1]
    for jitter in GRAM_JITTERS:
        try:
            factor = cholesky(
                kmat + jitter * np.eye(kmat.shape[0]), lower=True, check_finite=False
            )
            jitter_used = jitter
            break
        except np.linalg.LinAlgError:
            continue
    if factor is None:
        raise GramFactorizationError("gram not factorizable")
    inv_t = solve_triangular(
        factor, np.eye(factor.shape[0]), lower=True, check_finite=False
    ).T
    return DualProgram(
        all_points=all_points,
        gram_matrix=kmat,
        chol_factor=factor,
        constraint_matrix=factor - jitter_used * inv_t,
        jitter=jitter_used,
        saa_weights=weights,
        epsilon=float(epsilon),
        problem=problem,
        bandwidth=bw,
        n_saa=n_saa,
    )


def _conic_data(program: DualProgram):
    """Dense conic form of the dual program, in whitened coordinates.

    Variable order: x (d), g0, beta (P), [u per (point, coord) for separable
    costs in D >= 2], t (only when epsilon > 0). Orthant rows first, then the
    single second-order cone (t, beta); the dual function values on the
    constraint points are constraint_matrix @ beta = K alpha.
    """
    prob = program.problem
    pts = program.all_points
    mmat = program.constraint_matrix
    n_pts = pts.shape[0]
    d = prob.dim
    separable_aux = prob.separable and d > 1
    use_cone = program.epsilon > 0

    n_u = n_pts * d if separable_aux else 0
    n_var = d + 1 + n_pts + n_u + (1 if use_cone else 0)
    col_x = 0
    col_g0 = d
    col_b = d + 1
    col_u = col_b + n_pts
    col_t = col_u + n_u

    rows = []
    rhs = []
    if not separable_aux:
        piece_groups = [prob.pieces(p) for p in pts]
        if prob.separable:  # one-dimensional separable cost: direct 2-piece rows
            piece_groups = [
                [(np.array([a]), b) for a, b in groups[0]] for groups in piece_groups
            ]
        for j, pieces in enumerate(piece_groups):
            for a_vec, b_off in pieces:
                row = np.zeros(n_var)
                row[col_x : col_x + d] = a_vec
                row[col_g0] = -1.0
                row[col_b : col_b + n_pts] = -mmat[j]
                rows.append(row)
                rhs.append(-b_off)
    else:
        for j, p in enumerate(pts):
            groups = prob.pieces(p)
            for dd, group in enumerate(groups):
                for a_coef, b_off in group:
                    row = np.zeros(n_var)
                    row[col_x + dd] = a_coef
                    row[col_u + j * d + dd] = -1.0
                    rows.append(row)
                    rhs.append(-b_off)
            row = np.zeros(n_var)
            row[col_u + j * d : col_u + (j + 1) * d] = 1.0
            row[col_g0] = -1.0
            row[col_b : col_b + n_pts] = -mmat[j]
            rows.append(row)
            rhs.append(0.0)
    for dd in range(d):  # x >= 0 under both constraint kinds
        row = np.zeros(n_var)
        row[col_x + dd] = -1.0
        rows.append(row)
        rhs.append(0.0)

    g_orth = np.asarray(rows)
    h_orth = np.asarray(rhs)
    dims = ConeDims(g_orth.shape[0], (n_pts + 1,) if use_cone else ())
    if use_cone:
        g_soc = np.zeros((n_pts + 1, n_var))
        g_soc[0, col_t] = -1.0
        g_soc[1:, col_b : col_b + n_pts] = -np.eye(n_pts)
        g_full = np.vstack([g_orth, g_soc])
        h_full = np.concatenate([h_orth, np.zeros(n_pts + 1)])
    else:
        g_full = g_orth
        h_full = h_orth

    c = np.zeros(n_var)
    c[col_g0] = 1.0
    c[col_b : col_b + n_pts] = mmat.T @ program.saa_weights
    if use_cone:
        c[col_t] = program.epsilon

    if prob.x_constraint is XConstraint.SIMPLEX:
        a_eq = np.zeros((1, n_var))
        a_eq[0, col_x : col_x + d] = 1.0
        b_eq = np.array([1.0])
    else:
        a_eq = b_eq = None
    return c, g_full, h_full, dims, a_eq, b_eq, (col_x, col_g0, col_b)


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u - css / np.arange(1, len(v) + 1) > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def _dual_objective(program: DualProgram, x: np.ndarray, g0: float, alpha: np.ndarray) -> float:
    saa_term = float(program.saa_weights @ (program.gram_matrix @ alpha))
    norm_term = float(np.linalg.norm(program.chol_factor.T @ alpha))
    return g0 + saa_term + program.epsilon * norm_term


def _subgradient_fallback(program: DualProgram, x0, alpha0, iters: int):
    """Projected subgradient on the g0-eliminated dual; slow but dependable.

    With g0 chosen as the worst constraint violation the iterate is always
    feasible, so the best value seen is a valid (if slightly loose) optimum.
    """
    prob = program.problem
    pts = program.all_points
    kmat = program.gram_matrix
    q = kmat @ program.saa_weights
    x = prob.check_x(x0).copy()
    alpha = alpha0.copy()
    best = (np.inf, x.copy(), alpha.copy())
    for k in range(1, iters + 1):
        g_vals = kmat @ alpha
        costs = cost_eval_many(prob, x, pts)
        slack = costs - g_vals
        j_star = int(np.argmax(slack))
        lt_alpha = program.chol_factor.T @ alpha
        norm = float(np.linalg.norm(lt_alpha))
        value = float(slack[j_star]) + float(q @ alpha) + program.epsilon * norm
        if value < best[0]:
            best = (value, x.copy(), alpha.copy())
        # subgradients
        zeta = pts[j_star]
        if prob.name == "portfolio":
            gx = -zeta
        else:
            gx = np.where(x >= zeta, prob.holding, -prob.backorder)
        galpha = -kmat[j_star] + q
        if norm > 1e-14:
            galpha = galpha + program.epsilon * (program.chol_factor @ lt_alpha) / norm
        step = 0.5 / (np.sqrt(k) * max(1.0, np.linalg.norm(gx), np.linalg.norm(galpha)))
        x = x - step * gx
        alpha = alpha - step * galpha
        if prob.x_constraint is XConstraint.SIMPLEX:
            x = _project_simplex(x)
        else:
            x = np.maximum(x, 0.0)
    value, x, alpha = best
    g_vals = kmat @ alpha
    g0 = float(np.max(cost_eval_many(prob, x, pts) - g_vals))
    return x, g0, alpha


def solve(program: DualProgram, cfg: SolverConfig = SolverConfig()) -> DualSolution:
    """Solve the assembled dual program to the configured KKT tolerance.

    The reported objective is recomputed from the solution pieces
    (g0 + SAA term + epsilon * ||g||_k), and g0 is nudged up by the worst
    residual constraint violation so the returned point is exactly feasible
    on the constraint points.
    """
    c, g_full, h_full, dims, a_eq, b_eq, (col_x, col_g0, col_b) = _conic_data(program)
    t0 = time.perf_counter()
    sol = solve_conic(
        c, g_full, h_full, dims, A=a_eq, b=b_eq,
        tol=cfg.tol, accept_tol=cfg.accept_tol, max_iter=cfg.max_iter,
    )
    elapsed = time.perf_counter() - t0
    if sol.status == "infeasible":
        raise InternalConsistencyError(
            "dual program reported infeasible; it is always feasible for epsilon >= 0"
        )
    d = program.problem.dim
    n_pts = program.n_points
    stats = {
        "status": sol.status,
        "iterations": sol.iterations,
        "solve_time_s": elapsed,
        **{k: float(v) for k, v in sol.residuals.items()},
    }
    if sol.status in ("optimal", "inaccurate"):
        x = np.maximum(sol.x[col_x : col_x + d], 0.0)
        if program.problem.x_constraint is XConstraint.SIMPLEX:
            x = x / x.sum()
        g0 = float(sol.x[col_g0])
        beta = sol.x[col_b : col_b + n_pts]
        alpha = solve_triangular(
            program.chol_factor.T, beta, lower=False, check_finite=False
        )
    elif cfg.fallback:
        x0 = np.full(d, 1.0 / d) if program.problem.x_constraint is XConstraint.SIMPLEX \
            else np.maximum(program.saa_weights @ program.all_points, 0.0)
        x, g0, alpha = _subgradient_fallback(
            program, x0, np.zeros(n_pts), cfg.fallback_iters
        )
        stats["status"] = "fallback_subgradient"
    else:
        raise SolverError(
            f"conic solver failed (status {sol.status})", residuals=stats
        )

    # exact feasibility on the constraint points
    g_vals = program.gram_matrix @ alpha
    costs = cost_eval_many(program.problem, x, program.all_points)
    viol = float(np.max(costs - g_vals - g0))
    if viol > 0:
        g0 += viol
    stats["max_violation_before_shift"] = viol
    objective = _dual_objective(program, x, g0, alpha)
    return DualSolution(x=x, g0=g0, coeffs=alpha, objective=objective, stats=stats)


def evaluate_g(sol: DualSolution, program: DualProgram, xi) -> float:
    """The dual kernel function g at an arbitrary point."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    kvec = gram(program.all_points, xi[None, :], program.bandwidth)[:, 0]
    return float(sol.coeffs @ kvec)


def worst_case_certificate(
    sol: DualSolution,
    program: DualProgram,
    probe: WeightedMeasure,
    tol: float = 1e-6,
) -> float:
    """Weak-duality audit: any reweighting of the constraint points inside the
    ball must have expected cost at most the solved objective.

    Returns the margin objective - E_probe[f(x*, .)]; raises if the probe is
    not supported on constraint points or lies outside the ball.
    """
    lookup = {row.tobytes(): i for i, row in enumerate(program.all_points)}
    for atom in probe.atoms:
        if atom.tobytes() not in lookup:
            raise ConfigError("probe must be supported on the constraint points")
    nominal = WeightedMeasure(program.all_points, program.saa_weights)
    dist = np.sqrt(mmd_sq(probe, nominal, program.bandwidth))
    if dist > program.epsilon + 1e-9:
        raise ConfigError(
            f"probe outside ball: mmd {dist:.3e} > epsilon {program.epsilon:.3e}"
        )
    expected = float(probe.weights @ cost_eval_many(program.problem, sol.x, probe.atoms))
    margin = sol.objective - expected
    if margin < -tol:
        raise InternalConsistencyError(
            f"worst-case certificate violated: margin {margin:.3e}"
        )
    return margin
