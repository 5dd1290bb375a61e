"""Nonparametric-learning inference with the MMD loss.

The posterior over model parameters is induced by a Dirichlet-process posterior
on the data-generating process: draw a weighted measure Q from the (truncated)
DP posterior, fit the model to Q by minimizing squared MMD, repeat B times.
Pooling per-fit model samples gives the posterior predictive as an
equal-weight empirical measure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import OptimizationError
from .kernel import Bandwidth, WeightedMeasure, as_points, gram, median_heuristic
from .models import ModelSpec


@dataclass(frozen=True)
class DPConfig:
    """Truncated Dirichlet-process posterior configuration.

    alpha = 0 is the non-informative prior: the posterior concentrates on the
    empirical measure and no prior atoms are drawn (so prior_sampler must be
    omitted). For alpha > 0, prior_sampler(rng, size) supplies iid atoms from
    the prior belief over the data space.
    """

    alpha: float = 0.0
    tau: int = 100
    prior_sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.tau < 1:
            raise ValueError("tau must be a positive integer")
        if (self.alpha > 0) != (self.prior_sampler is not None):
            raise ValueError("prior_sampler must be given exactly when alpha > 0")


@dataclass(frozen=True)
class AdamConfig:
    """First-order optimizer settings for the MMD fit."""

    learning_rate: float = 0.1
    steps: int = 300
    model_batch: int = 50
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.model_batch < 2:
            raise ValueError("model_batch must be >= 2")


@dataclass(frozen=True)
class BootstrapPosterior:
    """Bootstrap parameter draws plus their pooled predictive sample."""

    thetas: np.ndarray  # (B, constrained parameter dim)
    predictive_pool: np.ndarray  # (B * S, D)
    bandwidth: Bandwidth
    sample_time_s: float = 0.0

    @property
    def size(self) -> int:
        return self.thetas.shape[0]


def sample_dp_weights(n: int, cfg: DPConfig, rng: np.random.Generator):
    """One draw of (w_1:n, wtilde_1:tau) ~ Dirichlet(1, ..., 1, alpha/tau, ..., alpha/tau).

    Sampled as normalized Gamma variates. With alpha = 0 the prior-atom block
    is exactly zero and the data block is Dirichlet(1, ..., 1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    w_data = rng.standard_exponential(n)
    if cfg.alpha > 0:
        w_prior = rng.gamma(cfg.alpha / cfg.tau, size=cfg.tau)
    else:
        w_prior = np.zeros(cfg.tau)
    total = w_data.sum() + w_prior.sum()
    if not total > 0:
        raise OptimizationError("all Dirichlet gamma variates are zero")
    return w_data / total, w_prior / total


def sample_dp_measure(data, cfg: DPConfig, rng: np.random.Generator) -> WeightedMeasure:
    """One weighted measure drawn from the truncated DP posterior around the data.

    With alpha = 0 the support is exactly the observed points; otherwise tau
    prior atoms drawn from prior_sampler are appended.
    """
    pts = as_points(data)
    w_data, w_prior = sample_dp_weights(pts.shape[0], cfg, rng)
    if cfg.alpha == 0:
        weights = w_data / w_data.sum()
        return WeightedMeasure(pts, weights)
    prior_atoms = as_points(cfg.prior_sampler(rng, cfg.tau))
    atoms = np.vstack([pts, prior_atoms])
    weights = np.concatenate([w_data, w_prior])
    return WeightedMeasure(atoms, weights / weights.sum())


def mmd_sq_model_loss(
    eta: np.ndarray,
    measure: WeightedMeasure,
    model: ModelSpec,
    u: np.ndarray,
    bw: Bandwidth,
    q_term: float | None = None,
):
    """Squared-MMD estimate between the model at eta and a discrete measure,
    with its analytic gradient in the unconstrained parametrization.

    The model-model term is the unbiased pair average over the m generated
    samples; the cross term weights kernel values by the measure's weights;
    the measure-only term is constant in eta and included so the value is a
    consistent squared-MMD estimate (pass q_term to avoid recomputing it).
    """
    m = u.shape[0]
    if m < 2:
        raise ValueError("need at least 2 generator samples")
    y, jac = model.sample_jac(np.asarray(eta, dtype=float), u)
    inv_ell2 = 1.0 / bw.ell**2

    kyy = gram(y, y, bw)
    np.fill_diagonal(kyy, 0.0)
    kyx = gram(y, measure.atoms, bw)
    w = measure.weights

    if q_term is None:
        kxx = gram(measure.atoms, measure.atoms, bw)
        q_term = float(w @ kxx @ w)

    cross = kyx @ w  # (m,)
    value = kyy.sum() / (m * (m - 1)) - (2.0 / m) * cross.sum() + q_term

    # d k(a, b) / d a = -k(a, b) (a - b) / ell^2
    row_sums = kyy.sum(axis=1)
    grad_yy = -(y * row_sums[:, None] - kyy @ y) * inv_ell2  # (m, D)
    wx = w[:, None] * measure.atoms
    grad_yx = -(y * cross[:, None] - kyx @ wx) * inv_ell2  # (m, D)

    grad_y = (2.0 / (m * (m - 1))) * grad_yy - (2.0 / m) * grad_yx
    grad = np.einsum("md,mds->s", grad_y, jac)
    return float(value), grad


def minimize_mmd(
    measure: WeightedMeasure,
    model: ModelSpec,
    init_theta: np.ndarray,
    adam: AdamConfig,
    bw: Bandwidth,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Fit the model to a discrete measure by squared MMD.

    Runs bias-corrected adaptive-moment steps on the unconstrained
    parametrization, resampling generator noise every step, and returns the
    final iterate mapped back to the constrained space.
    """
    if rng is None:
        rng = np.random.default_rng(adam.seed)
    eta = model.unconstrain(np.asarray(init_theta, dtype=float))
    kxx = gram(measure.atoms, measure.atoms, bw)
    q_term = float(measure.weights @ kxx @ measure.weights)

    m1 = np.zeros_like(eta)
    m2 = np.zeros_like(eta)
    for step in range(1, adam.steps + 1):
        u = model.draw_noise(rng, adam.model_batch)
        value, grad = mmd_sq_model_loss(eta, measure, model, u, bw, q_term=q_term)
        if not (np.isfinite(value) and np.all(np.isfinite(grad))):
            raise OptimizationError(
                f"non-finite MMD loss/gradient at step {step}: value={value!r}, "
                f"|grad|={np.max(np.abs(grad)) if grad.size else 0.0!r}"
            )
        m1 = adam.beta1 * m1 + (1 - adam.beta1) * grad
        m2 = adam.beta2 * m2 + (1 - adam.beta2) * grad * grad
        mhat = m1 / (1 - adam.beta1**step)
        vhat = m2 / (1 - adam.beta2**step)
        eta = eta - adam.learning_rate * mhat / (np.sqrt(vhat) + adam.eps)
    return model.constrain(eta)


def posterior_bootstrap(
    data,
    model: ModelSpec,
    b: int,
    dp: DPConfig,
    adam: AdamConfig,
    bw: Bandwidth,
    root_seed: int | None = None,
) -> np.ndarray:
    """B bootstrap parameter draws: fit the model to B DP-posterior measures.

    Each draw j owns the RNG stream seeded by (root_seed, 0, j), so results do
    not depend on evaluation order. Every fit starts from the method-of-moments
    estimate on the raw data.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    pts = as_points(data)
    seed = adam.seed if root_seed is None else root_seed
    init = model.constrain(model.moment_init(pts))
    thetas = []
    for j in range(b):
        rng_j = np.random.default_rng([seed, 0, j])
        measure = sample_dp_measure(pts, dp, rng_j)
        try:
            thetas.append(minimize_mmd(measure, model, init, adam, bw, rng=rng_j))
        except OptimizationError as exc:
            raise OptimizationError(f"bootstrap draw {j} failed: {exc}") from exc
    return np.asarray(thetas)


def predictive_sample(
    thetas: Sequence[np.ndarray] | np.ndarray,
    model: ModelSpec,
    s: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Pool S iid model samples per parameter draw into one (B*S, D) array."""
    if s < 1:
        raise ValueError("s must be >= 1")
    pools = []
    for theta in np.asarray(thetas, dtype=float):
        eta = model.unconstrain(theta)
        u = model.draw_noise(rng, s)
        pools.append(model.sample(eta, u))
    return np.vstack(pools)


def fit_posterior(
    data,
    model: ModelSpec,
    b: int = 30,
    s: int = 30,
    dp: DPConfig = DPConfig(),
    adam: AdamConfig = AdamConfig(),
    bw: Bandwidth | None = None,
    root_seed: int | None = None,
) -> BootstrapPosterior:
    """End-to-end inference: bandwidth, bootstrap draws, predictive pool.

    The bandwidth defaults to the median heuristic on the training data and is
    reused for every downstream MMD computation.
    """
    pts = as_points(data)
    if bw is None:
        bw = median_heuristic(pts)
    t0 = time.perf_counter()
    thetas = posterior_bootstrap(pts, model, b, dp, adam, bw, root_seed=root_seed)
    seed = adam.seed if root_seed is None else root_seed
    pool = predictive_sample(thetas, model, s, np.random.default_rng([seed, 1]))
    elapsed = time.perf_counter() - t0
    return BootstrapPosterior(thetas, pool, bw, sample_time_s=elapsed)
