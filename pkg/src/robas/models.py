"""Parametric generator families with reparameterized samplers.

Each model exposes sampling as a deterministic map of (unconstrained parameter
eta, noise u) together with the Jacobian of the sample with respect to eta, so
stochastic-gradient fits can use common random numbers. The unconstrained
parametrization maps R^s onto the valid parameter set: rates and covariance
diagonals go through exp, everything else is the identity.

Families:
  - GaussianLocation: N(theta, sigma^2 I) with sigma known; theta = eta.
  - GaussianMeanCov:  N(mu, L L') with L lower-triangular, positive diagonal.
  - ExponentialRate:  Exp(rate), rate = exp(eta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError
from .kernel import as_points


@dataclass(frozen=True)
class GaussianLocation:
    """Gaussian with known isotropic scale; the parameter is the mean."""

    dim: int = 1
    sigma: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def param_dim(self) -> int:
        return self.dim

    def constrain(self, eta: np.ndarray) -> np.ndarray:
        return np.asarray(eta, dtype=float).copy()

    def unconstrain(self, theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=float).copy()

    def draw_noise(self, rng: np.random.Generator, m: int) -> np.ndarray:
        return rng.standard_normal((m, self.dim))

    def sample(self, eta: np.ndarray, u: np.ndarray) -> np.ndarray:
        return eta[None, :] + self.sigma * u

    def sample_jac(self, eta: np.ndarray, u: np.ndarray):
        y = self.sample(eta, u)
        jac = np.broadcast_to(np.eye(self.dim), (u.shape[0], self.dim, self.dim))
        return y, jac

    def moment_init(self, data) -> np.ndarray:
        pts = as_points(data)
        if pts.shape[1] != self.dim:
            raise ValueError(f"data dimension {pts.shape[1]} != model dim {self.dim}")
        return pts.mean(axis=0)

    def mean(self, eta: np.ndarray) -> np.ndarray:
        return np.asarray(eta, dtype=float)


@dataclass(frozen=True)
class ExponentialRate:
    """Exponential distribution parameterized by its rate; eta = log(rate)."""

    dim: int = 1  # fixed; exponential data is scalar

    def __post_init__(self):
        if self.dim != 1:
            raise ValueError("ExponentialRate is univariate")

    @property
    def param_dim(self) -> int:
        return 1

    def constrain(self, eta: np.ndarray) -> np.ndarray:
        return np.exp(np.asarray(eta, dtype=float))

    def unconstrain(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if np.any(theta <= 0):
            raise ValueError("rate must be positive")
        return np.log(theta)

    def draw_noise(self, rng: np.random.Generator, m: int) -> np.ndarray:
        return rng.standard_exponential((m, 1))

    def sample(self, eta: np.ndarray, u: np.ndarray) -> np.ndarray:
        return u / np.exp(eta[0])

    def sample_jac(self, eta: np.ndarray, u: np.ndarray):
        y = self.sample(eta, u)
        # d y / d eta = -u exp(-eta) = -y
        jac = -y[:, :, None]
        return y, jac

    def moment_init(self, data) -> np.ndarray:
        pts = as_points(data)
        mean = float(pts.mean())
        if mean <= 0:
            raise DegenerateDataError("exponential fit needs positive-mean data")
        return np.array([-np.log(mean)])

    def mean(self, eta: np.ndarray) -> np.ndarray:
        return np.array([np.exp(-eta[0])])


@dataclass(frozen=True)
class GaussianMeanCov:
    """Gaussian with unknown mean and covariance, via a Cholesky factor.

    eta packs (mu, log-diagonal of L, strict lower triangle of L row-major);
    samples are mu + L u with u standard normal.
    """

    dim: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def param_dim(self) -> int:
        d = self.dim
        return d + d * (d + 1) // 2

    def _tril_indices(self):
        return np.tril_indices(self.dim, k=-1)

    def _unpack(self, eta: np.ndarray):
        d = self.dim
        mu = eta[:d]
        log_diag = eta[d : 2 * d]
        lower = np.zeros((d, d))
        lower[np.diag_indices(d)] = np.exp(log_diag)
        rows, cols = self._tril_indices()
        lower[rows, cols] = eta[2 * d :]
        return mu, lower

    def constrain(self, eta: np.ndarray) -> np.ndarray:
        mu, lower = self._unpack(np.asarray(eta, dtype=float))
        d = self.dim
        rows, cols = np.tril_indices(d)
        return np.concatenate([mu, lower[rows, cols]])

    def unconstrain(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        d = self.dim
        mu = theta[:d]
        lower = np.zeros((d, d))
        rows, cols = np.tril_indices(d)
        lower[rows, cols] = theta[d:]
        diag = np.diag(lower)
        if np.any(diag <= 0):
            raise ValueError("covariance factor must have a positive diagonal")
        srows, scols = self._tril_indices()
        return np.concatenate([mu, np.log(diag), lower[srows, scols]])

    def draw_noise(self, rng: np.random.Generator, m: int) -> np.ndarray:
        return rng.standard_normal((m, self.dim))

    def sample(self, eta: np.ndarray, u: np.ndarray) -> np.ndarray:
        mu, lower = self._unpack(np.asarray(eta, dtype=float))
        return mu[None, :] + u @ lower.T

    def sample_jac(self, eta: np.ndarray, u: np.ndarray):
        eta = np.asarray(eta, dtype=float)
        d = self.dim
        m = u.shape[0]
        mu, lower = self._unpack(eta)
        y = mu[None, :] + u @ lower.T
        jac = np.zeros((m, d, self.param_dim))
        jac[:, :, :d] = np.eye(d)
        # diagonal entries: d y_a / d log_diag_a = L_aa u_a
        diag = np.diag(lower)
        for a in range(d):
            jac[:, a, d + a] = diag[a] * u[:, a]
        # strict lower entries: d y_a / d L_ab = u_b
        rows, cols = self._tril_indices()
        for idx, (a, b) in enumerate(zip(rows, cols)):
            jac[:, a, 2 * d + idx] = u[:, b]
        return y, jac

    def moment_init(self, data) -> np.ndarray:
        pts = as_points(data)
        d = self.dim
        if pts.shape[1] != d:
            raise ValueError(f"data dimension {pts.shape[1]} != model dim {d}")
        mu = pts.mean(axis=0)
        cov = np.cov(pts, rowvar=False).reshape(d, d) + 1e-6 * np.eye(d)
        lower = np.linalg.cholesky(cov)
        rows, cols = np.tril_indices(d)
        return self.unconstrain(np.concatenate([mu, lower[rows, cols]]))

    def mean(self, eta: np.ndarray) -> np.ndarray:
        return np.asarray(eta, dtype=float)[: self.dim].copy()


ModelSpec = GaussianLocation | GaussianMeanCov | ExponentialRate


def make_model(name: str, dim: int = 1, sigma: float | None = None) -> ModelSpec:
    """Build a model family by name: gaussian-location, gaussian-meancov, exponential."""
    key = name.lower().replace("_", "-")
    if key == "gaussian-location":
        return GaussianLocation(dim=dim, sigma=1.0 if sigma is None else sigma)
    if key == "gaussian-meancov":
        return GaussianMeanCov(dim=dim)
    if key in ("exponential", "exponential-rate"):
        return ExponentialRate()
    raise ValueError(f"unknown model family: {name!r}")
