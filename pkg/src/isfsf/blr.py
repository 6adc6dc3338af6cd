"""Conjugate Bayesian linear regression over a fixed feature map.

Prior ``w ~ N(0, s2_w I)``, likelihood ``y ~ N(Phi w, s2_n I)``.  The
posterior precision ``A = Phi^T Phi / s2_n + I / s2_w`` is Cholesky factored
once (``M x M``, cheap when ``M << N``) and every later solve goes through
the factor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg


class FitError(RuntimeError):
    """The posterior precision could not be factored."""


@dataclass(frozen=True)
class PredictiveDistribution:
    mean: np.ndarray
    variance: np.ndarray

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.variance)


@dataclass
class BlrModel:
    weight_mean: np.ndarray
    posterior_factor: np.ndarray  # lower Cholesky factor of the posterior precision
    noise_variance: float
    prior_variance: float
    provenance: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return self.weight_mean.shape[0]

    def predict(self, features) -> PredictiveDistribution:
        return predict(self, features)

    def save(self, path: str | Path) -> None:
        meta = {
            "noise_variance": self.noise_variance,
            "prior_variance": self.prior_variance,
            "provenance": self.provenance,
        }
        with open(path, "wb") as fh:
            np.savez(
                fh,
                weight_mean=self.weight_mean,
                posterior_factor=self.posterior_factor,
                meta=np.array(json.dumps(meta, sort_keys=True)),
            )

    @classmethod
    def load(cls, path: str | Path) -> "BlrModel":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            return cls(
                data["weight_mean"].copy(),
                data["posterior_factor"].copy(),
                meta["noise_variance"],
                meta["prior_variance"],
                meta["provenance"],
            )


def fit(
    features,
    targets,
    noise_variance: float,
    prior_variance: float = 1.0,
    provenance: dict | None = None,
) -> BlrModel:
    """Posterior over weights given an ``N x M`` design matrix.

    Raises
    ------
    FitError
        If the posterior precision is not numerically positive definite.
        No jitter is added.
    """
    phi = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(targets, dtype=float).reshape(-1)
    if phi.shape[0] != y.shape[0]:
        raise ValueError(f"{phi.shape[0]} feature rows but {y.shape[0]} targets")
    if phi.shape[0] < 1 or phi.shape[1] < 1:
        raise ValueError("need at least one observation and one feature")
    if not (noise_variance > 0 and prior_variance > 0):
        raise ValueError("noise and prior variances must be positive")

    with np.errstate(over="ignore", invalid="ignore"):
        precision = phi.T @ phi / noise_variance
    precision[np.diag_indices_from(precision)] += 1.0 / prior_variance
    if not np.all(np.isfinite(precision)):
        raise FitError("posterior precision has non-finite entries")
    try:
        chol = linalg.cholesky(precision, lower=True)
    except linalg.LinAlgError as exc:
        raise FitError(f"posterior precision is not positive definite: {exc}") from None
    rhs = phi.T @ y / noise_variance
    mean = linalg.cho_solve((chol, True), rhs)
    return BlrModel(mean, chol, float(noise_variance), float(prior_variance), dict(provenance or {}))


def predict(model: BlrModel, features) -> PredictiveDistribution:
    """Predictive mean and variance (noise included) at ``N* x M`` features."""
    phi = np.atleast_2d(np.asarray(features, dtype=float))
    if phi.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {phi.shape[1]}")
    mean = phi @ model.weight_mean
    # diag(Phi A^-1 Phi^T) = column norms of L^-1 Phi^T
    half = linalg.solve_triangular(model.posterior_factor, phi.T, lower=True)
    var = model.noise_variance + np.einsum("ij,ij->j", half, half)
    return PredictiveDistribution(mean, var)


def rmse(predictions, truth) -> float:
    pred = np.asarray(predictions, dtype=float).reshape(-1)
    true = np.asarray(truth, dtype=float).reshape(-1)
    if pred.shape != true.shape:
        raise ValueError("predictions and truth differ in length")
    if pred.size == 0:
        raise ValueError("rmse of an empty sample")
    return float(np.sqrt(np.mean((pred - true) ** 2)))


def mnll(mean, variance, truth) -> float:
    """Mean negative log likelihood of Gaussian predictions.

    ``variance`` is the predictive variance (not the standard deviation).
    """
    mu = np.asarray(mean, dtype=float).reshape(-1)
    var = np.asarray(variance, dtype=float).reshape(-1)
    f = np.asarray(truth, dtype=float).reshape(-1)
    if not (mu.shape == var.shape == f.shape):
        raise ValueError("mean, variance and truth differ in length")
    if mu.size == 0:
        raise ValueError("mnll of an empty sample")
    if np.any(var <= 0):
        raise ValueError("predictive variances must be positive")
    return float(np.mean(0.5 * np.log(2.0 * math.pi * var) + (mu - f) ** 2 / (2.0 * var)))
