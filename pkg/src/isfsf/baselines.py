"""Warped Fourier feature baselines: random (RFF) and quasi-Monte Carlo (Halton).

Inputs are warped per dimension to ``(cos(w0_d x_d), sin(w0_d x_d))``; a
squared exponential kernel with lengthscale ``l_d`` on both warped
coordinates of dimension ``d`` is exactly the periodic SE kernel.  Spectral
frequencies for that SE kernel are then drawn by Monte Carlo or taken from a
low-discrepancy sequence pushed through the inverse normal CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import PeriodicSeHyperparams

PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229,
)

DEFAULT_BURN = 20


# -- kernels -------------------------------------------------------------------


def warp(x, hyperparams: PeriodicSeHyperparams) -> np.ndarray:
    """Map ``(N, D)`` points to ``(N, 2D)`` as ``[cos(w0_1 x_1), sin(w0_1 x_1), ...]``."""
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x)
    if pts.shape[1] != hyperparams.dimension:
        raise ValueError(f"expected dimension {hyperparams.dimension}, got {pts.shape[1]}")
    phase = pts * hyperparams.fundamental_frequencies
    out = np.empty((pts.shape[0], 2 * pts.shape[1]))
    out[:, 0::2] = np.cos(phase)
    out[:, 1::2] = np.sin(phase)
    return out[0] if x.ndim == 1 else out


def warped_lengthscales(hyperparams: PeriodicSeHyperparams) -> np.ndarray:
    return np.repeat(np.asarray(hyperparams.lengthscales), 2)


def periodic_se_kernel(x, y, hyperparams: PeriodicSeHyperparams) -> np.ndarray:
    """Analytic Gram ``exp(sum_d (cos(w0_d (x_d - y_d)) - 1) / l_d**2)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    w0 = hyperparams.fundamental_frequencies
    inv_l2 = np.asarray(hyperparams.lengthscales) ** -2.0
    expo = np.zeros((x.shape[0], y.shape[0]))
    for d in range(x.shape[1]):
        delta = x[:, d, None] - y[None, :, d]
        expo += (np.cos(w0[d] * delta) - 1.0) * inv_l2[d]
    return np.exp(expo)


def se_kernel_warped(x, y, hyperparams: PeriodicSeHyperparams) -> np.ndarray:
    """Squared exponential Gram evaluated on warped inputs."""
    ux = np.atleast_2d(warp(np.atleast_2d(x), hyperparams)) / warped_lengthscales(hyperparams)
    uy = np.atleast_2d(warp(np.atleast_2d(y), hyperparams)) / warped_lengthscales(hyperparams)
    sq = (ux**2).sum(1)[:, None] + (uy**2).sum(1)[None, :] - 2.0 * ux @ uy.T
    return np.exp(-0.5 * np.maximum(sq, 0.0))


# -- inverse normal CDF (Wichura, AS 241 PPND16) ---------------------------------

_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _poly(coefs, r):
    out = np.zeros_like(r)
    for c in reversed(coefs):
        out = out * r + c
    return out


def inverse_normal_cdf(p) -> np.ndarray:
    """Standard normal quantile, accurate to about 1e-16 relative on (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0.0) | (p >= 1.0)) or np.any(np.isnan(p)):
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    q = p - 0.5
    out = np.empty_like(p)
    central = np.abs(q) <= 0.425
    if np.any(central):
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _poly(_A, r) / _poly(_B, r)
    tail = ~central
    if np.any(tail):
        r = np.sqrt(-np.log(np.minimum(p[tail], 1.0 - p[tail])))
        near = r <= 5.0
        val = np.empty_like(r)
        rn = r[near] - 1.6
        val[near] = _poly(_C, rn) / _poly(_D, rn)
        rf = r[~near] - 5.0
        val[~near] = _poly(_E, rf) / _poly(_F, rf)
        out[tail] = np.where(q[tail] < 0, -val, val)
    return out


# -- Halton sequences ------------------------------------------------------------


def digit_permutations(dim: int, seed: int) -> list[np.ndarray]:
    """One seeded random permutation of ``0..b-1`` per prime base, with 0 fixed."""
    rng = np.random.default_rng(seed)
    perms = []
    for b in PRIMES[:dim]:
        perm = np.zeros(b, dtype=np.int64)
        perm[1:] = rng.permutation(np.arange(1, b))
        perms.append(perm)
    return perms


def radical_inverse(indices, base: int, permutation=None) -> np.ndarray:
    """Digit-reversed (optionally digit-permuted) expansion of integers in ``base``."""
    n = np.asarray(indices, dtype=np.int64).copy()
    out = np.zeros(n.shape)
    scale = 1.0 / base
    while np.any(n > 0):
        digit = n % base
        if permutation is not None:
            digit = permutation[digit]
        out += digit * scale
        n //= base
        scale /= base
    return out


def halton_sequence(
    n: int,
    dim: int,
    generalized: bool = False,
    seed: int = 0,
    burn: int = 0,
    permutations=None,
) -> np.ndarray:
    """``n x dim`` Halton points in ``(0, 1)``.

    Index 0 (the origin) is always skipped and ``burn`` further points are
    discarded.  ``generalized`` scrambles digits per base with
    :func:`digit_permutations`; explicit ``permutations`` override that.
    """
    if dim < 1 or dim > len(PRIMES):
        raise ValueError(f"dim must lie in 1..{len(PRIMES)}, got {dim}")
    if n < 0 or burn < 0:
        raise ValueError("n and burn must be non-negative")
    if permutations is None and generalized:
        permutations = digit_permutations(dim, seed)
    idx = np.arange(1 + burn, 1 + burn + n)
    cols = [
        radical_inverse(idx, b, None if permutations is None else permutations[j])
        for j, b in enumerate(PRIMES[:dim])
    ]
    return np.column_stack(cols) if cols else np.empty((n, 0))


# -- feature maps ----------------------------------------------------------------


@dataclass(frozen=True)
class SpectralSample:
    """Spectral frequencies in warped space, one ``2D`` row per sample."""

    frequencies: np.ndarray
    source: str
    seed: int | None = None
    burn: int = 0

    @property
    def size(self) -> int:
        return self.frequencies.shape[0]


class WarpedFourierMap:
    """``x -> (1/sqrt(C)) [cos(u(x) W^T), sin(u(x) W^T)]`` on warped inputs."""

    def __init__(self, sample: SpectralSample, hyperparams: PeriodicSeHyperparams):
        if sample.frequencies.shape[1] != 2 * hyperparams.dimension:
            raise ValueError("spectral sample does not match the warped dimension")
        self.sample = sample
        self.hyperparams = hyperparams

    @property
    def n_features(self) -> int:
        return 2 * self.sample.size

    def __len__(self) -> int:
        return self.n_features

    def evaluate(self, x) -> np.ndarray:
        u = np.atleast_2d(warp(np.atleast_2d(x), self.hyperparams))
        phase = u @ self.sample.frequencies.T
        out = np.hstack([np.cos(phase), np.sin(phase)]) / math.sqrt(self.sample.size)
        return out[0] if np.ndim(x) == 1 else out

    __call__ = evaluate

    def gram(self, x, y=None) -> np.ndarray:
        fx = self.evaluate(np.atleast_2d(x))
        fy = fx if y is None else self.evaluate(np.atleast_2d(y))
        return fx @ fy.T


def rff_sample(n_samples: int, hyperparams: PeriodicSeHyperparams, seed: int) -> SpectralSample:
    if n_samples < 1:
        raise ValueError("need at least one spectral sample")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_samples, 2 * hyperparams.dimension))
    return SpectralSample(z / warped_lengthscales(hyperparams), "rff", seed)


def qmc_sample(
    n_samples: int,
    hyperparams: PeriodicSeHyperparams,
    generalized: bool = False,
    seed: int = 0,
    burn: int = DEFAULT_BURN,
) -> SpectralSample:
    if n_samples < 1:
        raise ValueError("need at least one spectral sample")
    pts = halton_sequence(n_samples, 2 * hyperparams.dimension, generalized, seed, burn)
    assert np.all((pts > 0.0) & (pts < 1.0))
    z = inverse_normal_cdf(pts)
    return SpectralSample(
        z / warped_lengthscales(hyperparams),
        "ghalton" if generalized else "halton",
        seed if generalized else None,
        burn,
    )


def rff_map(n_samples: int, hyperparams: PeriodicSeHyperparams, seed: int) -> WarpedFourierMap:
    return WarpedFourierMap(rff_sample(n_samples, hyperparams, seed), hyperparams)


def qmc_map(
    n_samples: int,
    hyperparams: PeriodicSeHyperparams,
    generalized: bool = False,
    seed: int = 0,
    burn: int = DEFAULT_BURN,
) -> WarpedFourierMap:
    return WarpedFourierMap(qmc_sample(n_samples, hyperparams, generalized, seed, burn), hyperparams)


def rff_features(points, n_samples: int, hyperparams: PeriodicSeHyperparams, seed: int) -> np.ndarray:
    """``N x 2C`` random Fourier features of warped points."""
    return rff_map(n_samples, hyperparams, seed).evaluate(np.atleast_2d(points))


def qmc_features(
    points,
    n_samples: int,
    hyperparams: PeriodicSeHyperparams,
    generalized: bool = False,
    seed: int = 0,
    burn: int = DEFAULT_BURN,
) -> np.ndarray:
    """``N x 2C`` Halton or generalized Halton features of warped points."""
    return qmc_map(n_samples, hyperparams, generalized, seed, burn).evaluate(np.atleast_2d(points))
