"""Fourier coefficients of the periodic squared exponential kernel.

For the per-dimension kernel ``exp((cos(w0 * tau) - 1) / l**2)`` the cosine
series is ``sum_k q2_k cos(k * w0 * tau)`` with

    q2_0 = e^{-x} I_0(x),    q2_k = 2 e^{-x} I_k(x)  (k >= 1),    x = l**-2,

and the coefficients sum to one.  ``e^{-x} I_k(x)`` is evaluated without ever
forming ``I_k`` or ``e^x`` on their own, so tiny lengthscales do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def _start_order(kmax: int, x: float) -> int:
    # I_k(x) falls off like exp(-k^2 / 2x) past k ~ sqrt(x); the sqrt(x) term
    # covers kmax = 0 at large x where the kmax*x term alone is too small
    return kmax + math.ceil(10.0 + 2.0 * math.sqrt(kmax * x) + 8.0 * math.sqrt(x))


def bessel_i_scaled_orders(kmax: int, x: float) -> np.ndarray:
    """``e^{-x} I_k(x)`` for ``k = 0..kmax`` by Miller's backward recurrence.

    The ratios ``r_k = I_k / I_{k-1}`` are run downward from a high starting
    order with ``r_k = 1 / (2k/x + r_{k+1})``; their cumulative products give
    ``I_k / I_0``, and ``e^x = I_0 + 2 sum_{k>=1} I_k`` fixes the scale.
    Nothing here can overflow: every ratio lies in ``(0, 1)``.
    """
    kmax = int(kmax)
    if kmax < 0:
        raise ValueError(f"order must be non-negative, got {kmax}")
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got {x}")
    if x == 0.0:
        out = np.zeros(kmax + 1)
        out[0] = 1.0
        return out

    n = _start_order(kmax, x)
    ratios = np.empty(n + 1)
    r = 0.0
    for k in range(n, 0, -1):
        r = 1.0 / (2.0 * k / x + r)
        ratios[k] = r
    ratios[0] = 1.0
    rel = np.cumprod(ratios)  # I_k / I_0
    i0 = 1.0 / (1.0 + 2.0 * rel[1:].sum())
    return i0 * rel[: kmax + 1]


def bessel_i_scaled(order: int, x: float) -> float:
    """Exponentially scaled modified Bessel function ``e^{-x} I_order(x)``."""
    return float(bessel_i_scaled_orders(order, x)[order])


def periodic_se_coefficients(lengthscale: float, refinement: int) -> np.ndarray:
    """Squared cosine-series coefficients ``q2_0 .. q2_{R-1}`` of the periodic SE kernel."""
    if lengthscale <= 0 or not math.isfinite(lengthscale):
        raise ValueError(f"lengthscale must be positive, got {lengthscale}")
    if refinement < 1:
        raise ValueError(f"refinement must be >= 1, got {refinement}")
    q2 = bessel_i_scaled_orders(refinement - 1, lengthscale**-2)
    q2[1:] *= 2.0
    return q2


def _as_vector(value, dim: int, name: str) -> tuple[float, ...]:
    if np.ndim(value) == 0:
        vec = (float(value),) * dim
    else:
        vec = tuple(float(v) for v in value)
    if len(vec) != dim:
        raise ValueError(f"expected {dim} {name}, got {len(vec)}")
    for v in vec:
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be finite and positive, got {v}")
    return vec


@dataclass(frozen=True)
class PeriodicSeHyperparams:
    """Per-dimension lengthscales and periods of a product periodic SE kernel."""

    lengthscales: tuple[float, ...]
    periods: tuple[float, ...]

    def __post_init__(self):
        dim = len(np.atleast_1d(self.lengthscales))
        object.__setattr__(self, "lengthscales", _as_vector(self.lengthscales, dim, "lengthscales"))
        object.__setattr__(self, "periods", _as_vector(self.periods, dim, "periods"))

    @classmethod
    def isotropic(cls, dimension: int, lengthscale: float = 1.0, period: float = 1.0):
        return cls((lengthscale,) * dimension, (period,) * dimension)

    @classmethod
    def create(cls, dimension: int, lengthscale, period) -> "PeriodicSeHyperparams":
        """Broadcast scalar or per-dimension values to ``dimension``."""
        return cls(
            _as_vector(lengthscale, dimension, "lengthscales"),
            _as_vector(period, dimension, "periods"),
        )

    @property
    def dimension(self) -> int:
        return len(self.lengthscales)

    @property
    def fundamental_frequencies(self) -> np.ndarray:
        return 2.0 * np.pi / np.asarray(self.periods)

    def to_dict(self) -> dict:
        return {"lengthscales": list(self.lengthscales), "periods": list(self.periods)}


@dataclass(frozen=True)
class CoefficientTable:
    """Per-dimension squared coefficients, computed once and reused.

    ``q_squared[d]`` holds ``q2_0 .. q2_{R_d - 1}`` for dimension ``d``.  Any
    non-negative sequences may be supplied, so kernels other than the
    periodic SE plug in through :meth:`from_sequences`.
    """

    q_squared: tuple[np.ndarray, ...]
    hyperparams: PeriodicSeHyperparams
    kernel: str = "periodic_se"

    def __post_init__(self):
        arrs = []
        for q in self.q_squared:
            a = np.array(q, dtype=float)
            if a.ndim != 1 or a.size < 1:
                raise ValueError("each coefficient sequence must be a non-empty vector")
            if (a < 0).any():
                raise ValueError("squared coefficients must be non-negative")
            a.setflags(write=False)
            arrs.append(a)
        if len(arrs) != self.hyperparams.dimension:
            raise ValueError("one coefficient sequence per dimension is required")
        object.__setattr__(self, "q_squared", tuple(arrs))

    @classmethod
    def periodic_se(
        cls, hyperparams: PeriodicSeHyperparams, refinements: int | Sequence[int]
    ) -> "CoefficientTable":
        dim = hyperparams.dimension
        if np.ndim(refinements) == 0:
            refinements = [int(refinements)] * dim
        if len(refinements) != dim:
            raise ValueError(f"expected {dim} refinements, got {len(refinements)}")
        seqs = tuple(
            periodic_se_coefficients(l, int(r))
            for l, r in zip(hyperparams.lengthscales, refinements)
        )
        return cls(seqs, hyperparams)

    @classmethod
    def for_index_set(cls, hyperparams: PeriodicSeHyperparams, index_set) -> "CoefficientTable":
        """Table just large enough to cover the index set's bounding box."""
        return cls.periodic_se(hyperparams, [int(m) + 1 for m in index_set.max_degree()])

    @classmethod
    def from_sequences(cls, sequences, hyperparams: PeriodicSeHyperparams, kernel: str = "custom"):
        return cls(tuple(sequences), hyperparams, kernel)

    @property
    def dimension(self) -> int:
        return len(self.q_squared)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.q_squared)

    def products(self, vectors: np.ndarray) -> np.ndarray:
        """``prod_d q2_{k_d}^{(d)}`` for every row of ``vectors``."""
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.shape[1] != self.dimension:
            raise ValueError("index dimension does not match coefficient table")
        rho = np.ones(vectors.shape[0])
        for d, q in enumerate(self.q_squared):
            col = vectors[:, d]
            if col.size and col.max() >= q.size:
                raise IndexError(
                    f"frequency {int(col.max())} out of coefficient range {q.size} in dimension {d}"
                )
            rho *= q[col]
        return rho


def truncation_error(refinement, hyperparams: PeriodicSeHyperparams) -> float:
    """Residual coefficient mass ``1 - prod_d sum_{r < R_d} q2_r^{(d)}``.

    ``refinement`` is a scalar ``R`` shared by every dimension, or a sequence
    of per-dimension ``R_d`` (e.g. an index set's bounding box plus one).
    """
    dim = hyperparams.dimension
    refs = [int(refinement)] * dim if np.ndim(refinement) == 0 else [int(r) for r in refinement]
    if len(refs) != dim:
        raise ValueError(f"expected {dim} refinements, got {len(refs)}")
    mass = 1.0
    for l, r in zip(hyperparams.lengthscales, refs):
        mass *= float(np.sum(periodic_se_coefficients(l, r)))
    return min(1.0, max(0.0, 1.0 - mass))
