"""Index set Fourier series feature maps.

Each index vector ``k`` contributes ``rho * prod_d cos(k_d w0_d delta_d)`` to
the kernel, with ``rho = prod_d q2_{k_d}``.  Repeated product-to-sum expansion
turns the product of cosines into ``2**(D-1)`` cosines of signed frequency
combinations ``(k * w0) * xi`` where ``xi`` ranges over the rows of the sign
matrix; each cosine of a difference then splits into a cos/sin feature pair.

The sparse map drops dimensions with ``k_d = 0`` from the sign expansion: a
vector with ``eta`` non-zero entries yields ``2**eta`` features (one constant
feature when ``eta = 0``) with the same inner products as the full map.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coefficients import CoefficientTable, PeriodicSeHyperparams
from .index_sets import IndexSet


class Mode(str, enum.Enum):
    FULL = "full"
    SPARSE = "sparse"


class Kind(enum.IntEnum):
    COSINE = 0
    SINE = 1
    CONSTANT = 2


@dataclass(frozen=True)
class FeatureTerm:
    amplitude: float
    frequency_vector: tuple[float, ...]
    kind: Kind
    source_index: int


def build_sign_matrix(dimension: int) -> np.ndarray:
    """``2**(D-1) x D`` sign matrix with a leading column of ``+1``.

    The trailing columns run through the Cartesian power of ``(-1, +1)``,
    so ``D = 2`` gives rows ``(+1, -1), (+1, +1)``.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    rows = [(1,) + tail for tail in itertools.product((-1, 1), repeat=dimension - 1)]
    return np.array(rows, dtype=np.int64).reshape(-1, dimension)


class IsfsfFeatureMap:
    """Compiled deterministic feature map ``x -> R^M``.

    Terms are stored column-wise: ``amplitudes`` (M,), ``frequencies`` (M, D)
    in radians per input unit, ``kinds`` (M,) and ``sources`` (M,) giving the
    row of the originating index vector.
    """

    def __init__(self, amplitudes, frequencies, kinds, sources, mode, provenance=None):
        self.amplitudes = np.asarray(amplitudes, dtype=float)
        self.frequencies = np.asarray(frequencies, dtype=float)
        self.kinds = np.asarray(kinds, dtype=np.int8)
        self.sources = np.asarray(sources, dtype=np.int64)
        self.mode = Mode(mode)
        self.provenance = dict(provenance or {})
        m = self.amplitudes.shape[0]
        if self.frequencies.ndim != 2 or self.frequencies.shape[0] != m:
            raise ValueError("frequencies must have one row per term")
        if self.kinds.shape != (m,) or self.sources.shape != (m,):
            raise ValueError("kinds and sources must have one entry per term")
        for arr in (self.amplitudes, self.frequencies, self.kinds, self.sources):
            arr.setflags(write=False)

    @property
    def dimension(self) -> int:
        return self.frequencies.shape[1]

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_features(self) -> int:
        return len(self)

    @property
    def terms(self) -> list[FeatureTerm]:
        return [
            FeatureTerm(float(a), tuple(float(v) for v in f), Kind(int(k)), int(s))
            for a, f, k, s in zip(self.amplitudes, self.frequencies, self.kinds, self.sources)
        ]

    def evaluate(self, x) -> np.ndarray:
        """Features of one point ``(D,)`` or a batch ``(N, D)``."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[1] != self.dimension:
            raise ValueError(f"expected points of dimension {self.dimension}, got {pts.shape[1]}")
        phase = pts @ self.frequencies.T
        vals = np.where(self.kinds == Kind.SINE, np.sin(phase), np.cos(phase))
        vals[:, self.kinds == Kind.CONSTANT] = 1.0
        vals *= self.amplitudes
        return vals[0] if single else vals

    __call__ = evaluate

    def gram(self, x, y=None) -> np.ndarray:
        fx = self.evaluate(np.atleast_2d(x))
        fy = fx if y is None else self.evaluate(np.atleast_2d(y))
        return fx @ fy.T

    # -- serialization ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write an ``.npz`` container; arrays round-trip bit for bit."""
        meta = {"mode": self.mode.value, "D": self.dimension, "provenance": self.provenance}
        with open(path, "wb") as fh:
            np.savez(
                fh,
                amplitudes=self.amplitudes,
                frequencies=self.frequencies,
                kinds=self.kinds,
                sources=self.sources,
                meta=np.array(json.dumps(meta, sort_keys=True)),
            )

    @classmethod
    def load(cls, path: str | Path) -> "IsfsfFeatureMap":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            return cls(
                data["amplitudes"].copy(),
                data["frequencies"].copy().reshape(-1, meta["D"]),
                data["kinds"].copy(),
                data["sources"].copy(),
                meta["mode"],
                meta["provenance"],
            )


def _provenance(index_set: IndexSet, coeffs: CoefficientTable) -> dict:
    return {
        "index_set": index_set.describe(),
        "hyperparams": coeffs.hyperparams.to_dict(),
        "kernel": coeffs.kernel,
    }


def _check(index_set: IndexSet, coeffs: CoefficientTable) -> np.ndarray:
    if index_set.dimension != coeffs.dimension:
        raise ValueError(
            f"index set dimension {index_set.dimension} != coefficient dimension {coeffs.dimension}"
        )
    return coeffs.products(index_set.vectors)


def expand_full(index_set: IndexSet, coeffs: CoefficientTable) -> IsfsfFeatureMap:
    """Full map with ``|I| * 2**D`` terms, zero frequencies included."""
    rho = _check(index_set, coeffs)
    dim = index_set.dimension
    signs = build_sign_matrix(dim).astype(float)
    n_rows = signs.shape[0]
    base = index_set.vectors * coeffs.hyperparams.fundamental_frequencies  # (n, D)
    freq = base[:, None, :] * signs[None, :, :]  # (n, S, D)
    freq = np.repeat(freq[:, :, None, :], 2, axis=2).reshape(-1, dim)
    amp = np.repeat(np.sqrt(rho / n_rows), 2 * n_rows)
    kinds = np.tile([Kind.COSINE, Kind.SINE], len(index_set) * n_rows)
    sources = np.repeat(np.arange(len(index_set)), 2 * n_rows)
    return IsfsfFeatureMap(amp, freq, kinds, sources, Mode.FULL, _provenance(index_set, coeffs))


def expand_sparse(index_set: IndexSet, coeffs: CoefficientTable) -> IsfsfFeatureMap:
    """Masked map with ``sum_i 2**eta_i`` terms and identical inner products.

    Each vector is normalised by ``2**(eta - 1)``, the number of sign rows
    actually emitted for it, so its terms still carry the full mass ``rho``.
    """
    rho = _check(index_set, coeffs)
    dim = index_set.dimension
    w0 = coeffs.hyperparams.fundamental_frequencies
    sign_cache: dict[int, np.ndarray] = {}
    amps, freqs, kinds, sources = [], [], [], []
    for i, k in enumerate(index_set.vectors):
        nz = np.flatnonzero(k)
        eta = nz.size
        if eta == 0:
            amps.append(np.array([np.sqrt(rho[i])]))
            freqs.append(np.zeros((1, dim)))
            kinds.append(np.array([Kind.CONSTANT]))
            sources.append(np.array([i]))
            continue
        if eta not in sign_cache:
            sign_cache[eta] = build_sign_matrix(eta).astype(float)
        signs = sign_cache[eta]
        n_rows = signs.shape[0]
        f = np.zeros((n_rows, dim))
        f[:, nz] = signs * (k[nz] * w0[nz])
        freqs.append(np.repeat(f, 2, axis=0))
        amps.append(np.full(2 * n_rows, np.sqrt(rho[i] / n_rows)))
        kinds.append(np.tile([Kind.COSINE, Kind.SINE], n_rows))
        sources.append(np.full(2 * n_rows, i))
    return IsfsfFeatureMap(
        np.concatenate(amps),
        np.concatenate(freqs),
        np.concatenate(kinds),
        np.concatenate(sources),
        Mode.SPARSE,
        _provenance(index_set, coeffs),
    )


def evaluate(feature_map: IsfsfFeatureMap, x) -> np.ndarray:
    return feature_map.evaluate(x)


def build_isfsf(
    index_set: IndexSet, hyperparams: PeriodicSeHyperparams, sparse: bool = True
) -> IsfsfFeatureMap:
    """Periodic SE feature map over ``index_set`` with coefficients sized to fit."""
    coeffs = CoefficientTable.for_index_set(hyperparams, index_set)
    return (expand_sparse if sparse else expand_full)(index_set, coeffs)


def sparse_cardinality(index_set: IndexSet) -> int:
    """Feature count of the sparse map, ``sum_i 2**eta_i``, without building it."""
    return int(np.sum(2 ** index_set.nonzero_counts()))


def full_cardinality(index_set: IndexSet) -> int:
    return len(index_set) * 2**index_set.dimension

