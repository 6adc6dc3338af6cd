"""Weighted frequency index sets over the non-negative orthant.

An index set is a finite collection of integer frequency vectors
``k = (k_1, ..., k_D)`` with ``k_d >= 0`` selected by a weight function
``w(k) <= R``.  Families:

* ``tensor``     ``max_d k_d / gamma_d <= R - 1``
* ``total``      ``sum_d k_d / gamma_d <= R``          (l1 ball)
* ``euclidean``  ``||k / gamma||_2 <= R``              (l2 ball)
* ``hyperbolic`` ``prod_d max(1, k_d / gamma_d) <= R``
* ``enhc``       energy-norm hyperbolic cross, see :func:`enhc_weight`

Sets are enumerated dimension by dimension with pruning, never by scanning
the full bounding box.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

# relative slack so boundary ties w(k) == R survive floating point round-off
_TIE_RTOL = 1e-12


class Family(str, enum.Enum):
    TENSOR = "tensor"
    TOTAL_ORDER = "total"
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"
    ENHC = "enhc"

    @classmethod
    def parse(cls, value: "Family | str") -> "Family":
        if isinstance(value, Family):
            return value
        key = str(value).strip().lower()
        aliases = {
            "tot": "total", "totalorder": "total", "total_order": "total",
            "euc": "euclidean", "hyp": "hyperbolic", "hc": "hyperbolic",
        }
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown index set family {value!r}") from None


@dataclass(frozen=True)
class EnhcWeightParams:
    gamma: tuple[float, ...]
    zeta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        if not 0.0 <= self.zeta < 1.0:
            raise ValueError(f"zeta must lie in [0, 1), got {self.zeta}")
        _check_weights(self.gamma)


def _check_weights(gamma: Sequence[float]) -> None:
    for g in gamma:
        if not math.isfinite(g):
            raise ValueError(f"non-finite weight {g}")
        if not 0.0 < g <= 1.0:
            raise ValueError(f"weights must lie in (0, 1], got {g}")


def enhc_weight(k: Sequence[int], params: EnhcWeightParams) -> float:
    """Energy-norm hyperbolic cross weight of a frequency vector.

    ``max(1, |k|_1) ** (zeta / (zeta - 1)) * prod_d max(1, |k_d| / gamma_d) ** (1 / (1 - zeta))``

    The zero vector always has weight exactly 1.
    """
    if len(k) != len(params.gamma):
        raise ValueError(
            f"dimension mismatch: k has {len(k)} entries, gamma has {len(params.gamma)}"
        )
    zeta = params.zeta
    l1 = sum(abs(int(v)) for v in k)
    prod = 1.0
    for kd, gd in zip(k, params.gamma):
        prod *= max(1.0, abs(kd) / gd)
    return max(1.0, l1) ** (zeta / (zeta - 1.0)) * prod ** (1.0 / (1.0 - zeta))


def family_weight(
    family: Family | str, k: Sequence[int], gamma: Sequence[float], zeta: float = 0.0
) -> float:
    """Weight of ``k`` under ``family``; ``k`` belongs to the set iff weight <= R."""
    family = Family.parse(family)
    if len(k) != len(gamma):
        raise ValueError("dimension mismatch between k and gamma")
    scaled = [kd / gd for kd, gd in zip(k, gamma)]
    if family is Family.TENSOR:
        return max(scaled) + 1.0
    if family is Family.TOTAL_ORDER:
        return float(sum(scaled))
    if family is Family.EUCLIDEAN:
        return math.sqrt(sum(s * s for s in scaled))
    if family is Family.HYPERBOLIC:
        return math.prod(max(1.0, s) for s in scaled)
    return enhc_weight(k, EnhcWeightParams(tuple(gamma), zeta))


def _prefix_bound(
    family: Family, gamma: Sequence[float], zeta: float
) -> tuple[Callable[[Sequence[int], int], float], bool]:
    """Lower bound on the weight of every completion of a prefix.

    Returns ``(bound, monotone)``; ``bound(prefix, n_free)`` never exceeds
    the weight of any vector starting with ``prefix`` followed by ``n_free``
    free non-negative entries.  ``monotone`` says whether the bound is
    non-decreasing in the last prefix entry from 0 onwards (otherwise only
    from 1 onwards).
    """
    if family is not Family.ENHC or zeta == 0.0:
        # every non-ENHC weight is non-decreasing in each entry, so zero
        # completion is the minimum; ENHC with zeta=0 is the hyperbolic weight
        fam = Family.HYPERBOLIC if family is Family.ENHC else family

        def bound(prefix, n_free):
            full = list(prefix) + [0] * n_free
            return family_weight(fam, full, gamma)

        return bound, True

    expo = 1.0 / (1.0 - zeta)
    # each free entry can shrink P / max(1,|k|_1)**zeta by at most 2**-zeta
    shrink = 2.0 ** (-zeta)

    def bound(prefix, n_free):
        s = sum(prefix)
        if s == 0:
            return 0.0
        prod = 1.0
        for kd, gd in zip(prefix, gamma):
            prod *= max(1.0, kd / gd)
        return (prod / s**zeta * shrink**n_free) ** expo

    return bound, False


@dataclass(frozen=True, eq=False)
class IndexSet:
    """Immutable, lexicographically ordered set of frequency vectors."""

    vectors: np.ndarray  # (n, D) int64, read-only
    family: Family
    refinement: float
    weights: tuple[float, ...]
    zeta: float = 0.0

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def __iter__(self):
        return (tuple(int(v) for v in row) for row in self.vectors)

    def __contains__(self, k) -> bool:
        return tuple(int(v) for v in k) in self.as_set()

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexSet):
            return NotImplemented
        return (
            self.family == other.family
            and self.refinement == other.refinement
            and self.weights == other.weights
            and self.zeta == other.zeta
            and np.array_equal(self.vectors, other.vectors)
        )

    __hash__ = object.__hash__

    def as_set(self) -> set[tuple[int, ...]]:
        return set(iter(self))

    def max_degree(self) -> np.ndarray:
        """Largest frequency per dimension (the bounding box corner)."""
        return self.vectors.max(axis=0)

    def nonzero_counts(self) -> np.ndarray:
        """Number of non-zero entries of every vector."""
        return np.count_nonzero(self.vectors, axis=1)

    def describe(self) -> dict:
        return {
            "family": self.family.value,
            "D": self.dimension,
            "R": self.refinement,
            "gamma": list(self.weights),
            "zeta": self.zeta,
            "size": len(self),
        }

    # -- text serialization ----------------------------------------------------

    def dumps(self) -> str:
        lines = [
            f"{self.family.value} {self.dimension} {self.refinement!r} {self.zeta!r}",
            " ".join(repr(g) for g in self.weights),
        ]
        lines.extend(" ".join(str(int(v)) for v in row) for row in self.vectors)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "IndexSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) < 3:
            raise ValueError("index set text needs a header, a weight line and vectors")
        fam, dim, refinement, zeta = lines[0].split()
        dim = int(dim)
        weights = tuple(float(g) for g in lines[1].split())
        rows = [[int(v) for v in ln.split()] for ln in lines[2:]]
        if len(weights) != dim or any(len(r) != dim for r in rows):
            raise ValueError("inconsistent dimension in index set text")
        return _make(rows, Family.parse(fam), float(refinement), weights, float(zeta))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "IndexSet":
        return cls.loads(Path(path).read_text())


def _make(rows, family, refinement, weights, zeta) -> IndexSet:
    dim = len(weights)
    arr = np.array(sorted(set(map(tuple, rows))), dtype=np.int64).reshape(-1, dim)
    if (arr < 0).any():
        raise ValueError("index vectors must be non-negative")
    arr.setflags(write=False)
    return IndexSet(arr, family, float(refinement), tuple(weights), float(zeta))


def generate_index_set(
    family: Family | str,
    dimension: int,
    refinement: float,
    weights: float | Sequence[float] | None = None,
    zeta: float = 0.0,
    max_size: int | None = None,
) -> IndexSet:
    """Enumerate every non-negative frequency vector within the refinement budget.

    Parameters
    ----------
    family : Family or str
        Index set family.
    dimension : int
        Ambient dimension ``D >= 1``.
    refinement : float
        Budget ``R >= 1``; vectors with weight ``<= R`` are kept (ties included).
    weights : float or sequence of float, optional
        Per-dimension weights ``gamma_d`` in ``(0, 1]``; a scalar is broadcast.
        Defaults to all ones.
    zeta : float
        ENHC sparsity in ``[0, 1)``; ignored by the other families.
    max_size : int, optional
        Abort with ``OverflowError`` once more vectors than this are found.

    Returns
    -------
    IndexSet
        Vectors in lexicographic order.
    """
    family = Family.parse(family)
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if not math.isfinite(refinement) or refinement < 1.0:
        raise ValueError(f"refinement must be a finite value >= 1, got {refinement}")
    if weights is None:
        gamma = (1.0,) * dimension
    elif np.ndim(weights) == 0:
        gamma = (float(weights),) * dimension
    else:
        gamma = tuple(float(g) for g in weights)
    if len(gamma) != dimension:
        raise ValueError(f"expected {dimension} weights, got {len(gamma)}")
    _check_weights(gamma)
    if not 0.0 <= zeta < 1.0:
        raise ValueError(f"zeta must lie in [0, 1), got {zeta}")
    if family is not Family.ENHC:
        zeta = 0.0

    limit = refinement * (1.0 + _TIE_RTOL)
    bound, monotone = _prefix_bound(family, gamma, zeta)
    out: list[tuple[int, ...]] = []

    def leaf_ok(k):
        return family_weight(family, k, gamma, zeta) <= limit

    def recurse(prefix: list[int]):
        d = len(prefix)
        n_free = dimension - d - 1
        k = 0
        while True:
            prefix.append(k)
            lb = bound(prefix, n_free)
            if lb > limit:
                prefix.pop()
                if monotone or k >= 1:
                    break
                k += 1
                continue
            if n_free == 0:
                if leaf_ok(prefix):
                    out.append(tuple(prefix))
                    if max_size is not None and len(out) > max_size:
                        raise OverflowError(
                            f"{family.value} index set exceeds {max_size} vectors"
                        )
            else:
                recurse(prefix)
            prefix.pop()
            k += 1

    recurse([])
    return _make(out, family, refinement, gamma, zeta)


def cardinality(index_set: IndexSet) -> int:
    return len(index_set)


def from_vectors(
    vectors: Iterable[Sequence[int]], family: Family | str = Family.TENSOR, refinement: float = 1.0
) -> IndexSet:
    """Wrap an explicit list of vectors (deduplicated and sorted)."""
    rows = [tuple(int(v) for v in row) for row in vectors]
    if not rows:
        raise ValueError("index set must contain at least one vector")
    dim = len(rows[0])
    return _make(rows, Family.parse(family), refinement, (1.0,) * dim, 0.0)
