"""Benchmarks: Gram reconstruction, truncation curves and masked-surface regression.

Every benchmark returns a :class:`BenchmarkReport` in long layout (one metric
per row) with the fixed column set :data:`CSV_HEADER`.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import baselines
from .blr import FitError, fit, mnll, predict, rmse
from .coefficients import PeriodicSeHyperparams, truncation_error
from .features import build_isfsf, sparse_cardinality
from .index_sets import Family, IndexSet, family_weight, generate_index_set

CSV_HEADER = (
    "benchmark", "method", "family", "D", "R", "gamma", "zeta", "C_requested",
    "C_realized", "lengthscale", "period", "seed", "metric", "value", "wall_ms",
)

FF_METHODS = ("rff", "hal", "ghal")
BUDGET_SLACK = 8
MAX_INDEX_VECTORS = 200_000


class FeasibilityError(ValueError):
    """No index set refinement fits the requested feature budget."""


# -- reports ---------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (tuple, list, np.ndarray)):
        vals = [_fmt(v) for v in value]
        return vals[0] if len(set(vals)) == 1 else ";".join(vals)
    return str(value)


@dataclass
class BenchmarkReport:
    rows: list[dict] = field(default_factory=list)

    def add(self, **row) -> None:
        unknown = set(row) - set(CSV_HEADER)
        if unknown:
            raise KeyError(f"unknown report columns {sorted(unknown)}")
        if row.get("wall_ms") is not None:
            row["wall_ms"] = round(float(row["wall_ms"]), 3)
        self.rows.append({k: row.get(k) for k in CSV_HEADER})

    def extend(self, other: "BenchmarkReport") -> None:
        self.rows.extend(other.rows)

    def select(self, **match) -> list[dict]:
        return [r for r in self.rows if all(r.get(k) == v for k, v in match.items())]

    def values(self, **match) -> list[float]:
        return [float(r["value"]) for r in self.select(**match)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow([_fmt(row[k]) for k in CSV_HEADER])
        return buf.getvalue()

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())


def frobenius_error(approx_gram, true_gram) -> float:
    """Normalised Frobenius error ``||K~ - K||_F / ||K||_F``."""
    approx = np.asarray(approx_gram, dtype=float)
    true = np.asarray(true_gram, dtype=float)
    if approx.shape != true.shape:
        raise ValueError(f"shape mismatch {approx.shape} vs {true.shape}")
    denom = np.linalg.norm(true)
    if denom == 0.0:
        raise ValueError("reference Gram matrix is all zero")
    return float(np.linalg.norm(approx - true) / denom)


# -- budget matching -------------------------------------------------------------


def match_budget(
    family: Family | str,
    dimension: int,
    budget: int,
    gamma: float | Sequence[float] = 1.0,
    zeta: float = 0.0,
    slack: int = BUDGET_SLACK,
    max_vectors: int = MAX_INDEX_VECTORS,
) -> IndexSet:
    """Index set whose sparse feature count is the largest one ``<= budget + slack``.

    Refinements are searched over the distinct weight values of the lattice,
    so the chosen ``R`` is the smallest one reaching that count.
    """
    family = Family.parse(family)
    cap = budget + slack
    gvec = (float(gamma),) * dimension if np.ndim(gamma) == 0 else tuple(map(float, gamma))
    z = zeta if family is Family.ENHC else 0.0

    outer = None
    ceiling = 2.0
    while ceiling <= 1e6:
        try:
            outer = generate_index_set(family, dimension, ceiling, gvec, z, max_size=max_vectors)
        except OverflowError:
            break
        if sparse_cardinality(outer) > cap:
            break
        ceiling *= 2.0
    if outer is None:
        raise FeasibilityError(
            f"{family.value} index set in D={dimension} exceeds {max_vectors} vectors"
        )

    weights = np.array([family_weight(family, k, gvec, z) for k in outer.vectors])
    counts = 2 ** outer.nonzero_counts()
    order = np.argsort(weights, kind="stable")
    weights, counts = weights[order], counts[order]
    # merge near-equal weights, they are one refinement step
    step_end = np.append(np.diff(weights) > 1e-12 * np.maximum(1.0, weights[1:]), True)
    cumulative = np.cumsum(counts)[step_end]
    levels = np.maximum(1.0, weights[step_end])

    best_r, best_count = None, 0
    for r, c in zip(levels, cumulative):
        if c > cap:
            break
        if c > best_count:
            best_r, best_count = r, c
    if best_r is None or best_count <= 1:
        raise FeasibilityError(
            f"no non-trivial {family.value} refinement in D={dimension} fits budget {budget}"
        )
    return generate_index_set(family, dimension, float(best_r), gvec, z)


# -- Gram benchmark --------------------------------------------------------------


def _floats(value) -> list[float]:
    if isinstance(value, str):
        return [float(v) for v in value.replace(",", " ").split()]
    if np.ndim(value) == 0:
        return [float(value)]
    return [float(v) for v in value]


def _ints(value) -> list[int]:
    return [int(v) for v in _floats(value)]


def _words(value) -> list[str]:
    if isinstance(value, str):
        return value.replace(",", " ").split()
    return [str(v) for v in value]


def _bool(value) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


def _scalar_or_list(values: list[float]):
    return values[0] if len(values) == 1 else tuple(values)


@dataclass
class GramBenchmarkConfig:
    dimension: int = 3
    lengthscale: float | tuple = 1.0
    period: float | tuple = 1.0
    samples: int = 500
    domain: tuple[float, float] = (-2.0, 2.0)
    methods: tuple[str, ...] = ("total", "euclidean", "hyperbolic", "enhc", "rff", "hal", "ghal")
    budgets: tuple[int, ...] = (100, 400)
    gamma: float | tuple = 1.0
    zeta: float = 0.0
    seed: int = 0
    rff_seeds: tuple[int, ...] = tuple(range(20))
    ghal_seed: int = 0
    burn: int = baselines.DEFAULT_BURN
    slack: int = BUDGET_SLACK
    skip_infeasible: bool = False
    out: str | None = None

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("need at least two samples")
        lo, hi = self.domain
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"invalid sample domain {self.domain}")
        if not self.methods:
            raise ValueError("at least one method is required")

    @property
    def hyperparams(self) -> PeriodicSeHyperparams:
        return PeriodicSeHyperparams.create(self.dimension, self.lengthscale, self.period)

    @classmethod
    def from_mapping(cls, cfg: dict) -> "GramBenchmarkConfig":
        kw = {}
        conv = {
            "dimension": int, "samples": int, "seed": int, "ghal_seed": int, "burn": int,
            "slack": int, "zeta": float, "skip_infeasible": _bool, "out": str,
            "lengthscale": lambda v: _scalar_or_list(_floats(v)),
            "period": lambda v: _scalar_or_list(_floats(v)),
            "gamma": lambda v: _scalar_or_list(_floats(v)),
            "domain": lambda v: tuple(_floats(v)),
            "methods": lambda v: tuple(m.lower() for m in _words(v)),
            "budgets": lambda v: tuple(_ints(v)),
            "rff_seeds": lambda v: tuple(_ints(v)),
        }
        for key, value in cfg.items():
            if key not in conv:
                raise KeyError(f"unknown gram config key {key!r}")
            kw[key] = conv[key](value)
        return cls(**kw)


def _ff_map(method: str, n_samples: int, hp, seed: int, burn: int):
    if method == "rff":
        return baselines.rff_map(n_samples, hp, seed)
    return baselines.qmc_map(n_samples, hp, method == "ghal", seed, burn)


def _ff_source(fmap) -> str:
    """Spectral sample provenance for the ``family`` column of FF rows."""
    sample = fmap.sample
    parts = [sample.source]
    if sample.seed is not None:
        parts.append(f"seed={sample.seed}")
    if sample.source != "rff":
        parts.append(f"burn={sample.burn}")
    return ":".join(parts)


def run_gram_benchmark(config: GramBenchmarkConfig) -> BenchmarkReport:
    """Normalised Frobenius error of every method and budget against the analytic Gram."""
    hp = config.hyperparams
    rng = np.random.default_rng(config.seed)
    lo, hi = config.domain
    x = rng.uniform(lo, hi, size=(config.samples, config.dimension))
    true_gram = baselines.periodic_se_kernel(x, x, hp)
    report = BenchmarkReport()
    common = dict(
        benchmark="gram", D=config.dimension, lengthscale=hp.lengthscales, period=hp.periods,
        metric="frobenius",
    )

    for method in config.methods:
        for budget in config.budgets:
            if method in FF_METHODS:
                n_samples = max(1, budget // 2)
                seeds = config.rff_seeds if method == "rff" else [config.ghal_seed if method == "ghal" else None]
                errors = []
                for seed in seeds:
                    t0 = time.perf_counter()
                    fmap = _ff_map(method, n_samples, hp, seed or 0, config.burn)
                    err = frobenius_error(fmap.gram(x), true_gram)
                    errors.append(err)
                    report.add(
                        **common, method=method + "+w", family=_ff_source(fmap),
                        C_requested=budget, C_realized=fmap.n_features, seed=seed, value=err,
                        wall_ms=1e3 * (time.perf_counter() - t0),
                    )
                if method == "rff":
                    for name, val in (("frobenius_mean", np.mean(errors)), ("frobenius_std", np.std(errors))):
                        report.add(
                            **{**common, "metric": name}, method="rff+w", C_requested=budget,
                            C_realized=2 * n_samples, seed=None, value=float(val), wall_ms=0.0,
                        )
                continue

            family = Family.parse(method)
            t0 = time.perf_counter()
            try:
                iset = match_budget(
                    family, config.dimension, budget, config.gamma, config.zeta, config.slack
                )
            except FeasibilityError:
                if config.skip_infeasible:
                    continue
                raise
            fmap = build_isfsf(iset, hp, sparse=True)
            err = frobenius_error(fmap.gram(x), true_gram)
            report.add(
                **common, method="isfsf", family=family.value, R=iset.refinement,
                gamma=iset.weights, zeta=iset.zeta, C_requested=budget,
                C_realized=fmap.n_features, seed=None, value=err,
                wall_ms=1e3 * (time.perf_counter() - t0),
            )
    return report


# -- truncation curves -----------------------------------------------------------


def run_truncation_curve(
    dimensions: Iterable[int], refinements: Iterable[int], lengthscales: Iterable[float]
) -> BenchmarkReport:
    """Multivariate truncation error over a (D, R, l) grid."""
    report = BenchmarkReport()
    for dim in dimensions:
        for l in lengthscales:
            hp = PeriodicSeHyperparams.isotropic(int(dim), float(l))
            for r in refinements:
                t0 = time.perf_counter()
                eps = truncation_error(int(r), hp)
                report.add(
                    benchmark="truncation", method="isfsf", family=Family.TENSOR.value,
                    D=int(dim), R=int(r), lengthscale=float(l), period=1.0,
                    metric="truncation_error", value=eps,
                    wall_ms=1e3 * (time.perf_counter() - t0),
                )
    return report


# -- synthetic surfaces ----------------------------------------------------------

DEFAULT_HARMONICS = ((1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2))


@dataclass(frozen=True)
class SurfaceSpec:
    """A periodic 2-D surface sampled on a square grid with a masked hole.

    ``y = sum_m a_m sin(2 pi h1 x1 / T1 + p1) sin(2 pi h2 x2 / T2 + p2) + noise``
    with amplitudes and phases drawn from the seed unless given.  The test
    split is a centred square of ``round(grid * sqrt(mask_fraction))`` pixels
    per side.
    """

    grid: int = 65
    extent: float = 2.0
    period: tuple[float, float] = (1.0, 1.0)
    harmonics: tuple[tuple[int, int], ...] = DEFAULT_HARMONICS
    amplitudes: tuple[float, ...] | None = None
    phases: tuple[tuple[float, float], ...] | None = None
    noise_std: float = 0.05
    mask_fraction: float = 0.25

    @property
    def mask_side(self) -> int:
        return int(math.floor(self.grid * math.sqrt(self.mask_fraction) + 0.5))


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    targets: np.ndarray
    clean: np.ndarray
    test_mask: np.ndarray

    @property
    def train(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points[~self.test_mask], self.targets[~self.test_mask]

    @property
    def test(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points[self.test_mask], self.targets[self.test_mask]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("x1", "x2", "y", "split"))
        for (x1, x2), y, t in zip(self.points, self.targets, self.test_mask):
            writer.writerow((_fmt(x1), _fmt(x2), _fmt(y), "test" if t else "train"))
        return buf.getvalue()


def generate_synthetic_surface(spec: SurfaceSpec, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    n_modes = len(spec.harmonics)
    if spec.amplitudes is None:
        amps = rng.uniform(0.5, 1.0, n_modes)
    else:
        amps = np.asarray(spec.amplitudes, dtype=float)
    if spec.phases is None:
        phases = rng.uniform(0.0, 2.0 * np.pi, (n_modes, 2))
    else:
        phases = np.asarray(spec.phases, dtype=float)
    if amps.shape != (n_modes,) or phases.shape != (n_modes, 2):
        raise ValueError("amplitudes/phases do not match the harmonic list")

    ticks = np.arange(spec.grid) * (spec.extent / spec.grid)
    g1, g2 = np.meshgrid(ticks, ticks, indexing="ij")
    pts = np.column_stack([g1.ravel(), g2.ravel()])
    w = 2.0 * np.pi / np.asarray(spec.period, dtype=float)
    clean = np.zeros(pts.shape[0])
    for a, (h1, h2), (p1, p2) in zip(amps, spec.harmonics, phases):
        clean += a * np.sin(h1 * w[0] * pts[:, 0] + p1) * np.sin(h2 * w[1] * pts[:, 1] + p2)
    noisy = clean + spec.noise_std * rng.standard_normal(clean.shape) if spec.noise_std > 0 else clean.copy()

    side = spec.mask_side
    start = (spec.grid - side) // 2
    idx = np.arange(spec.grid)
    inside = (idx >= start) & (idx < start + side)
    mask = (inside[:, None] & inside[None, :]).ravel()
    return Dataset(pts, noisy, clean, mask)


# -- regression benchmark --------------------------------------------------------


@dataclass
class RegressionBenchmarkConfig:
    surface: SurfaceSpec = field(default_factory=SurfaceSpec)
    methods: tuple[str, ...] = ("enhc", "rff", "hal", "ghal")
    budgets: tuple[int, ...] = (49, 93, 201, 397, 793)
    lengthscale: float | tuple = 1.0
    period: float | tuple | None = None
    noise_variance: float = 0.0025
    prior_variance: float = 1.0
    gamma: float | tuple = 1.0
    zeta: float = 0.0
    seeds: tuple[int, ...] = (0,)
    ghal_seed: int = 0
    burn: int = baselines.DEFAULT_BURN
    slack: int = BUDGET_SLACK
    out: str | None = None

    @property
    def hyperparams(self) -> PeriodicSeHyperparams:
        period = self.surface.period if self.period is None else self.period
        return PeriodicSeHyperparams.create(2, self.lengthscale, period)

    @classmethod
    def from_mapping(cls, cfg: dict) -> "RegressionBenchmarkConfig":
        surface_keys = {
            "grid": int, "extent": float, "noise_std": float, "mask_fraction": float,
            "surface_period": lambda v: tuple(_floats(v) * (2 if len(_floats(v)) == 1 else 1)),
            "harmonics": _parse_harmonics,
            "amplitudes": lambda v: tuple(_floats(v)),
        }
        conv = {
            "methods": lambda v: tuple(m.lower() for m in _words(v)),
            "budgets": lambda v: tuple(_ints(v)),
            "lengthscale": lambda v: _scalar_or_list(_floats(v)),
            "period": lambda v: _scalar_or_list(_floats(v)),
            "gamma": lambda v: _scalar_or_list(_floats(v)),
            "noise_variance": float, "prior_variance": float, "zeta": float,
            "seeds": lambda v: tuple(_ints(v)), "ghal_seed": int, "burn": int,
            "slack": int, "out": str,
        }
        kw, skw = {}, {}
        for key, value in cfg.items():
            if key in surface_keys:
                name = "period" if key == "surface_period" else key
                skw[name] = surface_keys[key](value)
            elif key in conv:
                kw[key] = conv[key](value)
            else:
                raise KeyError(f"unknown regress config key {key!r}")
        return cls(surface=SurfaceSpec(**skw), **kw)


def _parse_harmonics(value) -> tuple[tuple[int, int], ...]:
    if not isinstance(value, str):
        return tuple((int(a), int(b)) for a, b in value)
    pairs = []
    for tok in value.replace(",", " ").split():
        a, b = tok.split(":")
        pairs.append((int(a), int(b)))
    return tuple(pairs)


def _regression_map(method: str, budget: int, config: RegressionBenchmarkConfig, hp, seed: int):
    """Feature map and the report columns describing it."""
    if method in FF_METHODS:
        n_samples = max(1, budget // 2)
        if method == "rff":
            used_seed = seed
        elif method == "ghal":
            used_seed = config.ghal_seed
        else:
            used_seed = None
        fmap = _ff_map(method, n_samples, hp, used_seed or 0, config.burn)
        return fmap, dict(method=method + "+w", family=_ff_source(fmap))
    family = Family.parse(method)
    iset = match_budget(family, 2, budget, config.gamma, config.zeta, config.slack)
    fmap = build_isfsf(iset, hp, sparse=True)
    return fmap, dict(
        method="isfsf", family=family.value, R=iset.refinement, gamma=iset.weights,
        zeta=iset.zeta,
    )


def run_regression_benchmark(config: RegressionBenchmarkConfig) -> BenchmarkReport:
    """RMSE and MNLL of BLR inpainting on the masked synthetic surface."""
    hp = config.hyperparams
    report = BenchmarkReport()
    for seed in config.seeds:
        data = generate_synthetic_surface(config.surface, seed)
        (x_tr, y_tr), (x_te, y_te) = data.train, data.test
        for method in config.methods:
            for budget in config.budgets:
                t0 = time.perf_counter()
                fmap, cols = _regression_map(method, budget, config, hp, seed)
                common = dict(
                    benchmark="regress", D=2, lengthscale=hp.lengthscales, period=hp.periods,
                    C_requested=budget, C_realized=fmap.n_features, seed=seed, **cols,
                )
                try:
                    model = fit(fmap.evaluate(x_tr), y_tr, config.noise_variance, config.prior_variance)
                except FitError:
                    report.add(**common, metric="fit_failed", value=float("nan"),
                               wall_ms=1e3 * (time.perf_counter() - t0))
                    continue
                pred = predict(model, fmap.evaluate(x_te))
                wall = 1e3 * (time.perf_counter() - t0)
                report.add(**common, metric="rmse", value=rmse(pred.mean, y_te), wall_ms=wall)
                report.add(**common, metric="mnll", value=mnll(pred.mean, pred.variance, y_te),
                           wall_ms=wall)
    return report
