"""Command-line entry point: ``isfsf-bench {gram,truncation,regress,surface}``.

Configs are plain ``key = value`` text files; ``#`` starts a comment and list
values are whitespace or comma separated.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench

log = logging.getLogger("isfsf")

SURFACE_KEYS = {"grid", "extent", "noise_std", "mask_fraction", "surface_period", "harmonics", "amplitudes"}


def read_config(path: str | Path | None) -> dict[str, str]:
    if path is None:
        return {}
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        cfg[key.strip().lower()] = value.strip()
    return cfg


def _emit(report_csv: str, out: str | None) -> None:
    if out:
        Path(out).write_text(report_csv)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(report_csv)


def cmd_gram(args, cfg) -> None:
    config = bench.GramBenchmarkConfig.from_mapping(cfg)
    if args.seed is not None:
        config.seed = args.seed
    report = bench.run_gram_benchmark(config)
    _emit(report.to_csv(), args.out or config.out)


def cmd_truncation(args, cfg) -> None:
    dims = bench._ints(cfg.pop("dimensions", "2 12"))
    refinements = bench._ints(cfg.pop("refinements", " ".join(str(r) for r in range(1, 21))))
    lengthscales = bench._floats(cfg.pop("lengthscales", "0.1 0.25 0.5 0.75 1.0"))
    out = cfg.pop("out", None)
    if cfg:
        raise KeyError(f"unknown truncation config keys {sorted(cfg)}")
    report = bench.run_truncation_curve(dims, refinements, lengthscales)
    _emit(report.to_csv(), args.out or out)


def cmd_regress(args, cfg) -> None:
    config = bench.RegressionBenchmarkConfig.from_mapping(cfg)
    if args.seed is not None:
        config.seeds = (args.seed,)
    report = bench.run_regression_benchmark(config)
    _emit(report.to_csv(), args.out or config.out)


def cmd_surface(args, cfg) -> None:
    surface_cfg = {k: v for k, v in cfg.items() if k in SURFACE_KEYS}
    spec = bench.RegressionBenchmarkConfig.from_mapping(surface_cfg).surface
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    data = bench.generate_synthetic_surface(spec, seed)
    _emit(data.to_csv(), args.out or cfg.get("out"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isfsf-bench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
        ("gram", cmd_gram, "normalised Frobenius error of Gram reconstructions"),
        ("truncation", cmd_truncation, "multivariate truncation error grid"),
        ("regress", cmd_regress, "BLR inpainting on a synthetic periodic surface"),
        ("surface", cmd_surface, "export the synthetic surface dataset"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args, read_config(args.config))
    except (bench.FeasibilityError, KeyError, ValueError) as exc:
        log.error("error: %s", exc)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
