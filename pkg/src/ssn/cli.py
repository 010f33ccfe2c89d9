"""Command-line pipeline: scene synthesis, change detection, benchmark sweeps.

The detect path runs the four pipeline stages (filter bank construction,
scattering of both acquisitions, per-pixel feature cascade with balanced
training sampling, Gaussian-kernel SVM classification) and writes the
change map, metrics, serialized model, manifest, and a summary figure.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from . import __version__, datagen, features, images, metrics, report, svm
from .errors import ConfigError, ImageFormatError, NumericalError
from .scattering import PATH_RULES, scatter
from .stransform import ParameterSet, build_filter_bank

__all__ = ["PipelineConfig", "ChangeDetectionReport", "run_pipeline", "run_benchmark", "main"]

DEFAULT_LAMBDA = (2.62, 1.0, -0.98)
RULE_ALIASES = {"all": "all", "decreasing": "frequency-decreasing"}


@dataclass(frozen=True)
class PipelineConfig:
    image1: str
    image2: str
    truth: str
    out_dir: str
    stem: Optional[str] = None
    lam: Tuple[float, float, float] = DEFAULT_LAMBDA
    P: int = 3
    N: int = 4
    order: int = 3
    rule: str = "frequency-decreasing"
    train_count: int = 6000
    seed: int = 0
    svm_c: float = 10.0
    svm_gamma: Optional[float] = None  # None: 1/feature_dim
    svm_tol: float = 1e-3
    svm_max_passes: int = 20
    preproc: str = "linear"
    threads: int = 1
    figure: bool = True

    def validate(self) -> None:
        if self.P < 1 or self.N < 1:
            raise ConfigError(f"P and N must be >= 1, got P={self.P}, N={self.N}")
        if not 1 <= self.order <= 4:
            raise ConfigError(f"order must be in 1..4, got {self.order}")
        if self.rule not in PATH_RULES:
            raise ConfigError(f"rule must be one of {PATH_RULES}, got {self.rule!r}")
        if self.train_count <= 0 or self.train_count % 2 != 0:
            raise ConfigError(
                f"train_count must be a positive even number, got {self.train_count}"
            )
        if self.svm_c <= 0:
            raise ConfigError(f"svm C must be positive, got {self.svm_c}")
        if self.svm_gamma is not None and self.svm_gamma <= 0:
            raise ConfigError(f"svm gamma must be positive, got {self.svm_gamma}")
        if self.preproc not in images.PREPROC_MODES:
            raise ConfigError(
                f"preproc must be one of {images.PREPROC_MODES}, got {self.preproc!r}"
            )
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")

    def echo(self) -> dict:
        return {
            "image1": self.image1,
            "image2": self.image2,
            "truth": self.truth,
            "out_dir": self.out_dir,
            "stem": self.stem,
            "lambda": list(self.lam),
            "P": self.P,
            "N": self.N,
            "order": self.order,
            "rule": self.rule,
            "train_count": self.train_count,
            "seed": self.seed,
            "svm_c": self.svm_c,
            "svm_gamma": self.svm_gamma,
            "svm_tol": self.svm_tol,
            "svm_max_passes": self.svm_max_passes,
            "preproc": self.preproc,
            "threads": self.threads,
        }


@dataclass(frozen=True)
class ChangeDetectionReport:
    metrics: metrics.MetricsReport
    change_map_path: str
    model_path: str
    metrics_path: str
    manifest_path: str
    figure_path: Optional[str]
    config_echo: dict
    timings: dict
    shortfall: dict


def _stem(config: PipelineConfig) -> str:
    return config.stem or Path(config.image1).stem


def run_pipeline(config: PipelineConfig) -> ChangeDetectionReport:
    """Execute the full detection pipeline for one coregistered pair."""
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = _stem(config)

    image1 = images.read_image(config.image1, config.preproc)
    image2 = images.read_image(config.image2, config.preproc)
    truth = features.binarize_truth(images.read_grayscale(config.truth))
    if image1.shape != image2.shape or image1.shape != truth.shape:
        raise ConfigError(
            f"images and truth must share dimensions, got {image1.shape}, "
            f"{image2.shape}, {truth.shape}"
        )
    height, width = image1.shape

    timings = {}
    t0 = time.perf_counter()
    params = ParameterSet(*config.lam)
    bank = build_filter_bank(params, config.P, config.N, width, height)
    timings["bank"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    s1 = scatter(image1, bank, config.order, config.rule, threads=config.threads)
    s2 = scatter(image2, bank, config.order, config.rule, threads=config.threads)
    timings["scatter"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    feats = features.assemble_features(s1, s2)
    draw = features.sample_training_pixels(truth, config.train_count, config.seed)
    stats = features.fit_standardization(feats, draw.rows)
    standardized = features.apply_standardization(feats, stats)
    timings["features"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    model = svm.train_svm(
        standardized.values[draw.rows],
        draw.labels,
        C=config.svm_c,
        gamma=config.svm_gamma,
        tol=config.svm_tol,
        max_passes=config.svm_max_passes,
        seed=config.seed + 1,
    )
    timings["train"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    labels, _ = svm.predict(model, standardized.values)
    timings["predict"] = time.perf_counter() - t0
    timings["total"] = sum(timings.values())

    change_map = np.where(labels.reshape(height, width) > 0, 255, 0).astype(np.uint8)
    cm = metrics.confusion(change_map, truth)
    rep = metrics.metrics(cm, timings["total"])

    change_map_path = out_dir / f"{stem}_changemap.png"
    metrics_path = out_dir / f"{stem}_metrics.json"
    model_path = out_dir / f"{stem}_model.bin"
    manifest_path = out_dir / f"{stem}_manifest.json"
    figure_path = out_dir / f"{stem}_report.png" if config.figure else None

    images.write_grayscale(change_map_path, change_map)
    svm.save_model(model_path, model, standardized.channel_labels)
    echo = config.echo()
    metrics_path.write_text(rep.to_json_line(echo) + "\n")
    manifest = {
        "version": __version__,
        "config": echo,
        "resolved": {
            "stem": stem,
            "image_shape": [height, width],
            "feature_dim": standardized.feature_dim,
            "svm_gamma": model.gamma,
            "n_support_vectors": int(model.support_vectors.shape[0]),
            "train_rows_drawn": len(draw.samples),
            "sample_seed": config.seed,
            "train_seed": config.seed + 1,
        },
        "shortfall": draw.shortfall,
        "timings": timings,
        "outputs": {
            "change_map": str(change_map_path),
            "metrics": str(metrics_path),
            "model": str(model_path),
            "figure": str(figure_path) if figure_path else None,
        },
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    if figure_path is not None:
        report.render_detection_figure(
            image1, image2, truth, change_map, rep, figure_path
        )
    return ChangeDetectionReport(
        metrics=rep,
        change_map_path=str(change_map_path),
        model_path=str(model_path),
        metrics_path=str(metrics_path),
        manifest_path=str(manifest_path),
        figure_path=str(figure_path) if figure_path else None,
        config_echo=echo,
        timings=timings,
        shortfall=draw.shortfall,
    )


def _parse_lambda(text: str) -> Tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"lambda must be three comma-separated numbers, got {text!r}")
    try:
        k, b, c = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"lambda must be numeric, got {text!r}") from exc
    return (k, b, c)


def _config_from_dict(entry: dict, defaults: dict) -> PipelineConfig:
    merged = {**defaults, **entry}
    merged.pop("name", None)
    lam = merged.pop("lambda", None)
    if lam is not None:
        if isinstance(lam, str):
            merged["lam"] = _parse_lambda(lam)
        else:
            merged["lam"] = tuple(float(v) for v in lam)
            if len(merged["lam"]) != 3:
                raise ConfigError(f"lambda must have three entries, got {lam!r}")
    rule = merged.get("rule")
    if rule in RULE_ALIASES:
        merged["rule"] = RULE_ALIASES[rule]
    known = set(PipelineConfig.__dataclass_fields__)
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown sweep fields: {sorted(unknown)}")
    try:
        return PipelineConfig(**merged)
    except TypeError as exc:
        raise ConfigError(f"incomplete sweep entry: {exc}") from exc


def run_benchmark(configs: List[Tuple[str, PipelineConfig]], out_dir) -> List[dict]:
    """Run every sweep row through the same engine, in order.

    A failing row records its error and the sweep continues.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for index, (name, config) in enumerate(configs):
        row_dir = out / f"row_{index:03d}"
        config = replace(config, out_dir=str(row_dir))
        row = {
            "row": index,
            "name": name,
            "lambda_k": config.lam[0],
            "lambda_b": config.lam[1],
            "lambda_c": config.lam[2],
            "P": config.P,
            "N": config.N,
            "order": config.order,
            "rule": config.rule,
            "fp": None,
            "fn": None,
            "oe": None,
            "pcc": None,
            "kc": None,
            "ct_seconds": None,
            "error": "",
        }
        try:
            result = run_pipeline(config)
            row.update(result.metrics.to_dict())
        except Exception as exc:  # per-row isolation is the contract
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def _add_detect_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--image1", required=True, help="time-1 image (PGM/PNG)")
    parser.add_argument("--image2", required=True, help="time-2 image (PGM/PNG)")
    parser.add_argument("--truth", required=True, help="binary ground truth image")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--lambda", dest="lam", default=None, metavar="k,b,c",
                        help="window triple, default 2.62,1,-0.98")
    parser.add_argument("--P", type=int, default=3, help="radial channels (default 3)")
    parser.add_argument("--N", type=int, default=4, help="rotations (default 4)")
    parser.add_argument("--order", type=int, default=3, help="network depth 1..4")
    parser.add_argument("--rule", choices=sorted(RULE_ALIASES), default="decreasing",
                        help="path rule (default decreasing)")
    parser.add_argument("--train-count", type=int, default=6000,
                        help="training pixels, balanced halves (default 6000)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--svm-c", type=float, default=10.0)
    parser.add_argument("--svm-gamma", type=float, default=None,
                        help="RBF gamma (default 1/feature_dim)")
    parser.add_argument("--preproc", choices=images.PREPROC_MODES, default="linear")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--stem", default=None, help="output file stem")
    parser.add_argument("--no-figure", action="store_true",
                        help="skip the summary figure")


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    lam = _parse_lambda(args.lam) if args.lam else DEFAULT_LAMBDA
    return PipelineConfig(
        image1=args.image1,
        image2=args.image2,
        truth=args.truth,
        out_dir=args.out,
        stem=args.stem,
        lam=lam,
        P=args.P,
        N=args.N,
        order=args.order,
        rule=RULE_ALIASES[args.rule],
        train_count=args.train_count,
        seed=args.seed,
        svm_c=args.svm_c,
        svm_gamma=args.svm_gamma,
        preproc=args.preproc,
        threads=args.threads,
        figure=not args.no_figure,
    )


def _cmd_detect(args: argparse.Namespace) -> int:
    result = run_pipeline(_config_from_args(args))
    print(report.metrics_text_table([(_stem(_config_from_args(args)), result.metrics, "")]))
    print(f"outputs in {args.out}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        raise FileNotFoundError(f"scene spec not found: {spec_path}")
    try:
        raw = json.loads(spec_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scene spec is not valid JSON: {exc}") from exc
    try:
        spec = datagen.scene_spec_from_dict(raw)
        image_t1, image_t2, truth = datagen.generate_scene(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.stem
    quant1 = np.clip(np.round(image_t1 * 255.0), 0, 255).astype(np.uint8)
    quant2 = np.clip(np.round(image_t2 * 255.0), 0, 255).astype(np.uint8)
    truth8 = np.where(truth, 255, 0).astype(np.uint8)
    images.write_grayscale(out / f"{stem}_t1.png", quant1)
    images.write_grayscale(out / f"{stem}_t2.png", quant2)
    images.write_grayscale(out / f"{stem}_truth.png", truth8)
    echo = dict(raw)
    echo["_generated"] = {
        "changed_pixels": int(truth.sum()),
        "files": [f"{stem}_t1.png", f"{stem}_t2.png", f"{stem}_truth.png"],
    }
    (out / f"{stem}_spec.json").write_text(json.dumps(echo, indent=2) + "\n")
    print(f"scene written to {out} (changed pixels: {int(truth.sum())})")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    sweep_path = Path(args.sweep)
    if not sweep_path.is_file():
        raise FileNotFoundError(f"sweep file not found: {sweep_path}")
    try:
        raw = json.loads(sweep_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"sweep file is not valid JSON: {exc}") from exc
    if isinstance(raw, list):
        defaults, runs = {}, raw
    elif isinstance(raw, dict):
        defaults = raw.get("defaults", {})
        runs = raw.get("runs", [])
    else:
        raise ConfigError("sweep file must be a JSON list or object")
    if not runs:
        raise ConfigError("sweep file contains no runs")
    configs = []
    for index, entry in enumerate(runs):
        name = entry.get("name", f"run{index}")
        configs.append((name, _config_from_dict(entry, defaults)))
    rows = run_benchmark(configs, args.out)
    out = Path(args.out)
    report.write_sweep_csv(rows, out / "sweep_results.csv")
    (out / "sweep_results.json").write_text(json.dumps(rows, indent=2) + "\n")
    report.render_sweep_figure(rows, out / "sweep_report.png")
    table_rows = []
    for row in rows:
        rep = None
        if not row["error"]:
            rep = metrics.MetricsReport(
                row["fp"], row["fn"], row["oe"], row["pcc"], row["kc"],
                row["ct_seconds"],
            )
        table_rows.append((row["name"], rep, row["error"]))
    print(report.metrics_text_table(table_rows))
    print(f"sweep outputs in {out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssn",
        description="Stockwell scattering network change detection",
    )
    parser.add_argument("--version", action="version", version=f"ssn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="detect changes in a coregistered pair")
    _add_detect_args(detect)
    detect.set_defaults(func=_cmd_detect)

    synth = sub.add_parser("synth", help="generate a synthetic speckled scene")
    synth.add_argument("--spec", required=True, help="scene spec JSON file")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--stem", default="scene", help="output file stem")
    synth.set_defaults(func=_cmd_synth)

    bench = sub.add_parser("bench", help="run a sweep of pipeline configurations")
    bench.add_argument("--sweep", required=True, help="sweep JSON file")
    bench.add_argument("--out", required=True, help="output directory")
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"ssn: configuration error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, OSError, ImageFormatError) as exc:
        print(f"ssn: input error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"ssn: numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
