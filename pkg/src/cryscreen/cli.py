"""Command-line surface: synth, extract, train, evaluate, predict.

Exit codes: 0 success, 1 usage error, 2 data error, 3 training did not
converge. All randomness flows from a single --seed flag that is recorded
in every output, so reruns with identical inputs are byte-identical where
it matters (feature tables, grid reports, models).
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

import numpy as np

from . import dataio, model_io
from .audio import decode_wav, fixed_length_window
from .errors import (
    ConfigurationError,
    CryscreenError,
    UndefinedMetricsError,
)
from .features import FeatureConfig, extract_features
from .metrics import compute_metrics, confusion, render_report, write_metrics_csv
from .scaling import apply_scaler
from .selection import (
    LabeledDataset,
    SplitSpec,
    grid_search_poly,
    grid_search_rbf,
    kernel_from_params,
    refit_final,
    stratified_split,
    write_grid_report,
)
from .svm import TrainConfig, decision_values, predict_many
from .synth import ClassProfile, SynthSpec, write_corpus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NONCONVERGED = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; this tool reserves 2
    # for data errors, so remap.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _feature_config(args) -> FeatureConfig:
    return FeatureConfig(
        window_len=args.window_len,
        sample_rate_hz=args.sample_rate,
        frame_len=args.frame_len,
        hop=args.hop,
        n_filters=args.n_filters,
        n_coeffs=args.n_coeffs,
        alpha=args.alpha,
        floor=args.floor,
    )


def _add_feature_flags(parser):
    parser.add_argument("--window-len", type=int, default=8000, help="samples per clip window")
    parser.add_argument("--sample-rate", type=int, default=8000, help="declared analysis rate, Hz")
    parser.add_argument("--frame-len", type=int, default=1024, help="frame length (power of two)")
    parser.add_argument("--hop", type=int, default=512, help="hop between frames")
    parser.add_argument("--n-filters", type=int, default=24, help="mel filterbank size")
    parser.add_argument("--n-coeffs", type=int, default=12, help="cepstral coefficients per frame")
    parser.add_argument("--alpha", type=float, default=0.97, help="pre-emphasis coefficient")
    parser.add_argument("--floor", type=float, default=1e-10, help="energy floor before the log")
    parser.add_argument("--pad-short", action="store_true",
                        help="zero-pad clips shorter than the window instead of failing")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cryscreen",
                     description="Infant-cry asphyxia screening pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate a synthetic labeled corpus")
    p.add_argument("out_dir", help="directory for WAV files and manifest.csv")
    p.add_argument("--n-pos", type=int, default=100, help="positive (asphyxia) clips")
    p.add_argument("--n-neg", type=int, default=100, help="negative (normal) clips")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--pos-f0", type=float, nargs=2, default=[600.0, 700.0],
                   metavar=("LOW", "HIGH"), help="positive-class fundamental range, Hz")
    p.add_argument("--neg-f0", type=float, nargs=2, default=[400.0, 500.0],
                   metavar=("LOW", "HIGH"), help="negative-class fundamental range, Hz")
    p.add_argument("--harmonics", type=int, default=5)
    p.add_argument("--jitter", type=float, default=0.02, help="per-sample frequency jitter fraction")
    p.add_argument("--noise-amp", type=float, default=0.05, help="uniform noise amplitude")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="decode WAVs listed in a manifest and write a feature CSV")
    p.add_argument("in_dir", help="directory containing the WAV files")
    p.add_argument("--manifest", default="manifest.csv",
                   help="manifest CSV (filename,label) relative to in_dir unless absolute")
    p.add_argument("--out", required=True, help="output feature CSV path")
    _add_feature_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="split a feature CSV, search the grid, refit, save the model")
    p.add_argument("features", help="feature CSV from the extract step")
    p.add_argument("--kernel", choices=["poly", "rbf"], required=True)
    p.add_argument("--out", required=True, help="output model JSON path")
    p.add_argument("--report", default=None,
                   help="grid report CSV (default: model path with .grid.csv suffix)")
    p.add_argument("--test-out", default=None,
                   help="write the held-out test rows to this feature CSV")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--degree-grid", type=_int_list, default=None,
                   help="comma-separated degrees for the poly search")
    p.add_argument("--gamma-grid", type=_float_list, default=None,
                   help="comma-separated gammas (default: 1/n_features times powers of 3)")
    p.add_argument("--cost-grid", type=_float_list, default=None,
                   help="comma-separated costs for the rbf search")
    p.add_argument("--degree", type=int, default=None,
                   help="explicit degree: with --gamma, skips the poly search")
    p.add_argument("--gamma", type=float, default=None, help="explicit gamma, skips the search")
    p.add_argument("--cost", type=float, default=None,
                   help="fixed C for poly cells, or explicit C for rbf (default 1)")
    p.add_argument("--coef0", type=float, default=0.0, help="poly kernel constant (0 = homogeneous)")
    p.add_argument("--tol", type=float, default=1e-3, help="KKT stopping tolerance")
    p.add_argument("--max-iter", type=int, default=10_000_000)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="confusion matrix and metrics of a model on a feature CSV")
    p.add_argument("model", help="model JSON path")
    p.add_argument("features", help="feature CSV path")
    p.add_argument("--out", default="evaluation.csv", help="metrics CSV (a PNG lands next to it)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="classify a WAV file or the rows of a feature CSV")
    p.add_argument("model", help="model JSON path")
    p.add_argument("input", help=".wav file or feature CSV")
    p.add_argument("--pad-short", action="store_true")
    p.set_defaults(func=cmd_predict)
    return parser


def cmd_synth(args) -> int:
    pos_low, pos_high = args.pos_f0
    neg_low, neg_high = args.neg_f0
    spec = SynthSpec(
        n_positive=args.n_pos,
        n_negative=args.n_neg,
        seed=args.seed,
        positive=ClassProfile(pos_low, pos_high, args.harmonics, args.jitter, args.noise_amp),
        negative=ClassProfile(neg_low, neg_high, args.harmonics, args.jitter, args.noise_amp),
    )
    manifest = write_corpus(spec, args.out_dir)
    print(f"wrote {args.n_neg + args.n_pos} clips and {manifest}")
    return EXIT_OK


def cmd_extract(args) -> int:
    config = _feature_config(args)
    in_dir = Path(args.in_dir)
    manifest_path = Path(args.manifest)
    if not manifest_path.is_absolute():
        manifest_path = in_dir / manifest_path
    entries = dataio.read_manifest(manifest_path)

    labels = []
    rows = []
    failures = 0
    for name, label in entries:
        wav_path = in_dir / name
        try:
            clip = decode_wav(wav_path.read_bytes())
            window = fixed_length_window(clip, config.window_len, pad=args.pad_short)
            rows.append(extract_features(window, config))
        except (OSError, CryscreenError) as exc:
            failures += 1
            print(f"skipping {name}: {exc}", file=sys.stderr)
            continue
        labels.append(label)

    features = np.asarray(rows, dtype=np.float64).reshape(len(rows), config.feature_dim)
    dataio.write_features_csv(args.out, labels, features, config)
    print(f"wrote {len(rows)} feature rows to {args.out}"
          + (f" ({failures} file(s) skipped)" if failures else ""))
    return EXIT_DATA if failures else EXIT_OK


def _grid_search(args, train, cv):
    if args.kernel == "poly":
        return grid_search_poly(
            train, cv,
            degrees=args.degree_grid,
            gammas=args.gamma_grid,
            c_fixed=args.cost if args.cost is not None else 1.0,
            base_config=TrainConfig(tol=args.tol, max_iter=args.max_iter, seed=args.seed),
        )
    return grid_search_rbf(
        train, cv,
        costs=args.cost_grid,
        gammas=args.gamma_grid,
        base_config=TrainConfig(tol=args.tol, max_iter=args.max_iter, seed=args.seed),
    )


def cmd_train(args) -> int:
    features, labels, config = dataio.read_features_csv(args.features)
    dataset = LabeledDataset(
        features=features,
        labels=labels,
        ids=tuple(f"r{i:06d}" for i in range(len(labels))),
    )
    train, cv, test = stratified_split(dataset, SplitSpec(seed=args.seed))
    if args.test_out:
        dataio.write_features_csv(args.test_out, test.labels, test.features, config)

    kernel_family = "polynomial" if args.kernel == "poly" else "rbf"
    base_config = TrainConfig(tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    explicit = args.gamma is not None and (
        args.degree is not None if args.kernel == "poly" else args.cost is not None
    )

    grid_summary = None
    if explicit:
        if args.kernel == "poly":
            params = {"degree": float(args.degree), "gamma": args.gamma,
                      "C": args.cost if args.cost is not None else 1.0, "coef0": args.coef0}
        else:
            params = {"C": args.cost, "gamma": args.gamma}
        print(f"training {kernel_family} with explicit parameters: "
              + ", ".join(f"{k}={v:g}" for k, v in params.items()))
    else:
        result = _grid_search(args, train, cv)
        params = dict(result.best_params)
        if args.kernel == "poly":
            params["coef0"] = args.coef0
        grid_summary = {
            "kernel": result.kernel_family,
            "cells": len(result.cells),
            "best_params": params,
            "best_cv_error": result.best_cv_error,
        }
        report_path = Path(args.report) if args.report else Path(args.out).with_suffix(".grid.csv")
        write_grid_report(
            report_path, result, seed=args.seed,
            split_ids={"train": train.ids, "cv": cv.ids, "test": test.ids},
        )
        from .figures import save_grid_figure

        save_grid_figure(result, report_path.with_suffix(".png"))
        print(f"grid report: {report_path}")
        print("selected "
              + ", ".join(f"{k}={v:g}" for k, v in result.best_params.items())
              + f" with cv error {result.best_cv_error:.6g}")

    model = refit_final(train, cv, params, kernel_family,
                        base_config=base_config, feature_config=config)
    provenance = {
        "seed": args.seed,
        "dataset_sha256": hashlib.sha256(Path(args.features).read_bytes()).hexdigest(),
        "split_sizes": {"train": len(train), "cv": len(cv), "test": len(test)},
        "grid_search": grid_summary,
    }
    model_io.save_model(model, args.out, provenance)
    print(f"model written to {args.out} "
          f"({model.support_vectors.shape[0]} support vectors, "
          f"{'converged' if model.converged else 'NOT converged'} after {model.n_iter} updates)")
    if not model.converged:
        print("warning: training hit the iteration budget; model is best-so-far", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model, _ = model_io.load_model(args.model)
    features, labels, _config = dataio.read_features_csv(args.features)
    if features.shape[0] == 0:
        raise UndefinedMetricsError(f"{args.features}: no rows to evaluate")
    if model.scaling is not None:
        features = apply_scaler(features, model.scaling)
    predicted = predict_many(model, features)
    cm = confusion(predicted, labels)
    report = compute_metrics(cm)
    print(render_report(cm, report))
    out_path = Path(args.out)
    write_metrics_csv(out_path, cm, report)
    from .figures import save_confusion_figure

    save_confusion_figure(cm, report, out_path.with_suffix(".png"))
    print(f"\nreport written to {out_path} and {out_path.with_suffix('.png')}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model, _ = model_io.load_model(args.model)
    source = Path(args.input)
    if source.suffix.lower() == ".wav":
        if model.feature_config is None:
            raise ConfigurationError(
                "model carries no feature config; it can only classify feature rows"
            )
        clip = decode_wav(source.read_bytes())
        window = fixed_length_window(clip, model.feature_config.window_len, pad=args.pad_short)
        rows = extract_features(window, model.feature_config)[None, :]
    else:
        rows, _labels, _config = dataio.read_features_csv(args.input)
        if rows.shape[0] == 0:
            raise ConfigurationError(f"{args.input}: no feature rows to classify")
    if model.scaling is not None:
        rows = apply_scaler(rows, model.scaling)
    values = np.atleast_1d(decision_values(model, rows))
    for value in values:
        label = "asphyxia" if value >= 0.0 else "normal"
        print(f"{label} {value:.12g}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CryscreenError, OSError) as exc:
        print(f"cryscreen: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
