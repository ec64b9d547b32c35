"""Command-line interface.

Subcommands: train, predict, evaluate, benchmark, stats, distbox.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
All data outputs are byte-deterministic for identical inputs and flags.

Dataset specs accepted anywhere a dataset argument appears:
  features.csv;labels.csv        CSV pair with header rows
  data.arff@labels.xml           ARFF with a Mulan XML label manifest
  data.arff                      ARFF with --labels-xml or --labels-last
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import data as dataio
from . import metrics as metricsmod
from . import models, stats, tuning
from .linalg import SingularSystemError
from .modelio import ModelFileError, dataset_fingerprint, load_model, save_model

METHODS = ("ml-mlm", "nn-mlm", "lls-mlm", "br-mlm")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def load_dataset(spec, labels_xml=None, labels_last=None, scale="off", name=None):
    if ";" in spec:
        feat, lab = spec.split(";", 1)
        ds = dataio.parse_csv(feat, lab, name=name)
    else:
        if "@" in spec:
            arff_path, xml_path = spec.rsplit("@", 1)
        else:
            arff_path, xml_path = spec, labels_xml
        if xml_path is None and labels_last is None:
            raise UsageError(
                f"dataset {spec!r} needs a label manifest (@file.xml or "
                "--labels-xml) or --labels-last"
            )
        ds = dataio.parse_arff(
            arff_path, label_manifest=xml_path, labels_last=labels_last, name=name
        )
    if scale == "minmax":
        ds = dataio.min_max_scale(ds)
    return ds


def _alpha_mode(value: str):
    return "auto" if value == "auto" else float(value)


def _power_mode(value: str):
    return "tuned" if value == "tuned" else float(value)


def fit_method(method, ds, alpha="auto", power="tuned", threshold="cardinality"):
    """Train one model of the requested kind on a Dataset."""
    X, Y, names = ds.features, ds.labels, ds.label_names
    if method == "ml-mlm":
        tmode = threshold if threshold == "cardinality" else (
            0.5 if threshold == "local-rcut" else float(threshold)
        )
        return tuning.tune_ml_mlm(
            X, Y, alpha_mode=alpha, power_mode=power,
            threshold_mode=tmode, label_names=names,
        )
    if method == "br-mlm":
        return models.train_br(X, Y, alpha_mode=alpha, label_names=names)
    if method in ("nn-mlm", "lls-mlm"):
        return models.train(X, Y, alpha_mode=alpha, label_names=names)
    raise UsageError(f"unknown method {method!r}")


def predict_instance(method, model, x, threshold=None):
    if method == "ml-mlm":
        if threshold == "local-rcut":
            return models.ml_mlm_predict_rcut(model, x)
        if threshold not in (None, "cardinality"):
            model = tuning.TunedMlMlm(
                model=model.model, power=model.power,
                threshold=float(threshold), lrl_curve=(),
            )
        return models.ml_mlm_predict(model, x)
    if method == "nn-mlm":
        return models.nn_mlm_predict(model, x)
    if method == "lls-mlm":
        return models.lls_mlm_predict(model, x)
    if method == "br-mlm":
        return models.br_mlm_predict(model, x)
    raise UsageError(f"unknown method {method!r}")


def predict_dataset(method, model, ds, threshold=None):
    return [predict_instance(method, model, x, threshold) for x in ds.features]


def write_predictions(preds, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in preds:
            fh.write(json.dumps({
                "scores": [float(s) for s in p.scores],
                "labels": [int(v) for v in p.labels],
                "min_distance": float(p.min_distance),
                "uncertainty": p.uncertainty,
            }))
            fh.write("\n")


def read_predictions(path):
    scores, labels = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            scores.append(rec["scores"])
            labels.append(rec["labels"])
    if not scores:
        raise dataio.DataFormatError(f"{path}: no prediction records")
    return np.array(scores, dtype=np.float64), np.array(labels, dtype=np.float64)


# ---------------------------------------------------------------- commands

def cmd_train(args) -> int:
    ds = load_dataset(
        args.data, labels_xml=args.labels_xml, labels_last=args.labels_last,
        scale=args.scale,
    )
    model = fit_method(
        args.method, ds, alpha=_alpha_mode(args.alpha),
        power=_power_mode(args.power), threshold=args.threshold,
    )
    fp = dataset_fingerprint(ds.features, ds.labels)
    save_model(args.out, model, args.method, fingerprint=fp)
    if args.curve_out and args.method == "ml-mlm" and model.lrl_curve:
        tuning.lrl_curve_csv(model.lrl_curve, args.curve_out)
    return EXIT_OK


def cmd_predict(args) -> int:
    model, manifest = load_model(args.model)
    ds = None
    if args.data:
        try:
            ds = load_dataset(
                args.data, labels_xml=args.labels_xml,
                labels_last=args.labels_last, scale=args.scale,
            )
        except dataio.DataFormatError as exc:
            # an input file with no data rows is a valid empty prediction job
            if "no data rows" not in str(exc):
                raise
    preds = predict_dataset(manifest["method"], model, ds, args.threshold) if ds else []
    write_predictions(preds, args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    scores, labels = read_predictions(args.predictions)
    truth = load_dataset(
        args.truth, labels_xml=args.labels_xml, labels_last=args.labels_last
    )
    report = metricsmod.evaluate(labels, scores, truth.labels)
    if args.format == "csv":
        report.write_csv(args.out)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    return EXIT_OK


def _parse_dataset_arg(entry: str):
    parts = entry.split(",")
    if len(parts) != 3:
        raise UsageError(
            f"--dataset expects 'name,trainspec,testspec', got {entry!r}"
        )
    return parts[0], parts[1], parts[2]


def cmd_benchmark(args) -> int:
    methods = args.methods.split(",")
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names, rows = [], []
    for entry in args.dataset:
        name, train_spec, test_spec = _parse_dataset_arg(entry)
        train_ds = load_dataset(
            train_spec, labels_xml=args.labels_xml,
            labels_last=args.labels_last, scale=args.scale, name=name,
        )
        test_ds = load_dataset(
            test_spec, labels_xml=args.labels_xml,
            labels_last=args.labels_last, scale=args.scale, name=name,
        )
        names.append(name)
        per_method = {}
        for method in methods:
            model = fit_method(method, train_ds)
            preds = predict_dataset(method, model, test_ds)
            scores = np.array([p.scores for p in preds])
            labels = np.array([p.labels for p in preds], dtype=np.float64)
            report = metricsmod.evaluate(labels, scores, test_ds.labels)
            per_method[method] = report
            with open(out_dir / f"report_{name}_{method}.json", "w",
                      encoding="utf-8") as fh:
                fh.write(report.to_json())
                fh.write("\n")
        rows.append(per_method)

    metric_names = metricsmod.EvalReport.field_names()
    with open(out_dir / "reports.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset", "method", *metric_names])
        for name, per_method in zip(names, rows):
            for method in methods:
                rep = per_method[method]
                w.writerow(
                    [name, method, *[repr(getattr(rep, f)) for f in metric_names]]
                )
    for metric in metric_names:
        with open(out_dir / f"table_{metric}.csv", "w", newline="",
                  encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["dataset", *methods])
            for name, per_method in zip(names, rows):
                w.writerow(
                    [name, *[repr(getattr(per_method[m], metric)) for m in methods]]
                )
    return EXIT_OK


def cmd_stats(args) -> int:
    direction = (
        stats.LOWER_BETTER if args.direction == "lower" else stats.HIGHER_BETTER
    )
    table = stats.ResultTable.from_csv(args.table, direction)
    diagram = stats.cd_diagram_data(table, alpha=args.alpha)
    stats.write_diagram_json(diagram, args.out)
    return EXIT_OK


def cmd_distbox(args) -> int:
    model, manifest = load_model(args.model)
    ds = load_dataset(
        args.data, labels_xml=args.labels_xml, labels_last=args.labels_last,
        scale=args.scale,
    )
    base = model.model if isinstance(model, tuning.TunedMlMlm) else (
        model.base if isinstance(model, models.BrMlmModel) else model
    )
    deltas = models.predict_deltas_batch(base, ds.features)
    mins = models.clamp_deltas(deltas).min(axis=1)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "min_distance"])
        for i, v in enumerate(mins):
            w.writerow([i, repr(float(v))])
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_data_flags(p):
    p.add_argument("--labels-xml", default=None, help="Mulan XML label manifest")
    p.add_argument("--labels-last", type=int, default=None,
                   help="treat the last L attributes as labels")
    p.add_argument("--scale", choices=("off", "minmax"), default="off")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distmlc",
        description="Distance-regression multi-label classification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and write a model file")
    p.add_argument("data", help="training dataset spec")
    p.add_argument("--method", choices=METHODS, default="ml-mlm")
    p.add_argument("--alpha", default="auto", help="auto or a fixed float")
    p.add_argument("--power", default="tuned", help="tuned or a fixed float")
    p.add_argument("--threshold", default="cardinality",
                   help="cardinality, local-rcut, or a fixed float")
    p.add_argument("--out", required=True)
    p.add_argument("--curve-out", default=None,
                   help="also write the power-search curve as CSV")
    _add_data_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict a dataset with a model file")
    p.add_argument("model")
    p.add_argument("data", nargs="?", default=None)
    p.add_argument("--threshold", default=None,
                   help="cardinality, local-rcut, or a fixed float")
    p.add_argument("--out", required=True)
    _add_data_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against ground truth")
    p.add_argument("predictions", help="JSON-lines predictions file")
    p.add_argument("truth", help="ground-truth dataset spec")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_data_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="train/predict/evaluate over datasets")
    p.add_argument("--dataset", action="append", required=True,
                   metavar="NAME,TRAIN,TEST")
    p.add_argument("--methods", default="ml-mlm")
    p.add_argument("--out-dir", required=True)
    _add_data_flags(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("stats", help="Friedman/Nemenyi analysis of a result table")
    p.add_argument("table", help="CSV: first column dataset names, header methods")
    p.add_argument("--direction", choices=("lower", "higher"), required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("distbox", help="per-instance minimum predicted distances")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--out", required=True)
    _add_data_flags(p)
    p.set_defaults(func=cmd_distbox)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularSystemError, tuning.LeverageError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (dataio.DataFormatError, ModelFileError, FileNotFoundError,
            ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
