"""Command line front end: synth, train, calibrate, eval, compare.

Every subcommand exits 0 on success and 1 with a one-line diagnostic on
stderr otherwise. The report-producing paths (calibrate --roc-dump, eval,
compare) also render figures next to their outputs unless --no-figures
is given.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import SynthSpec, generate_synthetic, load_feature_set, write_feature_set
from .harness import PipelineConfig, evaluate, run_comparison, save_report, save_table
from .classifier import write_decisions, classify_set
from .roc import calibrate_detailed, load_thresholds, save_thresholds, write_roc_dumps
from .targets import build_target_matrix
from .trainer import TrainConfig, load_model, save_model, train_model

_STRATEGY_NAMES = {"normal": "normal", "roc": "roc_optimal", "roc-constrained": "roc_constrained"}


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        n_rel=args.n_rel,
        n_irr=args.n_irr,
        dim=args.dim,
        per_class_train=args.per_class_train,
        per_class_val=args.per_class_val,
        spread=args.spread,
        seed=args.seed,
    )
    train, val = generate_synthetic(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_feature_set(train, out / "train.csv")
    write_feature_set(val, out / "val.csv")
    print(f"wrote {out / 'train.csv'} ({len(train)} records) and {out / 'val.csv'} ({len(val)} records)")
    return 0


def _cmd_train(args) -> int:
    data = load_feature_set(args.train)
    targets = build_target_matrix(data, args.negative)
    cfg = TrainConfig(epochs=args.epochs, lr0=args.lr, tol=args.tol, seed=args.seed)
    model = train_model(data, targets, cfg)
    save_model(model, args.out)
    print(f"wrote {args.out} ({len(model.class_names)} classes, dim {model.dim})")
    return 0


def _cmd_calibrate(args) -> int:
    strategy = _STRATEGY_NAMES[args.strategy]
    if strategy == "roc_constrained" and args.constraint is None:
        raise ValueError("--strategy roc-constrained requires --constraint")
    if strategy != "roc_constrained" and args.constraint is not None:
        raise ValueError("--constraint is only valid with --strategy roc-constrained")
    model = load_model(args.model)
    train = load_feature_set(args.train)
    thresholds, curves = calibrate_detailed(model, train, strategy, args.constraint)
    save_thresholds(thresholds, args.out)
    print(f"wrote {args.out} (strategy {strategy}, {len(thresholds.values)} thresholds)")
    if args.roc_dump:
        written = write_roc_dumps(curves, model.class_names, args.roc_dump)
        if curves and not args.no_figures:
            from .figures import plot_roc_curves

            written.append(plot_roc_curves(curves, Path(args.roc_dump) / "roc_curves.png"))
        print(f"wrote {len(written)} ROC dump files under {args.roc_dump}")
    return 0


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    thresholds = load_thresholds(args.thresholds)
    val = load_feature_set(args.val)
    report = evaluate(model, thresholds, val)
    save_report(report, args.out)
    print(
        f"wrote {args.out} (R={report.relevant_accuracy:.4f} "
        f"I={report.irrelevant_accuracy:.4f} cum={report.cumulative_accuracy:.4f})"
    )
    if args.decisions:
        write_decisions(classify_set(model, val, thresholds), args.decisions)
        print(f"wrote {args.decisions}")
    if not args.no_figures:
        from .figures import plot_report

        out = Path(args.out)
        print(f"wrote {plot_report(report, out.with_name(out.stem + '_per_class.png'))}")
    return 0


def _cmd_compare(args) -> int:
    train = load_feature_set(args.train)
    val = load_feature_set(args.val)
    cfg = PipelineConfig(train=TrainConfig(seed=args.seed))
    table = run_comparison(train, val, cfg, q=args.constraint)
    save_table(table, args.out)
    for row in table.rows:
        print(
            f"{row.method:16s} R={row.relevant_accuracy:.4f} "
            f"I={row.irrelevant_accuracy:.4f} cum={row.cumulative_accuracy:.4f}"
        )
    for method, message in table.failures.items():
        print(f"{method:16s} FAILED: {message}")
    print(f"wrote {args.out}")
    if table.rows and not args.no_figures:
        from .figures import plot_comparison

        out = Path(args.out)
        print(f"wrote {plot_comparison(table, out.with_name(out.stem + '_accuracy.png'))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openset",
        description="Train and evaluate an open-set low-shot classifier head over feature-vector CSVs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a seeded synthetic train/val corpus")
    p.add_argument("--n-rel", type=int, default=10, help="relevant categories")
    p.add_argument("--n-irr", type=int, default=10, help="irrelevant categories")
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--per-class-train", type=int, default=40)
    p.add_argument("--per-class-val", type=int, default=10)
    p.add_argument("--spread", type=float, default=0.25, help="per-category noise stddev")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory for train.csv and val.csv")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train per-class weights on a feature CSV")
    p.add_argument("--train", required=True, help="training feature CSV")
    p.add_argument("--negative", type=float, default=-0.2, help="target value for unlabeled rows")
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("calibrate", help="pick per-class rejection thresholds from training scores")
    p.add_argument("--model", required=True)
    p.add_argument("--train", required=True, help="training feature CSV (the calibration data)")
    p.add_argument("--strategy", choices=sorted(_STRATEGY_NAMES), required=True)
    p.add_argument("--constraint", type=float, default=None, help="training TRR lower bound")
    p.add_argument("--out", required=True, help="threshold JSON path")
    p.add_argument("--roc-dump", default=None, help="directory for per-class ROC CSVs")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("eval", help="evaluate a model + thresholds on a validation CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--thresholds", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--decisions", default=None, help="optional per-record decision CSV")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("compare", help="run the four-method comparison on one train/val pair")
    p.add_argument("--train", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--constraint", type=float, default=None, help="TRR bound for the ROC row")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="table JSON path")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
