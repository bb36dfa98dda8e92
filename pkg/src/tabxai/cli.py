"""Command-line interface.

Subcommands mirror the pipeline stages: ``run`` drives everything from
one config, ``synth`` materializes a rule-labelled dataset, ``encode``
one-hot encodes named columns, ``consensus`` merges previously exported
attribution CSVs, and ``explain-task`` re-runs a single (model, method)
explanation from persisted artifacts (the unit external schedulers can
submit). Exit codes: 0 ok, 1 validation error, 2 stage failure, 3 some
tasks failed.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import consensus as consensus_mod
from . import data as data_mod
from . import models as models_mod
from . import pipeline as pipeline_mod
from .explain import AttributionVector
from .report import tables as tables_mod


def _parse_samples(text: str):
    if text == "all":
        return "all"
    if text.startswith("first:"):
        return int(text.split(":", 1)[1])
    return [int(v) for v in text.split(",") if v]


def _add_run_parser(sub):
    p = sub.add_parser("run", help="full train/score/explain/consensus run")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("-d", "--dataset", help="input CSV path")
    src.add_argument("-r", "--rulespec", help="rule file for synthetic input")
    p.add_argument("-n", "--n-samples", type=int, default=0,
                   help="synthetic sample count (with --rulespec)")
    p.add_argument("--balance", type=float, default=None,
                   help="synthetic positive-class fraction (rejection sampling)")
    p.add_argument("-t", "--target", default="class", help="target column name")
    p.add_argument("-k", "--task", default="classification",
                   choices=list(data_mod.TASKS))
    p.add_argument("-m", "--models", default=",".join(models_mod.FAMILIES),
                   help="comma list of model families")
    p.add_argument("-x", "--methods", default=",".join(pipeline_mod.METHODS),
                   help="comma list of explanation methods")
    p.add_argument("-q", "--workers", type=int, default=1,
                   help="parallel workers for the explain stage")
    p.add_argument("-s", "--seed", type=int, default=0)
    p.add_argument("-c", "--cutoff", type=float,
                   default=consensus_mod.DEFAULT_CUTOFF)
    p.add_argument("-o", "--outdir", default="tabxai_out")
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--metric", default="")
    p.add_argument("--explain", default="all",
                   help="samples to explain: all | first:N | id,id,...")
    p.add_argument("--one-hot", default="",
                   help="comma list of categorical columns to one-hot encode")
    for flag, default in (("--shap-budget", 2048), ("--shap-background", 20),
                          ("--lime-perturbations", 1000),
                          ("--permutation-repeats", 5), ("--ig-steps", 256),
                          ("--cf-budget", 1500), ("--n-cfs", 4),
                          ("--curve-grid", 10)):
        p.add_argument(flag, type=int, default=default)


def _cmd_run(args) -> int:
    config = pipeline_mod.RunConfig(
        dataset_path=args.dataset,
        rulespec_path=args.rulespec,
        n_samples=args.n_samples,
        class_balance=args.balance,
        target_column=args.target,
        task=args.task,
        test_fraction=args.test_fraction,
        families=tuple(f for f in args.models.split(",") if f),
        methods=tuple(m for m in args.methods.split(",") if m),
        explain_samples=_parse_samples(args.explain),
        one_hot_columns=tuple(c for c in args.one_hot.split(",") if c),
        seed=args.seed,
        workers=args.workers,
        cutoff=args.cutoff,
        k_folds=args.folds,
        metric=args.metric,
        shap_budget=args.shap_budget,
        shap_background=args.shap_background,
        lime_perturbations=args.lime_perturbations,
        permutation_repeats=args.permutation_repeats,
        ig_steps=args.ig_steps,
        cf_budget=args.cf_budget,
        n_cfs=args.n_cfs,
        curve_grid=args.curve_grid,
        outdir=args.outdir,
    )
    try:
        config.validate()
    except pipeline_mod.ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        art = pipeline_mod.run(config)
    except pipeline_mod.StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for name, why in sorted(art.failed.items()):
        print(f"failed: {name}: {why}", file=sys.stderr)
    print(f"wrote {len(art.manifest)} artifacts to {config.outdir}")
    for model, score in sorted(art.scores.items()):
        print(f"  {model}: {config.resolved_metric()}={score:.4f}")
    return art.exit_code


def _cmd_synth(args) -> int:
    try:
        spec = data_mod.load_rulespec(args.rulespec)
        dataset = data_mod.generate_synthetic(spec, args.n_samples, args.seed,
                                              class_balance=args.balance)
        data_mod.save_csv(dataset, args.output)
    except data_mod.DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {dataset.n_samples}x{dataset.n_features} dataset to "
          f"{args.output}")
    return 0


def _cmd_encode(args) -> int:
    try:
        dataset = data_mod.load_csv(args.dataset, args.target, args.task)
        encoded = data_mod.one_hot_encode(
            dataset, [c for c in args.columns.split(",") if c])
        data_mod.save_csv(encoded, args.output)
    except data_mod.DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote encoded dataset ({encoded.n_features} features) to "
          f"{args.output}")
    return 0


def _read_global_csv(path: Path) -> tuple[AttributionVector, list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    values = np.array([float(r["mean_abs_attribution"]) for r in rows])
    disp = np.array([float(r["std"]) for r in rows])
    return AttributionVector(values, disp), [r["feature"] for r in rows]


def _cmd_consensus(args) -> int:
    paths = [Path(p) for p in args.inputs]
    contributions = {}
    names = None
    for p in paths:
        vec, feats = _read_global_csv(p)
        contributions[p.stem] = vec
        names = names or feats
    scores = []
    if args.scores:
        with open(args.scores, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if row and row[0] != "model":
                    scores.append(consensus_mod.ModelScore(row[0],
                                                           float(row[1])))
    else:
        scores = [consensus_mod.ModelScore(n, 1.0) for n in contributions]
    try:
        if args.kind == "attribution-by-method":
            report = consensus_mod.consensus_attribution_by_method(
                args.subject, contributions, scores, args.cutoff)
        elif args.kind == "rank-by-method":
            report = consensus_mod.consensus_rank_by_method(
                args.subject, contributions, scores, args.cutoff)
        else:
            report = consensus_mod.consensus_rank_by_model(args.subject,
                                                           contributions)
    except consensus_mod.ConsensusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    base = outdir / f"{report.kind}_{report.subject}"
    tables_mod.write_consensus(report, names, base.with_suffix(".csv"),
                               Path(str(base) + "_contributors.txt"),
                               cutoff=args.cutoff)
    print(f"wrote {base.with_suffix('.csv')}")
    for rank, (j, score, _) in enumerate(report.ranking[:10], start=1):
        print(f"  {rank:2d}. {names[j]} ({score:.4f})")
    return 0


def _cmd_explain_task(args) -> int:
    try:
        model = models_mod.load_model(args.model)
        train = data_mod.load_csv(args.train, args.target, args.task)
        test = data_mod.load_csv(args.test, args.target, args.task)
        sample_ids = pipeline_mod._select_samples(_parse_samples(args.samples),
                                                  test.n_samples)
        options = {
            "metric": args.metric or ("auc" if args.task == "classification"
                                      else "r2"),
            "shap_budget": args.shap_budget,
            "shap_background": args.shap_background,
            "lime_perturbations": args.lime_perturbations,
            "permutation_repeats": args.permutation_repeats,
            "ig_steps": args.ig_steps,
            "cf_budget": args.cf_budget,
            "n_cfs": args.n_cfs,
            "curve_grid": args.curve_grid,
        }
        result = pipeline_mod.execute_task(model, args.method, train, test,
                                           sample_ids, options, args.seed)
    except Exception as exc:  # noqa: BLE001 - single-task surface
        print(f"error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = train.feature_names
    stem = f"{model.family}_{args.method}"
    tables_mod.write_global_attribution(result["global"], names,
                                        outdir / f"{stem}_global.csv")
    if "matrix" in result:
        tables_mod.write_attribution_matrix(result["matrix"], names,
                                            outdir / f"{stem}_samples.csv")
    for curve in result.get("curves", ()):
        tables_mod.write_curve(
            curve, outdir / f"{stem}_{names[curve.feature_index]}_"
            f"{curve.kind}.csv")
    print(f"wrote task outputs to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tabxai",
        description="train tabular models, explain them, build consensus")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_parser(sub)

    p = sub.add_parser("synth", help="generate a rule-labelled dataset CSV")
    p.add_argument("-r", "--rulespec", required=True)
    p.add_argument("-n", "--n-samples", type=int, required=True)
    p.add_argument("-s", "--seed", type=int, default=0)
    p.add_argument("--balance", type=float, default=None)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("encode", help="one-hot encode categorical columns")
    p.add_argument("-d", "--dataset", required=True)
    p.add_argument("-t", "--target", required=True)
    p.add_argument("-k", "--task", default="classification",
                   choices=list(data_mod.TASKS))
    p.add_argument("-c", "--columns", required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("consensus",
                       help="merge exported global attribution CSVs")
    p.add_argument("kind", choices=["attribution-by-method", "rank-by-method",
                                    "rank-by-model"])
    p.add_argument("-i", "--inputs", nargs="+", required=True)
    p.add_argument("--subject", default="consensus",
                   help="method or model the report is about")
    p.add_argument("--scores", default="",
                   help="CSV of model,score rows for the cut-off filter")
    p.add_argument("-c", "--cutoff", type=float,
                   default=consensus_mod.DEFAULT_CUTOFF)
    p.add_argument("-o", "--outdir", default=".")

    p = sub.add_parser("explain-task",
                       help="run one (model, method) explanation standalone")
    p.add_argument("--model", required=True, help="persisted model JSON")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--target", default="class")
    p.add_argument("--task", default="classification",
                   choices=list(data_mod.TASKS))
    p.add_argument("--method", required=True, choices=list(pipeline_mod.METHODS))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", default="all")
    p.add_argument("--metric", default="")
    for flag, default in (("--shap-budget", 2048), ("--shap-background", 20),
                          ("--lime-perturbations", 1000),
                          ("--permutation-repeats", 5), ("--ig-steps", 256),
                          ("--cf-budget", 1500), ("--n-cfs", 4),
                          ("--curve-grid", 10)):
        p.add_argument(flag, type=int, default=default)
    p.add_argument("--outdir", default="task_out")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "synth": _cmd_synth,
        "encode": _cmd_encode,
        "consensus": _cmd_consensus,
        "explain-task": _cmd_explain_task,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
