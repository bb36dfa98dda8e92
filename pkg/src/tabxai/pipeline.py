"""End-to-end orchestration: train, score, explain on a worker pool, merge.

The explain stage runs one task per (model, method) pair. Each task gets
an immutable snapshot (trained model, datasets, a seed derived from the
task's identity) and returns plain values; all files are written by the
parent process in sorted task order afterwards, so the run's artifacts
are byte-identical for any worker count. Stage and per-task wall times go
to a separate timings file that is deliberately kept out of the
determinism contract.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import consensus as consensus_mod
from . import data as data_mod
from . import explain as explain_mod
from . import metrics as metrics_mod
from . import models as models_mod
from .data import CLASSIFICATION, REGRESSION, Dataset
from .report import svg as svg_mod
from .report import tables as tables_mod

METHODS = ("permutation", "shap", "lime", "intgrad", "counterfactual",
           "pdp_ice", "ale")

LOCAL_METHODS = ("shap", "lime", "intgrad", "counterfactual")


class ValidationError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    dataset_path: str | None = None
    rulespec_path: str | None = None
    n_samples: int = 0
    class_balance: float | None = None
    target_column: str = "class"
    task: str = CLASSIFICATION
    test_fraction: float = 0.2
    families: tuple = models_mod.FAMILIES
    grids: dict = field(default_factory=dict)
    methods: tuple = METHODS
    explain_samples: object = "all"  # "all" | int | list of test-row ids
    one_hot_columns: tuple = ()
    seed: int = 0
    workers: int = 1
    cutoff: float = consensus_mod.DEFAULT_CUTOFF
    k_folds: int = 3
    metric: str = ""
    shap_budget: int = 2048
    shap_background: int = 20
    lime_perturbations: int = 1000
    permutation_repeats: int = 5
    ig_steps: int = 256
    cf_budget: int = 1500
    n_cfs: int = 4
    curve_grid: int = 10
    outdir: str = "tabxai_out"

    def resolved_metric(self) -> str:
        if self.metric:
            return self.metric
        return "auc" if self.task == CLASSIFICATION else "r2"

    def validate(self):
        if (self.dataset_path is None) == (self.rulespec_path is None):
            raise ValidationError("exactly one of dataset_path/rulespec_path required")
        if self.rulespec_path is not None and self.n_samples < 1:
            raise ValidationError("synthetic input needs n_samples >= 1")
        if self.task not in data_mod.TASKS:
            raise ValidationError(f"unknown task {self.task!r}")
        if not self.families:
            raise ValidationError("need at least one model family")
        for fam in self.families:
            if fam not in models_mod.FAMILIES:
                raise ValidationError(f"unknown model family {fam!r}")
        if not self.methods:
            raise ValidationError("need at least one method")
        for m in self.methods:
            if m not in METHODS:
                raise ValidationError(f"unknown method {m!r}")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")
        if not 0.0 <= self.cutoff <= 1.0:
            raise ValidationError("cutoff must be in [0, 1]")
        if not metrics_mod.valid_metric(self.resolved_metric(), self.task):
            raise ValidationError(
                f"metric {self.resolved_metric()!r} invalid for task {self.task}")
        if isinstance(self.explain_samples, str) and self.explain_samples != "all":
            raise ValidationError("explain_samples must be 'all', an int or ids")


@dataclass(frozen=True)
class ExplainTask:
    model_id: str
    method_id: str
    derived_seed: int

    @property
    def key(self) -> tuple[str, str]:
        return (self.model_id, self.method_id)


def derive_seed(global_seed: int, model_id: str, method_id: str) -> int:
    """Stable 63-bit seed from the task identity; scheduling-independent."""
    digest = hashlib.sha256(
        f"{global_seed}:{model_id}:{method_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass
class RunArtifacts:
    outdir: Path
    manifest: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    scores: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 3 if self.failed else 0


def _select_samples(selector, n: int) -> list[int]:
    if selector == "all":
        return list(range(n))
    if isinstance(selector, int):
        if selector < 1:
            raise ValidationError("explain sample count must be >= 1")
        return list(range(min(selector, n)))
    ids = [int(i) for i in selector]
    bad = [i for i in ids if not 0 <= i < n]
    if bad:
        raise ValidationError(f"explain sample ids out of range: {bad}")
    return ids


def _method_applies(method: str, model) -> tuple[bool, str]:
    binaryish = model.task == REGRESSION or model.n_classes == 2
    if method == "intgrad":
        if not getattr(model, "differentiable", False):
            return False, "model has no gradients"
        if not binaryish:
            return False, "needs binary classification or regression"
        return True, ""
    if method == "counterfactual":
        if model.task != CLASSIFICATION:
            return False, "needs a classifier"
        if model.n_classes != 2:
            return False, "binary classification only"
        return True, ""
    if method == "permutation":
        return True, ""
    if not binaryish:
        return False, "needs binary classification or regression"
    return True, ""


def execute_task(model, method: str, train: Dataset, test: Dataset,
                 sample_ids: list[int], options: dict, derived_seed: int) -> dict:
    """Run one (model, method) explanation; pure function of its inputs.

    Returns plain arrays/objects; the caller owns all file output.
    """
    result: dict = {"method": method, "model": model.family}
    X = test.features

    if method == "permutation":
        vec = explain_mod.permutation_importance(
            model, test, options["metric"],
            n_repeats=options["permutation_repeats"], seed=derived_seed)
        result["global"] = vec
        return result

    if method == "shap":
        rng = np.random.default_rng([derived_seed, 1])
        n_bg = min(options["shap_background"], train.n_samples)
        bg_idx = np.sort(rng.choice(train.n_samples, size=n_bg, replace=False))
        background = train.features[bg_idx]
        rows = [explain_mod.kernel_shap(model, X[i], background,
                                        budget=options["shap_budget"],
                                        seed=derived_seed + i).values
                for i in sample_ids]
        matrix = explain_mod.AttributionMatrix(
            np.vstack(rows), tuple(sample_ids), "shap", model.family)
        result["matrix"] = matrix
        result["global"] = explain_mod.aggregate_local(matrix)
        return result

    if method == "lime":
        rows, locals_ = [], []
        for i in sample_ids:
            le = explain_mod.lime_explain(
                model, X[i], train,
                n_perturbations=options["lime_perturbations"],
                seed=derived_seed + i, sample_id=i)
            rows.append(le.attribution)
            locals_.append(le)
        matrix = explain_mod.AttributionMatrix(
            np.vstack(rows), tuple(sample_ids), "lime", model.family)
        result["matrix"] = matrix
        result["global"] = explain_mod.aggregate_local(matrix)
        if model.task == CLASSIFICATION and model.n_classes == 2:
            # keep the most confidently predicted sample per class (rule panels)
            picks = {}
            for le in locals_:
                cls = int(np.argmax(le.predicted_proba))
                best = picks.get(cls)
                if best is None or max(le.predicted_proba) > max(best.predicted_proba):
                    picks[cls] = le
            result["rule_panels"] = [picks[c] for c in sorted(picks)]
        return result

    if method == "intgrad":
        baseline = train.features.mean(axis=0)
        rows, gaps = [], []
        for i in sample_ids:
            vec, gap = explain_mod.integrated_gradients(
                model, X[i], baseline, n_steps=options["ig_steps"])
            rows.append(vec.values)
            gaps.append(gap)
        matrix = explain_mod.AttributionMatrix(
            np.vstack(rows), tuple(sample_ids), "intgrad", model.family)
        result["matrix"] = matrix
        result["global"] = explain_mod.aggregate_local(matrix)
        result["completeness_gaps"] = gaps
        return result

    if method == "counterfactual":
        rows = []
        n_found = 0
        for i in sample_ids:
            target = 1 - int(model.predict(X[i])[0])
            cf = explain_mod.counterfactual(
                model, X[i], target, train,
                n_cfs=options["n_cfs"], budget=options["cf_budget"],
                seed=derived_seed + i)
            rows.append(cf.change_freq.values)
            n_found += cf.points.shape[0] if cf.found else 0
        matrix = explain_mod.AttributionMatrix(
            np.vstack(rows), tuple(sample_ids), "counterfactual", model.family)
        result["matrix"] = matrix
        result["global"] = explain_mod.aggregate_local(matrix)
        result["n_counterfactuals"] = n_found
        return result

    if method in ("pdp_ice", "ale"):
        subset = test.take(sample_ids)
        curves = []
        importance = np.zeros(test.n_features)
        for j in range(test.n_features):
            try:
                if method == "pdp_ice":
                    pdp, ice = explain_mod.pdp_ice(model, subset, j,
                                                   grid_size=options["curve_grid"])
                    curves.append(pdp)
                    curves.append(ice)
                    importance[j] = float(pdp.response.std())
                else:
                    curve = explain_mod.ale(model, subset, j,
                                            n_bins=options["curve_grid"])
                    curves.append(curve)
                    counts = np.histogram(subset.features[:, j],
                                          bins=curve.grid)[0]
                    weights = counts / max(1, counts.sum())
                    importance[j] = float(
                        np.sqrt((weights * curve.response[1:] ** 2).sum()))
            except explain_mod.ExplainError:
                continue  # constant feature: importance stays 0
        result["curves"] = curves
        result["global"] = explain_mod.attribution(
            importance, method=method, model=model.family)
        return result

    raise ValidationError(f"unknown method {method!r}")


def _task_worker(args):
    task, model, train, test, sample_ids, options = args
    start = time.perf_counter()
    result = execute_task(model, task.method_id, train, test, sample_ids,
                          options, task.derived_seed)
    return task.key, result, time.perf_counter() - start


def schedule(tasks, workers: int, runner, payloads) -> tuple[dict, dict, dict]:
    """Run tasks with at most ``workers`` in flight; a raising task is
    isolated as failed. Returns (results, failures, durations) keyed by
    task key, independent of completion order."""
    results: dict = {}
    failures: dict = {}
    durations: dict = {}
    if workers == 1:
        for task in tasks:
            try:
                key, result, dt = runner(payloads[task.key])
                results[key] = result
                durations[key] = dt
            except Exception as exc:  # noqa: BLE001 - isolate the task
                failures[task.key] = f"{type(exc).__name__}: {exc}"
        return results, failures, durations
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {task.key: pool.submit(runner, payloads[task.key])
                   for task in tasks}
        for key, fut in futures.items():
            try:
                got_key, result, dt = fut.result()
                results[got_key] = result
                durations[got_key] = dt
            except Exception as exc:  # noqa: BLE001
                failures[key] = f"{type(exc).__name__}: {exc}"
    return results, failures, durations


def _score_model(model, test: Dataset) -> tuple[float, metrics_mod.MetricsReport]:
    if test.task == CLASSIFICATION:
        pred = model.predict(test.features)
        scores = model.predict_proba(test.features)[:, 1] \
            if model.n_classes == 2 else None
        report = metrics_mod.classification_report(test.target, pred, scores)
        quality = report.values.get("auc", report.values["accuracy"])
    else:
        report = metrics_mod.regression_report(test.target,
                                               model.predict(test.features))
        quality = report.values["r2"]
    return float(quality), report


def _load_stage(config: RunConfig) -> Dataset:
    if config.dataset_path is not None:
        dataset = data_mod.load_csv(config.dataset_path, config.target_column,
                                    config.task)
    else:
        spec = data_mod.load_rulespec(config.rulespec_path)
        dataset = data_mod.generate_synthetic(
            spec, config.n_samples, config.seed,
            class_balance=config.class_balance)
    if config.one_hot_columns:
        dataset = data_mod.one_hot_encode(dataset, list(config.one_hot_columns))
    return dataset


def _bar_spec(title, names, vector, top_k=10):
    order = sorted(range(len(names)),
                   key=lambda j: (-abs(vector.values[j]), j))[:top_k]
    series = tuple((names[j], float(vector.values[j])) for j in order)
    errors = tuple(float(vector.dispersion[j]) for j in order)
    return svg_mod.PlotSpec("bar", title, x_label="mean |attribution|",
                            series=series, error=errors)


def _consensus_bar_spec(title, names, report, top_k=10):
    series = tuple((names[j], score) for j, score, _ in report.ranking[:top_k])
    errors = tuple(d for _, _, d in report.ranking[:top_k])
    x_label = "mean rank" if report.ascending else "consensus attribution"
    return svg_mod.PlotSpec("bar", title, x_label=x_label,
                            series=series, error=errors)


def run(config: RunConfig) -> RunArtifacts:
    config.validate()
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    art = RunArtifacts(outdir)
    manifest = art.manifest

    def emit(name: str, relpath: str) -> Path:
        manifest[name] = relpath
        path = outdir / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def stage(name):
        class _Timer:
            def __enter__(self_inner):
                self_inner.start = time.perf_counter()

            def __exit__(self_inner, exc_type, exc, tb):
                art.timings[name] = time.perf_counter() - self_inner.start
                if exc is not None and not isinstance(exc, StageError):
                    raise StageError(name, exc) from exc
        return _Timer()

    # ---- load / encode ----------------------------------------------------
    with stage("load"):
        dataset = _load_stage(config)
        names = dataset.feature_names

    # ---- split ------------------------------------------------------------
    with stage("split"):
        train, test = data_mod.split(dataset, config.test_fraction, config.seed,
                                     stratify=config.task == CLASSIFICATION)
        data_mod.save_csv(train, emit("train_csv", "data/train.csv"))
        data_mod.save_csv(test, emit("test_csv", "data/test.csv"))

    # ---- train + score ----------------------------------------------------
    metric = config.resolved_metric()
    trained: dict[str, models_mod.TrainedModel] = {}
    with stage("train"):
        for family in config.families:
            try:
                axes = config.grids.get(family) or models_mod.DEFAULT_GRIDS[family]
                grid = models_mod.ParamGrid(family, dict(axes))
                _, model = models_mod.grid_search(grid, train, config.k_folds,
                                                  metric, config.seed)
                trained[family] = model
            except Exception as exc:  # noqa: BLE001 - record and skip
                art.failed[f"train:{family}"] = f"{type(exc).__name__}: {exc}"
                continue
            models_mod.save_model(
                model, emit(f"model:{family}", f"models/{family}.json"))
            quality, report = _score_model(model, test)
            art.scores[family] = quality
            tables_mod.write_metrics(
                report, emit(f"metrics:{family}", f"metrics/{family}.csv"))
            if config.task == REGRESSION:
                spec = svg_mod.PlotSpec(
                    "scatter", f"{family}: predicted vs actual",
                    x_label="actual", y_label="predicted",
                    series=(tuple(test.target.tolist()),
                            tuple(model.predict(test.features).tolist())))
                svg_mod.render(spec, emit(f"plot:{family}:scatter",
                                          f"plots/{family}_scatter.svg"))
        if not trained:
            raise RuntimeError("no model family trained successfully")

    # ---- explain on the worker pool ----------------------------------------
    with stage("explain"):
        sample_ids = _select_samples(config.explain_samples, test.n_samples)
        options = {
            "metric": metric,
            "shap_budget": config.shap_budget,
            "shap_background": config.shap_background,
            "lime_perturbations": config.lime_perturbations,
            "permutation_repeats": config.permutation_repeats,
            "ig_steps": config.ig_steps,
            "cf_budget": config.cf_budget,
            "n_cfs": config.n_cfs,
            "curve_grid": config.curve_grid,
        }
        tasks, payloads = [], {}
        for family in sorted(trained):
            for method in config.methods:
                ok, why = _method_applies(method, trained[family])
                if not ok:
                    art.skipped[f"{family}:{method}"] = why
                    continue
                task = ExplainTask(family, method,
                                   derive_seed(config.seed, family, method))
                tasks.append(task)
                payloads[task.key] = (task, trained[family], train, test,
                                      sample_ids, options)
        results, failures, durations = schedule(tasks, config.workers,
                                                _task_worker, payloads)
        for key, error in failures.items():
            art.failed[f"{key[0]}:{key[1]}"] = error
            tables_mod.write_failed_placeholder(
                emit(f"attr:{key[0]}:{key[1]}:global",
                     f"attributions/{key[0]}_{key[1]}_global.csv"), error)

        global_vectors: dict[str, dict[str, explain_mod.AttributionVector]] = {}
        for key in sorted(results):
            family, method = key
            result = results[key]
            vec = result["global"]
            global_vectors.setdefault(method, {})[family] = vec
            tables_mod.write_global_attribution(
                vec, names, emit(f"attr:{family}:{method}:global",
                                 f"attributions/{family}_{method}_global.csv"))
            svg_mod.render(
                _bar_spec(f"{family} / {method}: top features", names, vec),
                emit(f"plot:{family}:{method}:bar",
                     f"plots/{family}_{method}_top10.svg"))
            if "matrix" in result:
                tables_mod.write_attribution_matrix(
                    result["matrix"], names,
                    emit(f"attr:{family}:{method}:samples",
                         f"attributions/{family}_{method}_samples.csv"))
            for curve in result.get("curves", ()):
                label = f"{family}_{method}_{names[curve.feature_index]}"
                tables_mod.write_curve(
                    curve, emit(f"curve:{family}:{method}:"
                                f"{names[curve.feature_index]}:{curve.kind}",
                                f"curves/{label}_{curve.kind}.csv"))
                if curve.kind in ("pdp", "ale"):
                    spec = svg_mod.PlotSpec(
                        "curve", f"{family}: {curve.kind} of "
                        f"{names[curve.feature_index]}",
                        x_label=names[curve.feature_index],
                        y_label="response",
                        series=(tuple(curve.grid.tolist()),
                                tuple(curve.response.tolist())))
                elif curve.response.shape[0] == 0:
                    continue
                else:
                    spec = svg_mod.PlotSpec(
                        "curve_family", f"{family}: ICE of "
                        f"{names[curve.feature_index]}",
                        x_label=names[curve.feature_index],
                        y_label="response",
                        series=(tuple(curve.grid.tolist()),
                                tuple(map(tuple, curve.response.tolist()))))
                svg_mod.render(spec, emit(
                    f"plot:{family}:{method}:{names[curve.feature_index]}:"
                    f"{curve.kind}",
                    f"plots/{label}_{curve.kind}.svg"))
            for panel in result.get("rule_panels", ()):
                cls = int(np.argmax(panel.predicted_proba))
                rows = tuple(
                    (rule.render(names[rule.feature_index]), rule.weight,
                     rule.direction,
                     repr(float(test.features[panel.sample_id,
                                              rule.feature_index])))
                    for rule in panel.rules)
                proba = ", ".join(f"p{k}={p:.2f}"
                                  for k, p in enumerate(panel.predicted_proba))
                spec = svg_mod.PlotSpec(
                    "rule_panel",
                    f"{family} sample {panel.sample_id} ({proba})",
                    series=rows)
                svg_mod.render(spec, emit(
                    f"plot:{family}:lime:rules:class{cls}",
                    f"plots/{family}_lime_rules_class{cls}.svg"))
        for key, dt in sorted(durations.items()):
            art.timings[f"task:{key[0]}:{key[1]}"] = dt

    # ---- consensus ----------------------------------------------------------
    with stage("consensus"):
        score_list = [consensus_mod.ModelScore(m, s)
                      for m, s in sorted(art.scores.items())]
        produced = 0
        for method in sorted(global_vectors):
            contributions = global_vectors[method]
            for kind, builder in (
                ("attribution_by_method",
                 consensus_mod.consensus_attribution_by_method),
                ("rank_by_method", consensus_mod.consensus_rank_by_method),
            ):
                try:
                    report = builder(method, contributions, score_list,
                                     config.cutoff)
                except consensus_mod.ConsensusError as exc:
                    art.skipped[f"consensus:{kind}:{method}"] = str(exc)
                    continue
                produced += 1
                base = f"consensus/{kind}_{method}"
                tables_mod.write_consensus(
                    report, names,
                    emit(f"consensus:{kind}:{method}", base + ".csv"),
                    emit(f"consensus:{kind}:{method}:contributors",
                         base + "_contributors.txt"),
                    cutoff=config.cutoff)
                svg_mod.render(
                    _consensus_bar_spec(f"consensus {kind}: {method}",
                                        names, report),
                    emit(f"plot:consensus:{kind}:{method}", base + ".svg"))
        kept, _ = consensus_mod.filter_models(score_list, config.cutoff)
        for ms in kept:
            contributions = {
                method: vectors[ms.model]
                for method, vectors in sorted(global_vectors.items())
                if ms.model in vectors
            }
            if not contributions:
                continue
            report = consensus_mod.consensus_rank_by_model(ms.model,
                                                           contributions)
            produced += 1
            base = f"consensus/rank_by_model_{ms.model}"
            tables_mod.write_consensus(
                report, names,
                emit(f"consensus:rank_by_model:{ms.model}", base + ".csv"),
                emit(f"consensus:rank_by_model:{ms.model}:contributors",
                     base + "_contributors.txt"))
            svg_mod.render(
                _consensus_bar_spec(f"consensus rank_by_model: {ms.model}",
                                    names, report),
                emit(f"plot:consensus:rank_by_model:{ms.model}", base + ".svg"))
        if produced == 0:
            raise RuntimeError(
                f"no consensus report could be built (cutoff {config.cutoff})")

    # ---- manifest, escape hatch, timings ------------------------------------
    with stage("report"):
        label_map = {str(lab): i for i, lab in enumerate(dataset.class_labels)} \
            if config.task == CLASSIFICATION else {}
        task_lines = [_task_command(config, t) for t in tasks]
        with open(emit("tasks_sh", "tasks.sh"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("#!/bin/sh\n# one self-contained command per "
                     "(model, method) task; paths are relative to this file\n"
                     'cd "$(dirname "$0")"\n')
            fh.write("\n".join(task_lines) + "\n")
        doc = {
            "artifacts": dict(sorted(manifest.items())),
            "config": _config_echo(config),
            "class_label_mapping": label_map,
            "model_scores": dict(sorted(art.scores.items())),
            "failed": dict(sorted(art.failed.items())),
            "skipped": dict(sorted(art.skipped.items())),
            "explained_sample_ids": sample_ids,
        }
        with open(outdir / "manifest.json", "w", encoding="utf-8",
                  newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        manifest["manifest"] = "manifest.json"

    with open(outdir / "timings.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("stage,seconds\n")
        fh.write(f"workers,{config.workers}\n")
        for name in sorted(art.timings):
            fh.write(f"{name},{art.timings[name]:.6f}\n")
    manifest["timings"] = "timings.csv"
    return art


def _config_echo(config: RunConfig) -> dict:
    doc = asdict(config)
    # workers and outdir are execution-placement knobs that must not change
    # any output (the determinism contract), so they stay out of the
    # manifest; workers is recorded with the timings instead.
    doc.pop("workers")
    doc.pop("outdir")
    doc["metric"] = config.resolved_metric()
    doc["families"] = list(config.families)
    doc["methods"] = list(config.methods)
    doc["one_hot_columns"] = list(config.one_hot_columns)
    if isinstance(doc["explain_samples"], tuple):
        doc["explain_samples"] = list(doc["explain_samples"])
    return doc


def _task_command(config: RunConfig, task: ExplainTask) -> str:
    parts = [
        "tabxai", "explain-task",
        "--model", f"models/{task.model_id}.json",
        "--train", "data/train.csv",
        "--test", "data/test.csv",
        "--target", config.target_column,
        "--task", config.task,
        "--method", task.method_id,
        "--seed", str(task.derived_seed),
        "--metric", config.resolved_metric(),
        "--shap-budget", str(config.shap_budget),
        "--shap-background", str(config.shap_background),
        "--lime-perturbations", str(config.lime_perturbations),
        "--permutation-repeats", str(config.permutation_repeats),
        "--ig-steps", str(config.ig_steps),
        "--cf-budget", str(config.cf_budget),
        "--n-cfs", str(config.n_cfs),
        "--curve-grid", str(config.curve_grid),
        "--outdir", "standalone",
    ]
    if config.explain_samples != "all":
        ids = _task_sample_arg(config.explain_samples)
        parts.extend(["--samples", ids])
    return " ".join(parts)


def _task_sample_arg(selector) -> str:
    if isinstance(selector, int):
        return f"first:{selector}"
    return ",".join(str(i) for i in selector)
