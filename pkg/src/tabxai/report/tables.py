"""CSV dumps of run outputs.

All files are UTF-8 with stable column order and repr() floats, so a
re-render of the same inputs is byte-identical. File naming follows
``<model>_<method>_<artifact>.csv``.
"""

from __future__ import annotations

import csv

from ..consensus import ConsensusReport
from ..explain import AttributionMatrix, AttributionVector, Curve
from ..metrics import MetricsReport


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_attribution_matrix(matrix: AttributionMatrix, feature_names, path):
    rows = []
    for i, sid in enumerate(matrix.sample_ids):
        for j, name in enumerate(feature_names):
            rows.append((sid, name, float(matrix.values[i, j])))
    _write_rows(path, ["sample_id", "feature", "attribution"], rows)


def write_global_attribution(vector: AttributionVector, feature_names, path):
    rows = [(name, float(vector.values[j]), float(vector.dispersion[j]))
            for j, name in enumerate(feature_names)]
    _write_rows(path, ["feature", "mean_abs_attribution", "std"], rows)


def write_metrics(report: MetricsReport, path):
    rows = [(name, float(report.values[name])) for name in sorted(report.values)]
    for name in sorted(report.undefined):
        rows.append((f"undefined.{name}", 1.0))
    if report.confusion is not None:
        counts = report.confusion.counts
        for a in range(counts.shape[0]):
            for p in range(counts.shape[1]):
                rows.append((f"confusion.actual{a}.predicted{p}",
                             float(counts[a, p])))
    _write_rows(path, ["metric", "value"], rows)


def write_consensus(report: ConsensusReport, feature_names, path,
                    sidecar_path=None, cutoff=None):
    rows = [(rank, feature_names[j], score, dispersion)
            for rank, (j, score, dispersion) in enumerate(report.ranking, start=1)]
    _write_rows(path, ["rank", "feature", "score", "dispersion"], rows)
    if sidecar_path is not None:
        with open(sidecar_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"kind: {report.kind}\n")
            fh.write(f"subject: {report.subject}\n")
            if cutoff is not None:
                fh.write(f"cutoff: {_fmt(float(cutoff))}\n")
            fh.write("included: " + ",".join(report.included) + "\n")
            for name, reason in report.excluded:
                fh.write(f"excluded: {name} ({reason})\n")


def write_curve(curve: Curve, path):
    if curve.response.ndim == 1:
        rows = [(float(g), float(r)) for g, r in zip(curve.grid, curve.response)]
        _write_rows(path, ["grid_value", "response"], rows)
        return
    rows = []
    for i, sid in enumerate(curve.sample_ids):
        for g, r in zip(curve.grid, curve.response[i]):
            rows.append((float(g), float(r), sid))
    _write_rows(path, ["grid_value", "response", "sample_id"], rows)


def write_failed_placeholder(path, error: str):
    _write_rows(path, ["status", "error"], [("failed", error)])
