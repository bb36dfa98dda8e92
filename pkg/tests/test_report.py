import csv
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from tabxai.consensus import ModelScore, consensus_attribution_by_method
from tabxai.explain import AttributionMatrix, Curve, attribution
from tabxai.metrics import classification_report, regression_report
from tabxai.report import (PlotSpec, ReportError, render,
                           write_attribution_matrix, write_consensus,
                           write_curve, write_failed_placeholder,
                           write_global_attribution, write_metrics)

SVG_NS = "{http://www.w3.org/2000/svg}"


def specs():
    yield PlotSpec("bar", "top features", x_label="attribution",
                   series=(("F1", 0.5), ("F2", -0.2), ("F3", 0.1)),
                   error=(0.1, 0.0, 0.02))
    yield PlotSpec("curve", "pdp", x_label="F1", y_label="response",
                   series=((0.0, 0.5, 1.0), (0.1, 0.4, 0.9)))
    yield PlotSpec("curve_family", "ice", x_label="F1",
                   series=((0.0, 0.5, 1.0),
                           ((0.1, 0.2, 0.3), (0.2, 0.3, 0.4))))
    yield PlotSpec("scatter", "pred vs actual", x_label="actual",
                   y_label="predicted",
                   series=((1.0, 2.0, 3.0), (1.1, 1.9, 3.2)))
    yield PlotSpec("rule_panel", "sample 3 (p0=0.10, p1=0.90)",
                   series=(("0.25 < F1 <= 0.50", 0.4, 1, "0.31"),
                           ("F2 <= 0.10", -0.2, 0, "0.05")))


class TestSvg:
    @pytest.mark.parametrize("spec", list(specs()),
                             ids=lambda s: s.kind)
    def test_well_formed_xml(self, spec, tmp_path):
        path = tmp_path / f"{spec.kind}.svg"
        render(spec, path)
        root = ET.parse(path).getroot()
        assert root.tag == f"{SVG_NS}svg"

    @pytest.mark.parametrize("spec", list(specs()),
                             ids=lambda s: s.kind)
    def test_deterministic_bytes(self, spec, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        render(spec, a)
        render(spec, b)
        assert a.read_bytes() == b.read_bytes()

    def test_bar_order_matches_series_order(self, tmp_path):
        spec = PlotSpec("bar", "t", series=(("first", 3.0), ("second", 1.0),
                                            ("third", 2.0)))
        path = tmp_path / "bar.svg"
        render(spec, path)
        text = path.read_text()
        assert text.index(">first<") < text.index(">second<") < \
            text.index(">third<")

    def test_error_bars_rendered(self, tmp_path):
        with_err = PlotSpec("bar", "t", series=(("a", 1.0),), error=(0.3,))
        without = PlotSpec("bar", "t", series=(("a", 1.0),))
        pa, pb = tmp_path / "a.svg", tmp_path / "b.svg"
        render(with_err, pa)
        render(without, pb)
        assert pa.read_text().count("<line") > pb.read_text().count("<line")

    def test_empty_series_rejected(self):
        with pytest.raises(ReportError):
            PlotSpec("bar", "t", series=())

    def test_unknown_kind_rejected(self):
        with pytest.raises(ReportError):
            PlotSpec("pie", "t", series=((1, 2),))

    def test_error_length_mismatch(self):
        with pytest.raises(ReportError):
            PlotSpec("bar", "t", series=(("a", 1.0),), error=(0.1, 0.2))

    def test_no_timestamp_bytes(self, tmp_path):
        path = tmp_path / "x.svg"
        render(next(iter(specs())), path)
        text = path.read_text().lower()
        assert "date" not in text and "time" not in text


class TestTables:
    def test_attribution_matrix_csv(self, tmp_path):
        m = AttributionMatrix(np.array([[0.5, -0.25]]), (7,))
        path = tmp_path / "m.csv"
        write_attribution_matrix(m, ["F1", "F2"], path)
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["sample_id", "feature", "attribution"]
        assert rows[1] == ["7", "F1", "0.5"]
        assert rows[2] == ["7", "F2", "-0.25"]

    def test_global_csv_round_trips_floats(self, tmp_path):
        vec = attribution([1 / 3, 2 / 7])
        path = tmp_path / "g.csv"
        write_global_attribution(vec, ["F1", "F2"], path)
        rows = list(csv.DictReader(path.open()))
        assert float(rows[0]["mean_abs_attribution"]) == 1 / 3
        assert float(rows[1]["mean_abs_attribution"]) == 2 / 7

    def test_metrics_csv_contains_flags_and_confusion(self, tmp_path):
        rep = classification_report([0, 1], [0, 0], [0.2, 0.3])
        path = tmp_path / "metrics.csv"
        write_metrics(rep, path)
        text = path.read_text()
        assert "undefined.precision,1.0" in text
        assert "confusion.actual1.predicted0,1.0" in text

    def test_consensus_csv_and_sidecar(self, tmp_path):
        rep = consensus_attribution_by_method(
            "shap",
            {"m1": attribution([0.2, 0.8]), "m2": attribution([0.4, 0.6])},
            [ModelScore("m1", 0.9), ModelScore("m2", 0.6)], 0.75)
        path = tmp_path / "c.csv"
        side = tmp_path / "c.txt"
        write_consensus(rep, ["F1", "F2"], path, side, cutoff=0.75)
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["rank", "feature", "score", "dispersion"]
        assert rows[1][0] == "1" and rows[1][1] == "F2"
        side_text = side.read_text()
        assert "included: m1" in side_text
        assert "excluded: m2" in side_text and "cutoff: 0.75" in side_text

    def test_curve_csvs(self, tmp_path):
        pdp = Curve(0, [0.0, 1.0], [0.2, 0.4], "pdp")
        ice = Curve(0, [0.0, 1.0], [[0.1, 0.3], [0.3, 0.5]], "ice", (4, 9))
        write_curve(pdp, tmp_path / "pdp.csv")
        write_curve(ice, tmp_path / "ice.csv")
        pdp_rows = list(csv.reader((tmp_path / "pdp.csv").open()))
        assert pdp_rows[0] == ["grid_value", "response"]
        ice_rows = list(csv.reader((tmp_path / "ice.csv").open()))
        assert ice_rows[0] == ["grid_value", "response", "sample_id"]
        assert ice_rows[1] == ["0.0", "0.1", "4"]

    def test_failed_placeholder(self, tmp_path):
        path = tmp_path / "f.csv"
        write_failed_placeholder(path, "boom")
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["status", "error"]
        assert rows[1] == ["failed", "boom"]

    def test_rewrite_is_byte_identical(self, tmp_path):
        rep = regression_report([1.0, 2.0, 3.0], [1.1, 2.2, 2.9])
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_metrics(rep, a)
        write_metrics(rep, b)
        assert a.read_bytes() == b.read_bytes()
