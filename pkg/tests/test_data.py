import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tabxai import data
from tabxai.data import (ColumnMeta, DataError, Dataset, RulePredicate,
                         RuleSpec, generate_synthetic, load_csv, load_rulespec,
                         one_hot_encode, parse_rulespec, save_csv, split)

HEART_HEADER = ("Age,Sex,ChestPainType,RestingBP,Cholesterol,FastingBS,"
                "RestingECG,MaxHR,ExerciseAngina,Oldpeak,ST_Slope,HeartDisease")


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadCsv:
    def test_eleven_feature_file(self, tmp_path):
        rows = [
            "40,M,ATA,140,289,0,Normal,172,N,0.0,Up,0",
            "49,F,NAP,160,180,0,Normal,156,N,1.0,Flat,1",
            "37,M,ATA,130,283,0,ST,98,N,0.0,Up,0",
        ]
        p = write(tmp_path, "heart.csv", HEART_HEADER + "\n" + "\n".join(rows))
        ds = load_csv(p, "HeartDisease", "classification")
        assert ds.n_features == 11
        assert ds.feature_names[0] == "Age"
        kinds = {c.name: c.kind for c in ds.columns}
        assert kinds["Sex"] == "categorical"
        assert kinds["Oldpeak"] == "numeric"

    def test_two_row_numeric_classification(self, tmp_path):
        p = write(tmp_path, "t.csv", "a,b,y\n1.0,2.0,0\n3.0,4.0,1\n")
        ds = load_csv(p, "y", "classification")
        assert ds.class_labels == (0, 1)
        assert ds.target.tolist() == [0, 1]

    def test_blank_cell_names_row(self, tmp_path):
        p = write(tmp_path, "t.csv", "a,b,y\n1,2,0\n1,,1\n")
        with pytest.raises(DataError, match="row 3"):
            load_csv(p, "y", "classification")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot open"):
            load_csv(tmp_path / "nope.csv", "y", "classification")

    def test_missing_target_column(self, tmp_path):
        p = write(tmp_path, "t.csv", "a,b\n1,2\n")
        with pytest.raises(DataError, match="target column"):
            load_csv(p, "y", "classification")

    def test_ragged_row_names_row(self, tmp_path):
        p = write(tmp_path, "t.csv", "a,b,y\n1,2,0\n1,2\n")
        with pytest.raises(DataError, match="row 3"):
            load_csv(p, "y", "classification")

    def test_first_appearance_label_order(self, tmp_path):
        p = write(tmp_path, "t.csv", "a,y\n1,yes\n2,no\n3,yes\n")
        ds = load_csv(p, "y", "classification")
        assert ds.class_labels == ("yes", "no")
        assert ds.target.tolist() == [0, 1, 0]

    def test_categorical_codes_by_first_appearance(self, tmp_path):
        p = write(tmp_path, "t.csv", "c,y\nred,0\nblue,1\nred,0\n")
        ds = load_csv(p, "y", "classification")
        assert ds.columns[0].categories == ("red", "blue")
        assert ds.features[:, 0].tolist() == [0.0, 1.0, 0.0]

    def test_regression_target_must_be_numeric(self, tmp_path):
        p = write(tmp_path, "t.csv", "a,y\n1,2.5\n2,oops\n")
        with pytest.raises(DataError, match="row 3"):
            load_csv(p, "y", "regression")


class TestOneHot:
    @pytest.fixture
    def dataset(self, tmp_path):
        text = "c1,c2,x,y\na,u,0.5,0\nb,v,0.25,1\nc,u,0.75,0\nb,w,0.1,1\n"
        return load_csv(write(tmp_path, "t.csv", text), "y", "classification")

    def test_single_value_becomes_unit_vector(self, dataset):
        enc = one_hot_encode(dataset, ["c1"])
        # row 1 has c1 = b (second category)
        names = enc.feature_names
        block = [names.index("c1=a"), names.index("c1=b"), names.index("c1=c")]
        assert enc.features[1, block].tolist() == [0.0, 1.0, 0.0]

    def test_empty_column_list_identity(self, dataset):
        assert one_hot_encode(dataset, []) is dataset

    def test_feature_count_growth(self, dataset):
        enc = one_hot_encode(dataset, ["c1", "c2"])
        assert enc.n_features == dataset.n_features - 2 + 3 + 3

    def test_two_and_three_category_growth(self, tmp_path):
        text = "p,q,y\non,l,0\noff,m,1\non,n,0\n"
        ds = load_csv(write(tmp_path, "t.csv", text), "y", "classification")
        enc = one_hot_encode(ds, ["p", "q"])
        assert enc.n_features == ds.n_features + 3  # (2-1)+(3-1) extra

    def test_unknown_column(self, dataset):
        with pytest.raises(DataError, match="unknown column"):
            one_hot_encode(dataset, ["zzz"])

    def test_not_categorical(self, dataset):
        with pytest.raises(DataError, match="not categorical"):
            one_hot_encode(dataset, ["x"])

    def test_exactly_one_hot_per_source_column(self, dataset):
        enc = one_hot_encode(dataset, ["c1", "c2"])
        names = enc.feature_names
        for prefix, k in (("c1=", 3), ("c2=", 3)):
            block = [i for i, n in enumerate(names) if n.startswith(prefix)]
            assert len(block) == k
            assert np.all(enc.features[:, block].sum(axis=1) == 1.0)

    def test_order_preserved(self, dataset):
        enc = one_hot_encode(dataset, ["c2"])
        assert enc.feature_names[0] == "c1"
        assert enc.feature_names[1:4] == ["c2=u", "c2=v", "c2=w"]
        assert enc.feature_names[4] == "x"


class TestSplit:
    def test_80_20_deterministic(self, rule17_spec):
        ds = generate_synthetic(rule17_spec, 100, seed=3)
        a_train, a_test = split(ds, 0.2, seed=9)
        b_train, b_test = split(ds, 0.2, seed=9)
        assert a_train.n_samples == 80 and a_test.n_samples == 20
        assert np.array_equal(a_train.features, b_train.features)
        assert np.array_equal(a_test.target, b_test.target)

    def test_stratified_even_classes(self):
        X = np.linspace(0, 1, 50).reshape(-1, 1)
        y = np.array([0, 1] * 25)
        ds = Dataset(X, y, (ColumnMeta("F1"),), "classification", (0, 1))
        _, test = split(ds, 0.2, seed=1, stratify=True)
        assert test.n_samples == 10
        assert int(test.target.sum()) == 5

    def test_empty_partition_rejected(self):
        X = np.array([[0.0], [1.0]])
        ds = Dataset(X, np.array([0, 1]), (ColumnMeta("F1"),),
                     "classification", (0, 1))
        with pytest.raises(DataError, match="empty partition"):
            split(ds, 0.999, seed=0)

    def test_partitions_disjoint_exhaustive(self, rule17_spec):
        ds = generate_synthetic(rule17_spec, 103, seed=3)
        train, test = split(ds, 0.3, seed=4, stratify=True)
        assert train.n_samples + test.n_samples == 103
        seen = np.vstack([train.features, test.features])
        assert np.unique(seen, axis=0).shape[0] == 103

    @given(seed=st.integers(0, 2 ** 20), frac=st.floats(0.1, 0.9))
    @settings(max_examples=25, deadline=None)
    def test_split_determinism_property(self, rule17_spec, seed, frac):
        ds = generate_synthetic(rule17_spec, 60, seed=1)
        a = split(ds, frac, seed=seed, stratify=True)
        b = split(ds, frac, seed=seed, stratify=True)
        assert np.array_equal(a[0].features, b[0].features)
        assert np.array_equal(a[1].features, b[1].features)

    @given(n_pos=st.integers(5, 40), frac=st.floats(0.15, 0.5),
           seed=st.integers(0, 999))
    @settings(max_examples=40, deadline=None)
    def test_stratified_proportions_within_one_sample(self, n_pos, frac, seed):
        n = 60
        X = np.arange(n, dtype=float).reshape(-1, 1)
        y = np.array([1] * n_pos + [0] * (n - n_pos))
        ds = Dataset(X, y, (ColumnMeta("F1"),), "classification", (0, 1))
        try:
            _, test = split(ds, frac, seed=seed, stratify=True)
        except DataError:
            return  # rounding produced an empty partition; correctly rejected
        for c, n_c in ((0, n - n_pos), (1, n_pos)):
            got = int((test.target == c).sum())
            assert abs(got - n_c * frac) <= 1.0


class TestSynthetic:
    def test_rule_positive_sample(self, rule17_spec):
        x = np.full(17, 0.5)
        x[2], x[5] = 0.8, 0.3
        assert rule17_spec.evaluate(x)[0] == 1

    def test_rule_negative_sample(self, rule100_spec):
        x = np.full(100, 0.2)  # F10 = 0.2 < 0.6 fails
        assert rule100_spec.evaluate(x)[0] == 0

    def test_shape_2000_by_100(self, rule100_spec):
        ds = generate_synthetic(rule100_spec, 2000, seed=0)
        assert ds.features.shape == (2000, 100)
        assert ds.feature_names[0] == "F1" and ds.feature_names[-1] == "F100"

    def test_labels_match_rule_reevaluation(self, rule17_spec):
        ds = generate_synthetic(rule17_spec, 500, seed=8)
        oracle = np.ones(500, dtype=int)
        for p in rule17_spec.predicates:
            col = ds.features[:, p.feature_index]
            oracle &= ((col >= p.lower) & (col <= p.upper)).astype(int)
        assert np.array_equal(ds.target, oracle)

    def test_deterministic_under_seed(self, rule17_spec):
        a = generate_synthetic(rule17_spec, 64, seed=12)
        b = generate_synthetic(rule17_spec, 64, seed=12)
        assert np.array_equal(a.features, b.features)

    def test_class_balance_fraction(self, rule100_spec):
        ds = generate_synthetic(rule100_spec, 300, seed=2, class_balance=0.5)
        assert int(ds.target.sum()) == 150
        # every row still obeys the rule labels
        assert np.array_equal(ds.target, rule100_spec.evaluate(ds.features))

    def test_round_trip_csv(self, tmp_path, rule17_spec):
        ds = generate_synthetic(rule17_spec, 40, seed=6)
        path = tmp_path / "synth.csv"
        save_csv(ds, path)
        back = load_csv(path, "class", "classification")
        assert np.array_equal(back.features, ds.features)
        assert np.array_equal(back.target, ds.target)
        assert back.feature_names == ds.feature_names


class TestRuleSpecFile:
    def test_parse_two_interval_rule(self):
        spec = parse_rulespec("n_features = 17\nF3, 0.7, 0.9\nF6, 0.2, 0.35\n")
        assert spec.n_features == 17
        assert spec.predicates[0] == RulePredicate(2, 0.7, 0.9)

    def test_parse_open_bounds_and_comments(self):
        text = "# rule file\nn_features = 100\nF10, 0.6, inf\nF20, -inf, 0.8\n"
        spec = parse_rulespec(text)
        assert spec.predicates[0].upper == math.inf
        assert spec.predicates[1].lower == -math.inf

    def test_format_parse_round_trip(self, rule100_spec):
        again = parse_rulespec(data.format_rulespec(rule100_spec))
        assert again == rule100_spec

    def test_missing_n_features(self):
        with pytest.raises(DataError, match="n_features"):
            parse_rulespec("F1, 0, 1\n")

    def test_bad_predicate_line(self):
        with pytest.raises(DataError, match="line 2"):
            parse_rulespec("n_features = 3\nF1 0 1\n")

    def test_load_rulespec(self, tmp_path):
        p = tmp_path / "rule.txt"
        p.write_text("n_features = 5\nF2, 0.25, 0.75\n", encoding="utf-8")
        spec = load_rulespec(p)
        assert spec.predicates[0].feature_index == 1


class TestInvariants:
    def test_predicate_bounds_checked(self):
        with pytest.raises(DataError):
            RulePredicate(0, 0.9, 0.1)

    def test_rule_index_range_checked(self):
        with pytest.raises(DataError):
            RuleSpec((RulePredicate(5, 0, 1),), 3)

    def test_duplicate_column_names_rejected(self):
        with pytest.raises(DataError, match="duplicate"):
            Dataset(np.zeros((2, 2)), np.zeros(2),
                    (ColumnMeta("a"), ColumnMeta("a")), "regression")

    def test_nan_features_rejected(self):
        with pytest.raises(DataError, match="missing"):
            Dataset(np.array([[np.nan]]), np.zeros(1), (ColumnMeta("a"),),
                    "regression")

    def test_features_immutable(self, rule17_spec):
        ds = generate_synthetic(rule17_spec, 10, seed=0)
        with pytest.raises(ValueError):
            ds.features[0, 0] = 5.0
