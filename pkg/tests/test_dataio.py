import numpy as np
import pytest

from pdvoice.dataio import (FEATURE_COLUMNS, PARKINSONS_SCHEMA, FeatureStandardizer,
                            SplitSpec, VoiceDataset, feature_summary, load_csv,
                            pearson_correlation_matrix, standardize_apply,
                            standardize_fit, stratified_split, write_correlation_csv,
                            write_summary_csv)
from pdvoice.exceptions import (DataParseError, IngestionError, SchemaError,
                                SplitError)

HEADER = ("name," + ",".join(FEATURE_COLUMNS[:16]) + ",status,"
          + ",".join(FEATURE_COLUMNS[16:]))


def make_csv(tmp_path, rows, header=HEADER, name="sample.csv"):
    path = tmp_path / name
    path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
    return path


def data_row(name="rec_1", label=1, base=1.0):
    front = ",".join(f"{base + i / 10:.4f}" for i in range(16))
    back = ",".join(f"{base + (16 + i) / 10:.4f}" for i in range(6))
    return f"{name},{front},{label},{back}"


class TestLoadCsv:
    def test_loads_dataset_file(self, dataset_path):
        ds = load_csv(dataset_path)
        assert ds.n_rows == 195
        assert ds.n_features == 22
        assert ds.class_counts() == {0: 48, 1: 147}
        assert np.all(np.isfinite(ds.X))

    def test_header_only_file_is_ingestion_error(self, tmp_path):
        path = make_csv(tmp_path, [])
        with pytest.raises(IngestionError):
            load_csv(path)

    def test_empty_file_is_ingestion_error(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(IngestionError):
            load_csv(path)

    def test_triplicated_row(self, tmp_path):
        path = make_csv(tmp_path, [data_row(f"rec_{i}") for i in range(3)])
        ds = load_csv(path)
        assert ds.n_rows == 3
        assert np.array_equal(ds.X[0], ds.X[1]) and np.array_equal(ds.X[1], ds.X[2])
        assert ds.names == ("rec_0", "rec_1", "rec_2")
        np.testing.assert_array_equal(ds.row_ids, [0, 1, 2])

    def test_missing_column_named_in_error(self, tmp_path):
        broken = HEADER.replace("DFA", "DFB")
        path = make_csv(tmp_path, [data_row()], header=broken)
        with pytest.raises(SchemaError, match="DFA"):
            load_csv(path)

    def test_header_match_is_order_insensitive(self, tmp_path):
        cols = HEADER.split(",")
        reordered = list(reversed(cols))
        row = data_row().split(",")
        path = make_csv(tmp_path, [",".join(reversed(row))], header=",".join(reordered))
        ds = load_csv(path)
        expected = load_csv(make_csv(tmp_path, [data_row()], name="straight.csv"))
        np.testing.assert_array_equal(ds.X, expected.X)
        np.testing.assert_array_equal(ds.y, expected.y)

    def test_unparseable_cell_reports_row_and_column(self, tmp_path):
        bad = data_row().replace("1.1000", "not-a-number")
        path = make_csv(tmp_path, [data_row("ok", 0), bad])
        with pytest.raises(DataParseError, match=r"row 3.*MDVP:Fhi\(Hz\)"):
            load_csv(path)

    def test_non_binary_label_rejected(self, tmp_path):
        path = make_csv(tmp_path, [data_row(label=2)])
        with pytest.raises(DataParseError, match="label"):
            load_csv(path)


class TestStandardize:
    def test_two_value_feature(self):
        ds = VoiceDataset(X=np.array([[1.0], [3.0]]), y=np.array([0, 1]),
                          row_ids=np.array([0, 1]))
        stats = standardize_fit(ds)
        assert stats.mean[0] == 2.0
        assert stats.std[0] == 1.0

    def test_constant_feature_floored(self):
        ds = VoiceDataset(X=np.full((4, 1), 5.0), y=np.array([0, 1, 0, 1]),
                          row_ids=np.arange(4))
        stats = standardize_fit(ds)
        assert stats.std[0] == 1e-12
        out = standardize_apply(ds, stats)
        np.testing.assert_array_equal(out.X, np.zeros((4, 1)))

    def test_identity_stats_are_identity_transform(self):
        ds = VoiceDataset(X=np.array([[1.0, -2.0], [0.5, 4.0]]), y=np.array([0, 1]),
                          row_ids=np.arange(2))
        stats = standardize_fit(ds)
        identity = type(stats)(mean=np.zeros(2), std=np.ones(2))
        np.testing.assert_array_equal(standardize_apply(ds, identity).X, ds.X)

    def test_train_fold_moments_after_transform(self, voice_dataset):
        train, _ = stratified_split(voice_dataset, SplitSpec())
        stats = standardize_fit(train)
        out = standardize_apply(train, stats)
        assert np.abs(out.X.mean(axis=0)).max() < 1e-10
        assert np.abs(out.X.std(axis=0) - 1.0).max() < 1e-10

    def test_round_trip_recovers_input(self, voice_dataset):
        stats = standardize_fit(voice_dataset)
        out = standardize_apply(voice_dataset, stats)
        recovered = out.X * stats.std + stats.mean
        np.testing.assert_allclose(recovered, voice_dataset.X, atol=1e-10)

    def test_feature_count_mismatch(self):
        ds = VoiceDataset(X=np.ones((3, 2)), y=np.array([0, 1, 0]), row_ids=np.arange(3))
        stats = standardize_fit(ds)
        narrow = VoiceDataset(X=np.ones((3, 1)), y=ds.y, row_ids=ds.row_ids)
        with pytest.raises(ValueError, match="mismatch"):
            standardize_apply(narrow, stats)

    def test_sklearn_style_transformer_matches_function_path(self, voice_dataset):
        scaler = FeatureStandardizer().fit(voice_dataset.X)
        stats = standardize_fit(voice_dataset)
        np.testing.assert_array_equal(scaler.transform(voice_dataset.X),
                                      standardize_apply(voice_dataset, stats).X)
        np.testing.assert_allclose(
            scaler.inverse_transform(scaler.transform(voice_dataset.X)),
            voice_dataset.X, atol=1e-9)
        assert scaler.get_params() == {}


class TestStratifiedSplit:
    def test_default_split_counts(self, voice_dataset):
        train, test = stratified_split(voice_dataset, SplitSpec())
        assert test.n_rows == 39
        assert test.class_counts() == {0: 10, 1: 29}
        assert train.n_rows == 156

    def test_partition_property(self, voice_dataset):
        train, test = stratified_split(voice_dataset, SplitSpec())
        combined = np.sort(np.concatenate([train.row_ids, test.row_ids]))
        np.testing.assert_array_equal(combined, np.arange(voice_dataset.n_rows))

    def test_half_split_on_four_balanced_rows(self):
        ds = VoiceDataset(X=np.arange(8, dtype=float).reshape(4, 2),
                          y=np.array([0, 1, 0, 1]), row_ids=np.arange(4))
        train, test = stratified_split(ds, SplitSpec(test_fraction=0.5, seed=7))
        assert train.n_rows == test.n_rows == 2
        assert train.class_counts() == {0: 1, 1: 1}
        assert test.class_counts() == {0: 1, 1: 1}

    def test_same_seed_gives_identical_partition(self, voice_dataset):
        a = stratified_split(voice_dataset, SplitSpec(seed=42))
        b = stratified_split(voice_dataset, SplitSpec(seed=42))
        np.testing.assert_array_equal(a[0].row_ids, b[0].row_ids)
        np.testing.assert_array_equal(a[1].row_ids, b[1].row_ids)

    def test_different_seed_gives_different_partition(self, voice_dataset):
        a = stratified_split(voice_dataset, SplitSpec(seed=42))
        b = stratified_split(voice_dataset, SplitSpec(seed=43))
        assert not np.array_equal(a[1].row_ids, b[1].row_ids)

    def test_single_class_data_rejected(self):
        ds = VoiceDataset(X=np.ones((5, 2)), y=np.ones(5, dtype=int),
                          row_ids=np.arange(5))
        with pytest.raises(SplitError):
            stratified_split(ds, SplitSpec())

    def test_stratification_bound_on_random_label_mixes(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            n = int(rng.integers(20, 200))
            y = rng.integers(0, 2, size=n)
            if y.min() == y.max():
                continue
            ds = VoiceDataset(X=rng.normal(size=(n, 3)), y=y, row_ids=np.arange(n))
            frac = float(rng.uniform(0.15, 0.5))
            counts = {label: int((y == label).sum()) for label in (0, 1)}
            if min(round(counts[0] * frac), round(counts[1] * frac)) < 1:
                continue
            train, test = stratified_split(ds, SplitSpec(test_fraction=frac, seed=5))
            for label in (0, 1):
                overall = counts[label] / n
                in_test = (test.y == label).mean()
                assert abs(in_test - overall) <= 1.0 / test.n_rows + 1e-12


class TestCorrelation:
    def test_unit_diagonal_and_symmetry(self, voice_dataset):
        R = pearson_correlation_matrix(voice_dataset)
        np.testing.assert_array_equal(np.diag(R), np.ones(22))
        np.testing.assert_array_equal(R, R.T)
        assert R.min() >= -1.0 and R.max() <= 1.0

    def test_exact_negation_gives_minus_one(self):
        x = np.array([1.0, 2.0, 5.0, -3.0])
        ds = VoiceDataset(X=np.column_stack([x, -x]), y=np.array([0, 1, 0, 1]),
                          row_ids=np.arange(4))
        R = pearson_correlation_matrix(ds)
        assert abs(R[0, 1] + 1.0) < 1e-12

    def test_five_row_sample_against_covariance_formula(self):
        rng = np.random.default_rng(33)
        X = rng.normal(size=(5, 3))
        ds = VoiceDataset(X=X, y=np.array([0, 1, 0, 1, 1]), row_ids=np.arange(5))
        R = pearson_correlation_matrix(ds)
        for i in range(3):
            for j in range(3):
                xi, xj = X[:, i], X[:, j]
                cov = np.mean((xi - xi.mean()) * (xj - xj.mean()))
                expected = cov / (xi.std() * xj.std())
                assert abs(R[i, j] - expected) <= 1e-12

    def test_constant_column_correlates_zero(self):
        X = np.column_stack([np.ones(6), np.arange(6, dtype=float)])
        ds = VoiceDataset(X=X, y=np.array([0, 1] * 3), row_ids=np.arange(6))
        R = pearson_correlation_matrix(ds)
        assert R[0, 1] == 0.0 and R[1, 0] == 0.0
        assert R[0, 0] == 1.0

    def test_documented_high_correlation_pairs(self, voice_dataset):
        R = pearson_correlation_matrix(voice_dataset)
        idx = {name: k for k, name in enumerate(FEATURE_COLUMNS)}
        assert R[idx["spread1"], idx["PPE"]] > 0.9
        assert R[idx["MDVP:Jitter(%)"], idx["Jitter:DDP"]] > 0.9


class TestFeatureSummary:
    def test_single_row_mass_in_one_bin(self):
        ds = VoiceDataset(X=np.array([[3.5, -1.0]]), y=np.array([1]),
                          row_ids=np.array([0]))
        summaries = feature_summary(ds, ("a", "b"))
        for s in summaries:
            assert s.histogram.sum() == 1
            assert s.histogram.max() == 1

    def test_histogram_counts_sum_to_class_counts(self, voice_dataset):
        counts = voice_dataset.class_counts()
        for s in feature_summary(voice_dataset):
            assert s.histogram.sum() == counts[s.class_label]

    def test_fo_range_is_plausible_voice_range(self, voice_dataset):
        fo = [s for s in feature_summary(voice_dataset) if s.feature == "MDVP:Fo(Hz)"]
        assert all(50.0 <= s.minimum <= s.maximum <= 500.0 for s in fo)


class TestEdaWriters:
    def test_correlation_csv_shape_and_precision(self, voice_dataset, tmp_path):
        path = tmp_path / "correlation.csv"
        write_correlation_csv(path, voice_dataset)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 23
        header = lines[0].split(",")
        assert len(header) == 23
        first = lines[1].split(",")
        assert first[0] == "MDVP:Fo(Hz)"
        assert first[1] == "1.000000"

    def test_summary_csv_row_count(self, voice_dataset, tmp_path):
        path = tmp_path / "summary.csv"
        write_summary_csv(path, voice_dataset)
        lines = path.read_text().strip().split("\n")
        # header + 22 features x 2 classes
        assert len(lines) == 1 + 44
        assert lines[0].startswith("feature,class,min,max,mean,std,bin00")
