import csv

import numpy as np
import pytest

from cryscreen.cli import main
from cryscreen.dataio import read_features_csv, write_features_csv
from cryscreen.features import FeatureConfig


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    assert run(["synth", out, "--n-pos", 12, "--n-neg", 12, "--seed", 42]) == 0
    return out


@pytest.fixture(scope="module")
def features_csv(corpus_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("features") / "features.csv"
    assert run(["extract", corpus_dir, "--out", out]) == 0
    return out


@pytest.fixture(scope="module")
def model_path(features_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("model") / "model.json"
    code = run([
        "train", features_csv, "--kernel", "poly", "--out", out, "--seed", 42,
        "--degree-grid", "1,2", "--gamma-grid", "0.005952380952380952,0.0178571",
        "--test-out", out.with_suffix(".test.csv"),
    ])
    assert code == 0
    return out


class TestSynth:
    def test_writes_wavs_and_manifest(self, corpus_dir):
        assert (corpus_dir / "manifest.csv").exists()
        wavs = sorted(p.name for p in corpus_dir.glob("*.wav"))
        assert len(wavs) == 24
        assert "asphyxia_0000.wav" in wavs and "normal_0011.wav" in wavs

    def test_deterministic_output(self, corpus_dir, tmp_path):
        assert run(["synth", tmp_path, "--n-pos", 12, "--n-neg", 12, "--seed", 42]) == 0
        for name in ("asphyxia_0003.wav", "normal_0007.wav", "manifest.csv"):
            assert (tmp_path / name).read_bytes() == (corpus_dir / name).read_bytes()

    def test_invalid_profile_is_data_error(self, tmp_path):
        assert run(["synth", tmp_path, "--pos-f0", 5000, 6000]) == 2


class TestExtract:
    def test_row_count_and_header(self, features_csv):
        features, labels, config = read_features_csv(features_csv)
        assert features.shape == (24, 168)
        assert labels.sum() == 0
        assert config == FeatureConfig()

    def test_corrupt_file_skipped_with_nonzero_exit(self, tmp_path, capsys):
        assert run(["synth", tmp_path, "--n-pos", 2, "--n-neg", 2]) == 0
        (tmp_path / "normal_0001.wav").write_bytes(b"not really audio")
        out = tmp_path / "features.csv"
        assert run(["extract", tmp_path, "--out", out]) == 2
        captured = capsys.readouterr()
        assert "normal_0001.wav" in captured.err
        features, _, _ = read_features_csv(out)
        assert features.shape[0] == 3

    def test_zero_signal_gives_zero_row(self, tmp_path):
        from cryscreen.audio import encode_wav

        (tmp_path / "normal_0000.wav").write_bytes(encode_wav(np.zeros(8000), 8000))
        (tmp_path / "manifest.csv").write_text("filename,label\nnormal_0000.wav,-1\n")
        out = tmp_path / "features.csv"
        assert run(["extract", tmp_path, "--out", out]) == 0
        text = out.read_text().splitlines()
        assert text[1] == "-1," + ",".join(["0"] * 168)

    def test_short_clip_fails_without_pad_flag(self, tmp_path):
        from cryscreen.audio import encode_wav

        (tmp_path / "normal_0000.wav").write_bytes(encode_wav(np.zeros(4000), 8000))
        (tmp_path / "manifest.csv").write_text("filename,label\nnormal_0000.wav,-1\n")
        out = tmp_path / "features.csv"
        assert run(["extract", tmp_path, "--out", out]) == 2
        assert run(["extract", tmp_path, "--out", out, "--pad-short"]) == 0

    def test_missing_manifest_fatal(self, tmp_path):
        assert run(["extract", tmp_path, "--out", tmp_path / "f.csv"]) == 2


class TestTrain:
    def test_model_report_and_test_split_written(self, model_path):
        assert model_path.exists()
        report = model_path.with_suffix(".grid.csv")
        assert report.exists()
        assert report.with_suffix(".png").exists()
        lines = report.read_text().splitlines()
        assert sum(1 for l in lines if l.startswith("cell,")) == 4
        assert sum(1 for l in lines if l.startswith("selected,")) == 1
        test_csv = model_path.with_suffix(".test.csv")
        features, labels, _ = read_features_csv(test_csv)
        # 12 per class allots (8, 2, 2): the leftover sample goes to training
        assert features.shape == (4, 168)
        assert sorted(labels.tolist()) == [-1, -1, 1, 1]

    def test_grid_reports_byte_identical_across_runs(self, features_csv, tmp_path):
        args = ["train", features_csv, "--kernel", "rbf", "--seed", 7,
                "--cost-grid", "0.1,1", "--gamma-grid", "0.006,0.05"]
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        assert run(args + ["--out", a]) == 0
        assert run(args + ["--out", b]) == 0
        assert a.with_suffix(".grid.csv").read_bytes() == b.with_suffix(".grid.csv").read_bytes()

    def test_split_provenance_excludes_test_rows(self, model_path):
        lines = model_path.with_suffix(".grid.csv").read_text().splitlines()
        sets = {}
        for line in lines:
            if line.startswith("split_"):
                row = next(csv.reader([line]))
                sets[row[0]] = set(row[6].split(";"))
        assert sets["split_train"] | sets["split_cv"] | sets["split_test"] == {
            f"r{i:06d}" for i in range(24)
        }
        assert not sets["split_test"] & (sets["split_train"] | sets["split_cv"])

    def test_explicit_params_skip_search(self, features_csv, tmp_path):
        out = tmp_path / "explicit.json"
        code = run(["train", features_csv, "--kernel", "poly", "--out", out,
                    "--degree", 1, "--gamma", 0.006])
        assert code == 0
        assert out.exists()
        assert not out.with_suffix(".grid.csv").exists()

    def test_single_class_csv_is_data_error(self, tmp_path):
        config = FeatureConfig()
        features = np.random.default_rng(0).normal(size=(6, 168))
        path = tmp_path / "oneclass.csv"
        write_features_csv(path, [1] * 6, features, config)
        assert run(["train", path, "--kernel", "rbf", "--out", tmp_path / "m.json"]) == 2

    def test_exhausted_iteration_budget_exits_3_with_model(self, features_csv, tmp_path, capsys):
        out = tmp_path / "starved.json"
        code = run(["train", features_csv, "--kernel", "rbf", "--out", out,
                    "--cost", 10, "--gamma", 0.05, "--max-iter", 1])
        assert code == 3
        assert out.exists()  # best-so-far model still written
        assert "iteration budget" in capsys.readouterr().err
        import json

        assert json.loads(out.read_text())["converged"] is False


class TestEvaluate:
    def test_report_files_and_layout(self, model_path, tmp_path, capsys):
        test_csv = model_path.with_suffix(".test.csv")
        out = tmp_path / "report.csv"
        assert run(["evaluate", model_path, test_csv, "--out", out]) == 0
        captured = capsys.readouterr()
        assert "Actual" in captured.out
        assert "Predicted" in captured.out
        assert "F-score" in captured.out
        assert out.exists()
        assert out.with_suffix(".png").exists()
        rows = dict(
            (row[0], row[1]) for row in csv.reader(out.read_text().splitlines()[1:])
        )
        assert set(rows) == {"tp", "fp", "fn", "tn", "accuracy", "precision", "recall", "f_score"}
        total = sum(int(rows[k]) for k in ("tp", "fp", "fn", "tn"))
        assert total == 4

    def test_empty_features_is_fatal(self, model_path, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        write_features_csv(empty, [], np.empty((0, 168)), FeatureConfig())
        assert run(["evaluate", model_path, empty, "--out", tmp_path / "r.csv"]) == 2
        assert "no rows" in capsys.readouterr().err

    def test_self_evaluation_runs(self, model_path, features_csv, tmp_path):
        assert run(["evaluate", model_path, features_csv, "--out", tmp_path / "self.csv"]) == 0


class TestPredict:
    def test_positive_wav_classified_asphyxia(self, model_path, corpus_dir, capsys):
        assert run(["predict", model_path, corpus_dir / "asphyxia_0000.wav"]) == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith("asphyxia ")
        float(line.split()[1])  # decision value parses

    def test_negative_wav_classified_normal(self, model_path, corpus_dir, capsys):
        assert run(["predict", model_path, corpus_dir / "normal_0000.wav"]) == 0
        assert capsys.readouterr().out.startswith("normal ")

    def test_deterministic_output(self, model_path, corpus_dir, capsys):
        run(["predict", model_path, corpus_dir / "asphyxia_0001.wav"])
        first = capsys.readouterr().out
        run(["predict", model_path, corpus_dir / "asphyxia_0001.wav"])
        assert capsys.readouterr().out == first

    def test_feature_csv_rows(self, model_path, features_csv, capsys):
        assert run(["predict", model_path, features_csv]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 24
        assert all(line.split()[0] in ("asphyxia", "normal") for line in lines)

    def test_dimension_mismatch_is_fatal(self, model_path, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        config = FeatureConfig(n_coeffs=6)  # 84 features instead of 168
        write_features_csv(bad, [1], np.zeros((1, config.feature_dim)), config)
        assert run(["predict", model_path, bad]) == 2
        assert "does not match" in capsys.readouterr().err


class TestUsageErrors:
    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == 1

    def test_missing_required_flag(self, features_csv):
        with pytest.raises(SystemExit) as exc:
            run(["train", features_csv, "--kernel", "poly"])  # no --out
        assert exc.value.code == 1

    def test_bad_grid_value(self, features_csv, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(["train", features_csv, "--kernel", "poly", "--out", tmp_path / "m.json",
                 "--gamma-grid", "1,zebra"])
        assert exc.value.code == 1
