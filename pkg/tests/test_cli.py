import json
from pathlib import Path

import numpy as np
import pytest

from sparsect import dataset_io
from sparsect.cli import main
from sparsect.phantom import default_phantom_specs, generate_phantom

N = 48
NZ = 4
VIEWS = (32, 64)
FULL_VIEWS = 128


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Phantom -> simulate -> extract for every mode, once per module."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    vol_path = root / "phantom.spct"
    vol = generate_phantom((N, N, NZ), (1, 1, 1), default_phantom_specs(0.42 * N))
    dataset_io.write_tensor(vol_path, vol.values, {"unit": "HU", "spacing": [1, 1, 1]})
    assert main(["simulate", "--volume", str(vol_path), "--geometry", "parallel",
                 "--views", ",".join(str(v) for v in VIEWS),
                 "--full-views", str(FULL_VIEWS),
                 "--out", str(data), "--case-id", "caseA", "--subject", "subjA",
                 "--split", "test"]) == 0
    for mode in ("2d", "2d3ch", "3d", "25d", "patch-axial"):
        assert main(["extract", "--out", str(data), "--mode", mode]) == 0
    return data


def read_manifest(data: Path) -> dict:
    return json.loads((data / "manifest.json").read_text())


class TestPhantomCommand:
    def test_writes_container(self, tmp_path):
        out = tmp_path / "p.spct"
        assert main(["phantom", "--out", str(out), "--shape", "24,24,4"]) == 0
        values, meta = dataset_io.read_tensor(out)
        assert values.shape == (24, 24, 4)
        assert meta["unit"] == "HU"
        # air background
        assert values[0, 0, 0] == -1000.0

    def test_random_seed_determinism(self, tmp_path):
        a, b, c = (tmp_path / f"{k}.spct" for k in "abc")
        for out, seed in ((a, 7), (b, 7), (c, 8)):
            assert main(["phantom", "--out", str(out), "--shape", "16,16,2",
                         "--random", "3", "--seed", str(seed)]) == 0
        va, _ = dataset_io.read_tensor(a)
        vb, _ = dataset_io.read_tensor(b)
        vc, _ = dataset_io.read_tensor(c)
        assert np.array_equal(va, vb)
        assert not np.array_equal(va, vc)


class TestSimulateCommand:
    def test_case_files_exist(self, workspace):
        case = workspace / "cases" / "caseA"
        assert (case / "full.spct").exists()
        for v in VIEWS:
            assert (case / f"sparse_{v:04d}.spct").exists()
            assert (case / f"target_{v:04d}.spct").exists()

    def test_manifest_entry(self, workspace):
        m = read_manifest(workspace)
        assert m["subjects"] == {"subjA": "test"}
        (case,) = [c for c in m["cases"] if c["case"] == "caseA"]
        assert case["views"] == list(VIEWS)
        assert case["shapes"]["full"] == [N, N, NZ]
        dataset_io.validate_manifest(m, workspace)

    def test_target_is_sparse_minus_full(self, workspace):
        case = workspace / "cases" / "caseA"
        full, _ = dataset_io.read_tensor(case / "full.spct")
        for v in VIEWS:
            sparse, _ = dataset_io.read_tensor(case / f"sparse_{v:04d}.spct")
            target, meta = dataset_io.read_tensor(case / f"target_{v:04d}.spct")
            assert meta["unit"] == "residual"
            assert np.allclose(target, sparse - full, atol=1e-6)

    def test_sparse_artifact_monotone(self, workspace):
        case = workspace / "cases" / "caseA"
        full, _ = dataset_io.read_tensor(case / "full.spct")
        errs = {}
        for v in VIEWS:
            sparse, _ = dataset_io.read_tensor(case / f"sparse_{v:04d}.spct")
            errs[v] = float(np.mean((sparse - full) ** 2))
        assert errs[32] > errs[64] > 0


class TestExtractCommand:
    def test_2d_sample_count_and_shape(self, workspace):
        m = read_manifest(workspace)
        samples = [s for s in m["samples"] if s["mode"] == "2d"]
        assert len(samples) == len(VIEWS) * NZ
        assert all(s["input_shape"] == [N, N] for s in samples)

    def test_2d_inputs_match_sparse_slices(self, workspace):
        m = read_manifest(workspace)
        sparse, _ = dataset_io.read_tensor(
            workspace / "cases" / "caseA" / f"sparse_{VIEWS[0]:04d}.spct")
        for s in m["samples"]:
            if s["mode"] == "2d" and s["views"] == VIEWS[0]:
                inp, _ = dataset_io.read_tensor(workspace / s["input"])
                assert np.array_equal(inp, sparse[:, :, s["index"]])

    def test_2d3ch_shape_and_edge_replication(self, workspace):
        m = read_manifest(workspace)
        samples = [s for s in m["samples"]
                   if s["mode"] == "2d3ch" and s["views"] == VIEWS[0]]
        assert all(s["input_shape"] == [N, N, 3] for s in samples)
        first = next(s for s in samples if s["index"] == 0)
        inp, _ = dataset_io.read_tensor(workspace / first["input"])
        # slice below the first is replicated from the first
        assert np.array_equal(inp[:, :, 0], inp[:, :, 1])

    def test_3d_block_count_and_shape(self, workspace):
        # 48x48x4 with 48-voxel cores -> a single 64^3 padded block per level
        m = read_manifest(workspace)
        samples = [s for s in m["samples"] if s["mode"] == "3d"]
        assert len(samples) == len(VIEWS)
        assert all(s["input_shape"] == [64, 64, 64] for s in samples)

    def test_25d_shapes(self, workspace):
        m = read_manifest(workspace)
        samples = [s for s in m["samples"] if s["mode"] == "25d"]
        assert all(s["input_shape"] == [64, 64, 3] for s in samples)
        assert all(s["target_shape"] == [64, 64] for s in samples)

    def test_reextract_replaces_not_duplicates(self, workspace):
        before = len([s for s in read_manifest(workspace)["samples"]
                      if s["mode"] == "2d"])
        assert main(["extract", "--out", str(workspace), "--mode", "2d"]) == 0
        after = len([s for s in read_manifest(workspace)["samples"]
                     if s["mode"] == "2d"])
        assert after == before


class TestPredictAndScore:
    def test_missing_predictions_raise(self, workspace, tmp_path):
        with pytest.raises(FileNotFoundError):
            main(["score", "--out", str(workspace),
                  "--predictions", str(tmp_path / "nowhere")])

    def test_zero_predictions_leave_sparse_unchanged(self, workspace, tmp_path):
        pred = tmp_path / "zero"
        assert main(["make-predictions", "--out", str(workspace),
                     "--predictions", str(pred), "--kind", "zero"]) == 0
        assert main(["score", "--out", str(workspace),
                     "--predictions", str(pred)]) == 0
        for row in read_manifest(workspace)["scores"]:
            assert row["corrected_mse"] == pytest.approx(row["sparse_mse"], rel=1e-9)
            assert row["corrected_ssim"] == pytest.approx(row["sparse_ssim"], rel=1e-9)

    def test_oracle_predictions_score_perfectly(self, workspace, tmp_path):
        pred = tmp_path / "oracle"
        imgs = tmp_path / "imgs"
        assert main(["make-predictions", "--out", str(workspace),
                     "--predictions", str(pred), "--kind", "oracle"]) == 0
        assert main(["score", "--out", str(workspace), "--predictions", str(pred),
                     "--export-images", str(imgs)]) == 0
        rows = read_manifest(workspace)["scores"]
        assert rows
        for row in rows:
            # single-precision storage bounds the round-trip error
            assert row["corrected_mse"] < 1e-12
            assert row["corrected_ssim"] > 1 - 1e-6
            if row["mode"] in ("2d", "2d3ch", "3d"):
                assert row["sparse_mse"] > row["corrected_mse"]
        # PGM export for volume modes
        pgm = imgs / f"caseA_2d_{VIEWS[0]:04d}" / "corrected.pgm"
        assert pgm.read_bytes().startswith(b"P5\n48 48\n255\n")

    def test_scores_csv_layout(self, workspace, tmp_path):
        pred = tmp_path / "zero2"
        main(["make-predictions", "--out", str(workspace),
              "--predictions", str(pred), "--kind", "zero"])
        main(["score", "--out", str(workspace), "--predictions", str(pred)])
        lines = (workspace / "scores.csv").read_text().strip().split("\n")
        header = lines[0].split("\t")
        assert header[:4] == ["geometry", "case", "mode", "views"]
        # one row per (mode, case, views) group
        assert len(lines) - 1 == 5 * len(VIEWS)
