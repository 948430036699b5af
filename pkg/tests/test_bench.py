import json

import numpy as np
import pytest

from lowrank_dp.bench import (
    ExperimentConfig,
    ResultRow,
    lambda_sweep,
    parse_method,
    read_rows,
    run_llr_bench,
    run_table,
    write_rows,
)
from lowrank_dp.errors import ParameterError
from lowrank_dp.llr import extract_patches
from lowrank_dp.synth import gen_phantom, gen_synthetic, rank_from_ratio, snr_db


class TestSynthetic:
    def test_rank_one(self):
        truth, y = gen_synthetic(40, 50, 0.02, 1.0, seed=0)
        assert np.linalg.matrix_rank(truth) == 1
        assert y.shape == (40, 50)

    def test_rank_25(self):
        truth, _ = gen_synthetic(500, 500, 0.05, 3.0, seed=1)
        assert rank_from_ratio(500, 500, 0.05) == 25
        assert np.linalg.matrix_rank(truth) == 25

    def test_deterministic(self):
        a = gen_synthetic(30, 20, 0.1, 1.0, seed=5)
        b = gen_synthetic(30, 20, 0.1, 1.0, seed=5)
        assert all(np.array_equal(x, z) for x, z in zip(a, b))

    @pytest.mark.parametrize("rho", [0.0, 0.9, 0.001])
    def test_guards(self, rho):
        with pytest.raises(ParameterError):
            gen_synthetic(30, 20, rho, 1.0)

    def test_noise_energy_law(self):
        m, n, tau = 200, 300, 4.0
        energy = [
            np.sum((y - x) ** 2) for x, y in (gen_synthetic(m, n, 0.01, tau, s) for s in range(50))
        ]
        assert abs(np.mean(energy) / (m * n * tau**2) - 1) <= 0.02


class TestSnr:
    def test_forty_db(self):
        x = np.random.default_rng(0).standard_normal((5, 5))
        assert snr_db(x, 1.01 * x) == pytest.approx(40.0)

    def test_zero_estimate(self):
        x = np.random.default_rng(1).standard_normal((5, 5))
        assert snr_db(x, np.zeros_like(x)) == pytest.approx(0.0)

    def test_exact(self):
        assert snr_db(np.eye(2), np.eye(2)) == float("inf")

    def test_errors(self):
        with pytest.raises(ParameterError):
            snr_db(np.zeros((2, 2)), np.ones((2, 2)))
        with pytest.raises(ParameterError):
            snr_db(np.ones((2, 2)), np.ones((2, 3)))


class TestPhantom:
    def test_shape_and_determinism(self):
        a = gen_phantom(32, 40, 16, seed=2)
        assert a.shape == (16, 32, 40)
        assert np.array_equal(a, gen_phantom(32, 40, 16, seed=2))
        assert not np.array_equal(a, gen_phantom(32, 40, 16, seed=3))

    def test_static_rank_one(self):
        seq = gen_phantom(32, 32, 16, seed=0, static=True)
        for p in extract_patches(seq, 7, 3):
            s = np.linalg.svd(p.matrix, compute_uv=False)
            assert s[1] <= 1e-10 * s[0]

    def test_default_tail_energy(self):
        seq = gen_phantom()
        assert seq.shape == (20, 64, 64)
        worst = 0.0
        for p in extract_patches(seq, 7, 1):
            s2 = np.linalg.svd(p.matrix, compute_uv=False) ** 2
            worst = max(worst, s2[5:].sum() / s2.sum())
        assert worst <= 0.01

    def test_too_small(self):
        with pytest.raises(ParameterError):
            gen_phantom(8, 64, 20)


class TestMethods:
    @pytest.mark.parametrize(
        "name, label", [("NN-DP", "NN-DP"), ("tnn-sure", "TNN-SURE"), ("HardT", "HardT"), ("GWNN-DP", "GWNN-DP")]
    )
    def test_parse(self, name, label):
        assert parse_method(name).name == label

    @pytest.mark.parametrize("name", ["NN", "XX-DP", "NN-GCV"])
    def test_parse_errors(self, name):
        with pytest.raises(ParameterError):
            parse_method(name)

    def test_config(self, tmp_path):
        cfg = ExperimentConfig(m=40, n=30, rho=0.1, trials=2)
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg.to_dict()))
        assert ExperimentConfig.from_json(path) == cfg
        assert cfg.ell == 9
        with pytest.raises(ParameterError):
            ExperimentConfig.from_dict({"m": 10, "colour": 1})
        with pytest.raises(ParameterError):
            ExperimentConfig(rho=0)
        with pytest.raises(ParameterError):
            ExperimentConfig(trials=0)


class TestRunTable:
    def test_rows(self):
        cfg = ExperimentConfig(m=60, n=50, tau=0.5, rho=0.1, trials=2, methods=["NN-DP", "HardT"])
        rows = run_table(cfg)
        assert [r.method for r in rows] == ["NN-DP", "HardT"]
        for r in rows:
            assert np.isfinite(r.snr_db) and r.wall_time > 0
            assert len(r.snr_trials) == 2
            assert r.snr_db == pytest.approx(np.mean(r.snr_trials))

    def test_deterministic(self):
        cfg = ExperimentConfig(m=40, n=40, tau=0.5, rho=0.1, trials=1, methods=["NN-DP", "TNN-SURE"], seed=9)
        a = [r.snr_db for r in run_table(cfg)]
        b = [r.snr_db for r in run_table(cfg)]
        assert a == b

    def test_randomized(self):
        cfg = ExperimentConfig(m=60, n=60, tau=0.5, rho=0.1, trials=1, methods=["NN-DP"], randomized=True)
        assert run_table(cfg)[0].randomized

    @pytest.mark.parametrize("suffix", [".jsonl", ".csv"])
    def test_round_trip(self, tmp_path, suffix):
        rows = [
            ResultRow("NN-DP", 10, 20, 0.5, 0.1, False, 12.3456789012345, 0.0123, [12.0, 12.6913578024690], [0.01, 0.0146]),
            ResultRow("HardT", 10, 20, 0.5, 0.1, True, 1e-17, 3.0, [1e-17], [3.0]),
        ]
        path = tmp_path / f"rows{suffix}"
        write_rows(path, rows)
        assert read_rows(path) == rows


def test_lambda_sweep():
    rows, lam_dp, lam_sure = lambda_sweep(60, 50, 0.1, 0.5, seed=0, grid=np.logspace(-1, 3, 21))
    assert len(rows) == 21
    lams = [r[0] for r in rows]
    assert lams[0] == pytest.approx(0.1)
    assert lam_dp > 0 and lam_sure > 0


def test_llr_bench_small():
    summary, maps = run_llr_bench(["NN-DP", "HardT"], tau=10.0, height=20, width=20, frames=16)
    assert set(summary["methods"]) == {"NN-DP", "HardT"}
    assert maps["NN-DP"].shape == (20, 20)
    for res in summary["methods"].values():
        assert res["snr_db"] > summary["input_snr_db"]
