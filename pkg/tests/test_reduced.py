import numpy as np
import pytest

from lowrank_dp.discrepancy import eta_bound, recover
from lowrank_dp.errors import InfeasibleReductionError, ParameterError
from lowrank_dp.matrix import frobenius_sq, range_finder, svd
from lowrank_dp.reduced import (
    default_ell,
    lift,
    recover_reduced,
    reduce,
    reduced_noise_level,
)
from lowrank_dp.shrinkage import Regularizer
from lowrank_dp.synth import gen_synthetic, snr_db


def low_rank(m, n, r, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


class TestReduce:
    def test_lossless_projection(self):
        y = low_rank(60, 50, 4, 0)
        prob = reduce(y, range_finder(y, 6), 10.0)
        assert abs(prob.a) <= 1e-9 * frobenius_sq(y)
        assert prob.eta_hat == pytest.approx(10.0, abs=1e-9 * frobenius_sq(y))

    def test_full_basis(self):
        y = np.random.default_rng(1).standard_normal((30, 20))
        prob = reduce(y, range_finder(y, 20), 1.0)
        assert abs(prob.a) <= 1e-10 * frobenius_sq(y)

    def test_invariants(self):
        y = np.random.default_rng(2).standard_normal((40, 30))
        prob = reduce(y, range_finder(y, 5), 100.0)
        assert prob.a >= -1e-9 * frobenius_sq(y)
        assert prob.eta_hat <= prob.eta
        assert prob.y_proj.shape == (40, 5)

    def test_dimension_mismatch(self):
        y = np.ones((10, 8))
        basis = range_finder(np.ones((10, 9)), 2)
        with pytest.raises(ParameterError):
            reduce(y, basis, 1.0)

    def test_energy_identity(self):
        rng = np.random.default_rng(3)
        y = rng.standard_normal((25, 35))
        basis = range_finder(y, 7)
        prob = reduce(y, basis, 1.0)
        for _ in range(20):
            a_mat = rng.standard_normal((25, 7))
            lhs = frobenius_sq(y - lift(a_mat, basis))
            rhs = frobenius_sq(prob.y_proj - a_mat) + prob.a
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_interlacing(self):
        rng = np.random.default_rng(4)
        for ell in (1, 4, 10):
            y = rng.standard_normal((30, 40))
            s_full = svd(y).s
            s_proj = svd(reduce(y, range_finder(y, ell), 1.0).y_proj).s
            assert np.all(s_proj <= s_full[: s_proj.size] + 1e-10)

    def test_default_ell(self):
        assert default_ell(500, 500, 0.05) == 30
        assert default_ell(20, 10, 0.5) == 10

    def test_noise_level(self):
        y = np.random.default_rng(5).standard_normal((40, 30))
        prob = reduce(y, range_finder(y, 6), 2000.0)
        assert reduced_noise_level(prob) == pytest.approx(np.sqrt(prob.eta_hat / (40 * 6)))


class TestRecoverReduced:
    @pytest.mark.parametrize("shape", [(40, 30), (30, 40)])
    @pytest.mark.parametrize("reg", [Regularizer.nn(), Regularizer.tnn(2), Regularizer.gwnn()])
    def test_full_width_matches_full(self, shape, reg):
        y = np.random.default_rng(6).standard_normal(shape)
        eta = 0.3 * frobenius_sq(y)
        full = recover(y, reg, eta)
        red = recover_reduced(y, reg, eta, ell=min(shape))
        assert np.linalg.norm(red.x_hat - full.x_hat) <= 1e-8 * np.linalg.norm(full.x_hat)
        assert red.residual_sq == pytest.approx(eta, rel=1e-8)

    def test_close_to_full_path(self):
        rng = np.random.default_rng(7)
        truth = rng.random((200, 10)) @ rng.random((240, 10)).T
        y = truth + 0.5 * rng.standard_normal(truth.shape)
        eta = eta_bound(200, 240, 0.5)
        full = recover(y, Regularizer.nn(), eta)
        red = recover_reduced(y, Regularizer.nn(), eta, ell=15)
        assert abs(snr_db(truth, red.x_hat) - snr_db(truth, full.x_hat)) <= 0.5
        assert frobenius_sq(y - red.x_hat) == pytest.approx(eta, rel=1e-8)

    def test_noise_only(self):
        rng = np.random.default_rng(8)
        y = 2.0 * rng.standard_normal((80, 60))
        out = recover_reduced(y, Regularizer.nn(), 0.95 * frobenius_sq(y), ell=5)
        assert frobenius_sq(out.x_hat) <= 0.01 * frobenius_sq(y)

    def test_infeasible(self):
        y = np.random.default_rng(9).standard_normal((30, 30))
        with pytest.raises(InfeasibleReductionError):
            recover_reduced(y, Regularizer.nn(), 1e-3, ell=2)

    def test_deterministic(self):
        _, y = gen_synthetic(60, 70, 0.05, 0.3, seed=1)
        a = recover_reduced(y, Regularizer.nn(), eta_bound(60, 70, 0.3), ell=9, seed=3)
        b = recover_reduced(y, Regularizer.nn(), eta_bound(60, 70, 0.3), ell=9, seed=3)
        assert np.array_equal(a.x_hat, b.x_hat) and a.lam == b.lam

    def test_needs_ell(self):
        with pytest.raises(ParameterError):
            recover_reduced(np.ones((3, 3)), Regularizer.nn(), 1.0)
