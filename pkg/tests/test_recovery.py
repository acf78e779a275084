import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourier_cs import recovery
from fourier_cs.field import make_field
from fourier_cs.indexsets import build_full
from fourier_cs.matrix import SensingMatrix
from fourier_cs.recovery import (ExperimentConfig, SingularSupportError, SolverParams,
                                 basis_pursuit, duality_gap, gen_signal, measure, omp,
                                 run_success_sweep, run_trial, score, soft_threshold,
                                 sweep_csv, trial_seeds)
from oracles import l1_support_oracle


@pytest.fixture(scope="module")
def q29():
    F = make_field(29, 1, 2, "2,0,1")
    return SensingMatrix.from_indexset(build_full(F, F.element("1,28")))


class TestSignals:
    def test_k_zero_rejected(self):
        with pytest.raises(ValueError):
            gen_signal(840, 0)

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            gen_signal(10, 11)

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            gen_signal(10, 2, "laplace")

    def test_deterministic(self):
        a, b = gen_signal(840, 5, seed=11), gen_signal(840, 5, seed=11)
        assert np.array_equal(a.support, b.support) and np.array_equal(a.values, b.values)

    def test_shape(self):
        s = gen_signal(840, 3, "complex_gaussian", seed=4)
        assert s.k == 3 and np.count_nonzero(s.dense()) == 3
        assert np.linalg.norm(s.values) > 0

    def test_unit_modulus(self):
        s = gen_signal(100, 7, "unit_modulus", seed=5)
        assert np.allclose(np.abs(s.values), 1.0)


class TestMeasure:
    def test_single_column(self, q29):
        s = recovery.SparseSignal(840, np.array([17]), np.array([1.0 + 0j]))
        assert np.allclose(measure(q29, s), q29.column(17))

    def test_zero(self, q29):
        s = recovery.SparseSignal(840, np.array([], dtype=np.int64), np.array([]))
        assert not measure(q29, s).any()

    def test_linear(self, q29):
        a, b = gen_signal(840, 3, seed=1), gen_signal(840, 4, seed=2)
        both = recovery.SparseSignal(840, np.arange(840), a.dense() + b.dense())
        assert np.allclose(measure(q29, both), measure(q29, a) + measure(q29, b), atol=1e-12)

    def test_agrees_with_fft_operator(self, q29):
        s = gen_signal(840, 6, seed=3)
        assert np.allclose(measure(q29, s), q29.apply(s.dense()), atol=1e-12)

    def test_dimension_mismatch(self, q29):
        with pytest.raises(ValueError):
            measure(q29, gen_signal(100, 2, seed=0))


class TestOmp:
    def test_zero_measurement(self, q29):
        r = omp(q29, np.zeros(29), 3)
        assert r.iterations == 0 and not r.estimate.any()

    def test_one_sparse_in_one_step(self, q29):
        for seed in range(10):
            s = gen_signal(840, 1, seed=seed)
            r = score(omp(q29, measure(q29, s), 1), s)
            assert r.iterations == 1 and r.relative_error < 1e-12

    @pytest.mark.parametrize("k", [2, 3])
    @pytest.mark.parametrize("model", ["complex_gaussian", "unit_modulus"])
    def test_exact_below_coherence_limit(self, q29, k, model):
        for seed in range(25):
            s = gen_signal(840, k, model, seed)
            r = score(omp(q29, measure(q29, s), k), s)
            assert r.relative_error < 1e-6

    def test_stops_on_small_residual(self, q29):
        s = gen_signal(840, 2, seed=9)
        r = omp(q29, measure(q29, s), 10)
        assert r.iterations == 2

    def test_k_max_above_rows(self, q29):
        with pytest.raises(ValueError):
            omp(q29, np.ones(29), 30)

    def test_ill_conditioned_support_is_reported(self, q29, monkeypatch):
        monkeypatch.setattr(recovery, "COND_LIMIT", 1.0 + 1e-9)
        s = gen_signal(840, 3, seed=1)
        with pytest.raises(SingularSupportError):
            omp(q29, measure(q29, s), 3)


class TestSoftThreshold:
    @given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False), min_size=1,
                    max_size=20), st.floats(1e-3, 10))
    def test_matches_definition(self, vals, tau):
        v = np.array(vals, dtype=np.complex128)
        mag = np.abs(v)
        ref = np.where(mag > tau, v * (1 - tau / np.where(mag > 0, mag, 1)), 0)
        assert np.allclose(soft_threshold(v, tau), ref, atol=1e-9 * (1 + mag.max()))

    def test_zero_input(self):
        assert not soft_threshold(np.zeros(4, complex), 1.0).any()


class TestBasisPursuit:
    def test_zero(self, q29):
        r = basis_pursuit(q29, np.zeros(29, complex))
        assert not r.estimate.any() and r.converged

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_exact_below_coherence_limit(self, q29, k):
        for seed in range(8):
            s = gen_signal(840, k, seed=100 + seed)
            y = measure(q29, s)
            r = score(basis_pursuit(q29, y), s)
            assert r.converged and r.relative_error < 1e-4
            assert r.residual_norm <= 1e-8 * np.linalg.norm(y)

    def test_iteration_cap_flags_nonconvergence(self, q29):
        s = gen_signal(840, 3, seed=0)
        r = basis_pursuit(q29, measure(q29, s), SolverParams(max_iter=20))
        assert not r.converged and r.iterations == 20

    def test_weak_duality(self, q29):
        rng = np.random.default_rng(0)
        s = gen_signal(840, 4, seed=1)
        y = measure(q29, s)
        for _ in range(10):
            w = rng.standard_normal(840) + 1j * rng.standard_normal(840)
            primal, dual, gap = duality_gap(q29, y, s.dense(), w)
            assert dual <= primal + 1e-9 and gap >= -1e-9

    @settings(max_examples=12, deadline=None)
    @given(st.integers(8, 40), st.integers(3, 10), st.integers(1, 2), st.integers(0, 2**31))
    def test_never_worse_than_support_oracle(self, N, m, k, seed):
        m = min(m, N - 1)
        rng = np.random.default_rng(seed)
        mat = SensingMatrix.random_rows(N, m, rng)
        s = gen_signal(N, k, seed=rng.integers(2**31))
        y = measure(mat, s)
        r = basis_pursuit(mat, y)
        bound = l1_support_oracle(mat.dense(), y, 2)
        assert r.converged
        assert np.abs(r.estimate).sum() <= bound + 1e-6


class TestSweep:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig("m.json", k_min=4, k_max=3)
        with pytest.raises(ValueError):
            ExperimentConfig("m.json", trials=0)
        with pytest.raises(ValueError):
            ExperimentConfig("m.json", arms=("adversarial",))
        with pytest.raises(ValueError):
            ExperimentConfig("m.json", methods=("lasso",))
        with pytest.raises(ValueError):
            ExperimentConfig("m.json", signal_model="laplace")

    def test_k_above_rows(self, q29):
        with pytest.raises(ValueError):
            run_success_sweep(q29, ExperimentConfig("x", k_max=30, trials=1))

    def test_seeds_are_independent_of_range(self):
        a = trial_seeds(3, 5, 4)
        b = trial_seeds(3, 5, 4)
        assert [s.generate_state(2).tolist() for s in a] == [s.generate_state(2).tolist() for s in b]
        assert a[0].generate_state(2).tolist() != trial_seeds(3, 6, 4)[0].generate_state(2).tolist()

    def test_small_sweep(self, q29):
        cfg = ExperimentConfig("x", k_min=1, k_max=2, trials=6, master_seed=1)
        rows = run_success_sweep(q29, cfg)
        assert len(rows) == 2 * 2 * 2
        assert all(r.rate == 1.0 and r.nonconverged == 0 for r in rows)
        text = sweep_csv(rows)
        assert text.splitlines()[0] == "k,method,arm,trials,successes,rate"
        assert len(text.splitlines()) == 9
        assert sweep_csv(run_success_sweep(q29, cfg)) == text

    def test_batched_sweep_matches_single_trials(self, q29):
        cfg = ExperimentConfig("x", k_min=6, k_max=6, trials=4, master_seed=2,
                               methods=("bp", "omp"))
        rows = {(r.method, r.arm): r.successes for r in run_success_sweep(q29, cfg)}
        single = {key: 0 for key in rows}
        for seed in trial_seeds(2, 6, 4):
            for arm in cfg.arms:
                for meth, res in run_trial(q29, 6, seed, cfg, arm).items():
                    single[(meth, arm)] += int(res.success)
        assert rows == single

    def test_config_record(self):
        rec = ExperimentConfig("m.json", arms=("random",)).to_record()
        assert rec["arms"] == ["random"] and rec["trials"] == 100
