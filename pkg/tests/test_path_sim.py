import numpy as np
import pytest

from exitgrid import (
    InvalidDomainError,
    ModelParams,
    PathConfig,
    collect_errors,
    discretize,
    generate_path,
    simulate_batch,
)

CFG = PathConfig(t_end=0.5, n_steps=20000, n_paths=100, seed=99, etas=(0.5,))


class TestGeneratePath:
    def test_determinism(self):
        a = generate_path(CFG, 1.0, 17)
        b = generate_path(CFG, 1.0, 17)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, generate_path(CFG, 1.0, 18))
        other_seed = PathConfig(t_end=0.5, n_steps=20000, n_paths=100, seed=100, etas=(0.5,))
        assert not np.array_equal(a, generate_path(other_seed, 1.0, 17))

    def test_starts_at_zero_and_zero_sigma(self):
        x = generate_path(CFG, 1.0, 0)
        assert x[0] == 0.0
        assert x.size == CFG.n_steps + 1
        assert np.all(generate_path(CFG, 0.0, 5) == 0.0)

    def test_terminal_variance(self):
        # X(t_end) is exact regardless of the grid, so a coarse grid suffices
        cfg = PathConfig(t_end=0.5, n_steps=8, n_paths=20000, seed=5, etas=(1.0,))
        finals = np.array([generate_path(cfg, 1.0, i)[-1] for i in range(cfg.n_paths)])
        var = finals.var(ddof=1)
        se = 0.5 * np.sqrt(2.0 / (cfg.n_paths - 1))
        assert abs(var - 0.5) < 3.0 * se

    def test_config_validation(self):
        with pytest.raises(InvalidDomainError):
            PathConfig(t_end=0.0, n_steps=10, n_paths=1, seed=0)
        with pytest.raises(InvalidDomainError):
            PathConfig(t_end=1.0, n_steps=10, n_paths=1, seed=0, etas=(0.0,))
        with pytest.raises(InvalidDomainError):
            CFG.time_index(0.5 + 0.3 * CFG.dt)


class TestDiscretize:
    def test_no_crossing_when_band_too_wide(self):
        x = generate_path(CFG, 1.0, 3)
        tr = discretize(x, eta=100.0)
        assert tr.renewal_count == 0
        assert tr.crossing_indices.size == 0
        assert tr.terminal_error == x[-1]

    def test_crossing_invariants(self):
        x = generate_path(CFG, 1.0, 11)
        tr = discretize(x, eta=0.25)
        assert tr.renewal_count == tr.crossing_indices.size > 0
        anchor = 0.0
        prev = 0
        for ci, av in zip(tr.crossing_indices, tr.anchor_values):
            interior = x[prev + 1 : ci]
            assert np.all(np.abs(interior - anchor) < 0.25)
            assert abs(x[ci] - anchor) >= 0.25
            assert av == x[ci]
            anchor = av
            prev = ci
        assert np.all(np.diff(tr.crossing_indices) >= 1)
        assert tr.terminal_error == x[-1] - tr.anchor_values[-1]

    def test_snap_mode_anchors_on_lattice(self):
        x = generate_path(CFG, 1.0, 11)
        tr = discretize(x, eta=0.25, snap=True)
        lattice = tr.anchor_values / 0.25
        assert np.max(np.abs(lattice - np.round(lattice))) < 1e-12

    def test_mean_renewal_count(self):
        # renewal theorem: E[N_t] ~ t sigma^2/eta^2 (within 5% at this scale)
        cfg = PathConfig(t_end=0.5, n_steps=200000, n_paths=1500, seed=31, etas=(0.1,))
        batch = simulate_batch(cfg, 1.0, (0.5,), workers=2)
        mean_n = batch.renewal_counts[:, 0].mean()
        assert abs(mean_n - 50.0) / 50.0 < 0.05


class TestBatch:
    def test_samples_inside_band(self, small_batch):
        for eta in small_batch.cfg.etas:
            for t in small_batch.t_eval:
                v = small_batch.sample(eta, t).values
                assert v.min() >= -1.0 and v.max() <= 1.0

    def test_worker_invariance(self):
        cfg = PathConfig(t_end=0.5, n_steps=5000, n_paths=300, seed=12, etas=(0.5, 1.5))
        a = simulate_batch(cfg, 1.0, (0.25, 0.5), workers=1)
        b = simulate_batch(cfg, 1.0, (0.25, 0.5), workers=2)
        assert np.array_equal(a.errors, b.errors)
        assert np.array_equal(a.renewal_counts, b.renewal_counts)
        assert np.array_equal(a.max_overshoot, b.max_overshoot)

    def test_sign_balance(self, small_batch):
        # anchor moves are +eta or -eta with equal probability
        ups = small_batch.up_counts[:, 0].sum()
        downs = small_batch.down_counts[:, 0].sum()
        total = ups + downs
        assert abs(ups - total / 2.0) < 3.0 * np.sqrt(total) / 2.0

    def test_overshoot_bound(self, small_batch):
        dt = small_batch.cfg.dt
        assert small_batch.max_overshoot.max() < 5.0 * np.sqrt(dt)

    def test_anchor_increments_near_eta(self):
        x = generate_path(CFG, 1.0, 23)
        tr = discretize(x, eta=0.25)
        if tr.renewal_count >= 2:
            inc = np.abs(np.diff(np.concatenate(([0.0], tr.anchor_values))))
            overshoot = inc - 0.25
            assert np.all(overshoot >= -1e-15)
            assert overshoot.max() < 5.0 * np.sqrt(CFG.dt)

    def test_variance_plateau(self, small_batch):
        var = small_batch.variance(0.5, 0.5)
        n = small_batch.cfg.n_paths
        assert abs(var - 1.0 / 6.0) < 4.0 * (1.0 / 6.0) * np.sqrt(2.0 / n) + 0.003

    def test_small_time_variance_slope(self, small_batch):
        # before the first detections, Var(Z/eta) = sigma^2 t / eta^2 exactly
        var = small_batch.variance(2.0, 0.125)
        expected = 0.125 / 4.0
        assert abs(var - expected) / expected < 0.05


class TestCollectErrors:
    def test_map_shape_and_reproducibility(self):
        cfg = PathConfig(t_end=0.5, n_steps=2000, n_paths=200, seed=3, etas=(0.4,))
        params = ModelParams(1.0, 0.7)
        out1 = collect_errors(cfg, params, (0.25, 0.5))
        out2 = collect_errors(cfg, params, (0.25, 0.5))
        assert set(out1) == {0.25, 0.5}
        for t in out1:
            assert out1[t].n == 200
            assert np.array_equal(out1[t].values, out2[t].values)
            assert np.all(np.abs(out1[t].values) <= 1.0)

    def test_rejects_off_grid_times(self):
        cfg = PathConfig(t_end=0.5, n_steps=2000, n_paths=10, seed=3, etas=(0.4,))
        with pytest.raises(InvalidDomainError):
            collect_errors(cfg, ModelParams(1.0, 0.4), (0.1234567,))
