import numpy as np
import pytest

from swift_sim import (
    PathSet,
    assemble_channel,
    build_codebook,
    draw_cell_user,
    draw_channel,
    draw_paths,
    rescale_gains,
    rng_fork,
    virtual_channel,
)
from swift_sim.config import dbm_to_watts

from helpers import single_path


class TestDrawPaths:
    def test_poisson_mean(self):
        rng = rng_fork(10, 0)
        counts = [draw_paths(3.0, 1.0, 8, 4, rng).num_paths for _ in range(20_000)]
        assert np.mean(counts) == pytest.approx(3.0, abs=0.05)

    def test_tiny_rate_mostly_blocked(self):
        rng = rng_fork(10, 1)
        counts = [draw_paths(1e-4, 1.0, 8, 4, rng).num_paths for _ in range(2000)]
        assert np.mean(np.asarray(counts) == 0) > 0.99

    def test_on_grid_angles_are_codebook_angles(self):
        rng = rng_fork(10, 2)
        cb = build_codebook(16)
        for _ in range(50):
            p = draw_paths(3.0, 1.0, 16, 8, rng, on_grid=True)
            for a in p.aod:
                assert np.min(np.abs(cb.angles - a)) < 1e-12

    def test_gain_variance(self):
        rng = rng_fork(10, 3)
        gains = np.concatenate(
            [draw_paths(4.0, 2.5, 8, 4, rng).gains for _ in range(5000)]
        )
        assert np.mean(np.abs(gains) ** 2) == pytest.approx(2.5, rel=0.05)


class TestAssembleChannel:
    def test_blocked_channel(self):
        p = PathSet(num_paths=0, aod=np.zeros(0), aoa=np.zeros(0), gains=np.zeros(0, complex))
        np.testing.assert_array_equal(assemble_channel(p, 8, 4), np.zeros((4, 8)))

    def test_single_on_grid_path_projects_to_one_entry(self):
        n_bs, n_ue, i, j = 8, 4, 5, 2
        f_bs, w_ue = build_codebook(n_bs), build_codebook(n_ue)
        H = assemble_channel(single_path(n_bs, n_ue, i, j), n_bs, n_ue)
        H_v = virtual_channel(H, f_bs, w_ue)
        assert abs(H_v[j, i]) == pytest.approx(np.sqrt(n_bs * n_ue), rel=1e-12)
        off = H_v.copy()
        off[j, i] = 0.0
        assert np.max(np.abs(off)) <= 1e-10

    def test_frobenius_moment(self):
        rng = rng_fork(11, 0)
        n_bs, n_ue, L, sigma = 8, 4, 3, 0.5
        total = 0.0
        trials = 4000
        for _ in range(trials):
            aod = rng.random(L) * 2 * np.pi
            aoa = rng.random(L) * 2 * np.pi
            gains = np.sqrt(sigma / 2) * (rng.standard_normal(L) + 1j * rng.standard_normal(L))
            H = assemble_channel(PathSet(L, aod, aoa, gains), n_bs, n_ue)
            total += np.linalg.norm(H) ** 2
        assert total / trials == pytest.approx(n_bs * n_ue * L * sigma, rel=0.05)


class TestVirtualChannel:
    def test_zero_channel(self):
        f_bs, w_ue = build_codebook(8), build_codebook(4)
        np.testing.assert_array_equal(
            virtual_channel(np.zeros((4, 8)), f_bs, w_ue), np.zeros((4, 8))
        )

    def test_reconstruction_round_trip(self):
        rng = rng_fork(11, 1)
        f_bs, w_ue = build_codebook(8), build_codebook(4)
        for _ in range(20):
            ch = draw_channel(3.0, 1.0, f_bs, w_ue, rng)
            back = w_ue.matrix @ ch.H_v @ f_bs.matrix.conj().T
            assert np.max(np.abs(back - ch.H)) <= 1e-10


class TestRescaleGains:
    def test_paired_geometry(self):
        rng = rng_fork(12, 0)
        p = draw_paths(3.0, 1.0, 8, 4, rng)
        q = rescale_gains(p, 1.0, 4.0)
        np.testing.assert_array_equal(p.aod, q.aod)
        np.testing.assert_array_equal(p.aoa, q.aoa)
        np.testing.assert_allclose(q.gains, 2.0 * p.gains)


class TestCellUser:
    def test_snr_at_200m(self):
        p, n0 = dbm_to_watts(20.0), dbm_to_watts(-60.0)
        snr_db = 10 * np.log10(p * 200.0 ** -4.0 / n0)
        assert snr_db == pytest.approx(-12.04, abs=0.01)

    def test_snr_at_50m(self):
        p, n0 = dbm_to_watts(20.0), dbm_to_watts(-60.0)
        snr_db = 10 * np.log10(p * 50.0 ** -4.0 / n0)
        assert snr_db == pytest.approx(12.04, abs=0.01)

    def test_pathloss_relation(self):
        u = draw_cell_user(0, 200.0, 4.0, rng_fork(12, 1))
        assert 10.0 <= u.distance <= 200.0
        assert u.sigma_r == pytest.approx(u.distance ** -4.0)

    def test_flat_pathloss(self):
        u = draw_cell_user(0, 200.0, 0.0, rng_fork(12, 2))
        assert u.sigma_r == 1.0

    def test_distance_uniform(self):
        rng = rng_fork(12, 3)
        d = np.array([draw_cell_user(0, 200.0, 4.0, rng).distance for _ in range(20_000)])
        assert d.min() >= 10.0 and d.max() <= 200.0
        assert d.mean() == pytest.approx(105.0, abs=2.0)


class TestPathSetRecord:
    def test_round_trip(self):
        p = draw_paths(3.0, 1.0, 8, 4, rng_fork(12, 4))
        q = PathSet.from_record(p.to_record())
        assert q.num_paths == p.num_paths
        np.testing.assert_array_equal(q.aod, p.aod)
        np.testing.assert_array_equal(q.aoa, p.aoa)
        np.testing.assert_array_equal(q.gains, p.gains)
