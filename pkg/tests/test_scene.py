"""Scene synthesis: delay placement, slow-time phase, noise, clusters."""

import numpy as np
import pytest

import isacsim as iz
from isacsim.params import SPEED_OF_LIGHT_MPS


class TestDelayBin:
    def test_eight_and_a_half_meters(self):
        params = iz.WaveformParams()
        assert iz.delay_bin(8.5, params) == 100

    def test_fifteen_meters(self):
        params = iz.WaveformParams()
        assert iz.delay_bin(15.0, params) == 176

    def test_round_trip_against_axis(self):
        params = iz.WaveformParams()
        axis = params.range_axis_m()
        for qb in (0, 1, 176, 3519):
            assert iz.delay_bin(axis[qb], params) == qb


class TestEchoPlacement:
    def test_static_target_lands_at_its_delay_bin(self, ci_params):
        pos = np.array([12.0, 9.0, 0.0])
        sched = iz.build_schedule(iz.ScheduleKind.PMCW, ci_params, seed=7)
        cube = iz.synthesize_echo(
            sched, [iz.point_target(pos, np.zeros(3))], ci_params, path_loss=iz.PathLoss.OFF
        )
        qb = iz.delay_bin(15.0, ci_params)
        assert qb == 176
        assert np.all(cube.samples[:qb, :] == 0)
        # echo is the frame shifted down by qb (reflectivity 1, no loss)
        frame = sched.frames[0].samples
        keep = ci_params.samples_per_pri - qb
        np.testing.assert_allclose(cube.samples[qb:, 0], frame[:keep], atol=1e-12)

    def test_path_loss_scales_by_inverse_range_squared(self, ci_params):
        pos = np.array([12.0, 9.0, 0.0])
        sched = iz.build_schedule(iz.ScheduleKind.PMCW, ci_params, seed=7)
        free = iz.synthesize_echo(
            sched, [iz.point_target(pos, np.zeros(3))], ci_params, path_loss=iz.PathLoss.OFF
        )
        lossy = iz.synthesize_echo(
            sched,
            [iz.point_target(pos, np.zeros(3))],
            ci_params,
            path_loss=iz.PathLoss.INVERSE_SQUARE,
        )
        np.testing.assert_allclose(lossy.samples, free.samples / 15.0**2, atol=1e-15)

    def test_radial_motion_phase_matches_doppler_frequency(self, ci_params):
        # exp(-j 2 pi f_D p T_pri) with f_D = 2 v / lambda, exactly, for
        # purely radial motion (the slow-time phase uses the advancing range)
        pos = np.array([12.0, 9.0, 0.0])
        vel = 2.0 * pos / np.linalg.norm(pos)
        sched = iz.build_schedule(iz.ScheduleKind.FMCW, ci_params)
        cube = iz.synthesize_echo(
            sched, [iz.point_target(pos, vel)], ci_params, path_loss=iz.PathLoss.OFF
        )
        qb = 176
        f_d = 2.0 * 2.0 / ci_params.wavelength_m
        assert f_d == pytest.approx(800.55, abs=0.01)
        p = np.arange(ci_params.packets_per_cpi)
        expected = cube.samples[qb, 0] * np.exp(-2j * np.pi * f_d * p * ci_params.pri_s)
        np.testing.assert_allclose(cube.samples[qb, :], expected, atol=1e-9)

    def test_superposition_of_two_scatterers(self, small_params):
        sched = iz.build_schedule(iz.ScheduleKind.PMCW, small_params, seed=7)
        t1 = iz.point_target(np.array([5.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))
        t2 = iz.point_target(np.array([0.0, 9.0, 0.0]), np.array([0.0, -2.0, 0.0]))
        both = iz.synthesize_echo(sched, [t1, t2], small_params)
        one = iz.synthesize_echo(sched, [t1], small_params)
        two = iz.synthesize_echo(sched, [t2], small_params)
        np.testing.assert_allclose(both.samples, one.samples + two.samples, atol=1e-15)

    def test_no_targets_no_noise_is_silent(self, small_params):
        sched = iz.build_schedule(iz.ScheduleKind.FMCW, small_params)
        cube = iz.synthesize_echo(sched, [], small_params)
        assert np.all(cube.samples == 0)


class TestNoise:
    def test_variance_calibration_without_targets(self, ci_params):
        # reference power falls back to amplitude^2 = 1, so the per-sample
        # complex noise power equals 10**(-snr/10)
        sched = iz.build_schedule(iz.ScheduleKind.FMCW, ci_params)
        snr = 7.0
        cube = iz.synthesize_echo(sched, [], ci_params, snr_db=snr, noise_seed=11)
        n = cube.samples.size
        assert n >= 100_000
        measured = np.mean(np.abs(cube.samples) ** 2)
        assert measured == pytest.approx(10.0 ** (-snr / 10.0), rel=0.02)

    def test_variance_references_strongest_scatterer(self, ci_params):
        pos = np.array([12.0, 9.0, 0.0])
        sched = iz.build_schedule(iz.ScheduleKind.FMCW, ci_params)
        target = iz.point_target(pos, np.zeros(3))
        clean = iz.synthesize_echo(sched, [target], ci_params)
        noisy = iz.synthesize_echo(sched, [target], ci_params, snr_db=0.0, noise_seed=11)
        noise = noisy.samples - clean.samples
        sigma_prime = 1.0 / 15.0**2  # unit reflectivity, inverse-square loss
        assert np.mean(np.abs(noise) ** 2) == pytest.approx(sigma_prime**2, rel=0.02)

    def test_seed_determinism(self, small_params):
        sched = iz.build_schedule(iz.ScheduleKind.FMCW, small_params)
        a = iz.synthesize_echo(sched, [], small_params, snr_db=10.0, noise_seed=11)
        b = iz.synthesize_echo(sched, [], small_params, snr_db=10.0, noise_seed=11)
        c = iz.synthesize_echo(sched, [], small_params, snr_db=10.0, noise_seed=12)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)


class TestClusters:
    def test_pedestrian_layout_and_power(self):
        pos = np.array([0.0, 20.0, 0.0])
        ped = iz.make_pedestrian(pos, seed=3, speed_mps=2.0)
        assert len(ped.scatterers) == 27
        total = sum(abs(s.reflectivity) ** 2 for s in ped.scatterers)
        assert total == pytest.approx(1.0)
        for s in ped.scatterers:
            offset = s.position_m - pos
            assert np.all(np.abs(offset) <= np.array([0.25, 0.15, 0.9]) + 1e-12)
            # limb perturbations stay within +-1 m/s of the bulk speed
            assert abs(s.radial_velocity_mps - 2.0) <= 1.0 + 1e-12

    def test_pedestrian_seeded_determinism(self):
        pos = np.array([0.0, 20.0, 0.0])
        a = iz.make_pedestrian(pos, seed=3)
        b = iz.make_pedestrian(pos, seed=3)
        c = iz.make_pedestrian(pos, seed=4)
        assert all(
            np.array_equal(x.velocity_mps, y.velocity_mps)
            for x, y in zip(a.scatterers, b.scatterers)
        )
        assert any(
            not np.array_equal(x.velocity_mps, y.velocity_mps)
            for x, y in zip(a.scatterers, c.scatterers)
        )

    def test_car_rigid_motion_and_power(self):
        pos = np.array([25.0, 0.0, 0.0])
        car = iz.make_car(pos, seed=3, speed_mps=10.0, rcs_dbsm=10.0, count=64)
        assert len(car.scatterers) == 64
        total = sum(abs(s.reflectivity) ** 2 for s in car.scatterers)
        assert total == pytest.approx(10.0)
        for s in car.scatterers:
            np.testing.assert_allclose(s.velocity_mps, [10.0, 0.0, 0.0], atol=1e-12)

    def test_car_spans_many_range_bins(self):
        params = iz.WaveformParams()
        pos = np.array([25.0, 0.0, 0.0])
        car = iz.make_car(pos, seed=3, count=64)
        bins = {iz.delay_bin(s.range_m, params) for s in car.scatterers}
        # 4.4 m long axis pointed radially: about 4.4 / 0.0852 = 52 bins
        assert max(bins) - min(bins) >= 45

    def test_car_minimum_size(self):
        with pytest.raises(iz.ParameterError):
            iz.make_car(np.array([25.0, 0.0, 0.0]), count=3)


class TestScenarioLimits:
    def test_rejects_range_beyond_listening_window(self, ci_params):
        max_range = SPEED_OF_LIGHT_MPS * ci_params.samples_per_pri * ci_params.sample_period_s / 2
        sched = iz.build_schedule(iz.ScheduleKind.FMCW, ci_params)
        target = iz.point_target(np.array([max_range + 1.0, 0.0, 0.0]), np.zeros(3))
        with pytest.raises(iz.ScenarioError):
            iz.synthesize_echo(sched, [target], ci_params)

    def test_rejects_ambiguous_radial_speed(self, ci_params):
        v = ci_params.max_unambiguous_velocity_mps + 1.0
        sched = iz.build_schedule(iz.ScheduleKind.FMCW, ci_params)
        target = iz.point_target(np.array([10.0, 0.0, 0.0]), np.array([v, 0.0, 0.0]))
        with pytest.raises(iz.ScenarioError):
            iz.synthesize_echo(sched, [target], ci_params)

    def test_rejects_schedule_cpi_mismatch(self, ci_params, small_params):
        sched = iz.build_schedule(iz.ScheduleKind.FMCW, small_params)
        with pytest.raises(iz.ScenarioError):
            iz.synthesize_echo(sched, [], ci_params)

    def test_point_target_reflected_power_matches_rcs(self):
        t = iz.point_target(np.array([3.0, 4.0, 0.0]), np.zeros(3), rcs_dbsm=6.0)
        assert t.total_reflected_power() == pytest.approx(10.0 ** 0.6)
        assert t.scatterers[0].range_m == pytest.approx(5.0)
