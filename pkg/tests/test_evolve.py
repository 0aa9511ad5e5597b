"""Evolution pipeline: closed-form oracles, cross-representation checks,
supershift and continuous-dependence experiments, analyticity probes.

Strongest oracle: the free-particle plane wave, Psi(t, x; e^{i kappa .})
= e^{i kappa x - i kappa^2 t}.  The oscillator plane-wave closed form

    Psi(t, x; kappa) = beta^{-1/2} exp(i alpha' x^2/(4 alpha)
                       - i alpha (kappa - x/(2 alpha))^2 / beta)

(alpha = sin(2t)/2, beta = cos(2t) for unit frequency) follows by a
Gaussian square completion and reduces to the free form as t -> 0; it is
cross-validated here against the quadrature itself.

Exact supershift distances (mpmath 60-digit closed-form combinations on
the grids below):
  free,     kappa=3, [0.1,0.5]x[-1,1] (5x9):   10.394027, 6.805639, 2.924525
  harmonic, kappa=2, [0.1,0.4]x[-1,1] (4x9):    2.910942, 1.448402, 0.657752
"""

import numpy as np
import pytest

from supershift_lab.contour_quad import epsilon_regularized_integral
from supershift_lab.errors import HorizonExceeded
from supershift_lab.evolve import (
    analyticity_probe,
    continuous_dependence_check,
    initial_limit_check,
    schrodinger_residual_field,
    supershift_combination_direct,
    supershift_experiment,
    wavefield,
    wavefunction,
)
from supershift_lab.initial_data import (
    combine_signals,
    constant_signal,
    default_weight,
    disk_samples,
    plane_wave,
    superosc_signal,
)

FREE_D = (10.394027, 6.805639, 2.924525)
HARM_D = (2.910942, 1.448402, 0.657752)


def free_plane(t, x, kappa):
    return np.exp(1j * kappa * x - 1j * kappa * kappa * t)


def harm_plane(t, x, kappa):
    al, be, ap = np.sin(2 * t) / 2, np.cos(2 * t), np.cos(2 * t)
    return np.exp(1j * ap * x * x / (4 * al) - 1j * al * (kappa - x / (2 * al)) ** 2 / be) / np.sqrt(be)


class TestWavefunction:
    def test_free_constant_is_constant(self, free_kernel):
        for t, x in ((0.2, 0.0), (0.9, 1.7)):
            assert abs(wavefunction(free_kernel, constant_signal(), t, x, 1e-10) - 1.0) < 1e-9

    def test_free_plane_wave_point(self, free_kernel):
        v = wavefunction(free_kernel, plane_wave(3.0), 0.5, 1.0, 1e-10)
        assert abs(v - np.exp(-1.5j)) < 1e-10

    def test_harmonic_plane_wave_closed_form(self, harmonic_kernel):
        for t, x, k in ((0.2, 0.0, 3.0), (0.3, 0.7, 2.0), (0.6, -1.0, 1.0)):
            v = wavefunction(harmonic_kernel, plane_wave(k), t, x, 1e-10)
            assert abs(v - harm_plane(t, x, k)) < 1e-9

    def test_electric_plane_wave_closed_form(self, electric_kernel):
        # for constant unit field the plane wave evolves as
        # e^{i beta + i x t alpha'} e^{i (k+alpha) x - i (k+alpha)^2 t}
        # with alpha = -t/2, t alpha' = -t/2, beta = -t^3/12; verified by
        # substitution into i dPsi/dt = -d2Psi/dx2 + x Psi
        for t, x, k in ((0.3, 0.0, 2.0), (0.5, 1.2, 3.0), (0.8, -0.7, 1.0)):
            al = -t / 2
            beta = -(t**3) / 12
            t_ap = -t / 2
            ref = np.exp(
                1j * (beta + x * t_ap) + 1j * (k + al) * x - 1j * (k + al) ** 2 * t
            )
            v = wavefunction(electric_kernel, plane_wave(k), t, x, 1e-10)
            assert abs(v - ref) < 1e-9

    def test_linearity(self, free_kernel):
        f1, f2 = plane_wave(2.0), plane_wave(-1.0)
        comb = combine_signals([(1.5, f1), (2j, f2)])
        t, x = 0.4, 0.6
        tol = 1e-10
        lhs = wavefunction(free_kernel, comb, t, x, tol)
        rhs = 1.5 * wavefunction(free_kernel, f1, t, x, tol) + 2j * wavefunction(
            free_kernel, f2, t, x, tol
        )
        assert abs(lhs - rhs) <= 10 * tol

    def test_horizon_enforced(self, harmonic_kernel):
        with pytest.raises(HorizonExceeded):
            wavefunction(harmonic_kernel, plane_wave(1.0), np.pi / 4 + 0.05, 0.0)

    def test_cross_representation_all_potentials(
        self, free_kernel, electric_kernel, harmonic_kernel, pt1_kernel
    ):
        # rotated value vs Gaussian-regularized real-line value at eps=1e-5
        from supershift_lab.contour_quad import GrowthWitness
        from supershift_lab.initial_data import HolomorphicSignal

        kappa, t, x = 2.0, 0.3, 0.4
        tol = 1e-6
        for kernel in (free_kernel, electric_kernel, harmonic_kernel, pt1_kernel):
            rot = wavefunction(kernel, plane_wave(kappa), t, x, tol)
            a0, _ = kernel.growth_imag(t, x)

            def integrand(y, kernel=kernel):
                y = np.asarray(y, dtype=complex)
                return kernel.gtilde(t, x, y) * np.exp(1j * kappa * y)

            f = HolomorphicSignal(
                eval=integrand,
                growth=GrowthWitness(a0 * 2.0, 0.0, "imag"),
                label="greens*planewave",
            )
            eps_val = epsilon_regularized_integral(
                f, kernel.a(t), x, 0.0, 1e-5, tol=1e-5
            )
            assert abs(eps_val - rot) <= 1e-4, kernel.potential.label()

    def test_truncated_equivalence_free(self, free_kernel):
        # imag-bounded initial datum on the free particle: symmetric
        # truncations approach the rotated value
        from supershift_lab.contour_quad import GrowthWitness, truncated_integral
        from supershift_lab.initial_data import HolomorphicSignal

        t, x = 0.4, 0.2
        rot = wavefunction(free_kernel, plane_wave(1.0), t, x, 1e-11)
        gt = free_kernel.gtilde(t, x, np.array([0j]))[0]
        f = HolomorphicSignal(
            eval=lambda y: gt * np.exp(1j * np.asarray(y, dtype=complex)),
            growth=GrowthWitness(abs(gt), 1.0, "imag"),
            label="gtilde*pw",
        )
        diffs = [
            abs(truncated_integral(f, free_kernel.a(t), x, r, r, tol=1e-10) - rot)
            for r in (10.0, 20.0, 40.0)
        ]
        assert diffs[2] < diffs[0]
        assert diffs[2] <= 5e-2


class TestWavefield:
    def test_degenerate_grid_matches_point(self, free_kernel):
        fld = wavefield(free_kernel, plane_wave(2.0), [0.3], [0.5], tol=1e-10)
        v = wavefunction(free_kernel, plane_wave(2.0), 0.3, 0.5, 1e-10)
        assert fld.values[0, 0] == v

    def test_free_grid_against_closed_form(self, free_kernel):
        ts = np.linspace(0.1, 1.0, 21)
        xs = np.linspace(-5.0, 5.0, 51)
        fld = wavefield(free_kernel, plane_wave(3.0), ts, xs, tol=1e-10)
        T, X = np.meshgrid(ts, xs, indexing="ij")
        err = np.abs(fld.values - free_plane(T, X, 3.0))
        assert err.max() <= 1e-8
        assert np.all(np.isfinite(fld.quad_errors))
        assert fld.quad_errors.max() <= 1e-10  # estimates within configured tol
        assert not fld.failures

    def test_panel_exhaustion_collected_not_raised(self, free_kernel):
        fld = wavefield(
            free_kernel, plane_wave(3.0), [0.2], [0.5], tol=1e-12, max_panels=2
        )
        assert len(fld.failures) == 1
        assert fld.quad_errors[0, 0] > 1e-12

    def test_pt_pole_margin_error_far_x(self, pt1_kernel):
        # the shifted line through x = 4.25 at the pi/8 sector angle passes
        # within the pole margin of i pi/2 scaled copies
        from supershift_lab.errors import DomainMarginError

        with pytest.raises(DomainMarginError):
            wavefunction(pt1_kernel, plane_wave(1.0), 0.3, 4.25, 1e-8)

    def test_grid_order_invariance(self, free_kernel):
        ts, xs = [0.2, 0.5], [-0.3, 0.8]
        fld = wavefield(free_kernel, plane_wave(2.0), ts, xs, tol=1e-10)
        for i, t in enumerate(ts):
            for j, x in enumerate(xs):
                assert fld.values[i, j] == wavefunction(
                    free_kernel, plane_wave(2.0), t, x, 1e-10
                )

    def test_threaded_equals_serial(self, free_kernel, monkeypatch):
        monkeypatch.setenv("SUPERSHIFT_THREADS", "4")
        ts, xs = np.linspace(0.2, 0.6, 3), np.linspace(-1, 1, 4)
        serial = wavefield(free_kernel, plane_wave(2.0), ts, xs, tol=1e-10, workers=1)
        threaded = wavefield(free_kernel, plane_wave(2.0), ts, xs, tol=1e-10, workers=4)
        assert np.array_equal(serial.values, threaded.values)

    def test_thread_cap_respected(self, free_kernel, monkeypatch):
        monkeypatch.setenv("SUPERSHIFT_THREADS", "1")
        fld = wavefield(
            free_kernel, plane_wave(2.0), [0.3], [0.1, 0.2], tol=1e-10, workers=8
        )
        assert fld.values.shape == (1, 2)


class TestResidualField:
    def test_free_plane_wave(self, free_kernel):
        h = 1e-3
        ts = 0.5 + h * np.arange(5)
        xs = 0.3 + h * np.arange(5)
        fld = wavefield(free_kernel, plane_wave(2.0), ts, xs, tol=1e-10)
        assert schrodinger_residual_field(fld, free_kernel) <= 1e-4

    def test_zero_field(self, free_kernel):
        from supershift_lab.evolve import WaveField

        fld = WaveField(
            ts=np.linspace(0.1, 0.2, 3),
            xs=np.linspace(0, 1, 3),
            values=np.zeros((3, 3), dtype=complex),
            quad_errors=np.zeros((3, 3)),
            potential="free",
            initial="zero",
            tol=1e-10,
        )
        assert schrodinger_residual_field(fld, free_kernel) == 0.0

    def test_pt_patch(self, pt1_kernel):
        h = 5e-3
        ts = 0.4 + h * np.arange(5)
        xs = 0.2 + h * np.arange(5)
        fld = wavefield(pt1_kernel, plane_wave(2.0), ts, xs, tol=1e-9)
        assert schrodinger_residual_field(fld, pt1_kernel) <= 1e-3

    def test_nonuniform_grid_rejected(self, free_kernel):
        from supershift_lab.evolve import WaveField

        fld = WaveField(
            ts=np.array([0.1, 0.2, 0.4]),
            xs=np.linspace(0, 1, 3),
            values=np.zeros((3, 3), dtype=complex),
            quad_errors=np.zeros((3, 3)),
            potential="free",
            initial="zero",
            tol=1e-10,
        )
        with pytest.raises(ValueError):
            schrodinger_residual_field(fld, free_kernel)


class TestInitialLimit:
    def test_free_constant_exact(self, free_kernel):
        rep = initial_limit_check(
            free_kernel, constant_signal(), np.linspace(-1, 1, 5), [1e-2, 1e-3], tol=1e-10
        )
        assert rep.final_error < 1e-8

    def test_free_plane_wave_rate(self, free_kernel):
        # |e^{-4it} - 1| ~ 4t for kappa = 2
        rep = initial_limit_check(
            free_kernel, plane_wave(2.0), np.linspace(-2, 2, 9), [1e-2, 1e-3, 1e-4]
        )
        assert rep.decreasing and rep.passed
        for t, e in zip(rep.t_values, rep.errors):
            assert abs(e - 4.0 * t) <= 0.1 * 4.0 * t + 1e-6

    def test_harmonic(self, harmonic_kernel):
        rep = initial_limit_check(
            harmonic_kernel, plane_wave(1.0), np.linspace(-2, 2, 9), [1e-2, 1e-3, 1e-4]
        )
        assert rep.decreasing and rep.final_error <= 1e-2


class TestSupershift:
    def test_free_true_values(self, free_kernel):
        rep = supershift_experiment(
            free_kernel,
            [10, 20, 40],
            3.0,
            np.linspace(0.1, 0.5, 5),
            np.linspace(-1, 1, 9),
            tol=1e-8,
        )
        assert rep.strictly_decreasing
        for d, ref in zip(rep.distances, FREE_D):
            assert abs(d - ref) <= 1e-4

    def test_harmonic_true_values(self, harmonic_kernel):
        rep = supershift_experiment(
            harmonic_kernel,
            [10, 20, 40],
            2.0,
            np.linspace(0.1, 0.4, 4),
            np.linspace(-1, 1, 9),
            tol=1e-8,
        )
        assert rep.strictly_decreasing
        for d, ref in zip(rep.distances, HARM_D):
            assert abs(d - ref) <= 1e-4

    def test_single_term_family_is_exact(self, free_kernel):
        # combination with the target frequency itself: distance 0 to tol
        rep = supershift_experiment(
            free_kernel, [1], 1.0, [0.3], [0.0, 0.5], tol=1e-10
        )
        # n=1, kappa=1: C_0 = 1, C_1 = 0, k_0 = 1 -> F_1 = e^{iz} exactly
        assert rep.distances[0] <= 1e-9

    def test_node_level_matches_direct_combination(self, free_kernel):
        a = wavefunction(free_kernel, superosc_signal(8, 3.0), 0.3, 0.5, 1e-10)
        b = supershift_combination_direct(free_kernel, 8, 3.0, 0.3, 0.5, 1e-10)
        # result-level rounding is amplified by 3^8 = 6561
        assert abs(a - b) <= 6561 * 1e-10

    def test_node_level_matches_direct_combination_harmonic(self, harmonic_kernel):
        a = wavefunction(harmonic_kernel, superosc_signal(6, 2.0), 0.25, 0.4, 1e-10)
        b = supershift_combination_direct(harmonic_kernel, 6, 2.0, 0.25, 0.4, 1e-10)
        assert abs(a - b) <= 2.0**6 * 1e-9


class TestAnalyticityProbe:
    def test_free_entire(self, free_kernel):
        v = analyticity_probe(free_kernel, 0.4, 0.3, [0, 1, 1j], 64, tol=1e-9)
        assert abs(v) <= 1e-8

    def test_degenerate_triangle(self, free_kernel):
        v = analyticity_probe(free_kernel, 0.4, 0.3, [1.0, 1.0, 1.0], 16, tol=1e-9)
        assert v == 0j

    def test_harmonic(self, harmonic_kernel):
        v = analyticity_probe(harmonic_kernel, 0.2, 0.5, [1, 2, 1 + 1j], 64, tol=1e-9)
        assert abs(v) <= 1e-6

    def test_vertex_count_checked(self, free_kernel):
        with pytest.raises(ValueError):
            analyticity_probe(free_kernel, 0.4, 0.3, [0, 1], 8)


class TestContinuousDependence:
    def test_identical_signals_give_zeros(self, free_kernel):
        pw = plane_wave(3.0)
        rep = continuous_dependence_check(
            free_kernel,
            pw,
            [pw, pw],
            [1, 2],
            default_weight(3.0),
            disk_samples(3.0),
            [0.2],
            [0.0, 0.5],
        )
        assert rep.metrics == [0.0, 0.0]
        assert rep.field_distances == [0.0, 0.0]

    def test_scaling_linearity(self, free_kernel):
        pw = plane_wave(3.0)
        fn = superosc_signal(8, 3.0)
        f10 = combine_signals([(10.0, fn), (-9.0, pw)], label="10*F - 9*pw")
        samples = disk_samples(2.0)
        t_grid, x_grid = [0.3], [0.0, 0.7]
        r1 = continuous_dependence_check(
            free_kernel, pw, [fn], [8], 8.0, samples, t_grid, x_grid
        )
        r10 = continuous_dependence_check(
            free_kernel, pw, [f10], [8], 8.0, samples, t_grid, x_grid
        )
        # F - pw scaled by 10 scales both columns by 10
        assert r10.metrics[0] == pytest.approx(10 * r1.metrics[0], rel=1e-9)
        assert r10.field_distances[0] == pytest.approx(
            10 * r1.field_distances[0], rel=1e-6
        )

    def test_ratio_stability_free(self, free_kernel):
        pw = plane_wave(3.0)
        approx = [superosc_signal(n, 3.0) for n in (10, 20, 40)]
        rep = continuous_dependence_check(
            free_kernel,
            pw,
            approx,
            [10, 20, 40],
            default_weight(3.0),
            disk_samples(3.0),
            np.linspace(0.1, 0.5, 5),
            np.linspace(-1, 1, 9),
            tol=1e-8,
        )
        assert all(m2 < m1 for m1, m2 in zip(rep.metrics, rep.metrics[1:]))
        assert rep.passed
        assert rep.stable_within <= 3.0
