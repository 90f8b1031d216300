import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from rieszbounds import analytic as an
from rieszbounds.errors import InvalidInputError, PrecisionWarning
from rieszbounds.spectra import NodeSet, PeriodicSpectrum, roots_of_unity

Z = PeriodicSpectrum(roots_of_unity(1))


def random_spectrum(seed, K, min_sep=0.05):
    rng = np.random.default_rng(seed)
    while True:
        th = NodeSet(rng.random(K))
        sp = PeriodicSpectrum(th)
        if sp.separation >= min_sep:
            return sp


class TestPoissonKernel:
    T = np.linspace(-0.5, 0.5, 32)
    Y = np.geomspace(0.05, 4, 8)

    def test_against_truncated_sum(self):
        for y in self.Y:
            closed = an.poisson_kernel_periodic(self.T, y)
            direct = an.poisson_kernel_direct(self.T, y)
            tail = an.poisson_tail_bound(self.T, y)
            assert np.all(np.abs(closed - direct) <= tail + 1e-12 * closed)

    @pytest.mark.parametrize("P", [0.5, 3.0])
    def test_other_periods(self, P):
        t = np.linspace(-P / 2, P / 2, 9)
        closed = an.poisson_kernel_periodic(t, 0.4, P)
        direct = an.poisson_kernel_direct(t, 0.4, P, terms=20_000)
        assert np.all(np.abs(closed - direct) <= an.poisson_tail_bound(t, 0.4, P, 20_000) + 1e-12)

    @pytest.mark.parametrize("y", [0.1, 0.5, 2.0])
    def test_t_zero(self, y):
        q = math.exp(-2 * math.pi * y)
        assert an.poisson_kernel_periodic(0.0, y) == pytest.approx(
            math.pi * (1 - q * q) / (1 - q) ** 2, rel=1e-13)

    @pytest.mark.parametrize("y", [2.0, 2.5, 4.0, 8.0])
    def test_uniform_limit(self, y):
        v = an.poisson_kernel_periodic(self.T, y)
        assert np.all(np.abs(v - math.pi) <= 6 * math.pi * math.exp(-2 * math.pi * y))

    def test_sup(self):
        y = 0.3
        assert an.poisson_kernel_sup(y) == pytest.approx(an.poisson_kernel_periodic(0.0, y))

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            an.poisson_kernel_periodic(0.0, 0.0)
        with pytest.raises(InvalidInputError):
            an.poisson_kernel_periodic(0.0, 1.0, -1)

    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 2), st.sampled_from([1.0, 2.0, 5.0]))
    @settings(max_examples=40, deadline=None)
    def test_integral_matches_quadrature(self, a, b, y, P):
        ref, _ = integrate.quad(lambda t: an.poisson_kernel_periodic(t, y, P), a, b, limit=200)
        assert an.kernel_integral(a, b, y, P) == pytest.approx(ref, abs=1e-9)

    def test_full_period_mass(self):
        assert an.kernel_integral(0.3, 3.3, 0.7, 3.0) == pytest.approx(math.pi)


class TestWeight:
    @pytest.mark.parametrize("y", [0.05, 0.3, 1.0])
    def test_single_factor(self, y):
        q = math.exp(-2 * math.pi * y)
        w = an.periodic_weight(Z, y)
        assert np.all(w.samples > 0)
        assert w.samples[0] == pytest.approx((1 - q) ** 2, rel=1e-12)
        assert w.samples[w.grid_size // 2] == pytest.approx((1 + q) ** 2, rel=1e-12)
        m, M = an.weight_extrema(w)
        assert m == pytest.approx((1 - q) ** 2, abs=1e-8)
        assert M == pytest.approx((1 + q) ** 2, abs=1e-8)
        assert m / M == pytest.approx(((1 - q) / (1 + q)) ** 2, rel=1e-8)

    @given(st.integers(0, 10**6), st.integers(1, 12), st.floats(0.01, 3))
    @settings(max_examples=30, deadline=None)
    def test_positive(self, seed, K, y):
        w = an.periodic_weight(random_spectrum(seed, K, 1e-3), y, 256)
        assert np.all(w.samples > 0)

    def test_constant_grid(self):
        w = an.WeightGrid(1.0, np.full(256, 3.0))
        assert an.weight_extrema(w) == (3.0, 3.0)

    def test_grid_validation(self):
        with pytest.raises(InvalidInputError):
            an.WeightGrid(1.0, np.ones(300))
        with pytest.raises(InvalidInputError):
            an.WeightGrid(1.0, np.ones(128))
        with pytest.raises(InvalidInputError):
            an.WeightGrid(1.0, -np.ones(256))
        with pytest.raises(InvalidInputError):
            an.periodic_weight(Z, 0.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_refinement_never_worsens(self, seed):
        sp = random_spectrum(seed, 5)
        prev_raw = prev = None
        for n in (256, 512, 1024, 2048):
            w = an.periodic_weight(sp, 0.4, n)
            raw = an.weight_extrema(w, refine=False)
            ref = an.weight_extrema(w)
            assert ref[0] <= raw[0] and ref[1] >= raw[1]
            if prev is not None:
                assert raw[0] <= prev_raw[0] and raw[1] >= prev_raw[1]
                assert ref[0] <= prev[0] * (1 + 1e-12) and ref[1] >= prev[1] * (1 - 1e-12)
            prev_raw, prev = raw, ref

    def test_stable_extrema(self):
        sp = random_spectrum(1, 4)
        m, M = an.stable_weight_extrema(sp, 0.5)
        x = np.linspace(0, sp.period, 200_001)
        w = an.periodic_weight(sp, 0.5).func(x)
        assert m <= w.min() * (1 + 1e-9) and M >= w.max() * (1 - 1e-9)


class TestA2:
    def test_constant(self):
        assert an.a2_constant(an.WeightGrid(2.0, np.full(1024, 7.5)), 4.0) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("n", [256, 1024, 4096])
    def test_step_weight(self, n):
        s = np.where(np.arange(n) < n // 2, 1.0, 4.0)
        assert an.a2_constant(an.WeightGrid(1.0, s)) == pytest.approx(25 / 16, abs=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_monotone_and_at_least_one(self, seed):
        rng = np.random.default_rng(seed)
        w = an.WeightGrid(1.0, np.exp(rng.normal(size=512)))
        vals = [an.a2_constant(w, s) for s in (1 / 64, 1 / 8, 0.5, 1, 2, 4)]
        assert vals[0] >= 1 - 1e-12
        assert np.all(np.diff(vals) >= 0)

    def test_brute_force(self):
        rng = np.random.default_rng(5)
        s = np.exp(rng.normal(size=256))
        w = an.WeightGrid(1.0, s)
        h = 1 / 256
        ext = np.concatenate([s, s, s[:1]])
        best = 0
        for L in (1, 2, 4, 8, 16, 32, 64, 128, 256):
            for i in range(256):
                seg = ext[i:i + L + 1]
                iw = np.trapezoid(seg, dx=h)
                ii = np.trapezoid(1 / seg, dx=h)
                best = max(best, iw * ii / (L * h) ** 2)
        assert an.a2_constant(w) == pytest.approx(best, rel=1e-12)


class TestPhase:
    def test_integer_lattice(self):
        ph = an.phase_alpha(Z, 1.0)
        assert ph.samples[0] == 0
        assert abs(ph.end_value) < 1e-8

    @given(st.integers(0, 10**6), st.integers(1, 8), st.floats(0.05, 2))
    @settings(max_examples=20, deadline=None)
    def test_full_period(self, seed, K, y):
        assert abs(an.phase_alpha(random_spectrum(seed, K, 1e-3), y, 512).end_value) < 1e-8

    @pytest.mark.parametrize("seed", range(4))
    def test_simpson_against_closed_form(self, seed):
        sp = random_spectrum(seed, 6)
        ph = an.phase_alpha(sp, 0.3, 1024)
        assert np.abs(ph.samples - an.phase_alpha_exact(sp, 0.3, ph.x)).max() < 1e-9

    def test_against_quadrature_of_direct_sum(self):
        sp = random_spectrum(9, 3)
        y = 0.5
        ph = an.phase_alpha(sp, y, 256)
        pts = sp.points(-3000, 3000)
        f = lambda t: np.sum(y / ((t - pts) ** 2 + y * y))
        for i in (17, 100, 255):
            x = ph.x[i]
            ref = 2 * integrate.quad(f, 0, x, limit=200, points=pts[(pts > 0) & (pts < x)])[0] - 2 * math.pi * x
            # truncation removes mass ~ 2 y x / 3000 per side
            assert ph.samples[i] == pytest.approx(ref, abs=2e-3)

    def test_shift_identity(self):
        n = 4096
        k = 1024
        c = k / n
        a0 = an.phase_alpha(Z, 0.8, n).samples
        ac = an.phase_alpha(PeriodicSpectrum(NodeSet([c])), 0.8, n).samples
        idx = np.arange(n)
        np.testing.assert_allclose(ac, a0[(idx - k) % n] - a0[(-k) % n], atol=1e-10)

    def test_symmetric_spectrum_is_odd(self):
        sp = PeriodicSpectrum(NodeSet([0, 0.2, 0.8]))
        ph = an.phase_alpha(sp, 0.4, 1024)
        a = ph.samples
        np.testing.assert_allclose(a[1:][::-1], -a[1:], atol=1e-6)

    def test_bad_panels(self):
        with pytest.raises(InvalidInputError):
            an.phase_alpha(Z, 1.0, 256, panels_per_cell=3)


def tau_brute(mu, y, x, R=20_000):
    d = len(mu)
    n = np.arange(-R * d, R * d)
    m = np.asarray(mu)[n % d]
    return np.sum(np.arctan((x + m - n) / y) - np.arctan((x - n) / y))


class TestTau:
    def test_zero(self):
        assert an.tau_sup(4, np.zeros(4), 0.5) == 0

    def test_profile_against_brute_force(self):
        rng = np.random.default_rng(2)
        mu = rng.uniform(-0.4, 0.4, 5)
        for x in (0.0, 0.37, 2.9):
            got = an.tau_profile(mu, 0.6, np.array([x]))[0]
            assert got == pytest.approx(tau_brute(mu, 0.6, x), abs=1e-4)

    @pytest.mark.parametrize("c", [-0.2, 0.1, 0.24])
    def test_constant_shift_large_y(self, c):
        assert an.tau_sup(1, [c], 10.0) == pytest.approx(math.pi * abs(c), abs=1e-3)
        assert an.tau_sup(3, [c] * 3, 10.0) == pytest.approx(math.pi * abs(c), abs=1e-3)

    @given(st.integers(0, 10**6), st.integers(1, 12), st.floats(0.05, 3))
    @settings(max_examples=25, deadline=None)
    def test_kernel_bound(self, seed, d, y):
        mu = np.random.default_rng(seed).uniform(-0.3, 0.3, d)
        L = np.abs(mu).max()
        assert an.tau_sup(d, mu, y, 1024) <= an.tau_kernel_bound(L, y) + 1e-8

    @pytest.mark.parametrize("seed", range(5))
    def test_sign_flip_equals_reversed_pattern(self, seed):
        mu = np.random.default_rng(seed).uniform(-0.3, 0.3, 6)
        rev = mu[(-np.arange(6)) % 6]
        assert an.tau_sup(6, -mu, 0.4) == pytest.approx(an.tau_sup(6, rev, 0.4), abs=1e-10)

    @pytest.mark.parametrize("seed", range(5))
    def test_sign_flip_even_for_symmetric_patterns(self, seed):
        mu = np.random.default_rng(seed).uniform(-0.3, 0.3, 7)
        mu = 0.5 * (mu + mu[(-np.arange(7)) % 7])
        assert an.tau_sup(7, -mu, 0.4) == pytest.approx(an.tau_sup(7, mu, 0.4), abs=1e-10)

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            an.tau_sup(3, [0.1, 0.2], 1.0)


class TestCounting:
    def test_integer_lattice_residual(self):
        grid, r = an.counting_diagnostic(Z, 1.0, 16.0, 4096)
        assert r < 1e-2

    def test_steps_at_spectrum_points(self):
        sp = PeriodicSpectrum(NodeSet([0.1, 0.55, 0.7]))
        pts = sp.points(-5, 5)
        jumps = an.counting_function(sp, pts) - an.counting_function(sp, pts - 1e-9)
        assert np.all(jumps == 1)
        assert an.counting_function(sp, np.array([0.0]))[0] == 0
        # generators 0.3, 1.65, 2.1 with period 3
        first_pos = pts[pts >= 0][0]
        last_neg = pts[pts < 0][-1]
        assert an.counting_function(sp, np.array([first_pos]))[0] == 1
        assert an.counting_function(sp, np.array([last_neg - 1e-9]))[0] == -1
        assert an.counting_function(sp, np.array([last_neg]))[0] == 0

    def test_psi_bounded(self):
        sp = random_spectrum(3, 4)
        grid, _ = an.counting_diagnostic(sp, 1.0, 16.0, 1024)
        assert np.abs(grid.psi).max() <= 2 * math.pi * (sp.period + 1)
        assert grid.x[0] == pytest.approx(-16) and grid.x[-1] == pytest.approx(16)

    def test_window_too_small(self):
        with pytest.raises(InvalidInputError):
            an.counting_diagnostic(random_spectrum(0, 5), 1.0, 16.0)

    def test_poisson_of_psi_against_quadrature(self):
        sp = PeriodicSpectrum(NodeSet([0.0, 0.4]))
        W, y = 8.0, 0.7
        pts = sp.points(-W, W)
        for x in (0.0, 1.3):
            def f(t):
                n = an.counting_function(sp, np.array([t]))[0]
                return 2 * math.pi * (t - n) * y / math.pi / ((t - x) ** 2 + y * y)
            inside = integrate.quad(f, -W, W, points=pts, limit=500)[0]
            got = an._poisson_of_psi(sp, y, W, np.array([x]))[0]
            mean = 2 * math.pi * (sp.generators.sum() / 2 - 1)
            outside = mean * (1 - (math.atan((W - x) / y) + math.atan((W + x) / y)) / math.pi)
            assert got == pytest.approx(inside + outside, abs=1e-8)


class TestPhiDecay:
    def test_squared_sum_chain(self):
        r2, r3 = an.phi_decay_check(2), an.phi_decay_check(3)
        assert r2.S <= 8 / math.pi**2 and r3.S <= 8 / math.pi**3
        assert r2.ok and r3.ok

    @pytest.mark.parametrize("L", [2, 3, 4])
    def test_phi_values(self, L):
        assert np.sinc(0.0 / L) ** L == 1
        k = np.array([1, 2, 3, -1, -2])
        assert np.all(np.abs(np.sinc(k * L / L) ** L) < 1e-15)

    @pytest.mark.parametrize("L", [2, 3])
    def test_tail_dominates_truncation_change(self, L):
        sp = an.sharpness_spectrum(L)
        R = 1e4 * L
        lam = sp.points(-2 * R, 2 * R)
        full = np.sum(np.sinc(lam / L) ** (2 * L))
        r = an.phi_decay_check(L)
        assert -1e-15 * r.S <= full - r.S <= r.tail + 1e-15 * r.S

    def test_sharpness_spectrum(self):
        sp = an.sharpness_spectrum(2)
        assert sp.period == 8
        np.testing.assert_allclose(sp.generators, 2 + 0.5 * np.arange(8))

    @pytest.mark.parametrize("L", [1, 9, 2.5])
    def test_range(self, L):
        with pytest.raises(InvalidInputError):
            an.phi_decay_check(L)


def nu_brute(sp, y, x, R=4000):
    pts = sp.points(x - R, x + R)
    k0 = np.argmin(np.abs(pts - x))
    others = np.delete(pts, k0)
    return np.sum(np.log1p(-y * y / ((others - x) ** 2 + y * y)))


class TestNu:
    @pytest.mark.parametrize("seed", range(3))
    def test_against_brute_force(self, seed):
        sp = random_spectrum(seed, 5)
        x, nu = an.nu_profile(sp, 0.3, 64)
        for i in (0, 9, 40):
            assert nu[i] == pytest.approx(nu_brute(sp, 0.3, x[i]), abs=1e-4)

    def test_grid_point_on_spectrum(self):
        x, nu = an.nu_profile(Z, 0.2, 256)
        assert np.all(np.isfinite(nu))
        assert nu[0] == pytest.approx(nu_brute(Z, 0.2, 0.0), abs=1e-4)

    def test_integer_lattice_example(self):
        assert an.nu_bound_check(Z, 0.1) <= 2 * math.pi * 0.1 * 1.04
        assert an.nu_bound(1.0, 0.1) == pytest.approx(0.6535, abs=1e-4)

    def test_small_y(self):
        vals = [an.nu_bound_check(Z, y) for y in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert np.all(np.diff(vals) < 0) and vals[-1] < 1e-6

    @given(st.integers(0, 10**6), st.integers(1, 10), st.floats(0.01, 2))
    @settings(max_examples=25, deadline=None)
    def test_nonpositive_and_bounded(self, seed, K, y):
        sp = random_spectrum(seed, K)
        _, nu = an.nu_profile(sp, y, 512)
        assert np.all(nu <= 0)
        assert np.abs(nu).max() <= an.nu_bound(sp.separation, y) + 1e-6


class TestRefinement:
    def test_converges(self):
        value, n, ok = an.refine_until_stable(lambda n: 1.0 + 1.0 / n**3, 256)
        assert ok and value == pytest.approx(1.0, abs=1e-7)

    def test_warns_at_cap(self):
        with pytest.warns(PrecisionWarning):
            value, n, ok = an.refine_until_stable(lambda n: float(n), 256, max_grid=2048)
        assert not ok and n == 2048

    def test_tau_adaptive_matches_fixed(self):
        mu = np.random.default_rng(0).uniform(-0.2, 0.2, 4)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            a = an.tau_sup(4, mu, 0.5)
        assert a == pytest.approx(an.tau_sup(4, mu, 0.5, 2**16, adaptive=False), rel=1e-8)
