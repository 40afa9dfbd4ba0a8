import math
from fractions import Fraction

import numpy as np
import pytest

from eisenzero.eisenstein import (
    AccuracyError,
    EvalMode,
    EvalParams,
    SeriesKind,
    SlashedSeries,
    bernoulli,
    derivative,
    eval_lattice,
    eval_series,
    eval_slashed,
    evaluate,
    fourier_constant,
    half_lattice,
    hat_eval,
    lattice_tail_estimate,
    radius_for_target,
    tail_bound,
    zeta_value,
)
from eisenzero.moebius import (
    CUSP_INFINITY,
    ExtendedRational,
    INFINITY,
    RHO,
    UniModularMatrix,
    apply_moebius,
    parse_extended_rational,
    slash_representative,
)

IDENT = UniModularMatrix.identity()


class TestBernoulli:
    def test_odd_vanish(self):
        for k in (3, 5, 7, 9, 23, 51):
            assert bernoulli(k) == 0

    def test_first_values(self):
        assert bernoulli(0) == 1
        assert bernoulli(1) == Fraction(-1, 2)
        assert bernoulli(2) == Fraction(1, 6)
        assert bernoulli(4) == Fraction(-1, 30)
        assert bernoulli(12) == Fraction(-691, 2730)

    def test_recurrence_holds(self):
        # sum over j of C(n+1, j) B_j == 0 for n >= 1
        for n in range(1, 30):
            acc = sum(math.comb(n + 1, j) * bernoulli(j) for j in range(n + 1))
            assert acc == 0


class TestZeta:
    def test_even_closed_forms(self):
        assert zeta_value(2) == pytest.approx(math.pi ** 2 / 6, abs=1e-15)
        assert zeta_value(4) == pytest.approx(math.pi ** 4 / 90, abs=1e-15)
        assert zeta_value(12) == pytest.approx(1.000246086553308048, abs=1e-15)

    def test_odd_values(self):
        # reference values from 40-digit summation
        assert zeta_value(3) == pytest.approx(1.2020569031595942854, abs=1e-14)
        assert zeta_value(5) == pytest.approx(1.0369277551433699263, abs=1e-14)
        assert zeta_value(101) == pytest.approx(1.0, abs=1e-14)

    def test_requires_k_at_least_2(self):
        with pytest.raises(ValueError):
            zeta_value(1)


class TestFourierConstant:
    def test_even_weights_are_real_integers(self):
        assert fourier_constant(4) == pytest.approx(240.0, rel=1e-12)
        assert fourier_constant(6) == pytest.approx(-504.0, rel=1e-12)
        assert fourier_constant(8) == pytest.approx(480.0, rel=1e-12)

    def test_odd_weights_are_imaginary(self):
        for k in (3, 5, 7, 23):
            c = fourier_constant(k)
            assert c.real == 0.0 and c.imag != 0.0

    def test_weight_one_vanishes(self):
        assert fourier_constant(1) == 0


class TestSeries:
    def test_constant_terms_at_cusp(self):
        assert eval_series("E", 23, CUSP_INFINITY).value == 1.0
        assert eval_series("GG", 23, CUSP_INFINITY).value == 0.0
        assert eval_series("GG", 1, CUSP_INFINITY).value == pytest.approx(0.25)
        assert eval_series("G", 5, CUSP_INFINITY).value == pytest.approx(zeta_value(5))

    def test_weight_four_vanishes_at_corner(self):
        # forced by the weight-4 transformation law at the order-3 point
        val = eval_series("E", 4, RHO)
        assert abs(val.value) < 1e-10

    def test_e1_is_constant(self):
        for tau in (1j, 0.3 + 0.8j, 5j):
            assert eval_series("E", 1, tau).value == 1.0

    def test_frozen_high_precision_values(self):
        # 40-digit q-expansion oracle values; the reported budget must cover
        # the true error
        tight = EvalParams(target_abs_err=1e-14)
        cases = [
            ("E", 7, 2j, 1.0 + 0.0018574135638822032481j),
            ("E", 23, 1j, 1.0 + 1.0004882926016490178j),
            ("GG", 23, 0.5 + 1.2j, -2.2215848117354 + 0j),
        ]
        for kind, k, tau, oracle in cases:
            res = eval_series(kind, k, tau, tight)
            assert abs(res.value - oracle) <= max(res.abs_err_bound, 1e-13)
            assert res.value == pytest.approx(oracle, abs=5e-13)

    def test_one_periodicity(self):
        rng = np.random.default_rng(5)
        for kind in ("E", "GG"):
            for _ in range(20):
                k = int(rng.choice([3, 5, 8, 23]))
                tau = complex(rng.uniform(-1, 1), rng.uniform(0.7, 3))
                a = eval_series(kind, k, tau).value
                b = eval_series(kind, k, tau + 1).value
                assert abs(a - b) < 1e-10 * max(1, abs(a))

    def test_gg_real_on_vertical_lines(self):
        for k in (3, 9, 23, 51):
            for t in np.linspace(0.87, 10, 12):
                for x in (0.5, -0.5):
                    v = eval_series("GG", k, complex(x, t)).value
                    assert abs(v.imag) <= 1e-10 * max(1.0, abs(v.real))


class TestLattice:
    def test_cross_oracle_with_series(self):
        v1 = eval_lattice("E", 7, 2j).value
        v2 = eval_series("E", 7, 2j).value
        assert abs(v1 - v2) < 1e-9

    def test_g_is_zeta_times_e(self):
        g = eval_lattice("G", 5, 1j).value
        e = eval_lattice("E", 5, 1j).value
        assert g == pytest.approx(zeta_value(5) * e, rel=1e-12)

    def test_four_term_remainder_at_i(self):
        # 40-digit oracle: |E_23(i) - four leading terms| = 1.1351649e-8
        from eisenzero.bounds import rsd_bound

        four = 1 + 1j ** -23 + (1j + 1) ** -23 + (1j - 1) ** -23
        val = eval_lattice("E", 23, 1j).value
        assert abs(val - four) < rsd_bound(23)
        assert abs(val - four) == pytest.approx(1.1351649e-8, rel=1e-4)

    def test_weight_two_rejected(self):
        with pytest.raises(ValueError):
            eval_lattice("E", 2, 2j)

    def test_cross_oracle_sweep(self):
        rng = np.random.default_rng(6)
        for k in range(5, 33, 2):
            for _ in range(5):
                tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.87, 2.0))
                a = eval_series("E", k, tau)
                b = eval_lattice("E", k, tau)
                assert abs(a.value - b.value) <= 2 * (a.abs_err_bound + b.abs_err_bound)


class TestSlashed:
    def test_identity_equals_series(self):
        for kind in ("E", "GG"):
            tau = 0.1 + 1.2j
            a = eval_slashed(kind, 23, IDENT, tau).value
            b = eval_series(kind, 23, tau).value
            assert abs(a - b) < 2e-10 * max(1, abs(a))

    def test_cusp_limit_is_one(self):
        # paper-sign representative (c < 0): f|gamma -> +1 at the cusp
        for lam in ("2/5", "1/2", "3", "-7/3"):
            g = slash_representative(parse_extended_rational(lam))
            val = eval_slashed("E", 23, g, 10j).value
            assert abs(val - 1.0) < 1e-3

    def test_slash_definition_cross_check(self):
        # (c tau + d)^{-k} E(gamma tau) via the independent lattice engine
        g = slash_representative(ExtendedRational(2, 5))
        for tau in (1j, 0.2 + 1.1j):
            lhs = eval_slashed("E", 23, g, tau).value
            gt = apply_moebius(g, tau)
            rhs = (g.c * tau + g.d) ** -23 * eval_lattice(
                "E", 23, gt, EvalParams(lattice_radius=4000)
            ).value
            assert abs(lhs - rhs) < 1e-10 * max(1, abs(lhs))

    def test_matrix_sign_flips_odd_weight(self):
        g = slash_representative(ExtendedRational(2, 5))
        a = eval_slashed("E", 23, g, 1j).value
        b = eval_slashed("E", 23, -g, 1j).value
        assert abs(a + b) < 1e-12 * max(1, abs(a))

    def test_even_weight_slash_is_modular(self):
        # E_k|gamma == E_k for even k: a strong identity test of the kernel
        g = slash_representative(ExtendedRational(3, 4))
        for tau in (0.3 + 1.1j, -0.2 + 0.95j):
            a = eval_slashed("E", 12, g, tau, EvalParams(lattice_radius=30000)).value
            b = eval_series("E", 12, tau).value
            assert abs(a - b) < 1e-8 * max(1, abs(b))

    def test_small_weight_routes_agree(self):
        g = slash_representative(ExtendedRational(2, 5))
        s_fourier = SlashedSeries("E", 9, g, EvalParams())
        assert s_fourier.route == "slash_fourier"
        s_lattice = SlashedSeries("E", 9, g, EvalParams(lattice_radius=200_000))
        s_lattice.route = "lattice"
        pts = np.array([0.3 + 1.1j, -0.41 + 0.95j, 0.5 + 2.3j, 8j])
        assert np.abs(s_fourier.values(pts) - s_lattice.values(pts)).max() < 1e-8


class TestHat:
    def test_even_weight_real_on_arc(self):
        for k in (4, 8, 12):
            for theta in (math.pi / 2, 1.3, 1.9):
                v = hat_eval("E", k, IDENT, theta).value
                assert abs(v.imag) < 1e-10 * max(1, abs(v))

    def test_odd_weight_not_real(self):
        v = hat_eval("E", 23, IDENT, math.pi / 2).value
        assert abs(v.imag) > 1e-8

    def test_rsd_decomposition(self):
        from eisenzero.bounds import rsd_bound

        for k in (5, 11, 23, 51):
            for theta in np.linspace(math.pi / 3, 2 * math.pi / 3, 7):
                v = hat_eval("E", k, IDENT, theta).value
                lead = (
                    2 * math.cos(k * theta / 2)
                    + (2 * math.cos(theta / 2)) ** -k
                    + (-1) ** ((k + 1) // 2) * 1j * (2 * math.sin(theta / 2)) ** -k
                )
                assert abs(v - lead) <= rsd_bound(k)

    def test_matches_plain_evaluation(self):
        for k, kind in ((23, "E"), (9, "GG"), (31, "GG")):
            theta = 1.4
            v = hat_eval(kind, k, IDENT, theta).value
            w = eval_series(kind, k, np.exp(1j * theta)).value
            assert abs(v - np.exp(0.5j * k * theta) * w) < 1e-9 * max(1, abs(v))

    def test_theta_range_enforced(self):
        with pytest.raises(ValueError):
            hat_eval("E", 23, IDENT, 0.5)


class TestDerivative:
    def test_constant_series_has_zero_derivative(self):
        assert derivative("E", 1, IDENT, 1j).value == 0

    def test_finite_difference_fourier(self):
        tau = 0.25 + 1.1j
        h = 1e-6
        d = derivative("E", 23, IDENT, tau).value
        fd = (eval_series("E", 23, tau + h).value - eval_series("E", 23, tau - h).value) / (2 * h)
        assert abs(d - fd) < 1e-4 * abs(d)

    def test_finite_difference_lattice(self):
        g = slash_representative(ExtendedRational(2, 5))
        tau = 0.2 + 1.05j
        h = 1e-6
        series = SlashedSeries("E", 23, g, EvalParams())
        d = series.derivative_values(np.array([tau]))[0]
        f = lambda z: series.values(np.array([z]))[0]
        fd = (f(tau + h) - f(tau - h)) / (2 * h)
        assert abs(d - fd) < 1e-4 * abs(d)

    def test_gg_derivative_small_at_height(self):
        d = derivative("GG", 23, IDENT, 8j).value
        assert abs(d) < 1e-20


class TestTailBounds:
    def test_power_law_scaling(self):
        for k in (11, 23, 51):
            r = tail_bound(k, 4 * 100.0) / tail_bound(k, 100.0)
            assert r == pytest.approx(4.0 ** ((3 - k) / 2), rel=1e-12)

    def test_monotone_in_radius(self):
        for k in (9, 23):
            vals = [tail_bound(k, m) for m in (5, 50, 500, 5000)]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_matches_paper_closed_bound(self):
        # at radius 5 the bound must undercut 6 sqrt(5) (5/2)^{-k/2}
        assert tail_bound(23, 5) <= 6 * math.sqrt(5) * 2.5 ** (-11.5)

    def test_small_k_rejected(self):
        with pytest.raises(ValueError):
            tail_bound(7, 100)

    def test_tail_dominates_brute_force(self):
        # omitted terms beyond radius m^2+n^2 = 25, summed to 10^6, for k=11
        ms, ns = half_lattice(0, 1, 10 ** 6, min_norm=26)
        rng = np.random.default_rng(7)
        taus = []
        while len(taus) < 20:
            x = rng.uniform(-0.5, 0.5)
            y = rng.uniform(0.85, 2.0)
            if x * x + y * y >= 1:
                taus.append(complex(x, y))
        from eisenzero._backend import pow_sum_batch

        sums = np.abs(pow_sum_batch(ms, ns, np.array(taus), 11))
        assert sums.max() <= tail_bound(11, 25)

    def test_radius_for_target(self):
        for k in (5, 9, 23):
            m = radius_for_target(k, 1e-10, 10 ** 6)
            if m < 10 ** 6:
                assert lattice_tail_estimate(k, m) <= 1e-10
                assert lattice_tail_estimate(k, max(25, m // 2)) >= 1e-10 or m == 25


class TestEvaluateDispatch:
    def test_auto_picks_q_expansion_high(self):
        v = evaluate("E", 23, 2j)
        assert v.abs_err_bound < 1e-10

    def test_accuracy_error_surfaces(self):
        with pytest.raises(AccuracyError):
            evaluate("E", 5, 0.3 + 0.05j, EvalParams(target_abs_err=1e-10,
                                                     mode=EvalMode.LATTICE))

    def test_cusp(self):
        assert evaluate("GG", 23, CUSP_INFINITY).value == 0.0
