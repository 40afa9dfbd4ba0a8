import math
from fractions import Fraction

import numpy as np
import pytest

from eisenzero.moebius import (
    BoundarySegment,
    CUSP_INFINITY,
    Cusp,
    ExtendedRational,
    INFINITY,
    RHO,
    UniModularMatrix,
    apply_moebius,
    boundary_weight,
    gamma_for_cusp,
    gamma_for_lambda,
    lambda_of,
    parse_extended_rational,
    random_matrix,
    reduce_to_fundamental,
    slash_representative,
)


class TestExtendedRational:
    def test_reduction_and_str(self):
        assert str(ExtendedRational(2, 4)) == "1/2"
        assert str(ExtendedRational(-3, -6)) == "1/2"
        assert str(ExtendedRational(0, 5)) == "0"
        assert str(INFINITY) == "inf"
        assert ExtendedRational(7, -3) == ExtendedRational(-7, 3)

    def test_parse(self):
        assert parse_extended_rational("2/5") == ExtendedRational(2, 5)
        assert parse_extended_rational("-7/3") == ExtendedRational(-7, 3)
        assert parse_extended_rational("inf") == INFINITY
        assert parse_extended_rational("0.5") == ExtendedRational(1, 2)
        assert parse_extended_rational("-0.4") == ExtendedRational(-2, 5)
        assert parse_extended_rational("3") == ExtendedRational(3)

    def test_order_and_abs(self):
        assert abs(ExtendedRational(-7, 3)) > 1
        assert ExtendedRational(1, 2) <= Fraction(1, 2)
        assert INFINITY > 10 ** 9
        assert -INFINITY is INFINITY

    def test_invalid(self):
        with pytest.raises(ValueError):
            ExtendedRational(0, 0)


class TestMatrices:
    def test_determinant_checked(self):
        with pytest.raises(ValueError):
            UniModularMatrix(1, 1, 1, 1)

    def test_lambda_of_identity(self):
        assert lambda_of(UniModularMatrix.identity()) == INFINITY

    def test_lambda_of_inversion(self):
        assert lambda_of(UniModularMatrix(0, -1, 1, 0)) == ExtendedRational(0)

    def test_gamma_for_lambda_examples(self):
        # frozen canonical representatives
        assert gamma_for_lambda(INFINITY) == UniModularMatrix.identity()
        assert gamma_for_lambda(ExtendedRational(0)) == UniModularMatrix(0, -1, 1, 0)
        g = gamma_for_lambda(ExtendedRational(2, 5))
        assert (g.a, g.b, g.c, g.d) == (2, -1, 5, -2)

    def test_round_trip_systematic(self):
        for p in range(-12, 13):
            for q in range(1, 9):
                lam = ExtendedRational(p, q)
                gamma = gamma_for_lambda(lam)
                assert gamma.c > 0
                assert lambda_of(gamma) == lam

    def test_round_trip_random_matrices(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            gamma = random_matrix(rng)
            lam = lambda_of(gamma)
            assert lambda_of(gamma_for_lambda(lam)) == lam

    def test_slash_representative_sign(self):
        g = slash_representative(ExtendedRational(2, 5))
        assert g.c < 0 and lambda_of(g) == ExtendedRational(2, 5)
        assert slash_representative(INFINITY) == UniModularMatrix.identity()

    def test_gamma_for_cusp(self):
        for text in ("0", "1/2", "-7/3", "5"):
            alpha = parse_extended_rational(text)
            g = gamma_for_cusp(alpha)
            assert apply_moebius(g, CUSP_INFINITY) == Cusp(alpha)


class TestMoebiusAction:
    def test_fixed_point_of_inversion(self):
        S = UniModularMatrix.inversion()
        assert abs(apply_moebius(S, 1j) - 1j) < 1e-15

    def test_translation(self):
        T = UniModularMatrix.translation(1)
        assert apply_moebius(T, 0.25 + 2j) == 1.25 + 2j

    def test_frozen_example(self):
        g = UniModularMatrix(2, -1, 5, -2)
        # (2i-1)/(5i-2) = (12+i)/29 by direct complex arithmetic
        assert abs(apply_moebius(g, 1j) - (12 + 1j) / 29) < 1e-15

    def test_composition(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            g1, g2 = random_matrix(rng), random_matrix(rng)
            tau = complex(rng.uniform(-2, 2), rng.uniform(0.2, 3))
            lhs = apply_moebius(g1 * g2, tau)
            rhs = apply_moebius(g1, apply_moebius(g2, tau))
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_cusp_action(self):
        S = UniModularMatrix.inversion()
        assert apply_moebius(S, CUSP_INFINITY) == Cusp(ExtendedRational(0))
        assert apply_moebius(S, Cusp(ExtendedRational(0))) == CUSP_INFINITY


class TestReduction:
    def test_one_translation(self):
        z, gamma = reduce_to_fundamental(1 + 1j)
        assert abs(z - 1j) < 1e-15
        assert (gamma.a, gamma.b, gamma.c, gamma.d) == (1, -1, 0, 1)

    def test_already_interior(self):
        z, gamma = reduce_to_fundamental(2j)
        assert z == 2j and gamma == UniModularMatrix.identity()

    def test_postcondition_oracle(self):
        z, gamma = reduce_to_fundamental(0.1 + 0.1j)
        assert abs(z) >= 1 - 1e-12
        assert abs(z.real) <= 0.5 + 1e-12
        assert abs(apply_moebius(gamma, 0.1 + 0.1j) - z) < 1e-10

    def test_random_points(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            tau = complex(rng.uniform(-8, 8), math.exp(rng.uniform(-4, 2)))
            z, gamma = reduce_to_fundamental(tau)
            assert abs(z) >= 1 - 1e-12
            assert abs(z.real) <= 0.5 + 1e-12
            image = apply_moebius(gamma, tau)
            assert abs(image - z) <= 1e-10 * max(1.0, abs(z))

    def test_boundary_tie_break(self):
        z, _ = reduce_to_fundamental(0.5 + 1.3j)
        assert z.real == pytest.approx(-0.5)


class TestWeights:
    def test_corners(self):
        assert boundary_weight(RHO) == Fraction(1, 6)
        assert boundary_weight(RHO + 1) == Fraction(1, 6)

    def test_boundary_and_interior(self):
        assert boundary_weight(1j) == Fraction(1, 2)
        assert boundary_weight(-0.5 + 1.7j) == Fraction(1, 2)
        assert boundary_weight(2j) == Fraction(1)
        assert boundary_weight(CUSP_INFINITY) == Fraction(1)

    def test_outside_raises(self):
        with pytest.raises(ValueError):
            boundary_weight(0.4 + 0.5j)

    def test_mirror_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            x = rng.uniform(0, 0.5)
            y = rng.uniform(0.87, 3.0)
            tau = complex(x, y)
            if abs(tau) < 1:
                continue
            assert boundary_weight(tau) == boundary_weight(complex(-x, y))


class TestSegments:
    def test_arc_endpoints(self):
        seg = BoundarySegment("C")
        assert abs(seg.point(0.0) - RHO) < 1e-15
        assert abs(seg.point(1.0) - (RHO + 1)) < 1e-15

    def test_vertical_orientation(self):
        seg = BoundarySegment("R", top_height=5.0)
        assert seg.point(0.0).imag < seg.point(1.0).imag
        seg = BoundarySegment("L", top_height=5.0)
        assert seg.point(0.0).imag > seg.point(1.0).imag
