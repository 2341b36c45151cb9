import math

import numpy as np
import pytest

from codilated.orthopoly import (
    CoDilation,
    ResidualKind,
    UltrasphericalParams,
    chebyshev_u_scheme,
    critical_constants,
    eval_monic,
    mu_recursive,
    numerator_scheme,
    power_basis_scheme,
    sup_bound_codilated,
    ultraspherical_scheme,
)
from codilated.zeros import find_polynomial_zeros, find_zeros, modulus_of_convergence

CHEB = chebyshev_u_scheme()
SYM = ResidualKind.SYMMETRIC
ASYM = ResidualKind.ASYMMETRIC


def limit_constant(scheme, m, n_max=3000):
    """L_m = lim P_n(1) / (P_{n-m}^{(m)}(1) P_m(1)) via stable mu-ratio products."""
    mus = mu_recursive(scheme, None, n_max)
    mus_num = mu_recursive(numerator_scheme(scheme, m), None, n_max)
    ratio = eval_monic(scheme, None, m, 1.0)  # P_n(1)/P_{n-m}^{(m)}(1) at n = m
    for n in range(m, n_max):
        ratio *= mus_num[n - m] / mus[n]
    return ratio / eval_monic(scheme, None, m, 1.0)


class TestFindZeros:
    def test_chebyshev_symmetric_full_set(self):
        # zeros of U_6 at cos(k pi / 7) map to y = (1 - cos(k pi / 7)) / 2
        report = find_zeros(CHEB, None, SYM, 6)
        expected = np.sort([(1 - math.cos(k * math.pi / 7)) / 2 for k in range(1, 7)])
        assert report.zeros.size == 6
        assert np.max(np.abs(report.zeros - expected)) < 1e-10
        assert report.smallest == pytest.approx((1 - math.cos(math.pi / 7)) / 2, abs=1e-10)

    def test_monic_t_smallest_zeros(self):
        # lam = 2 gives monic T_n with zeros at cos((2k-1) pi / (2n))
        for n, angle in [(7, math.pi / 14), (6, math.pi / 12)]:
            report = find_zeros(CHEB, CoDilation(1, 2.0), SYM, n)
            assert report.zeros.size == n
            assert report.smallest == pytest.approx((1 - math.cos(angle)) / 2, abs=1e-10)

    def test_report_structure(self):
        report = find_zeros(CHEB, CoDilation(1, 1.5), SYM, 9)
        assert report.degree == 9
        assert report.lam == 1.5
        assert np.all(np.diff(report.zeros) > 0)
        assert report.smallest == report.zeros[0]
        assert report.zeros.size <= report.degree

    def test_asymmetric_chebyshev_against_closed_form(self):
        # zeros of aR_n are y = sin^2(k pi / (2n+1)), k = 1..n
        n = 10
        report = find_zeros(CHEB, None, ASYM, n)
        expected = np.sort([math.sin(k * math.pi / (2 * n + 1)) ** 2 for k in range(1, n + 1)])
        assert report.zeros.size == n
        assert np.max(np.abs(report.zeros - expected)) < 1e-10

    def test_asymmetric_smallest_zero_ordering(self):
        scheme = ultraspherical_scheme(UltrasphericalParams(1.0))
        loose = find_zeros(scheme, CoDilation(1, 1.0), ASYM, 20)
        tight = find_zeros(scheme, CoDilation(1, 1.5), ASYM, 20)
        assert tight.smallest < loose.smallest

    def test_fewer_roots_beyond_critical(self):
        report = find_zeros(CHEB, CoDilation(1, 2.6), SYM, 40)
        assert report.zeros.size < 40

    def test_rejects_degree_zero(self):
        with pytest.raises(ValueError):
            find_zeros(CHEB, None, SYM, 0)


class TestPolynomialZeros:
    def test_chebyshev_zeros(self):
        report = find_polynomial_zeros(CHEB, None, 8)
        expected = np.sort([math.cos(k * math.pi / 9) for k in range(1, 9)])
        assert np.max(np.abs(report.zeros - expected)) < 1e-12

    def test_chebyshev_limit_constants(self):
        # the numerator family of U is U itself, so L_m = 1/(m+1)
        for m in (1, 2, 3):
            assert limit_constant(CHEB, m) == pytest.approx(1 / (m + 1), abs=1e-3)

    def test_extremal_zero_monotonicity(self):
        # largest zero grows and smallest shrinks as the dilation increases,
        # for dilations up to the m-dependent critical value 1/(1 - L_m)
        for nu in (1.0, 1.5):
            scheme = ultraspherical_scheme(UltrasphericalParams(nu))
            for m in (1, 2, 3):
                crit = 1.0 / (1.0 - limit_constant(scheme, m)) - 1e-6
                for n in (5, 25, 60):
                    prev = None
                    for lam in (0.5, 1.0, 0.5 * (1 + crit), crit):
                        zr = find_polynomial_zeros(scheme, CoDilation(m, lam), n)
                        assert zr.zeros.size == n
                        if prev is not None:
                            assert zr.zeros[-1] >= prev[-1] - 1e-12
                            assert zr.zeros[0] <= prev[0] + 1e-12
                        prev = zr.zeros

    def test_zeros_coincide_up_to_dilation_index(self):
        scheme = ultraspherical_scheme(UltrasphericalParams(1.0))
        for n in (1, 2, 3):
            dilated = find_polynomial_zeros(scheme, CoDilation(3, 1.8), n)
            plain = find_polynomial_zeros(scheme, None, n)
            assert np.max(np.abs(dilated.zeros - plain.zeros)) < 1e-12

    def test_interlacing_for_first_index_dilation(self):
        # lower half: x*_j < x_j < x*_{j+1}; upper half: x*_{j-1} < x_j < x*_j
        for nu in (1.0, 2.0):
            scheme = ultraspherical_scheme(UltrasphericalParams(nu))
            for lam in (1.3, 1.9):
                for n in (8, 9, 30):
                    x = find_polynomial_zeros(scheme, None, n).zeros
                    xs = find_polynomial_zeros(scheme, CoDilation(1, lam), n).zeros
                    assert x.size == xs.size == n
                    for j in range(1, n // 2 + 1):
                        assert xs[j - 1] < x[j - 1] < xs[j]
                    for j in range(math.ceil(n / 2) + 1, n + 1):
                        assert xs[j - 2] < x[j - 1] < xs[j - 1]


class TestInteriorZeros:
    @pytest.mark.parametrize("nu", [1.0, 2.0])
    def test_inside_at_critical(self, nu):
        params = UltrasphericalParams(nu)
        scheme = ultraspherical_scheme(params)
        crit = critical_constants(params).lambda_critical
        dil = CoDilation(1, crit)
        # positivity at x = 1 for every degree; monic symmetric polynomials
        # then cannot have roots outside (-1, 1)
        assert all(eval_monic(scheme, dil, n, 1.0) > 0.0 for n in range(1, 201))
        for n in (10, 50, 200):
            zr = find_polynomial_zeros(scheme, dil, n)
            assert zr.zeros.size == n
            assert zr.zeros[0] > -1.0 and zr.zeros[-1] < 1.0

    @pytest.mark.parametrize("nu", [1.0, 2.0])
    def test_escape_beyond_critical(self, nu):
        params = UltrasphericalParams(nu)
        scheme = ultraspherical_scheme(params)
        crit = critical_constants(params).lambda_critical
        dil = CoDilation(1, crit + 0.05)
        assert any(eval_monic(scheme, dil, n, 1.0) <= 0.0 for n in range(1, 201))


class TestModulus:
    def test_s_zero_at_least_one(self):
        for kind in (SYM, ASYM):
            assert modulus_of_convergence(CHEB, None, kind, 9, 0.0) >= 1.0

    def test_landweber_plain_weight_dominated_at_one(self):
        # sup |y (1-2y)^n| sits at y = 1: the symmetric weight is the point
        val = modulus_of_convergence(power_basis_scheme(), None, SYM, 8, 2.0)
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_landweber_symmetric_weight_against_dense_grid(self):
        n, s = 8, 2.0
        val = modulus_of_convergence(power_basis_scheme(), None, SYM, n, s, symmetric_weight=True)
        y = np.linspace(0.0, 1.0, 2_000_001)
        dense = np.max(y * (1 - y) * np.abs((1 - 2 * y) ** n))
        assert val == pytest.approx(dense, rel=1e-8)
        assert val >= dense - 1e-12

    def test_chebyshev_symmetric_modulus_within_bound(self):
        # epsilon_1^S(n) <= (1 + |1-lam|)/(2-lam) / (n-1)
        for lam in (0.0, 1.0, 1.5):
            dil = None if lam == 1.0 else CoDilation(1, lam)
            for n in (8, 16, 32):
                val = modulus_of_convergence(CHEB, dil, SYM, n, 1.0, symmetric_weight=True)
                assert val <= (1 + abs(1 - lam)) / (2 - lam) / (n - 1) + 1e-12

    def test_refinement_never_below_grid(self):
        scheme = ultraspherical_scheme(UltrasphericalParams(2.0))
        val = modulus_of_convergence(scheme, CoDilation(1, 3.0), ASYM, 16, 2.0)
        assert val > 0.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            modulus_of_convergence(CHEB, None, SYM, 0, 1.0)
        with pytest.raises(ValueError):
            modulus_of_convergence(CHEB, None, SYM, 3, -1.0)


class TestSupBoundCompliance:
    def test_sampled_values_never_exceed_bound(self):
        xs = np.linspace(-1.0, 1.0, 401)
        for nu in (0.75, 1.0, 2.0):
            params = UltrasphericalParams(nu)
            scheme = ultraspherical_scheme(params)
            for lam in (-1.0, 0.5, 1.0, 1.0 + (2 * nu - 1) / 2, 1.9 * nu):
                bound = sup_bound_codilated(params, lam)
                dil = CoDilation(1, lam)
                for n in range(1, 26):
                    at_one = eval_monic(scheme, dil, n, 1.0)
                    vals = np.abs(eval_monic(scheme, dil, n, xs) / at_one)
                    assert np.max(vals) <= bound + 1e-9
