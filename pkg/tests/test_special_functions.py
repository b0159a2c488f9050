"""
Special function tests

Verifies:
1. Lanczos Gamma, log Gamma and Beta against scipy.special
2. Aubin integrals: closed form, quadrature, index recurrences and identities
3. Sphere volumes, critical exponent and the best Sobolev constant
4. Finite parts of truncated Aubin integrals
"""

import math

import numpy as np
import pytest
from scipy import special

from src.core.errors import DivergentIntegralError, DomainError
from src.numerics.special_functions import (AubinIndex, aubin_integral, aubin_quadrature, aubin_truncation_defect,
                                            best_sobolev_constant, beta, check_identities,
                                            check_recurrences, critical_exponent, gamma, log_gamma,
                                            sphere_volume)


class TestGamma:
    """Lanczos approximation"""

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 1.5, 2.5, 3.7, 7.0, 12.25, 30.0])
    def test_gamma_matches_scipy(self, x):
        """Gamma agrees with scipy on the positive axis"""
        assert gamma(x) == pytest.approx(special.gamma(x), rel=1e-12)

    @pytest.mark.parametrize("x", [-0.5, -1.5, -2.3])
    def test_gamma_reflection(self, x):
        """Negative non-integers go through the reflection formula"""
        assert gamma(x) == pytest.approx(special.gamma(x), rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, -3.0])
    def test_gamma_poles(self, x):
        """Non-positive integers are poles"""
        with pytest.raises(DomainError):
            gamma(x)

    @pytest.mark.parametrize("x", [0.05, 0.3, 1.0, 2.0, 4.5, 50.0, 170.5])
    def test_log_gamma(self, x):
        """log Gamma agrees with scipy.special.gammaln"""
        assert log_gamma(x) == pytest.approx(special.gammaln(x), rel=1e-12, abs=1e-13)

    def test_log_gamma_domain(self):
        """log Gamma needs x > 0"""
        with pytest.raises(DomainError):
            log_gamma(-1.0)

    def test_beta(self):
        """Beta agrees with scipy and rejects non-positive arguments"""
        assert beta(2.5, 3.5) == pytest.approx(special.beta(2.5, 3.5), rel=1e-12)
        with pytest.raises(DomainError):
            beta(0.0, 1.0)


class TestAubinIntegrals:
    """I_p^q = int t^q/(1+t)^p dt"""

    def test_closed_form_value(self):
        """I_6^3 = B(4, 2) = 1/20"""
        assert aubin_integral((6, 3)) == pytest.approx(0.05, rel=1e-13)
        assert aubin_integral(AubinIndex(6, 3)) == pytest.approx(0.05, rel=1e-13)

    def test_quadrature_matches_closed_form(self):
        """20 random convergent index pairs agree to 1e-8"""
        rng = np.random.default_rng(2024)
        for _ in range(20):
            q = rng.uniform(-0.5, 4.0)
            p = q + 1.0 + rng.uniform(0.5, 4.0)
            assert aubin_quadrature(p, q) == pytest.approx(aubin_integral((p, q)), rel=1e-8)

    def test_quadrature_with_endpoint_singularity(self):
        """Negative exponents use the algebraic weight"""
        assert aubin_quadrature(1.5, -0.5) == pytest.approx(aubin_integral((1.5, -0.5)), rel=1e-8)

    @pytest.mark.parametrize("p, q", [(2.0, 1.0), (1.0, 0.5), (3.0, -1.0), (3.0, -1.5)])
    def test_divergent_indices(self, p, q):
        """p - q - 1 <= 0 or q <= -1 diverge"""
        with pytest.raises(DivergentIntegralError):
            AubinIndex(p, q)

    def test_divergent_is_domain_error(self):
        """Divergence is reported as a domain error"""
        with pytest.raises(DomainError):
            aubin_integral((2.0, 1.0))

    @pytest.mark.parametrize("method", ["closed", "quadrature"])
    @pytest.mark.parametrize("p, q", [(6.0, 2.0), (7.5, 1.5), (5.0, 2.5)])
    def test_recurrences(self, p, q, method):
        """Both index-shift recurrences hold to 1e-10"""
        report = check_recurrences(p, q, method=method)
        assert report.first < 1e-10
        assert report.second < 1e-10
        assert report.passed

    @pytest.mark.parametrize("n", range(3, 11))
    def test_identities(self, n):
        """Sphere-volume and index identities hold for n = 3..10"""
        gaps = check_identities(n)
        assert "omega_recursion" in gaps and "shift_half" in gaps
        assert ("lowered_power" in gaps) == (n >= 5)
        assert max(gaps.values()) < 1e-10


class TestConstants:
    """Sphere volumes, 2# and K0"""

    def test_sphere_volumes(self):
        """omega_1 = 2 pi, omega_2 = 4 pi, omega_3 = 2 pi^2"""
        assert sphere_volume(1) == pytest.approx(2.0 * math.pi, rel=1e-13)
        assert sphere_volume(2) == pytest.approx(4.0 * math.pi, rel=1e-13)
        assert sphere_volume(3) == pytest.approx(2.0 * math.pi ** 2, rel=1e-13)
        with pytest.raises(DomainError):
            sphere_volume(0)

    def test_critical_exponent(self):
        """2# = 2n/(n-2)"""
        assert critical_exponent(3) == 6.0
        assert critical_exponent(5) == pytest.approx(10.0 / 3.0)
        with pytest.raises(DomainError):
            critical_exponent(2)

    def test_best_sobolev_constant(self):
        """K0 = 4/(n(n-2) omega_n^(2/n)); about 0.18256 for n = 3"""
        for n in (3, 4, 5, 8):
            expected = 4.0 / (n * (n - 2) * sphere_volume(n) ** (2.0 / n))
            assert best_sobolev_constant(n) == pytest.approx(expected, rel=1e-14)
        assert best_sobolev_constant(3) == pytest.approx(0.18256, rel=1e-4)


class TestTruncationDefect:
    """Finite parts of int_0^delta t^q (t + eps)^-p dt"""

    def test_power_case_limit(self):
        """p - q - 1 = 2: the defect tends to -delta^-2/2"""
        assert aubin_truncation_defect(4.0, 1.0, 1.0, 1e-4) == pytest.approx(-0.5, abs=1e-3)
        assert aubin_truncation_defect(4.0, 1.0, 2.0, 1e-5) == pytest.approx(-0.125, abs=1e-4)

    def test_log_case_limit(self):
        """p = q + 1: J - log(1/eps) tends to log(delta)"""
        assert aubin_truncation_defect(1.0, 0.0, 2.0, 1e-6) == pytest.approx(math.log(2.0), abs=1e-5)

    def test_log_case_exact(self):
        """For q = 0 the log case equals log(delta + eps) at every eps"""
        value = aubin_truncation_defect(1.0, 0.0, 1.5, 0.1)
        assert value == pytest.approx(math.log(1.6), rel=1e-9)

    def test_invalid_arguments(self):
        """Non-positive delta/eps and p - q - 1 < 0 are rejected"""
        with pytest.raises(DomainError):
            aubin_truncation_defect(4.0, 1.0, 0.0, 1e-3)
        with pytest.raises(DivergentIntegralError):
            aubin_truncation_defect(1.0, 1.0, 1.0, 1e-3)
