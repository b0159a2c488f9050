"""
Bubble test-function tests

Verifies:
1. Bubble, taper and family validation
2. Integrals against their eps -> 0 limits and the best Sobolev constant
3. Fitted expansion coefficients against the predictions from H(x0)
"""

import math

import numpy as np
import pytest

from src.core.errors import FitError, GeometryError, ProblemValidationError, UnsupportedDimensionError
from src.numerics.discretization import CoefficientField
from src.numerics.model_geometry import RadialManifold
from src.numerics.special_functions import best_sobolev_constant, sphere_volume
from src.numerics.test_functions import (BubbleFamily, H_condition, bubble_value, default_epsilons, fit_components,
                                         fit_expansion, gamma_eps, mu_eps, quotient_eps, scan, sobolev_quotient,
                                         tail_contributions, taper)

N5_EPSILONS = (0.1, 0.05, 0.025, 0.0125, 0.00625)


def family(n=5, r_max=4.0, kappa=0.0, a=(1.0,), b=(0.0,), f=(1.0,), delta=1.0, epsilons=None):
    m = RadialManifold(n=n, kappa=kappa, r_max=r_max)
    return BubbleFamily.default(m, CoefficientField.from_lists(a, b, f), delta=delta, epsilons=epsilons)


class TestBubbleFunctions:
    """Pointwise bubble and taper"""

    def test_bubble_at_center(self):
        """v_eps(0) = (2/eps)^((n-2)/2)"""
        assert bubble_value(5, 0.1, 0.0) == pytest.approx(20.0 ** 1.5)
        assert isinstance(bubble_value(5, 0.1, 0.0), float)

    def test_taper_values(self):
        """1 up to delta, 1/2 at 3 delta/2, 0 from 2 delta on"""
        values = taper(1.0, np.array([0.0, 1.0, 1.5, 2.0, 3.0]))
        assert np.allclose(values, [1.0, 1.0, 0.5, 0.0, 0.0])

    def test_default_epsilons(self):
        """delta/10 halved four times"""
        assert default_epsilons(1.0) == pytest.approx(list(N5_EPSILONS))


class TestBubbleFamily:
    """Validation of delta, eps and the coefficients"""

    def test_default_delta(self):
        """delta = r_max/4 when not given"""
        m = RadialManifold(n=5, r_max=4.0)
        fam = BubbleFamily.default(m, CoefficientField.from_lists([1.0], [0.0], [1.0]))
        assert fam.delta == 1.0
        assert fam.epsilons == pytest.approx(N5_EPSILONS)

    def test_needs_ball(self):
        """Annuli have no center"""
        m = RadialManifold(n=5, r_min=0.5, r_max=4.0)
        with pytest.raises(GeometryError):
            BubbleFamily.default(m, CoefficientField.from_lists([1.0], [0.0], [1.0]), delta=1.0)

    @pytest.mark.parametrize("kwargs", [
        {"delta": 2.0},
        {"epsilons": (0.3, 0.1)},
        {"epsilons": (0.1, 0.1, 0.05)},
        {"epsilons": (0.1, -0.05)},
        {"f": (1.0, 0.01)},
    ])
    def test_invalid_family(self, kwargs):
        """2 delta >= r_max, eps > delta/5, non-decreasing or negative eps, f not maximal at 0"""
        with pytest.raises(ProblemValidationError):
            family(**kwargs)


class TestIntegrals:
    """mu_eps, gamma_eps and Q_eps"""

    def test_limits(self):
        """mu_eps -> n(n-2) omega_n/4 and gamma_eps -> omega_n on flat space with b = 0"""
        fam = family(epsilons=N5_EPSILONS)
        eps = N5_EPSILONS[-1]
        omega = sphere_volume(5)
        assert mu_eps(fam, eps) == pytest.approx(15.0 * omega / 4.0, rel=1e-4)
        assert gamma_eps(fam, eps) == pytest.approx(omega, rel=1e-6)
        assert quotient_eps(fam, eps) == pytest.approx(1.0, rel=1e-4)

    def test_quotient_invariant_under_scaling_f(self):
        """Replacing f by 3f leaves Q_eps unchanged"""
        base = family(n=6, f=(1.0, -0.05))
        scaled = family(n=6, f=(3.0, -0.15))
        for eps in base.epsilons[:2]:
            assert quotient_eps(scaled, eps) == pytest.approx(quotient_eps(base, eps), rel=1e-12)

    @pytest.mark.parametrize("n", [3, 5])
    def test_sobolev_constant(self, n):
        """A concentrated bubble nearly attains the best Sobolev constant"""
        fam = family(n=n, r_max=40.0, delta=10.0, epsilons=(0.01,))
        assert 1.0 / sobolev_quotient(fam, 0.01) == pytest.approx(best_sobolev_constant(n), rel=5e-3)

    def test_tail_scaling(self):
        """Taper-region parts scale like eps^(n-2) for mu and eps^n for gamma"""
        fam = family(epsilons=N5_EPSILONS)
        mu_1, gamma_1 = tail_contributions(fam, 0.0125)
        mu_2, gamma_2 = tail_contributions(fam, 0.00625)
        assert math.log2(mu_1 / mu_2) == pytest.approx(3.0, abs=0.05)
        assert math.log2(gamma_1 / gamma_2) == pytest.approx(5.0, abs=0.05)

    def test_scan_order_and_jobs(self):
        """Samples follow the family order and do not depend on jobs"""
        fam = family(b=(-1.0,), epsilons=N5_EPSILONS)
        serial = scan(fam)
        parallel = scan(fam, jobs=2)
        assert [s.eps for s in serial] == list(N5_EPSILONS)
        assert serial == parallel


class TestCondition:
    """H(x0)"""

    def test_flat_negative_b(self):
        """8 (n-1) b/a = -32 for n = 5, b = -1"""
        condition = H_condition(RadialManifold(n=5, r_max=4.0), CoefficientField.from_lists([1.0], [-1.0], [1.0]))
        assert condition.H == pytest.approx(-32.0)
        assert condition.satisfied

    def test_curvature_of_f(self):
        """(n-2)(n-4) Delta f/f = 4.8 for n = 6, f = 1 - 0.05 r^2"""
        condition = H_condition(RadialManifold(n=6, r_max=4.0), CoefficientField.from_lists([1.0], [0.0], [1.0, -0.05]))
        assert condition.H == pytest.approx(4.8)
        assert not condition.satisfied

    def test_dimension_three(self):
        """n = 3 has no expansion"""
        with pytest.raises(UnsupportedDimensionError):
            H_condition(RadialManifold(n=3), CoefficientField.from_lists([1.0], [0.0], [1.0]))


class TestExpansion:
    """Fitted first correction of Q_eps"""

    def test_n5_negative_b(self):
        """Flat n = 5, b = -1: coefficient -16/15"""
        report = fit_expansion(family(b=(-1.0,), epsilons=N5_EPSILONS))
        assert report.branch == "n>4"
        assert report.predicted_coefficient == pytest.approx(-16.0 / 15.0)
        assert report.literal_coefficient == pytest.approx(-16.0 / 45.0)
        assert report.relative_gap < 0.02
        assert report.supported_reading == "derived"
        assert report.passed(0.02)
        assert report.leading_constant == pytest.approx(1.0, abs=1e-3)

    def test_n6_concave_f(self):
        """n = 6, f = 1 - 0.05 r^2: coefficient +0.05"""
        report = fit_expansion(family(n=6, f=(1.0, -0.05)))
        assert report.predicted_coefficient == pytest.approx(0.05)
        assert report.relative_gap < 0.02
        assert report.fitted_coefficient > 0.0

    def test_n4_flat(self):
        """n = 4 flat with b = -1: log coefficient -0.75, both readings agree"""
        report = fit_expansion(family(n=4, b=(-1.0,)))
        assert report.branch == "n=4"
        assert report.predicted_coefficient == pytest.approx(-0.75)
        assert report.supported_reading == "indistinguishable"
        assert report.relative_gap < 0.05

    def test_n4_round_sphere(self):
        """n = 4 on the unit sphere with b = 0: -1.5, against +1.5 from the simplified form"""
        report = fit_expansion(family(n=4, kappa=1.0, r_max=3.0, delta=0.75))
        assert report.predicted_coefficient == pytest.approx(-1.5)
        assert report.literal_coefficient == pytest.approx(1.5)
        assert report.supported_reading == "derived"
        assert report.relative_gap < 0.05

    def test_degenerate(self):
        """H(x0) = 0: no relative gap, Q_eps - 1 decays like eps^(n-2)"""
        report = fit_expansion(family(epsilons=N5_EPSILONS))
        assert report.degenerate
        assert report.relative_gap is None
        assert report.supported_reading == "degenerate"
        assert report.residual_rate >= 2.9
        assert report.passed(0.02)

    def test_too_few_epsilons(self):
        """At least four epsilons are needed"""
        with pytest.raises(FitError):
            fit_expansion(family(b=(-1.0,), epsilons=(0.1, 0.05, 0.025)))


class TestComponents:
    """Separate corrections of mu_eps and gamma_eps"""

    def test_gamma_correction(self):
        """n = 5, f = 1 - 0.1 r^2: gamma correction -(Delta f/f)/(2(n-2)) = -1/6"""
        fits = {c.name: c for c in fit_components(family(f=(1.0, -0.1), r_max=3.0, delta=0.75))}
        assert fits["gamma"].predicted == pytest.approx(-1.0 / 6.0)
        assert fits["gamma"].relative_gap < 0.02
        assert fits["gamma_power"].predicted == pytest.approx(0.1)

    def test_mu_correction_from_b(self):
        """n = 5, b = -1: mu correction 8(n-1) b/(2n(n-2)(n-4)) = -16/15"""
        fits = {c.name: c for c in fit_components(family(b=(-1.0,), r_max=8.0, delta=2.0))}
        assert fits["mu"].predicted == pytest.approx(-16.0 / 15.0)
        assert fits["mu"].relative_gap < 0.03
        assert fits["gamma"].relative_gap is None
