"""
Gamma/Beta, unit sphere volumes, the best Sobolev constant and the Aubin integrals

    I_p^q = int_0^inf t^q / (1 + t)^p dt = Gamma(q+1) Gamma(p-q-1) / Gamma(p),   p - q - 1 > 0, q > -1
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict

from scipy import integrate

from src.core.errors import DivergentIntegralError, DomainError

# Lanczos approximation, g = 7, nine terms; relative error ~1e-15 on the positive axis
LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(z: float) -> float:
    x = LANCZOS_COEFFS[0]
    for i, coeff in enumerate(LANCZOS_COEFFS[1:], start=1):
        x += coeff / (z + i)
    return x


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0"""
    if not x > 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    if x < 0.5:
        # Reflection keeps the Lanczos sum in its accurate half-plane
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def gamma(x: float) -> float:
    """Gamma(x) by the Lanczos approximation with reflection for x < 1/2"""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z)


def beta(x: float, y: float) -> float:
    """B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y) for x, y > 0"""
    if not (x > 0.0 and y > 0.0):
        raise DomainError(f"beta needs positive arguments, got ({x}, {y})")
    return math.exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y))


@dataclass(frozen=True)
class AubinIndex:
    """Index pair (p, q) of I_p^q"""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        if not self.q > -1.0:
            raise DivergentIntegralError(f"I_p^q diverges at t=0 for q={self.q} <= -1")
        if not self.p - self.q - 1.0 > 0.0:
            raise DivergentIntegralError(
                f"I_p^q diverges at infinity for p-q-1={self.p - self.q - 1.0:.6g} <= 0"
            )


def aubin_integral(idx: AubinIndex | tuple) -> float:
    """Closed form Gamma(q+1) Gamma(p-q-1) / Gamma(p)"""
    if not isinstance(idx, AubinIndex):
        idx = AubinIndex(*idx)
    return beta(idx.q + 1.0, idx.p - idx.q - 1.0)


def aubin_quadrature(p: float, q: float, rtol: float = 1e-12) -> float:
    """Independent quadrature value of I_p^q

    t = s/(1-s) maps [0, inf) onto [0, 1) and turns the integrand into
    s^q (1-s)^(p-q-2). A negative endpoint exponent is handed to QUADPACK's
    algebraic-weight rule.
    """
    idx = AubinIndex(p, q)
    alpha = idx.q
    beta_exp = idx.p - idx.q - 2.0
    if beta_exp < 0.0 or alpha < 0.0:
        value, _ = integrate.quad(lambda s: 1.0, 0.0, 1.0, weight="alg",
                                  wvar=(alpha, beta_exp), epsabs=0.0, epsrel=rtol, limit=200)
    else:
        value, _ = integrate.quad(lambda s: s ** alpha * (1.0 - s) ** beta_exp, 0.0, 1.0,
                                  epsabs=0.0, epsrel=rtol, limit=200)
    return value


def sphere_volume(n: int) -> float:
    """omega_n, the volume of the unit n-sphere in R^(n+1)"""
    if n < 1:
        raise DomainError(f"sphere_volume needs n >= 1, got {n}")
    return 2.0 * math.pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0)


def critical_exponent(n: int) -> float:
    """2# = 2n/(n-2)"""
    if n < 3:
        raise DomainError(f"critical exponent needs n >= 3, got {n}")
    return 2.0 * n / (n - 2.0)


def best_sobolev_constant(n: int) -> float:
    """K0 = 4 / (n (n-2) omega_n^(2/n))"""
    if n < 3:
        raise DomainError(f"best_sobolev_constant needs n >= 3, got {n}")
    return 4.0 / (n * (n - 2.0) * sphere_volume(n) ** (2.0 / n))


@dataclass(frozen=True)
class RecurrenceReport:
    """Relative discrepancies of the two index-shift recurrences"""

    p: float
    q: float
    first: float
    second: float

    @property
    def passed(self) -> bool:
        return self.first < 1e-10 and self.second < 1e-10


def _relative_gap(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


def check_recurrences(p: float, q: float, method: str = "closed") -> RecurrenceReport:
    """Check I_{p+1}^q = (p-q-1)/p I_p^q and I_{p+1}^{q+1} = (q+1)/(p-q-1) I_{p+1}^q

    Args:
        p, q: base index, must be convergent
        method: "closed" (Gamma closed form) or "quadrature"
    """
    evaluate = aubin_integral if method == "closed" else (lambda idx: aubin_quadrature(idx.p, idx.q))
    base = AubinIndex(p, q)
    shifted = AubinIndex(p + 1.0, q)
    both = AubinIndex(p + 1.0, q + 1.0)

    i_base = evaluate(base)
    i_shifted = evaluate(shifted)
    i_both = evaluate(both)
    first = _relative_gap(i_shifted, (p - q - 1.0) / p * i_base)
    second = _relative_gap(i_both, (q + 1.0) / (p - q - 1.0) * i_shifted)
    return RecurrenceReport(p=p, q=q, first=first, second=second)


def check_identities(n: int) -> Dict[str, float]:
    """Relative gaps of the sphere-volume and index identities used by the bubble expansions

    The last two need n >= 5 and are omitted below that.
    """
    if n < 3:
        raise DomainError(f"identities need n >= 3, got {n}")
    half = n / 2.0
    gaps = {
        "omega_recursion": _relative_gap(
            2.0 ** (n - 1) * aubin_integral((n, half - 1.0)) * sphere_volume(n - 1), sphere_volume(n)
        ),
        "shift_half": _relative_gap(
            n / (n - 2.0) * aubin_integral((n, half - 1.0)), aubin_integral((n, half))
        ),
    }
    if n >= 5:
        gaps["shift_half_plus_one"] = _relative_gap(
            (n + 2.0) / (n - 4.0) * aubin_integral((n, half)), aubin_integral((n, half + 1.0))
        )
        gaps["lowered_power"] = _relative_gap(
            4.0 * (n - 2.0) * (n - 1.0) / (n * (n - 4.0)) * aubin_integral((n, half)),
            aubin_integral((n - 2, half - 1.0)),
        )
    return gaps


def aubin_truncation_defect(p: float, q: float, delta: float, eps: float) -> float:
    """Finite part of the truncated integral J = int_0^delta t^q (t + eps)^(-p) dt

    For p-q-1 > 0 returns J - eps^(-(p-q-1)) I_p^q, which tends to
    -delta^(q-p+1)/(p-q-1) as eps -> 0. For p-q-1 = 0 returns J - log(1/eps),
    which has a finite limit as well. The difference is evaluated without
    cancellation in both cases.
    """
    if not (delta > 0.0 and eps > 0.0):
        raise DomainError(f"delta and eps must be positive, got ({delta}, {eps})")
    if not q > -1.0:
        raise DivergentIntegralError(f"q={q} <= -1")
    k = p - q - 1.0
    upper = delta / eps
    if abs(k) < 1e-14:
        # s = e^x beyond s = 1, where s^q/(1+s)^(q+1) ds = sigmoid(x)^(q+1) dx
        inner, _ = integrate.quad(lambda s: s ** q / (1.0 + s) ** (q + 1.0), 0.0, 1.0,
                                  epsabs=0.0, epsrel=1e-12, limit=200)
        length = math.log(upper)
        outer, _ = integrate.quad(lambda x: (1.0 / (1.0 + math.exp(-x))) ** (q + 1.0) - 1.0,
                                  0.0, length, epsabs=1e-14, epsrel=1e-12, limit=400)
        return inner + outer + math.log(delta)
    if k < 0.0:
        raise DivergentIntegralError(f"p-q-1={k:.6g} < 0 has no finite part of this form")
    tail, _ = integrate.quad(lambda s: s ** q / (1.0 + s) ** p, upper, math.inf,
                             epsabs=0.0, epsrel=1e-12, limit=200)
    return -eps ** (-k) * tail
