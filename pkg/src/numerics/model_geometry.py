"""
Radial model manifolds

Constant-curvature balls and annuli written in geodesic polar coordinates
around the center x0 (r = 0):

    g = dr^2 + sn_k(r)^2 g_{S^{n-1}},  sn_k(r) = sin(sqrt(k) r)/sqrt(k), r, sinh(sqrt(-k) r)/sqrt(-k)

Sign convention: the Laplace-Beltrami operator is Delta_g = -div_g(grad), so the
Laplacian of r^2 at the center is -2n. The sign of H(x0) flips under the
opposite convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from src.core.errors import GeometryError, RangeError
from src.numerics.special_functions import sphere_volume

if TYPE_CHECKING:
    from src.numerics.discretization import EvenPolynomial

# Slack for radii that land on an endpoint up to roundoff
RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class RadialManifold:
    """Geodesic ball (r_min = 0) or annulus (r_min > 0) in a space form of curvature kappa"""

    n: int
    kappa: float = 0.0
    r_min: float = 0.0
    r_max: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise GeometryError(f"dimension n must be an integer >= 3, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("kappa", "r_min", "r_max"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise GeometryError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.r_min < 0.0:
            raise GeometryError(f"r_min must be >= 0, got {self.r_min}")
        if self.r_max <= self.r_min:
            raise GeometryError(f"r_max must exceed r_min, got [{self.r_min}, {self.r_max}]")
        if self.kappa > 0.0 and self.r_max >= self.injectivity_bound():
            raise GeometryError(
                f"r_max={self.r_max} reaches the injectivity bound pi/sqrt(kappa)={self.injectivity_bound():.6g}"
            )

    @property
    def is_ball(self) -> bool:
        return self.r_min == 0.0

    @property
    def boundary_count(self) -> int:
        """Number of boundary spheres (1 for a ball, 2 for an annulus)"""
        return 1 if self.is_ball else 2

    def injectivity_bound(self) -> float:
        """pi/sqrt(kappa) for positive curvature, infinity otherwise"""
        return math.pi / math.sqrt(self.kappa) if self.kappa > 0.0 else math.inf

    def _check_range(self, r: np.ndarray) -> None:
        if r.size == 0:
            return
        lo = self.r_min - RANGE_SLACK * max(1.0, abs(self.r_min))
        hi = self.r_max + RANGE_SLACK * max(1.0, abs(self.r_max))
        if not np.all(np.isfinite(r)) or r.min() < lo or r.max() > hi:
            raise RangeError(
                f"radius outside [{self.r_min}, {self.r_max}]: min={r.min():.17g}, max={r.max():.17g}"
            )

    def metric_profile(self, r):
        """Radial profile sn_kappa(r); the volume element carries its (n-1)-th power"""
        arr = np.asarray(r, dtype=float)
        self._check_range(arr)
        if self.kappa > 0.0:
            s = math.sqrt(self.kappa)
            out = np.sin(s * arr) / s
        elif self.kappa < 0.0:
            s = math.sqrt(-self.kappa)
            out = np.sinh(s * arr) / s
        else:
            out = arr.copy()
        return out if out.ndim else float(out)

    def profile_derivative(self, r):
        """sn_kappa'(r): cos, 1 or cosh"""
        arr = np.asarray(r, dtype=float)
        self._check_range(arr)
        if self.kappa > 0.0:
            out = np.cos(math.sqrt(self.kappa) * arr)
        elif self.kappa < 0.0:
            out = np.cosh(math.sqrt(-self.kappa) * arr)
        else:
            out = np.ones_like(arr)
        return out if out.ndim else float(out)

    def normalized_sphere_average(self, r):
        """G(r) = (sn(r)/r)^(n-1), equal to 1 at the center"""
        scalar = np.ndim(r) == 0
        arr = np.atleast_1d(np.asarray(r, dtype=float))
        self._check_range(arr)
        x2 = self.kappa * arr * arr
        ratio = np.ones_like(arr)
        small = np.abs(x2) < 1e-6
        # Taylor branch avoids 0/0 and cancellation near the center
        ratio[small] = 1.0 - x2[small] / 6.0 + x2[small] ** 2 / 120.0
        big = ~small
        if np.any(big):
            ratio[big] = self.metric_profile(arr[big]) / arr[big]
        out = ratio ** (self.n - 1)
        return float(out[0]) if scalar else out

    def scalar_curvature(self) -> float:
        """R_g = n(n-1) kappa"""
        return self.n * (self.n - 1) * self.kappa

    def volume_weight(self, r):
        """omega_{n-1} sn_kappa(r)^(n-1), the factor multiplying dr in radial integrals"""
        return sphere_volume(self.n - 1) * np.power(self.metric_profile(r), self.n - 1)

    def laplace_radial_at_center(self, phi: "EvenPolynomial") -> float:
        """Delta_g phi(0) = -2n c2, independent of curvature"""
        if not self.is_ball:
            raise GeometryError("center not in domain: laplace_radial_at_center needs r_min = 0")
        return -2.0 * self.n * phi.c2

    def radial_laplacian(self, phi: "EvenPolynomial", r):
        """Delta_g phi(r) = -(phi'' + (n-1) sn'/sn phi') for a radial function"""
        scalar = np.ndim(r) == 0
        arr = np.atleast_1d(np.asarray(r, dtype=float))
        self._check_range(arr)
        out = np.empty_like(arr)
        center = arr == 0.0
        out[center] = -2.0 * self.n * phi.c2
        rest = ~center
        if np.any(rest):
            rr = arr[rest]
            cot = self.profile_derivative(rr) / self.metric_profile(rr)
            out[rest] = -(phi.second_derivative(rr) + (self.n - 1) * cot * phi.derivative(rr))
        return float(out[0]) if scalar else out
