"""
Radial P1 finite elements on balls and annuli

Weak forms are integrated against dv_g = omega_{n-1} sn(r)^(n-1) dr with a
Gauss-Legendre rule per element. Every form is symmetric tridiagonal and is
stored by its diagonal and off-diagonal. The r = 0 node of a ball is a free
degree of freedom (the weight vanishes there, no condition is imposed);
Dirichlet nodes are the outer node, plus the inner node for an annulus.

Nonlinear terms are mass-lumped: int f g(u) dv ~ sum_i W_i g(u_i) with
W_i = int f phi_i dv, so the discrete constraint and its gradient agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss
from scipy import sparse

from src.core.errors import ContractViolation, DomainError, ProblemValidationError
from src.core.logger import get_logger
from src.numerics.model_geometry import RadialManifold
from src.numerics.special_functions import critical_exponent

logger = get_logger("yamabe.discretization")

MIN_ELEMENTS = 8
DEFAULT_QUADRATURE_ORDER = 3
# Sampling density used by EvenPolynomial.extrema besides the critical points
EXTREMA_SAMPLES = 2049
# Relative slack on q <= 2# so the schedule endpoint is accepted after float arithmetic
Q_SLACK = 1e-12


def check_exponent(n: int, q: float) -> float:
    """q with 2 < q <= 2#(n)

    Raises:
        DomainError: q out of range
    """
    q_crit = critical_exponent(n)
    if not (2.0 < q <= q_crit * (1.0 + Q_SLACK)):
        raise DomainError(f"exponent q must satisfy 2 < q <= 2#={q_crit:.12g}, got {q}")
    return float(q)


@dataclass(frozen=True)
class EvenPolynomial:
    """c0 + c2 r^2 + c4 r^4 + ... stored as (c0, c2, c4, ...)"""

    coeffs: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(c) for c in np.atleast_1d(np.asarray(self.coeffs, dtype=float)))
        if not values:
            raise DomainError("EvenPolynomial needs at least one coefficient")
        if not all(np.isfinite(values)):
            raise DomainError(f"EvenPolynomial coefficients must be finite, got {values}")
        object.__setattr__(self, "coeffs", values)

    @classmethod
    def constant(cls, value: float) -> "EvenPolynomial":
        return cls((value,))

    @property
    def _in_s(self) -> Polynomial:
        # Polynomial in s = r^2
        return Polynomial(self.coeffs)

    @property
    def c0(self) -> float:
        return self.coeffs[0]

    @property
    def c2(self) -> float:
        return self.coeffs[1] if len(self.coeffs) > 1 else 0.0

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coeffs)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self._in_s(r * r)

    def derivative(self, r):
        """d/dr p(r^2) = 2 r p'(r^2)"""
        r = np.asarray(r, dtype=float)
        return 2.0 * r * self._in_s.deriv()(r * r)

    def second_derivative(self, r):
        """2 p'(r^2) + 4 r^2 p''(r^2)"""
        r = np.asarray(r, dtype=float)
        s = r * r
        dp = self._in_s.deriv()
        return 2.0 * dp(s) + 4.0 * s * dp.deriv()(s)

    def scaled(self, factor: float) -> "EvenPolynomial":
        return EvenPolynomial(tuple(factor * c for c in self.coeffs))

    def extrema(self, lo: float, hi: float) -> Tuple[float, float]:
        """(min, max) on [lo, hi] from dense sampling plus endpoint and critical-point values"""
        points = [np.linspace(lo, hi, EXTREMA_SAMPLES)]
        dp = self._in_s.deriv()
        if dp.degree() >= 1:
            for root in dp.roots():
                if abs(root.imag) < 1e-12 and lo * lo <= root.real <= hi * hi:
                    points.append(np.array([np.sqrt(max(root.real, 0.0))]))
        values = self(np.concatenate(points))
        return float(values.min()), float(values.max())


@dataclass(frozen=True)
class CoefficientField:
    """Radial coefficients a, b, f of -div(a grad u) + b u = lambda f |u|^(2#-2) u"""

    a: EvenPolynomial
    b: EvenPolynomial
    f: EvenPolynomial

    @classmethod
    def from_lists(cls, a: Sequence[float], b: Sequence[float], f: Sequence[float]) -> "CoefficientField":
        return cls(EvenPolynomial(tuple(a)), EvenPolynomial(tuple(b)), EvenPolynomial(tuple(f)))

    def validate(self, m: RadialManifold, require_f_max_at_center: bool = False) -> None:
        """Check a > 0, f > 0 on the domain and optionally max f = f(0)

        Raises:
            ProblemValidationError: on any violation
        """
        a_min, _ = self.a.extrema(m.r_min, m.r_max)
        if not a_min > 0.0:
            raise ProblemValidationError(f"coefficient a must be positive on [{m.r_min}, {m.r_max}], min={a_min:.6g}")
        f_min, f_max = self.f.extrema(m.r_min, m.r_max)
        if not f_min > 0.0:
            raise ProblemValidationError(f"coefficient f must be positive on [{m.r_min}, {m.r_max}], min={f_min:.6g}")
        if require_f_max_at_center:
            if not m.is_ball:
                raise ProblemValidationError("f(x0) = max f needs the center inside the domain")
            f0 = self.f(0.0)
            if f0 < f_max - 1e-12 * max(1.0, abs(f_max)):
                raise ProblemValidationError(f"f must attain its maximum at r=0: f(0)={f0:.6g}, max={f_max:.6g}")


@dataclass(frozen=True, eq=False)
class RadialMesh:
    """Strictly increasing nodes r_0 = r_min < ... < r_N = r_max"""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size - 1 < MIN_ELEMENTS:
            raise ProblemValidationError(f"mesh needs at least {MIN_ELEMENTS} elements, got {nodes.size - 1}")
        if not np.all(np.diff(nodes) > 0.0):
            raise ProblemValidationError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def N(self) -> int:
        return self.nodes.size - 1

    @classmethod
    def uniform(cls, r_min: float, r_max: float, n_elements: int) -> "RadialMesh":
        return cls(np.linspace(r_min, r_max, n_elements + 1))

    @classmethod
    def graded(cls, r_min: float, r_max: float, n_elements: int, ratio: float) -> "RadialMesh":
        """Geometric spacing h_k = h_0 ratio^k, finest at r_min for ratio > 1"""
        if ratio <= 0.0:
            raise ProblemValidationError(f"grading ratio must be positive, got {ratio}")
        if abs(ratio - 1.0) < 1e-12:
            return cls.uniform(r_min, r_max, n_elements)
        k = np.arange(n_elements + 1, dtype=float)
        fractions = np.expm1(k * np.log(ratio)) / np.expm1(n_elements * np.log(ratio))
        nodes = r_min + (r_max - r_min) * fractions
        nodes[0], nodes[-1] = r_min, r_max
        return cls(nodes)

    @classmethod
    def for_manifold(cls, m: RadialManifold, n_elements: int, grading: float = 1.0) -> "RadialMesh":
        return cls.graded(m.r_min, m.r_max, n_elements, grading)


@dataclass(frozen=True, eq=False)
class TridiagonalForm:
    """Symmetric tridiagonal bilinear form"""

    diag: np.ndarray
    off: np.ndarray

    def __matmul__(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.off * x[1:]
        y[1:] += self.off * x[:-1]
        return y

    def __add__(self, other: "TridiagonalForm") -> "TridiagonalForm":
        return TridiagonalForm(self.diag + other.diag, self.off + other.off)

    def scaled(self, factor: float) -> "TridiagonalForm":
        return TridiagonalForm(factor * self.diag, factor * self.off)

    def quadratic(self, x: np.ndarray) -> float:
        return float(x @ (self @ x))

    def restrict(self, block: slice) -> "TridiagonalForm":
        """Principal sub-block on the contiguous index range `block`"""
        lo, hi = block.start, block.stop
        return TridiagonalForm(self.diag[lo:hi].copy(), self.off[lo:hi - 1].copy())

    def to_sparse(self) -> sparse.csr_matrix:
        return sparse.diags([self.off, self.diag, self.off], [-1, 0, 1], format="csr")

    def upper_banded(self) -> np.ndarray:
        """LAPACK upper banded storage (2, n) used by scipy.linalg.cholesky_banded"""
        ab = np.zeros((2, self.diag.size))
        ab[0, 1:] = self.off
        ab[1, :] = self.diag
        return ab


@dataclass(frozen=True, eq=False)
class DiscreteProblem:
    """Assembled forms for one (manifold, coefficients, mesh) triple"""

    manifold: RadialManifold
    coeffs: CoefficientField
    mesh: RadialMesh
    stiffness: TridiagonalForm
    mass_b: TridiagonalForm
    laplacian: TridiagonalForm
    mass: TridiagonalForm
    weight_f: np.ndarray
    volume_weights: np.ndarray
    boundary_dofs: Tuple[int, ...]
    _cache: Dict[str, object] = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.mesh.nodes.size

    @property
    def nodes(self) -> np.ndarray:
        return self.mesh.nodes

    @property
    def interior(self) -> slice:
        """Contiguous interior block: [0, N) for balls, [1, N) for annuli"""
        return slice(0 if self.manifold.is_ball else 1, self.size - 1)

    @property
    def critical_exponent(self) -> float:
        return critical_exponent(self.manifold.n)

    def form(self, name: str) -> TridiagonalForm:
        """Named forms: stiffness, mass_b, laplacian, mass, operator (stiffness + mass_b), h1 (laplacian + mass)"""
        if name == "operator":
            return self.stiffness + self.mass_b
        if name == "h1":
            return self.laplacian + self.mass
        if name in ("stiffness", "mass_b", "laplacian", "mass"):
            return getattr(self, name)
        raise ValueError(f"unknown form '{name}'")

    def embed(self, w_interior: np.ndarray, boundary_values: Sequence[float] | None = None) -> np.ndarray:
        """Full nodal vector from interior values (and boundary values, default 0)"""
        full = np.zeros(self.size)
        full[self.interior] = w_interior
        if boundary_values is not None:
            full[list(self.boundary_dofs)] = boundary_values
        return full

    def check_nodal(self, w: np.ndarray, name: str = "w") -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.size,):
            raise ContractViolation(f"{name} must have one value per node ({self.size}), got shape {w.shape}")
        return w

    def check_q(self, q: float) -> float:
        return check_exponent(self.manifold.n, q)

    def quadratic_form(self, w: np.ndarray, form: str = "operator") -> float:
        """Form value without the boundary contract"""
        return self.form(form).quadratic(self.check_nodal(w))

    def energy(self, w: np.ndarray) -> float:
        """I(w) = int a |grad w|^2 + b w^2 dv for w vanishing on the boundary"""
        w = self.check_nodal(w)
        boundary = w[list(self.boundary_dofs)]
        if np.any(boundary != 0.0):
            raise ContractViolation(f"energy needs w = 0 on boundary nodes, got {boundary}")
        return self.form("operator").quadratic(w)

    def constraint_value(self, w: np.ndarray, h: np.ndarray, q: float) -> float:
        """F_q(w) = int f |w + h|^q dv by nodal quadrature"""
        q = self.check_q(q)
        u = self.check_nodal(w) + self.check_nodal(h, "h")
        return float(self.weight_f @ np.abs(u) ** q)

    def lq_power(self, w: np.ndarray, q: float) -> float:
        """int |w|^q dv by nodal quadrature (no f weight)"""
        return float(self.volume_weights @ np.abs(self.check_nodal(w)) ** q)

    def volume(self) -> float:
        return float(self.volume_weights.sum())


def _element_quadrature(m: RadialManifold, nodes: np.ndarray, order: int):
    xg, wg = leggauss(order)
    r0, r1 = nodes[:-1], nodes[1:]
    h = r1 - r0
    x = 0.5 * (r0 + r1)[:, None] + 0.5 * h[:, None] * xg[None, :]
    weights = 0.5 * h[:, None] * wg[None, :] * m.volume_weight(x)
    phi0 = (r1[:, None] - x) / h[:, None]
    return x, weights, phi0, 1.0 - phi0, h


def _stiffness_form(size: int, element_integral: np.ndarray, h: np.ndarray) -> TridiagonalForm:
    k = element_integral / h ** 2
    diag = np.zeros(size)
    diag[:-1] += k
    diag[1:] += k
    return TridiagonalForm(diag, -k)


def _mass_form(size: int, weights: np.ndarray, phi0: np.ndarray, phi1: np.ndarray) -> TridiagonalForm:
    m00 = np.sum(weights * phi0 * phi0, axis=1)
    m01 = np.sum(weights * phi0 * phi1, axis=1)
    m11 = np.sum(weights * phi1 * phi1, axis=1)
    diag = np.zeros(size)
    diag[:-1] += m00
    diag[1:] += m11
    return TridiagonalForm(diag, m01)


def _lumped(size: int, weights: np.ndarray, phi0: np.ndarray, phi1: np.ndarray) -> np.ndarray:
    out = np.zeros(size)
    out[:-1] += np.sum(weights * phi0, axis=1)
    out[1:] += np.sum(weights * phi1, axis=1)
    return out


def assemble(m: RadialManifold, c: CoefficientField, mesh: RadialMesh,
             quadrature_order: int = DEFAULT_QUADRATURE_ORDER) -> DiscreteProblem:
    """Assemble the weak forms of -div_g(a grad) + b and of the constraint functional

    Raises:
        ProblemValidationError: positivity of a or f fails, or the mesh does not span the manifold
    """
    c.validate(m)
    nodes = mesh.nodes
    if not (np.isclose(nodes[0], m.r_min, rtol=0.0, atol=1e-12) and np.isclose(nodes[-1], m.r_max, rtol=0.0, atol=1e-12)):
        raise ProblemValidationError(
            f"mesh spans [{nodes[0]}, {nodes[-1]}] but the manifold is [{m.r_min}, {m.r_max}]"
        )

    size = nodes.size
    x, weights, phi0, phi1, h = _element_quadrature(m, nodes, quadrature_order)
    a_values = c.a(x)
    b_values = c.b(x)
    f_values = c.f(x)

    stiffness = _stiffness_form(size, np.sum(weights * a_values, axis=1), h)
    laplacian = _stiffness_form(size, np.sum(weights, axis=1), h)
    mass_b = _mass_form(size, weights * b_values, phi0, phi1)
    mass = _mass_form(size, weights, phi0, phi1)
    weight_f = _lumped(size, weights * f_values, phi0, phi1)
    volume_weights = _lumped(size, weights, phi0, phi1)

    boundary = (size - 1,) if m.is_ball else (0, size - 1)
    logger.debug(f"Assembled n={m.n} kappa={m.kappa} on [{m.r_min}, {m.r_max}] with N={mesh.N} elements")
    return DiscreteProblem(
        manifold=m, coeffs=c, mesh=mesh,
        stiffness=stiffness, mass_b=mass_b, laplacian=laplacian, mass=mass,
        weight_f=weight_f, volume_weights=volume_weights, boundary_dofs=boundary,
    )
