"""
SPD solves, boundary extension, first eigenpair and coercivity check

All solves act on the contiguous interior block of a DiscreteProblem. The
default path factors the interior tridiagonal block with banded Cholesky
(cached on the problem); a failed factorization is how indefiniteness is
detected. Jacobi-preconditioned conjugate gradients is the alternative path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.sparse import diags
from scipy.sparse.linalg import cg

from src.core.errors import (CoercivityError, ContractViolation, ConvergenceError,
                             IndefiniteFormError)
from src.core.logger import get_logger
from src.numerics.discretization import DiscreteProblem, TridiagonalForm

logger = get_logger("yamabe.linear_solvers")

DEFAULT_SOLVE_TOL = 1e-10
DEFAULT_EIGEN_TOL = 1e-10
DEFAULT_COERCIVITY_TOL = 1e-8
MAX_EIGEN_ITERATIONS = 20000


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Smallest generalized eigenpair; eigenvector zero on the boundary, int psi^2 dv = 1, positive"""

    eigenvalue: float
    eigenvector: np.ndarray
    iterations: int = 0


@dataclass(frozen=True)
class CoercivityReport:
    coercive: bool
    lambda_min: float
    tol: float


class _BandedCholesky:
    """Cached factorization of an interior tridiagonal block"""

    def __init__(self, block: TridiagonalForm, label: str):
        try:
            self.factor = linalg.cholesky_banded(block.upper_banded(), lower=False)
        except linalg.LinAlgError as e:
            raise IndefiniteFormError(f"form '{label}' is not positive definite on interior dofs: {e}") from e
        self.label = label

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return linalg.cho_solve_banded((self.factor, False), rhs)


def _interior_block(p: DiscreteProblem, form: str | TridiagonalForm) -> TridiagonalForm:
    base = p.form(form) if isinstance(form, str) else form
    return base.restrict(p.interior)


def factorization(p: DiscreteProblem, form: str) -> _BandedCholesky:
    """Banded Cholesky of the named form on interior dofs, cached on the problem"""
    key = f"chol:{form}"
    cached = p._cache.get(key)
    if cached is None:
        cached = _BandedCholesky(_interior_block(p, form), form)
        p._cache[key] = cached
    return cached


def is_positive_definite(p: DiscreteProblem, form: str) -> bool:
    try:
        factorization(p, form)
    except IndefiniteFormError:
        return False
    return True


def _cg_solve(block: TridiagonalForm, rhs: np.ndarray, tol: float, maxiter: int | None) -> Tuple[np.ndarray, int]:
    matrix = block.to_sparse()
    preconditioner = diags(1.0 / block.diag)
    x, info = cg(matrix, rhs, rtol=tol, atol=0.0, maxiter=maxiter, M=preconditioner)
    return x, info


def solve_tridiagonal(block: TridiagonalForm, rhs: np.ndarray, method: str = "direct",
                      tol: float = DEFAULT_SOLVE_TOL, maxiter: int | None = None) -> np.ndarray:
    """Solve a symmetric tridiagonal system by banded Cholesky or Jacobi-preconditioned CG

    Raises:
        IndefiniteFormError: Cholesky breakdown
        ConvergenceError: CG stopped at its cap
    """
    if method == "direct":
        return _BandedCholesky(block, "block").solve(rhs)
    if method == "cg":
        x, info = _cg_solve(block, rhs, tol, maxiter)
        if info != 0:
            raise ConvergenceError(f"CG stopped without convergence (info={info})", {"info": info})
        return x
    raise ValueError(f"unknown method '{method}'")


def solve_spd(p: DiscreteProblem, form: str, rhs: np.ndarray, tol: float = DEFAULT_SOLVE_TOL,
              method: str = "direct", maxiter: int | None = None, fallback: bool = True) -> np.ndarray:
    """Solve form(x, v) = rhs(v) for all interior v, with x = 0 on the boundary

    Args:
        p: assembled problem
        form: stiffness, operator, laplacian, mass or h1
        rhs: nodal load vector (boundary entries are ignored)
        tol: relative residual target
        method: "direct" (banded Cholesky) or "cg"
        maxiter: CG iteration cap
        fallback: on CG failure, retry with the direct factorization

    Returns:
        Full nodal vector, zero on boundary dofs

    Raises:
        IndefiniteFormError: the form is not positive definite on interior dofs
        ConvergenceError: CG exceeded its cap (and fallback disabled), or the residual check failed
    """
    rhs = p.check_nodal(rhs, "rhs")
    block = _interior_block(p, form)
    b = rhs[p.interior]
    rhs_norm = float(np.linalg.norm(b))
    if rhs_norm == 0.0:
        return np.zeros(p.size)

    chol = factorization(p, form)
    if method == "cg":
        x, info = _cg_solve(block, b, tol, maxiter)
        if info != 0:
            if not fallback:
                raise ConvergenceError(f"CG on '{form}' stopped without convergence (info={info})",
                                       {"info": info, "size": b.size})
            logger.warning(f"CG on '{form}' did not converge (info={info}); using banded Cholesky")
            x = chol.solve(b)
    elif method == "direct":
        x = chol.solve(b)
    else:
        raise ValueError(f"unknown method '{method}'")

    residual = float(np.linalg.norm(block @ x - b))
    # Direct solves are exact up to conditioning; only the iterative target is enforced strictly
    limit = tol * rhs_norm if method == "cg" else max(tol, 1e-8) * rhs_norm
    if residual > limit:
        raise ConvergenceError(f"residual {residual:.3e} exceeds {limit:.3e} for '{form}'",
                               {"residual": residual, "rhs_norm": rhs_norm})
    return p.embed(x)


def extend_boundary_data(p: DiscreteProblem, phi: Sequence[float]) -> np.ndarray:
    """Discrete solution h of -div(a grad h) + b h = 0 with h = phi on the boundary spheres

    phi holds one value per boundary sphere, inner sphere first for annuli.

    Raises:
        CoercivityError: the operator is not positive definite on interior dofs
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if phi.size != len(p.boundary_dofs):
        raise ContractViolation(f"expected {len(p.boundary_dofs)} boundary values, got {phi.size}")
    if p.manifold.is_ball:
        logger.info("single boundary sphere: boundary data is constant and cannot change sign")

    try:
        chol = factorization(p, "operator")
    except IndefiniteFormError as e:
        raise CoercivityError(f"boundary extension needs a coercive operator: {e}") from e

    if np.all(phi == 0.0):
        return np.zeros(p.size)

    boundary_full = p.embed(np.zeros(p.interior.stop - p.interior.start), phi)
    operator = p.form("operator")
    rhs = -(operator @ boundary_full)[p.interior]
    h = boundary_full.copy()
    h[p.interior] = chol.solve(rhs)
    return h


def _inverse_iteration(a_block: TridiagonalForm, b_block: TridiagonalForm, shift: float,
                       tol: float, max_iter: int, label: str) -> Tuple[float, np.ndarray, int]:
    """Smallest eigenpair of A x = mu B x by inverse iteration on (A + shift B)^-1 B

    Stops when the B-norm change of the normalized, sign-aligned iterate drops below tol.
    """
    shifted = a_block + b_block.scaled(shift)
    chol = _BandedCholesky(shifted, f"{label} (shift={shift:.3g})")

    x = np.ones(a_block.diag.size)
    x /= np.sqrt(b_block.quadratic(x))
    for iteration in range(1, max_iter + 1):
        y = chol.solve(b_block @ x)
        y /= np.sqrt(b_block.quadratic(y))
        if y.sum() < 0.0:
            y = -y
        change = np.sqrt(b_block.quadratic(y - x))
        x = y
        if change < tol:
            mu = a_block.quadratic(x) / b_block.quadratic(x)
            return mu, x, iteration
    raise ConvergenceError(f"inverse iteration for '{label}' hit the cap of {max_iter} iterations",
                           {"change": float(change), "shift": shift})


def first_eigenpair(p: DiscreteProblem, tol: float = DEFAULT_EIGEN_TOL,
                    max_iter: int = MAX_EIGEN_ITERATIONS) -> EigenPair:
    """Smallest eigenpair of (stiffness, L2 mass) on interior dofs

    Raises:
        ConvergenceError: iteration cap reached
    """
    a_block = _interior_block(p, "stiffness")
    m_block = _interior_block(p, "mass")
    eigenvalue, x, iterations = _inverse_iteration(a_block, m_block, 0.0, tol, max_iter, "stiffness")
    psi = p.embed(x)
    interior = psi[p.interior]
    if np.any(interior < -1e-12 * np.abs(interior).max()):
        logger.warning("first eigenvector has negative interior values after sign fix")
    logger.debug(f"lambda_1={eigenvalue:.12g} after {iterations} inverse iterations")
    return EigenPair(eigenvalue=float(eigenvalue), eigenvector=psi, iterations=iterations)


def coercivity_check(p: DiscreteProblem, tol: float = DEFAULT_COERCIVITY_TOL,
                     eigen_tol: float = DEFAULT_EIGEN_TOL) -> CoercivityReport:
    """Smallest generalized eigenvalue of (stiffness + mass_b, H1_0 norm form); coercive iff > tol"""
    a_block = _interior_block(p, "operator")
    h1_block = _interior_block(p, "h1")

    b_min, _ = p.coeffs.b.extrema(p.manifold.r_min, p.manifold.r_max)
    shift = max(0.0, -b_min) + 1e-3
    while True:
        try:
            lambda_min, _, iterations = _inverse_iteration(
                a_block, h1_block, shift, eigen_tol, MAX_EIGEN_ITERATIONS, "operator")
            break
        except IndefiniteFormError:
            shift = 2.0 * shift + 1.0
            logger.debug(f"coercivity shift raised to {shift:.3g}")

    report = CoercivityReport(coercive=bool(lambda_min > tol), lambda_min=float(lambda_min), tol=tol)
    logger.info(f"coercivity: lambda_min={report.lambda_min:.6e} ({'coercive' if report.coercive else 'NOT coercive'})")
    return report
