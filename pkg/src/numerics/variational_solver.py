"""
Constrained minimization of I(w) = int a|grad w|^2 + b w^2 dv over

    H_{gamma,q} = { w in H1_0 : int f |w + h|^q dv = gamma }

Feasible start along the first eigenfunction, projected gradient descent in
the H1_0 inner product with Armijo backtracking and retraction by scaling,
finished by Newton steps on the Lagrange system once energy differences
reach roundoff. Also the multiplier identity
lambda = I(w) / (gamma - int f |u|^(q-2) u h dv) with u = w + h,
continuation q -> 2#, sign-change detection and the nontriviality test.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, sparse
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from src.core.errors import (BracketError, ContractViolation, ConvergenceError, DomainError,
                             MultiplierError, ProblemValidationError, StepSizeError, YamabeError)
from src.core.logger import LoggerMixin, get_logger, log_performance
from src.numerics.discretization import DiscreteProblem, TridiagonalForm, check_exponent
from src.numerics.linear_solvers import EigenPair, factorization
from src.numerics.special_functions import best_sobolev_constant, critical_exponent

logger = get_logger("yamabe.variational_solver")

# Doublings allowed when bracketing the scaling root
BRACKET_CAP = 200
DEFAULT_SCHEDULE_OFFSETS = (0.5, 0.25, 0.1, 0.05, 0.01, 0.0)
# Relative energy slack in the Armijo test; decreases below it are roundoff
ENERGY_SLACK = 64.0 * np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class ConstraintSpec:
    """(gamma, q, h) defining H_{gamma,q}"""

    gamma: float
    q: float
    h: np.ndarray

    def validate(self, p: DiscreteProblem) -> "ConstraintSpec":
        """Check 2 < q <= 2# and gamma > max(int f|h|^2#, int f|h|^q)

        Raises:
            DomainError: q out of range
            ProblemValidationError: gamma violates the feasibility condition
        """
        p.check_q(self.q)
        h = p.check_nodal(self.h, "h")
        zero = np.zeros(p.size)
        threshold = max(p.constraint_value(zero, h, p.critical_exponent), p.constraint_value(zero, h, self.q))
        if not (math.isfinite(self.gamma) and self.gamma > threshold):
            raise ProblemValidationError(
                f"gamma={self.gamma:.6g} must exceed int f|h|^2# and int f|h|^q (max {threshold:.6g})"
            )
        return self

    def with_q(self, q: float) -> "ConstraintSpec":
        return replace(self, q=float(q))


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances of the projected gradient method"""

    tol: float = 1e-9
    max_iter: int = 20000
    armijo: float = 1e-4
    backtrack: float = 0.5
    min_step: float = 1e-14
    initial_step: float = 0.5
    max_step: float = 1e4
    # Newton on the Lagrange system takes over below this residual
    polish_below: float = 1e-5
    newton_steps: int = 12


@dataclass(frozen=True, eq=False)
class FeasiblePoint:
    t: float
    w0: np.ndarray
    transversality: float


@dataclass(frozen=True)
class SignChangeReport:
    changes: bool
    crossings: List[Tuple[float, float]]


@dataclass(frozen=True)
class BoundReport:
    """int |w|^q dv against 2^(q-1) gamma / min f, with and without the 2^(q-1) int |h|^q term"""

    lq_power: float
    stated_bound: float
    complete_bound: float

    @property
    def stated_holds(self) -> bool:
        return self.lq_power <= self.stated_bound * (1.0 + 1e-12)

    @property
    def complete_holds(self) -> bool:
        return self.lq_power <= self.complete_bound * (1.0 + 1e-12)


@dataclass(frozen=True)
class NontrivialityReport:
    value: float
    satisfied: bool


@dataclass(eq=False)
class SolveResult:
    """Minimizer w, multiplier lambda, minimum mu and the checks evaluated at the solution"""

    w: np.ndarray
    h: np.ndarray
    q: float
    gamma: float
    mu: float
    lam: float
    residual: float
    iterations: int
    sign_changes: List[Tuple[float, float]]
    constraint_gap: float
    cross_term: float
    holder_bound: float
    initial_energy: float
    multiplier_bound: float
    bound: BoundReport
    trace: List[Tuple[int, float, float, float]] = field(default_factory=list)

    @property
    def u(self) -> np.ndarray:
        return self.w + self.h

    @property
    def changes_sign(self) -> bool:
        return bool(self.sign_changes)


def default_gamma(p: DiscreteProblem, h: np.ndarray) -> float:
    """2 int f|h|^2# dv when h != 0, else 1"""
    h = p.check_nodal(h, "h")
    if not np.any(h != 0.0):
        return 1.0
    return 2.0 * p.constraint_value(np.zeros(p.size), h, p.critical_exponent)


def default_schedule(n: int) -> List[float]:
    """2# - {0.5, 0.25, 0.1, 0.05, 0.01, 0}, dropping entries with q <= 2"""
    q_crit = critical_exponent(n)
    schedule = [q_crit - offset for offset in DEFAULT_SCHEDULE_OFFSETS]
    kept = [q for q in schedule if q > 2.0]
    if len(kept) < len(schedule):
        logger.warning(f"default schedule for n={n}: dropped {len(schedule) - len(kept)} entries with q <= 2")
    kept[-1] = q_crit
    return kept


def _scaling_root(weight: np.ndarray, h: np.ndarray, direction: np.ndarray, q: float, target: float) -> float:
    """Smallest t > 0 with sum weight |t d + h|^q = target

    The map t -> sum weight |t d + h|^q is convex and below target at t = 0,
    so the positive root is unique.

    Raises:
        BracketError: no sign change below 2^BRACKET_CAP
    """
    def gap(t: float) -> float:
        return float(weight @ np.abs(t * direction + h) ** q) - target

    if gap(0.0) >= 0.0:
        raise ContractViolation("constraint already met at t=0; gamma must exceed int f|h|^q")
    if not np.any(direction != 0.0):
        raise ContractViolation("cannot scale the zero vector onto the constraint")
    lo, hi = 0.0, 1.0
    for _ in range(BRACKET_CAP):
        if gap(hi) >= 0.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketError(f"no bracket for the scaling root below t={hi:.3g}")
    if gap(hi) == 0.0:
        return hi
    return optimize.brentq(gap, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500)


def _interior_arrays(p: DiscreteProblem, spec: ConstraintSpec):
    block = p.interior
    h = p.check_nodal(spec.h, "h")
    boundary = [i for i in range(p.size) if i < block.start or i >= block.stop]
    boundary_mass = float(p.weight_f[boundary] @ np.abs(h[boundary]) ** spec.q)
    return p.weight_f[block], h[block], spec.gamma - boundary_mass


def feasible_point(p: DiscreteProblem, spec: ConstraintSpec, psi: EigenPair) -> FeasiblePoint:
    """Smallest t > 0 with F_q(t psi_1) = gamma, plus dF/dt at that t"""
    spec.validate(p)
    direction = p.check_nodal(psi.eigenvector, "psi")
    weight, h, target = _interior_arrays(p, spec)
    d = direction[p.interior]
    t = _scaling_root(weight, h, d, spec.q, target)
    u = t * d + h
    slope = float(spec.q * weight @ (np.abs(u) ** (spec.q - 2.0) * u * d))
    logger.debug(f"feasible point t={t:.15g}, dF/dt={slope:.6g}")
    return FeasiblePoint(t=float(t), w0=t * direction, transversality=slope)


def project_to_constraint(p: DiscreteProblem, spec: ConstraintSpec, w: np.ndarray) -> np.ndarray:
    """t w with the smallest t > 0 putting it on H_{gamma,q}"""
    w = p.check_nodal(w)
    weight, h, target = _interior_arrays(p, spec)
    t = _scaling_root(weight, h, w[p.interior], spec.q, target)
    return t * w


def detect_sign_change(p: DiscreteProblem, u: np.ndarray) -> SignChangeReport:
    """Mesh intervals where consecutive nodal values have strictly opposite signs"""
    u = p.check_nodal(u, "u")
    nodes = p.nodes
    idx = np.nonzero(u[:-1] * u[1:] < 0.0)[0]
    crossings = [(float(nodes[i]), float(nodes[i + 1])) for i in idx]
    return SignChangeReport(changes=bool(crossings), crossings=crossings)


def nontriviality_value(n: int, a_min: float, f_max: float, gamma: float, mu: float) -> float:
    """K0 (min a)^-1 (max f)^(2/2#) gamma^(-2/2#) mu"""
    exponent = 2.0 / critical_exponent(n)
    return best_sobolev_constant(n) / a_min * f_max ** exponent * gamma ** (-exponent) * mu


def nontriviality_condition(p: DiscreteProblem, spec: ConstraintSpec, mu: float) -> NontrivialityReport:
    """value < 1 makes the limit of the minimizers a nontrivial solution"""
    if mu < 0.0:
        raise DomainError(f"mu must be >= 0, got {mu}")
    m = p.manifold
    a_min, _ = p.coeffs.a.extrema(m.r_min, m.r_max)
    _, f_max = p.coeffs.f.extrema(m.r_min, m.r_max)
    value = nontriviality_value(m.n, a_min, f_max, spec.gamma, mu)
    return NontrivialityReport(value=float(value), satisfied=bool(value < 1.0))


def multiplier_bound(initial_energy: float, gamma: float, holder: float) -> float:
    """I(w_0) / (gamma - gamma^(1-1/q) (int f|h|^q)^(1/q)); infinite when the denominator is not positive"""
    return initial_energy / (gamma - holder) if gamma > holder else math.inf


def rayleigh_quotient(p: DiscreteProblem, w: np.ndarray, q: float) -> float:
    """Q_q(w) = I(w) / (int f |w|^q)^(2/q), invariant under scaling of w"""
    return p.energy(w) / p.constraint_value(w, np.zeros(p.size), q) ** (2.0 / q)


@dataclass(eq=False)
class _State:
    w: np.ndarray
    energy: float
    grad: np.ndarray
    riesz: np.ndarray
    direction: np.ndarray
    residual: float


class ProjectedGradientSolver(LoggerMixin):
    """Steepest descent of I on H_{gamma,q} in the H1_0 inner product"""

    _log_config_type = "high_volume"

    def __init__(self, p: DiscreteProblem, spec: ConstraintSpec, opts: SolverOptions | None = None):
        spec.validate(p)
        self.p = p
        self.spec = spec
        self.opts = opts or SolverOptions()
        block = p.interior
        self.operator: TridiagonalForm = p.form("operator").restrict(block)
        self.h1: TridiagonalForm = p.form("h1").restrict(block)
        self.h1_chol = factorization(p, "h1")
        self.weight, self.h, self.target = _interior_arrays(p, spec)

    def _nonlinear(self, w: np.ndarray) -> np.ndarray:
        """W |u|^(q-2) u on interior nodes"""
        u = w + self.h
        return self.weight * np.abs(u) ** (self.spec.q - 2.0) * u

    def _evaluate(self, w: np.ndarray) -> _State:
        q = self.spec.q
        aw = self.operator @ w
        energy = float(w @ aw)
        nonlinear = self._nonlinear(w)
        grad = 2.0 * aw
        riesz = self.h1_chol.solve(grad)
        c_riesz = self.h1_chol.solve(q * nonlinear)
        nu = float(q * nonlinear @ riesz) / float(q * nonlinear @ c_riesz)
        direction = riesz - nu * c_riesz

        lam = energy / float(nonlinear @ w)
        r = aw - lam * nonlinear
        r_riesz = 0.5 * riesz - lam * c_riesz / q
        num = max(float(r @ r_riesz), 0.0)
        den = max(float(aw @ (0.5 * riesz)), np.finfo(float).tiny)
        return _State(w=w, energy=energy, grad=grad, riesz=riesz, direction=direction,
                      residual=math.sqrt(num / den))

    def _retract(self, v: np.ndarray) -> np.ndarray:
        return _scaling_root(self.weight, self.h, v, self.spec.q, self.target) * v

    def _newton_step(self, w: np.ndarray, lam: float) -> Optional[Tuple[np.ndarray, float]]:
        """One Newton step on A w = lam N(w), sum W |w + h|^q = target

        The bordered Jacobian [[A - lam N'(w), -N], [q N^T, 0]] is nonsingular
        at a nondegenerate constrained minimizer even where A - lam N' is not.
        Returns None when the linear system is singular.
        """
        q = self.spec.q
        u = w + self.h
        nonlinear = self._nonlinear(w)
        residual = self.operator @ w - lam * nonlinear
        gap = float(self.weight @ np.abs(u) ** q) - self.target
        jacobian = self.operator.to_sparse() - sparse.diags(lam * (q - 1.0) * self.weight * np.abs(u) ** (q - 2.0))
        column = sparse.csc_matrix(nonlinear[:, None])
        bordered = sparse.bmat([[jacobian, -column], [q * column.T, None]], format="csc")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MatrixRankWarning)
            delta = spsolve(bordered, -np.append(residual, gap))
        if not np.all(np.isfinite(delta)):
            return None
        return w + delta[:-1], lam + float(delta[-1])

    def _newton(self, state: _State, iteration: int,
                trace: List[Tuple[int, float, float, float]]) -> Tuple[_State, int]:
        """Newton iterates retracted onto the constraint, kept while the residual drops"""
        opts = self.opts
        best = state
        lam = state.energy / float(self._nonlinear(state.w) @ state.w)
        for _ in range(opts.newton_steps):
            step = self._newton_step(best.w, lam)
            if step is None:
                self.logger.debug(f"Newton: singular system at residual {best.residual:.3e}")
                break
            w_next, lam = step
            try:
                trial = self._evaluate(self._retract(w_next))
            except YamabeError as e:
                self.logger.debug(f"Newton: retraction failed ({e})")
                break
            slack = ENERGY_SLACK * abs(best.energy)
            if not (trial.residual < best.residual and trial.energy <= best.energy + slack):
                break
            best = trial
            iteration += 1
            trace.append((iteration, best.energy, self._gap(best.w), 1.0))
            if best.residual <= opts.tol:
                break
        self.logger.debug(f"Newton: residual {state.residual:.3e} -> {best.residual:.3e}")
        return best, iteration

    def run(self, w_init: np.ndarray) -> SolveResult:
        p, spec, opts = self.p, self.spec, self.opts
        w0 = p.check_nodal(w_init, "w_init")
        if np.any(w0[list(p.boundary_dofs)] != 0.0):
            raise ContractViolation("w_init must vanish on the boundary")

        state = self._evaluate(self._retract(w0[p.interior]))
        initial_energy = state.energy
        step = opts.initial_step
        trace: List[Tuple[int, float, float, float]] = [(0, state.energy, self._gap(state.w), 0.0)]
        iteration = 0
        # Residual at the last Newton attempt; retried only after a tenfold gradient decrease
        newton_from = math.inf

        while state.residual > opts.tol:
            if state.residual <= opts.polish_below and state.residual < 0.1 * newton_from:
                newton_from = state.residual
                state, iteration = self._newton(state, iteration, trace)
                if state.residual <= opts.tol:
                    break
            if iteration >= opts.max_iter:
                raise ConvergenceError(
                    f"projected gradient hit max_iter={opts.max_iter} at residual {state.residual:.3e}",
                    {"residual": state.residual, "iterations": iteration, "q": spec.q},
                )
            iteration += 1
            slope = float(state.grad @ state.direction)
            slack = ENERGY_SLACK * abs(state.energy)
            trial_step = step
            while True:
                candidate = self._retract(state.w - trial_step * state.direction)
                energy = self.operator.quadratic(candidate)
                if energy <= state.energy - opts.armijo * trial_step * slope + slack:
                    break
                trial_step *= opts.backtrack
                if trial_step < opts.min_step:
                    candidate = None
                    break

            if candidate is None:
                # Energy decrease below roundoff: only Newton can make progress
                if newton_from > state.residual:
                    newton_from = state.residual
                    state, iteration = self._newton(state, iteration - 1, trace)
                    if state.residual <= opts.tol:
                        break
                    step = opts.initial_step
                    continue
                raise StepSizeError(
                    f"line search failed at iteration {iteration} (residual {state.residual:.3e})",
                    {"iteration": iteration, "residual": state.residual, "energy": state.energy,
                     "slope": slope, "q": spec.q},
                )

            new_state = self._evaluate(candidate)
            s = new_state.w - state.w
            y = new_state.direction - state.direction
            s_y = float(s @ (self.h1 @ y))
            s_s = float(s @ (self.h1 @ s))
            # Barzilai-Borwein trial step for the next iteration
            step = min(max(s_s / s_y, opts.min_step * 1e3), opts.max_step) if s_y > 0.0 else 2.0 * trial_step
            state = new_state
            trace.append((iteration, state.energy, self._gap(state.w), trial_step))
            if iteration % 100 == 0:
                self.logger.debug(f"iter {iteration}: I={state.energy:.15g} residual={state.residual:.3e}")

        return self._finish(state, iteration, initial_energy, trace)

    def _gap(self, w: np.ndarray) -> float:
        value = float(self.weight @ np.abs(w + self.h) ** self.spec.q)
        return abs(value - self.target) / self.spec.gamma

    def _finish(self, state: _State, iterations: int, initial_energy: float,
                trace: List[Tuple[int, float, float, float]]) -> SolveResult:
        p, spec = self.p, self.spec
        q, gamma = spec.q, spec.gamma
        w = p.embed(state.w)
        h = np.asarray(spec.h, dtype=float)
        u = w + h
        mu = p.energy(w)
        cross = float(p.weight_f @ (np.abs(u) ** (q - 2.0) * u * h))
        denominator = gamma - cross
        if not denominator > 0.0:
            raise MultiplierError(f"multiplier denominator gamma - cross = {denominator:.6g} <= 0")
        lam = mu / denominator

        h_power = float(p.weight_f @ np.abs(h) ** q)
        holder = gamma ** (1.0 - 1.0 / q) * h_power ** (1.0 / q)
        m = p.manifold
        f_min, _ = p.coeffs.f.extrema(m.r_min, m.r_max)
        bound = BoundReport(
            lq_power=p.lq_power(w, q),
            stated_bound=2.0 ** (q - 1.0) * gamma / f_min,
            complete_bound=2.0 ** (q - 1.0) * (gamma / f_min + p.lq_power(h, q)),
        )
        gap = abs(p.constraint_value(w, h, q) - gamma) / gamma
        result = SolveResult(
            w=w, h=h, q=q, gamma=gamma, mu=mu, lam=lam, residual=state.residual,
            iterations=iterations, sign_changes=detect_sign_change(p, u).crossings,
            constraint_gap=gap, cross_term=cross, holder_bound=holder,
            initial_energy=initial_energy,
            multiplier_bound=multiplier_bound(initial_energy, gamma, holder),
            bound=bound, trace=trace,
        )
        self.logger.info(
            f"q={q:.6g}: mu={mu:.12g} lambda={lam:.12g} residual={state.residual:.2e} "
            f"iterations={iterations} sign_changes={len(result.sign_changes)}"
        )
        return result


def minimize_subcritical(p: DiscreteProblem, spec: ConstraintSpec, w_init: np.ndarray,
                         opts: SolverOptions | None = None) -> SolveResult:
    """Minimize I over H_{gamma,q} starting from a feasible w_init

    Raises:
        StepSizeError: Armijo backtracking failed
        ConvergenceError: iteration cap reached
        MultiplierError: gamma - int f|u|^(q-2) u h <= 0 at the solution
    """
    return ProjectedGradientSolver(p, spec, opts).run(w_init)


def _random_start(p: DiscreteProblem, base: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Smooth random perturbation of base, zero on the boundary"""
    noise = p.embed(rng.standard_normal(p.interior.stop - p.interior.start))
    load = p.mass @ noise
    smooth = p.embed(factorization(p, "h1").solve(load[p.interior]))
    scale = np.abs(base).max() / max(np.abs(smooth).max(), np.finfo(float).tiny)
    return base + 0.5 * scale * smooth


def minimize_with_restarts(p: DiscreteProblem, spec: ConstraintSpec, psi: EigenPair,
                           opts: SolverOptions | None = None, restarts: int = 0,
                           seed: int = 0, jobs: int = 1) -> SolveResult:
    """Best of the feasible-point solve and `restarts` seeded random starts

    Results are compared in start order, so the choice does not depend on `jobs`.
    """
    start = feasible_point(p, spec, psi)
    starts = [start.w0]
    for child in np.random.SeedSequence(seed).spawn(restarts):
        candidate = _random_start(p, start.w0, np.random.default_rng(child))
        starts.append(project_to_constraint(p, spec, candidate))

    def solve(w_init: np.ndarray) -> SolveResult:
        return minimize_subcritical(p, spec, w_init, opts)

    if jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(solve, starts))
    else:
        results = [solve(w) for w in starts]

    best = min(range(len(results)), key=lambda i: (results[i].mu, i))
    if restarts:
        logger.info(f"restarts: best mu={results[best].mu:.12g} from start {best} of {len(results)}")
    # The feasible start's energy bounds every candidate's multiplier
    chosen = results[best]
    chosen.initial_energy = results[0].initial_energy
    chosen.multiplier_bound = multiplier_bound(chosen.initial_energy, chosen.gamma, chosen.holder_bound)
    return chosen


def check_schedule(n: int, schedule: Sequence[float]) -> List[float]:
    """Strictly increasing exponents in (2, 2#] ending at 2#; the last entry is snapped to 2#

    Raises:
        DomainError: empty, not increasing, wrong endpoint or an entry out of range
    """
    q_crit = critical_exponent(n)
    values = [float(q) for q in schedule]
    if not values:
        raise DomainError("q schedule is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise DomainError(f"q schedule must be strictly increasing, got {values}")
    if abs(values[-1] - q_crit) > 1e-12 * q_crit:
        raise DomainError(f"q schedule must end at 2#={q_crit:.15g}, got {values[-1]}")
    values[-1] = q_crit
    for q in values:
        check_exponent(n, q)
    return values


@log_performance
def continuation_to_critical(p: DiscreteProblem, spec_base: ConstraintSpec, schedule: Sequence[float],
                             opts: SolverOptions | None = None, psi: Optional[EigenPair] = None) -> List[SolveResult]:
    """Solve along an increasing q schedule ending at 2#, warm-starting each step

    The first step starts from the feasible point along psi_1 (computed when
    not supplied); later steps start from the previous minimizer projected
    onto the new constraint.
    """
    from src.numerics.linear_solvers import first_eigenpair

    values = check_schedule(p.manifold.n, schedule)
    specs = [spec_base.with_q(q).validate(p) for q in values]
    psi = psi or first_eigenpair(p)

    results: List[SolveResult] = []
    for spec in specs:
        try:
            if results:
                w_start = project_to_constraint(p, spec, results[-1].w)
            else:
                w_start = feasible_point(p, spec, psi).w0
            result = minimize_subcritical(p, spec, w_start, opts)
        except YamabeError as e:
            e.add_note(f"continuation step failed at q={spec.q:.15g}")
            logger.error(f"continuation failed at q={spec.q:.15g}: {e}")
            raise
        results.append(result)
    return results


def brute_force_minimum(p: DiscreteProblem, q: float, gamma: float = 1.0, restarts: int = 8,
                        seed: int = 0) -> float:
    """Independent estimate of mu for h = 0 from random starts and quasi-Newton line searches

    Minimizes the scale-invariant quotient Q_q in diagonally rescaled
    variables and returns gamma^(2/q) min Q_q.
    """
    p.check_q(q)
    block = p.interior
    operator = p.form("operator").restrict(block)
    weight = p.weight_f[block]
    scale = 1.0 / np.sqrt(operator.diag)

    def quotient(z: np.ndarray) -> Tuple[float, np.ndarray]:
        w = scale * z
        aw = operator @ w
        energy = float(w @ aw)
        power = float(weight @ np.abs(w) ** q)
        norm = power ** (2.0 / q)
        grad_w = (2.0 * aw - 2.0 * energy / power * weight * np.abs(w) ** (q - 2.0) * w) / norm
        return energy / norm, scale * grad_w

    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(restarts):
        z0 = rng.uniform(-1.0, 1.0, block.stop - block.start)
        res = optimize.minimize(quotient, z0, jac=True, method="BFGS",
                                options={"gtol": 1e-10, "maxiter": 50000})
        best = min(best, float(res.fun))
    return gamma ** (2.0 / q) * best
