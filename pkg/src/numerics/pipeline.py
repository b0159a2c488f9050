"""
End-to-end experiment pipeline

Builds the manifold, coefficients, mesh, assembled problem, boundary
extension h, gamma and the constraint from a RunConfig, then evaluates the
hypotheses (coercivity, the sign of H(x0), gamma against int f|h|^2#) and
runs the solve, continuation and bubble experiments. The CLI only does I/O.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional

import numpy as np

from src.core.config import RunConfig
from src.core.errors import CoercivityError, ProblemValidationError, UnsupportedDimensionError
from src.core.logger import LoggerMixin, log_performance
from src.numerics.discretization import CoefficientField, DiscreteProblem, RadialMesh, assemble
from src.numerics.linear_solvers import (CoercivityReport, EigenPair, coercivity_check, extend_boundary_data,
                                         first_eigenpair)
from src.numerics.model_geometry import RadialManifold
from src.numerics.test_functions import BubbleFamily, ExpansionReport, HCondition, H_condition, fit_expansion, scan
from src.numerics.variational_solver import (ConstraintSpec, NontrivialityReport, SolverOptions, SolveResult,
                                             continuation_to_critical, default_gamma, default_schedule,
                                             minimize_with_restarts, nontriviality_condition)


@dataclass
class CheckReport:
    """Hypothesis verdicts; H is None where it does not apply (annulus or n = 3)"""

    coercivity: CoercivityReport
    condition: Optional[HCondition]
    condition_note: str
    gamma: Optional[float]
    gamma_threshold: Optional[float]

    @property
    def gamma_admissible(self) -> bool:
        return self.gamma is not None and self.gamma_threshold is not None and self.gamma > self.gamma_threshold

    @property
    def all_hold(self) -> bool:
        condition_ok = self.condition is None or self.condition.satisfied
        return self.coercivity.coercive and condition_ok and self.gamma_admissible


@dataclass
class SolveOutcome:
    result: SolveResult
    nontriviality: NontrivialityReport


class Pipeline(LoggerMixin):
    """Numerical objects and experiments for one run configuration"""

    def __init__(self, config: RunConfig, jobs: int = 1, seed: Optional[int] = None):
        self.config = config
        self.jobs = max(1, int(jobs))
        self.seed = config.solver.seed if seed is None else int(seed)
        self.manifold = RadialManifold(**config.manifold.model_dump())
        c = config.coefficients
        self.coeffs = CoefficientField.from_lists(c.a, c.b, c.f)
        self.mesh = RadialMesh.for_manifold(self.manifold, config.solver.mesh_elements, config.solver.grading)
        self.problem: DiscreteProblem = assemble(self.manifold, self.coeffs, self.mesh)

    @cached_property
    def h(self) -> np.ndarray:
        """Discrete extension of the boundary data"""
        return extend_boundary_data(self.problem, self.config.boundary_values())

    @cached_property
    def gamma(self) -> float:
        value = self.config.solver.gamma
        return default_gamma(self.problem, self.h) if value == "auto" else float(value)

    @cached_property
    def psi(self) -> EigenPair:
        return first_eigenpair(self.problem)

    @property
    def q(self) -> float:
        value = self.config.solver.q
        return self.problem.critical_exponent if value == "critical" else float(value)

    def schedule(self) -> List[float]:
        value = self.config.solver.q_schedule
        return default_schedule(self.manifold.n) if value == "default" else [float(q) for q in value]

    def options(self) -> SolverOptions:
        return SolverOptions(tol=self.config.solver.tol, max_iter=self.config.solver.max_iter)

    def spec(self, q: Optional[float] = None) -> ConstraintSpec:
        return ConstraintSpec(gamma=self.gamma, q=self.q if q is None else q, h=self.h).validate(self.problem)

    def bubble_family(self) -> BubbleFamily:
        bubble = self.config.bubble
        return BubbleFamily.default(
            self.manifold, self.coeffs,
            delta=None if bubble.delta == "default" else bubble.delta,
            epsilons=None if bubble.epsilons == "default" else bubble.epsilons,
        )

    def materialize(self) -> Dict[str, Any]:
        """Configuration with every 'auto'/'default'/'critical' resolved to numbers"""
        data = self.config.model_dump(mode="json")
        data["boundary"]["phi"] = self.config.boundary_values()
        solver = data["solver"]
        solver["seed"] = self.seed
        solver["q"] = self.q
        solver["q_schedule"] = self.schedule()
        try:
            solver["gamma"] = self.gamma
        except CoercivityError:
            solver["gamma"] = "unavailable (operator not coercive)"
        if self.manifold.is_ball:
            try:
                family = self.bubble_family()
                data["bubble"]["delta"] = family.delta
                data["bubble"]["epsilons"] = list(family.epsilons)
            except ProblemValidationError as e:
                data["bubble"]["delta"] = f"unavailable ({e})"
        return data

    def check(self) -> CheckReport:
        """Coercivity, condition at x0 and feasibility of gamma"""
        coercivity = coercivity_check(self.problem, tol=self.config.solver.coercivity_tol)

        condition, note = None, ""
        if not self.manifold.is_ball:
            note = "not applicable: the center is not in an annulus"
        else:
            try:
                condition = H_condition(self.manifold, self.coeffs)
            except UnsupportedDimensionError as e:
                note = f"not applicable: {e}"

        gamma, threshold = None, None
        if coercivity.coercive:
            p, zero = self.problem, np.zeros(self.problem.size)
            gamma = self.gamma
            threshold = max(p.constraint_value(zero, self.h, p.critical_exponent),
                            p.constraint_value(zero, self.h, self.q))

        report = CheckReport(coercivity=coercivity, condition=condition, condition_note=note,
                             gamma=gamma, gamma_threshold=threshold)
        self.logger.info(f"check: coercive={coercivity.coercive} "
                         f"H={'n/a' if condition is None else f'{condition.H:.6g}'} "
                         f"gamma_admissible={report.gamma_admissible}")
        return report

    @log_performance
    def solve(self) -> SolveOutcome:
        """Minimizer at the configured q with seeded restarts"""
        spec = self.spec()
        solver = self.config.solver
        result = minimize_with_restarts(self.problem, spec, self.psi, self.options(),
                                        restarts=solver.restarts, seed=self.seed, jobs=self.jobs)
        return SolveOutcome(result=result, nontriviality=nontriviality_condition(self.problem, spec, result.mu))

    def continuation(self) -> List[SolveResult]:
        return continuation_to_critical(self.problem, self.spec(self.problem.critical_exponent),
                                        self.schedule(), self.options(), psi=self.psi)

    def bubble_scan(self) -> ExpansionReport:
        family = self.bubble_family()
        return fit_expansion(family, scan(family, jobs=self.jobs))
