"""The modified iterative projection method and its named special cases.

One iteration, for n >= 1:

    y_n     = beta_n * S(x_n) + (1 - beta_n) * x_n
    z_n     = T^n y_n          (FullPower; Single applies T once,
                                MappingSequence applies the n-th mapping)
    x_{n+1} = P_C[ alpha_n * rho * V(x_n) + z_n - alpha_n * mu * F(z_n) ]

The scheme converges to the unique solution of the variational inequality
<(rho*V - mu*F) x*, x - x*> <= 0 over the fixed-point set of T; with V = 0
and F = I that solution is the minimum-norm fixed point.
"""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .geometry import (
    ConvexSet,
    Intersection,
    NumericError,
    ProblemDefinitionError,
    UsageError,
    WholeSpace,
    norm,
    sample,
    vector,
)
from .fixtures import identity_map
from .operators import MappingHandle, nu_constant, power
from .schedules import Schedule, validate_schedule

FIX_POINT_TOL = 1e-6
DEFAULT_POWER_BUDGET = 10**8
DEFAULT_N_PROBES = 32


class PowerMode:
    """How the mapping T enters the iteration."""


@dataclass(frozen=True)
class FullPower(PowerMode):
    """Apply T^n at iteration n (the main scheme)."""


@dataclass(frozen=True)
class Single(PowerMode):
    """Apply T once per iteration (the nonexpansive-T reduction)."""


@dataclass(frozen=True)
class MappingSequence(PowerMode):
    """Apply the n-th mapping of a sequence {T_n} once per iteration."""

    mapping_for: Callable[[int], MappingHandle]

    @staticmethod
    def constant(T: MappingHandle) -> "MappingSequence":
        return MappingSequence(mapping_for=lambda n: T)


class FixSetDescriptor:
    """Declared knowledge about Fix(T), used for VI residual probes."""


@dataclass(frozen=True, eq=False)
class Singleton(FixSetDescriptor):
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", vector(self.point))


@dataclass(frozen=True)
class ConvexSubset(FixSetDescriptor):
    subset: ConvexSet
    n_probes: int = DEFAULT_N_PROBES


@dataclass(frozen=True)
class SampledPoints(FixSetDescriptor):
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(vector(p) for p in self.points))


def probe_points(fix_set: FixSetDescriptor, seed: int) -> List[np.ndarray]:
    """Deterministic probe points asserted to lie in Fix(T)."""
    if isinstance(fix_set, Singleton):
        return [fix_set.point]
    if isinstance(fix_set, SampledPoints):
        return list(fix_set.points)
    if isinstance(fix_set, ConvexSubset):
        rng = np.random.default_rng(seed)
        return [sample(fix_set.subset, rng) for _ in range(fix_set.n_probes)]
    raise UsageError(f"unknown fix-set descriptor {fix_set!r}")


@dataclass(frozen=True)
class ProblemSpec:
    C: ConvexSet
    T: MappingHandle
    S: MappingHandle
    V: MappingHandle
    F: MappingHandle
    rho: float
    mu: float
    schedule: Schedule
    mode: PowerMode
    x1: np.ndarray
    fix_set: Optional[FixSetDescriptor] = None
    reference: Optional[np.ndarray] = None
    seed: int = 0
    power_budget: int = DEFAULT_POWER_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "x1", vector(self.x1))
        if self.reference is not None:
            object.__setattr__(self, "reference", vector(self.reference))


@dataclass(frozen=True)
class StopRule:
    """A ``None`` tolerance disables that rule; the budget always applies."""

    max_iters: int = 10**5
    tol_step: Optional[float] = 1e-10
    tol_fix: Optional[float] = 1e-8
    tol_vi: Optional[float] = 1e-8


@dataclass(frozen=True)
class TraceRow:
    n: int
    alpha: float
    beta: float
    step_norm: float
    fix_residual: float
    vi_residual: Optional[float]
    dist_to_reference: Optional[float]
    elapsed_ns: Optional[int]


@dataclass
class SolveReport:
    final_x: np.ndarray
    stop_reason: str  # "budget" | "step" | "fix" | "vi"
    iterations: int
    trace: List[TraceRow]


def validate_problem(p: ProblemSpec) -> List[str]:
    """All detected hypothesis violations; an empty list means valid."""
    violations = []
    eta = p.F.meta.strong_monotone
    lip = p.F.meta.lipschitz
    if eta is None or lip is None:
        violations.append("F must declare both L and eta")
    else:
        if not p.mu > 0:
            violations.append("mu must be positive")
        elif not p.mu < 2 * eta / lip**2:
            violations.append(f"mu >= 2*eta/L^2 (mu={p.mu}, bound={2 * eta / lip**2})")
        else:
            nu = nu_constant(p.mu, eta, lip)
            if p.rho < 0:
                violations.append("rho must be nonnegative")
            elif p.rho > 0:
                gamma = p.V.meta.lipschitz
                if gamma is None:
                    violations.append("V must declare gamma when rho > 0")
                elif not p.rho * gamma < nu:
                    violations.append(
                        f"rho*gamma >= nu (rho*gamma={p.rho * gamma}, nu={nu})"
                    )

    if not p.C.contains(p.x1):
        violations.append("initial point x1 is not in C")

    if isinstance(p.C, Intersection):
        try:
            p.C.feasible_point()
        except ProblemDefinitionError as exc:
            violations.append(str(exc))

    try:
        report = validate_schedule(p.schedule, p.T.meta.nearly_seq)
    except UsageError as exc:
        violations.append(f"schedule: {exc}")
    else:
        violations.extend(f"schedule: {msg}" for msg in report.failures())

    if p.fix_set is not None:
        for point in probe_points(p.fix_set, p.seed):
            residual = norm(np.asarray(p.T.evaluate(point)) - point)
            if residual > FIX_POINT_TOL:
                violations.append(
                    f"declared fixed point {point.tolist()} has residual {residual:.3e}"
                )
                break

    return violations


class _PowerBudget:
    """Counts raw T evaluations spent by FullPower without a closed form."""

    def __init__(self, budget: int):
        self.budget = budget
        self.spent = 0

    def charge(self, n: int):
        self.spent += n
        if self.spent > self.budget:
            raise NumericError(
                f"power budget exhausted: {self.spent} raw evaluations exceed "
                f"{self.budget}; supply a closed-form power or lower max_iters"
            )


def _apply_mode(p: ProblemSpec, n: int, y: np.ndarray, budget: _PowerBudget):
    if isinstance(p.mode, FullPower):
        if p.T.meta.closed_form_power is None:
            budget.charge(n)
        return power(p.T, n, y)
    if isinstance(p.mode, Single):
        return np.asarray(p.T.evaluate(y), dtype=float)
    if isinstance(p.mode, MappingSequence):
        return np.asarray(p.mode.mapping_for(n).evaluate(y), dtype=float)
    raise UsageError(f"unknown power mode {p.mode!r}")


def step(p: ProblemSpec, n: int, x: np.ndarray, budget: Optional[_PowerBudget] = None):
    """One iteration; returns x_{n+1}.

    beta_n = 0 and alpha_n = 0 short-circuit their convex combinations so the
    algebraic reductions (y_n = x_n, x_{n+1} = P_C[T^n y_n]) hold bit-exactly.
    """
    if budget is None:
        budget = _PowerBudget(p.power_budget)
    alpha = float(p.schedule.alpha(n))
    beta = float(p.schedule.beta(n))
    if beta == 0.0:
        y = x
    else:
        y = beta * np.asarray(p.S.evaluate(x), dtype=float) + (1.0 - beta) * x
    z = _apply_mode(p, n, y, budget)
    if alpha == 0.0:
        t = z
    else:
        t = (
            alpha * p.rho * np.asarray(p.V.evaluate(x), dtype=float)
            + z
            - alpha * p.mu * np.asarray(p.F.evaluate(z), dtype=float)
        )
    return p.C.project(t)


def vi_residual(x, p: ProblemSpec, probes: Optional[List[np.ndarray]] = None) -> float:
    """max(0, max_y <(rho*V - mu*F) x, y - x>) over fixed-point probes."""
    if p.fix_set is None:
        raise UsageError("vi_residual needs a fix_set on the problem")
    x = vector(x)
    if probes is None:
        probes = probe_points(p.fix_set, p.seed)
    w = p.rho * np.asarray(p.V.evaluate(x), dtype=float) - p.mu * np.asarray(
        p.F.evaluate(x), dtype=float
    )
    probe_mat = probes if isinstance(probes, np.ndarray) else np.vstack(probes)
    worst = float(np.max(probe_mat @ w)) - float(np.dot(x, w))
    return max(0.0, worst)


def solve(
    p: ProblemSpec,
    stop: StopRule = StopRule(),
    collect_timing: bool = False,
    check_valid: bool = True,
) -> SolveReport:
    """Run the iteration until a stop rule fires.

    Exhausting the iteration budget is an outcome (stop reason "budget"),
    not an error.  The run is deterministic for identical inputs.
    """
    if check_valid:
        violations = validate_problem(p)
        if violations:
            raise ProblemDefinitionError("; ".join(violations))

    probes = (
        np.vstack(probe_points(p.fix_set, p.seed)) if p.fix_set is not None else None
    )
    budget = _PowerBudget(p.power_budget)
    x = p.x1
    trace: List[TraceRow] = []
    reason = "budget"
    n = 0
    for n in range(1, stop.max_iters + 1):
        t0 = time.perf_counter_ns() if collect_timing else None
        x_next = step(p, n, x, budget)
        step_norm = norm(x_next - x)
        fix_res = norm(x_next - np.asarray(p.T.evaluate(x_next), dtype=float))
        vi = vi_residual(x_next, p, probes) if probes is not None else None
        dist = norm(x_next - p.reference) if p.reference is not None else None
        elapsed = time.perf_counter_ns() - t0 if collect_timing else None
        trace.append(
            TraceRow(
                n=n,
                alpha=float(p.schedule.alpha(n)),
                beta=float(p.schedule.beta(n)),
                step_norm=step_norm,
                fix_residual=fix_res,
                vi_residual=vi,
                dist_to_reference=dist,
                elapsed_ns=elapsed,
            )
        )
        x = x_next
        if stop.tol_step is not None and step_norm <= stop.tol_step:
            reason = "step"
            break
        if stop.tol_fix is not None and fix_res <= stop.tol_fix:
            reason = "fix"
            break
        if stop.tol_vi is not None and vi is not None and vi <= stop.tol_vi:
            reason = "vi"
            break
    return SolveReport(final_x=x, stop_reason=reason, iterations=n, trace=trace)


@dataclass
class RegularityReport:
    """Trend of ||T^n x - T^{n-1} x|| and its ratio to alpha_n per probe."""

    horizon: int
    per_probe: List[dict] = field(default_factory=list)
    passed: bool = True


def check_power_regularity(
    T: MappingHandle,
    s: Schedule,
    probes: List[np.ndarray],
    horizon: int = 10**4,
    trend_tol: float = 0.05,
) -> RegularityReport:
    """Check the asymptotic regularity of powers required of T.

    Same heuristic as the schedule validator: both quantities must be below
    ``trend_tol`` at the horizon and nonincreasing across the three probes
    n in {horizon/100, horizon/10, horizon}.
    """
    if not T.maps_into_domain:
        raise UsageError("power regularity needs a self-mapping of the domain")
    ns = [max(horizon // 100, 2), max(horizon // 10, 2), horizon]
    report = RegularityReport(horizon=horizon)
    for x in probes:
        x = vector(x)
        diffs = [norm(power(T, n, x) - power(T, n - 1, x)) for n in ns]
        ratios = [d / float(s.alpha(n)) for d, n in zip(diffs, ns)]
        ok = (
            diffs[-1] < trend_tol
            and diffs[0] >= diffs[1] >= diffs[2]
            and ratios[-1] < trend_tol
            and ratios[0] >= ratios[1] >= ratios[2]
        )
        report.per_probe.append(
            {"probe": x.tolist(), "diffs": diffs, "ratios": ratios, "passed": ok}
        )
        report.passed = report.passed and ok
    return report


VARIANTS = ("full_power", "wang_xu", "ceng", "marino_xu", "sahu")


def reduce_variant(p: ProblemSpec, variant: str) -> ProblemSpec:
    """Rewrite a problem into a named classical method configuration.

    full_power: the main scheme (T^n per iteration).
    wang_xu:    apply T once per iteration.
    ceng:       wang_xu with S replaced by the identity.
    marino_xu:  ceng, additionally requiring C to be the whole space.
    sahu:       the constant mapping-sequence form T_n = T.
    """
    if variant == "full_power":
        return dataclasses.replace(p, mode=FullPower())
    if variant == "wang_xu":
        return dataclasses.replace(p, mode=Single())
    if variant == "ceng":
        return dataclasses.replace(p, mode=Single(), S=identity_map(p.C))
    if variant == "marino_xu":
        if not isinstance(p.C, WholeSpace):
            raise UsageError("marino_xu requires C to be the whole space")
        return dataclasses.replace(p, mode=Single(), S=identity_map(p.C))
    if variant == "sahu":
        return dataclasses.replace(p, mode=MappingSequence.constant(p.T))
    raise UsageError(f"unknown variant {variant!r}; choose from {VARIANTS}")
