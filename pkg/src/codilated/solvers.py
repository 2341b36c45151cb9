"""Iteration schemes for the normal equation A*A f = A*g.

All methods share the second-order update

    f_{n+1} = f_n + a_n (f_n - f_{n-1}) + b_n * omega * A*(g - A f_n),

with f_0 = 0 and f_1 a method-specific multiple of omega A*g.  The
coefficients come either from a recurrence scheme (general and asymmetric
variants) or from the explicit ultraspherical formulas, and the error obeys
f - f_n = r_n(omega A*A) f with r_n the matching residual polynomial, which
is what ``oracle_check`` verifies on diagonal problems.

Residual norms are recomputed from v = g - A f every step; nothing is
updated incrementally, so histories do not drift over long runs.  A solve
is single-threaded and deterministic; distinct solves share no mutable
state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .operators import LinearOperator, Problem, cached_norm_sq, diagonal_operator
from .orthopoly import (
    CoDilation,
    DivergentNormalization,
    RecurrenceScheme,
    ResidualKind,
    UltrasphericalParams,
    _effective_beta,
    residual_eval,
    ultraspherical_scheme,
)

__all__ = [
    "Method",
    "StopReason",
    "RelaxationWarning",
    "SolverConfig",
    "IterationState",
    "SolveReport",
    "discrepancy_stop",
    "landweber",
    "general_semi_iterative",
    "codilated_ultraspherical",
    "asymmetric_semi_iterative",
    "codilated_nu",
    "adaptive_codilated_one",
    "cg_normal_equations",
    "oracle_check",
    "solve",
]

STAGNATION_STEPS = 50
STAGNATION_RTOL = 1e-15


class Method(str, Enum):
    LANDWEBER = "landweber"
    GENERAL_SI = "general-si"
    CODILATED_ULTRASPHERICAL = "codilated-ultraspherical"
    ASYMMETRIC_SI = "asymmetric-si"
    CODILATED_NU = "codilated-nu"
    ADAPTIVE_CODILATED_ONE = "adaptive-codilated-one"
    CG = "cg"


class StopReason(str, Enum):
    DISCREPANCY = "discrepancy"
    MAX_ITER = "max-iter"
    STAGNATION = "stagnation"
    BREAKDOWN = "breakdown"


class RelaxationWarning(UserWarning):
    """omega ||A*A|| exceeds the range backing the convergence guarantees."""


_DEFAULT_MAX_ITER = {
    Method.LANDWEBER: 10**6,
    Method.CG: 10**3,
}


@dataclass
class SolverConfig:
    """Method selection plus iteration parameters.

    epsilon is the noise level entering the discrepancy threshold
    tau * epsilon; max_iter of None picks the per-method default
    (10^6 for Landweber, 10^3 for cg, 10^4 otherwise).
    """

    method: Method = Method.CODILATED_NU
    nu: float = 1.0
    lam: float = 1.0
    omega: float = 1.0
    tau: float = 4.0
    epsilon: float = 0.0
    max_iter: int | None = None

    def __post_init__(self):
        self.method = Method(self.method)
        if self.omega <= 0:
            raise ValueError("relaxation parameter omega must be > 0")
        if self.tau <= 1:
            raise ValueError("discrepancy factor tau must be > 1")
        if self.epsilon < 0:
            raise ValueError("noise level epsilon must be >= 0")

    def resolved_max_iter(self) -> int:
        if self.max_iter is not None:
            return self.max_iter
        return _DEFAULT_MAX_ITER.get(self.method, 10**4)


@dataclass(slots=True)
class IterationState:
    """Snapshot of one iteration; residual_norm is always recomputed
    from residual = g - A f_curr, never updated incrementally."""

    n: int
    f_curr: np.ndarray
    f_prev: np.ndarray
    mu_curr: float
    residual: np.ndarray
    residual_norm: float


@dataclass
class SolveReport:
    """Full outcome of a solve.

    residual_history has length iterations + 1 (the n = 0 entry is ||g||);
    for the adaptive method the entries from n = 1 on are the norms of the
    per-step affine-minimal residual v_min, so a discrepancy stop always
    means the final recorded norm is below tau * epsilon.
    """

    iterations: int
    stop_reason: StopReason
    residual_history: np.ndarray
    f_final: np.ndarray
    chosen_lambda: float | None = None
    gamma_final: float | None = None


def discrepancy_stop(state: IterationState, tau: float, epsilon: float) -> bool:
    """Morozov discrepancy principle: stop once ||A f_n - g|| < tau * epsilon."""
    return state.residual_norm < tau * epsilon


def _check_relaxation(op: LinearOperator, omega: float, method: Method) -> None:
    level = omega * cached_norm_sq(op)
    if method is Method.LANDWEBER:
        if level >= 1.0 - 1e-10:
            warnings.warn(
                f"omega ||A*A|| = {level:.6g} >= 1: Landweber convergence is not guaranteed",
                RelaxationWarning,
                stacklevel=3,
            )
    elif level > 1.0 + 1e-10:
        warnings.warn(
            f"omega ||A*A|| = {level:.6g} > 1: convergence guarantees lapse",
            RelaxationWarning,
            stacklevel=3,
        )


class _Stagnation:
    def __init__(self):
        self.prev = None
        self.count = 0

    def update(self, rn: float) -> bool:
        if self.prev is not None and abs(rn - self.prev) < STAGNATION_RTOL * max(rn, 1e-300):
            self.count += 1
        else:
            self.count = 0
        self.prev = rn
        return self.count >= STAGNATION_STEPS


def _semi_iterative(problem, config, start_factor, coeffs, callback=None):
    """Shared driver: coeffs yields (a_n, b_n, mu_{n+1}) for n = 1, 2, ..."""
    op, g = problem.operator, problem.g
    omega, tau, eps = config.omega, config.tau, config.epsilon
    max_iter = config.resolved_max_iter()

    f_prev = np.zeros(op.domain_dim)
    history = [float(np.linalg.norm(g))]
    state = IterationState(0, f_prev, f_prev, 1.0, g.copy(), history[0])
    if callback is not None:
        callback(state)
    if discrepancy_stop(state, tau, eps):
        return SolveReport(0, StopReason.DISCREPANCY, np.asarray(history), f_prev)

    f = start_factor * omega * op.rmatvec(g)
    mu = start_factor
    stag = _Stagnation()
    n = 1
    while True:
        v = g - op.matvec(f)
        rn = float(np.linalg.norm(v))
        history.append(rn)
        state = IterationState(n, f, f_prev, mu, v, rn)
        if callback is not None:
            callback(state)
        if discrepancy_stop(state, tau, eps):
            reason = StopReason.DISCREPANCY
            break
        if stag.update(rn):
            reason = StopReason.STAGNATION
            break
        if n >= max_iter:
            reason = StopReason.MAX_ITER
            break
        a, b, mu = next(coeffs)
        f_prev, f = f, f + a * (f - f_prev) + b * omega * op.rmatvec(v)
        n += 1
    return SolveReport(n, reason, np.asarray(history), f)


def _landweber_coeffs():
    while True:
        yield 0.0, 2.0, 1.0


def landweber(problem: Problem, config: SolverConfig, callback=None) -> SolveReport:
    """f_{n+1} = f_n + 2 omega A*(g - A f_n) from f_0 = 0."""
    _check_relaxation(problem.operator, config.omega, Method.LANDWEBER)
    return _semi_iterative(problem, config, 2.0, _landweber_coeffs(), callback)


def _general_coeffs(scheme, dilation):
    alpha, beta = scheme.alpha, _effective_beta(scheme, dilation)
    mu = 1.0 / (1.0 - alpha(0))
    n = 1
    while True:
        den = (1.0 - alpha(n)) - beta(n) * mu
        if den <= 0.0:
            raise DivergentNormalization(f"mu denominator {den} at n = {n}")
        mu = 1.0 / den
        yield (1.0 - alpha(n)) * mu - 1.0, 2.0 * mu, mu
        n += 1


def general_semi_iterative(
    problem: Problem,
    scheme: RecurrenceScheme,
    dilation: CoDilation | None,
    config: SolverConfig,
    callback=None,
) -> SolveReport:
    """Semi-iterative method driven by an arbitrary monic recurrence scheme.

    Reduces to ``landweber`` when alpha = beta = 0.
    """
    _check_relaxation(problem.operator, config.omega, Method.GENERAL_SI)
    mu1 = 1.0 / (1.0 - scheme.alpha(0))
    return _semi_iterative(problem, config, 2.0 * mu1, _general_coeffs(scheme, dilation), callback)


def _ultraspherical_coeffs(nu, lam):
    # R(n) = Gamma(2nu+1) Gamma(n+1) / Gamma(n+2nu), updated multiplicatively
    r = 1.0  # R(1)
    n = 1
    while True:
        r_next = r * (n + 1.0) / (n + 2.0 * nu)
        mu = (
            2.0
            * (n + nu)
            / (n + 2.0 * nu)
            * ((2.0 * nu - lam) + (lam - 1.0) * r)
            / ((2.0 * nu - lam) + (lam - 1.0) * r_next)
        )
        yield mu - 1.0, 2.0 * mu, mu
        r = r_next
        n += 1


def codilated_ultraspherical(
    problem: Problem, nu: float, lam: float, config: SolverConfig, callback=None
) -> SolveReport:
    """Symmetric-residual method with explicit co-dilated ultraspherical
    coefficients (dilation index m = 1); lam = 1 is the Chebyshev method
    of Stiefel for nu = 1."""
    params = UltrasphericalParams(nu)
    params.require_closed_forms()
    if lam >= 2.0 * nu:
        raise ValueError(f"dilation {lam} must be below the critical value {2.0 * nu}")
    _check_relaxation(problem.operator, config.omega, Method.CODILATED_ULTRASPHERICAL)
    return _semi_iterative(problem, config, 2.0, _ultraspherical_coeffs(nu, lam), callback)


def _asymmetric_coeffs(scheme, dilation):
    beta = _effective_beta(scheme, dilation)
    amu = 1.0 / (1.0 - beta(1))
    n = 1
    while True:
        b2n = beta(2 * n)
        damp = 1.0 - b2n - beta(2 * n + 1)
        den = damp - b2n * beta(2 * n - 1) * amu
        if den <= 0.0:
            raise DivergentNormalization(f"amu denominator {den} at n = {n}")
        amu = 1.0 / den
        yield damp * amu - 1.0, amu, amu
        n += 1


def asymmetric_semi_iterative(
    problem: Problem,
    scheme: RecurrenceScheme,
    dilation: CoDilation | None,
    config: SolverConfig,
    callback=None,
) -> SolveReport:
    """Method whose residual polynomials are P_{2n}(sqrt(1-y))/P_{2n}(1);
    these vanish at y = 1, so omega ||A*A|| = 1 is tolerated."""
    if not scheme.symmetric:
        raise ValueError("asymmetric residual polynomials need a symmetric scheme")
    _check_relaxation(problem.operator, config.omega, Method.ASYMMETRIC_SI)
    amu1 = 1.0 / (1.0 - _effective_beta(scheme, dilation)(1))
    return _semi_iterative(problem, config, amu1, _asymmetric_coeffs(scheme, dilation), callback)


def _nu_method_coeffs(nu, lam):
    r = 2.0 / (2.0 * nu + 1.0)  # R(2)
    n = 1
    while True:
        r_mid = r * (2 * n + 1.0) / (2 * n + 2.0 * nu)
        r_next = r_mid * (2 * n + 2.0) / (2 * n + 2.0 * nu + 1.0)
        amu = (
            4.0
            * (2 * n + nu)
            * (2 * n + nu + 1.0)
            / ((2 * n + 2.0 * nu) * (2 * n + 2.0 * nu + 1.0))
            * ((2.0 * nu - lam) + (lam - 1.0) * r)
            / ((2.0 * nu - lam) + (lam - 1.0) * r_next)
        )
        damp = 1.0 - (4.0 * n * n + 4.0 * nu * n + nu - 1.0) / (
            2.0 * (2 * n + nu + 1.0) * (2 * n + nu - 1.0)
        )
        yield damp * amu - 1.0, amu, amu
        r = r_next
        n += 1


def codilated_nu(
    problem: Problem, nu: float, lam: float, config: SolverConfig, callback=None
) -> SolveReport:
    """Co-dilated nu-method: asymmetric residuals with explicit coefficients.

    lam = 1 reproduces the classical nu-method; the start iterate is
    f_1 = (2 nu + 2)/(2 nu + 2 - lam) omega A* g.
    """
    params = UltrasphericalParams(nu)
    params.require_closed_forms()
    if lam >= 2.0 * nu:
        raise ValueError(f"dilation {lam} must be below the critical value {2.0 * nu}")
    _check_relaxation(problem.operator, config.omega, Method.CODILATED_NU)
    start = (2.0 * nu + 2.0) / (2.0 * nu + 2.0 - lam)
    return _semi_iterative(problem, config, start, _nu_method_coeffs(nu, lam), callback)


def adaptive_codilated_one(problem: Problem, config: SolverConfig, callback=None) -> SolveReport:
    """Adaptive variant of the co-dilated 1-method.

    Runs the lam = 1 iteration while tracking the minimal-norm point
    v_min on the affine line through the last two residuals; stops once
    ||v_min|| < tau * epsilon, then maps the minimising gamma back to the
    dilation parameter and applies the matching correction to the iterate.
    """
    _check_relaxation(problem.operator, config.omega, Method.ADAPTIVE_CODILATED_ONE)
    op, g = problem.operator, problem.g
    omega, tau, eps = config.omega, config.tau, config.epsilon
    max_iter = config.resolved_max_iter()

    f_prev = np.zeros(op.domain_dim)
    history = [float(np.linalg.norm(g))]
    state = IterationState(0, f_prev, f_prev, 1.0, g.copy(), history[0])
    if callback is not None:
        callback(state)
    if discrepancy_stop(state, tau, eps):
        return SolveReport(
            0, StopReason.DISCREPANCY, np.asarray(history), f_prev, chosen_lambda=1.0, gamma_final=0.0
        )

    f = (4.0 / 3.0) * omega * op.rmatvec(g)
    v_prev = g.copy()
    v = g - op.matvec(f)
    stag = _Stagnation()
    n = 1
    gamma = 0.0
    while True:
        dv = v - v_prev
        dv2 = float(dv @ dv)
        if dv2 < 1e-300:
            # consecutive residuals coincide: gamma is indeterminate
            gamma = 0.0
            history.append(float(np.linalg.norm(v)))
            reason = StopReason.STAGNATION
            break
        gamma = float(v @ dv) / dv2
        v_min = v - gamma * dv
        vm_norm = float(np.linalg.norm(v_min))
        history.append(vm_norm)
        state = IterationState(n, f, f_prev, gamma, v_min, vm_norm)
        if callback is not None:
            callback(state)
        if vm_norm < tau * eps:
            reason = StopReason.DISCREPANCY
            break
        if stag.update(vm_norm):
            reason = StopReason.STAGNATION
            break
        if n >= max_iter:
            reason = StopReason.MAX_ITER
            break
        f_prev, f = f, f + (2.0 * n - 1.0) / (2.0 * n + 3.0) * (f - f_prev) + 4.0 * omega * (
            2.0 * n + 1.0
        ) / (2.0 * n + 3.0) * op.rmatvec(v)
        v_prev, v = v, g - op.matvec(f)
        n += 1

    lam = 1.0 - (2.0 * n + 1.0) * gamma / ((2.0 * n - 1.0) * (1.0 - gamma))
    f_final = f - gamma * (f - f_prev)
    return SolveReport(
        n,
        reason,
        np.asarray(history),
        f_final,
        chosen_lambda=float(lam),
        gamma_final=float(gamma),
    )


def cg_normal_equations(problem: Problem, config: SolverConfig, callback=None) -> SolveReport:
    """Conjugate gradients on A*A f = A*g in factored least-squares form.

    The direction algebra uses the classical recursive residual; the
    reported and stopping norms are recomputed from g - A f each step.
    Exhaustion of the Krylov space (normal residual at roundoff) stops
    with STAGNATION; nonpositive direction curvature is a BREAKDOWN and
    the current iterate is returned as-is.
    """
    op, g = problem.operator, problem.g
    tau, eps = config.tau, config.epsilon
    max_iter = config.resolved_max_iter()

    f = np.zeros(op.domain_dim)
    history = [float(np.linalg.norm(g))]
    state = IterationState(0, f, f, 1.0, g.copy(), history[0])
    if callback is not None:
        callback(state)
    if discrepancy_stop(state, tau, eps):
        return SolveReport(0, StopReason.DISCREPANCY, np.asarray(history), f)

    r = g.copy()
    s = op.rmatvec(r)
    p = s.copy()
    gamma = float(s @ s)
    gamma0 = gamma
    stag = _Stagnation()
    n = 1
    f_prev = f
    while True:
        q = op.matvec(p)
        qq = float(q @ q)
        if qq <= 0.0:
            reason = StopReason.BREAKDOWN
            n -= 1
            break
        alpha = gamma / qq
        f_prev, f = f, f + alpha * p
        r = r - alpha * q
        v = g - op.matvec(f)
        rn = float(np.linalg.norm(v))
        history.append(rn)
        state = IterationState(n, f, f_prev, alpha, v, rn)
        if callback is not None:
            callback(state)
        if discrepancy_stop(state, tau, eps):
            reason = StopReason.DISCREPANCY
            break
        if stag.update(rn):
            reason = StopReason.STAGNATION
            break
        if n >= max_iter:
            reason = StopReason.MAX_ITER
            break
        s = op.rmatvec(r)
        gamma_new = float(s @ s)
        if gamma_new <= (1e-14) ** 2 * gamma0:
            # Krylov space exhausted: no further progress possible
            reason = StopReason.STAGNATION
            break
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new
        n += 1
    return SolveReport(n, reason, np.asarray(history), f)


def oracle_check(
    diag,
    f_true,
    scheme: RecurrenceScheme,
    dilation: CoDilation | None,
    kind: ResidualKind,
    omega: float,
    n_max: int,
) -> float:
    """Worst deviation between solver error and residual-polynomial prediction.

    Builds the noiseless diagonal problem g = A f_true, runs the solver
    matching ``kind`` for n_max steps, and compares f_true - f_n against
    r_n(omega sigma_i^2) f_true componentwise at every step.  Deviations
    are measured relative to the sup norm of f_true.
    """
    d = np.asarray(diag, dtype=float)
    f_true = np.asarray(f_true, dtype=float)
    op = diagonal_operator(d)
    problem = Problem(op, d * f_true)
    y = omega * d * d
    scale = float(np.max(np.abs(f_true)))
    worst = 0.0

    def cb(state):
        nonlocal worst
        predicted = residual_eval(scheme, dilation, kind, state.n, y) * f_true
        dev = float(np.max(np.abs((f_true - state.f_curr) - predicted)))
        worst = max(worst, dev / scale)

    config = SolverConfig(method=Method.GENERAL_SI, omega=omega, epsilon=0.0, max_iter=n_max)
    if kind is ResidualKind.SYMMETRIC:
        general_semi_iterative(problem, scheme, dilation, config, callback=cb)
    else:
        asymmetric_semi_iterative(problem, scheme, dilation, config, callback=cb)
    return worst


def solve(problem: Problem, config: SolverConfig, callback=None) -> SolveReport:
    """Dispatch on config.method; scheme-based methods use the co-dilated
    (m = 1) ultraspherical family with the config's nu and lam."""
    method = config.method
    if method is Method.LANDWEBER:
        return landweber(problem, config, callback)
    if method is Method.CG:
        return cg_normal_equations(problem, config, callback)
    if method is Method.ADAPTIVE_CODILATED_ONE:
        return adaptive_codilated_one(problem, config, callback)
    if method is Method.CODILATED_ULTRASPHERICAL:
        return codilated_ultraspherical(problem, config.nu, config.lam, config, callback)
    if method is Method.CODILATED_NU:
        return codilated_nu(problem, config.nu, config.lam, config, callback)
    scheme = ultraspherical_scheme(UltrasphericalParams(config.nu))
    dilation = None if config.lam == 1.0 else CoDilation(1, config.lam)
    if method is Method.GENERAL_SI:
        return general_semi_iterative(problem, scheme, dilation, config, callback)
    return asymmetric_semi_iterative(problem, scheme, dilation, config, callback)
