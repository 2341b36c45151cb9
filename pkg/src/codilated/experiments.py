"""Reproducible experiment setups: problems, single solves, sweeps, tables.

Three stock problems are provided:

* ``diag-last``    A = diag(1, 1/2, ..., 1/N), data e_N + eps * w.  The data
                   sit (up to noise) on the eigenvector of A*A with the
                   smallest eigenvalue, so dilations near critical pay off.
* ``diag-second``  same operator, data e_2 + eps * w: dominated by the
                   second-largest eigenvalue, where dilation barely helps.
* ``deriv2``       the Galerkin-discretised Green's-function integral
                   equation from the operators module.

All randomness flows through one seed (default DEFAULT_SEED); identical
specs produce byte-identical CSV output.  The perturbation is the raw
(unnormalised) Gaussian draw scaled by the nominal noise level, the
convention under which the reference iteration counts were produced;
the discrepancy threshold still uses the nominal level.  Sweep points
are independent solves and may run on a thread pool; rows are aggregated
sorted by the dilation parameter, so parallel and serial runs emit
identical files.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .operators import NoisyProblem, add_noise, deriv2_assemble, diagonal_operator
from .orthopoly import CoDilation, ResidualKind, UltrasphericalParams, ultraspherical_scheme
from .solvers import Method, SolveReport, SolverConfig, StopReason, solve
from .zeros import find_zeros

__all__ = [
    "DEFAULT_SEED",
    "PROBLEM_DEFAULTS",
    "ExperimentSpec",
    "SweepRow",
    "SweepResult",
    "build_problem",
    "run_experiment",
    "run_sweep",
    "table1_rows",
    "write_report_csv",
    "write_sweep_csv",
    "write_table_csv",
]

DEFAULT_SEED = 15

# per-problem defaults: (N, omega, epsilon, tau)
PROBLEM_DEFAULTS = {
    "diag-last": (100, 1.0, 0.01, 4.0),
    "diag-second": (100, 1.0, 0.01, 4.0),
    "deriv2": (50, 96.5, 0.01, 4.0),
}


@dataclass
class ExperimentSpec:
    """One experiment: a problem, a solver configuration, optionally a
    dilation sweep, and an output path."""

    problem: str = "deriv2"
    n: int | None = None
    config: SolverConfig = field(default_factory=SolverConfig)
    sweep: tuple[float, float, float] | list[float] | None = None
    seed: int = DEFAULT_SEED
    zero_degree: int | None = None
    out: str | None = None

    def __post_init__(self):
        if self.problem not in PROBLEM_DEFAULTS:
            raise ValueError(
                f"unknown problem {self.problem!r}; choose from {sorted(PROBLEM_DEFAULTS)}"
            )
        if isinstance(self.sweep, tuple):
            lo, hi, step = self.sweep
            if not (np.isfinite(lo) and np.isfinite(hi) and step > 0):
                raise ValueError("sweep range must be finite with step > 0")

    def sweep_values(self) -> list[float]:
        if self.sweep is None:
            return []
        if isinstance(self.sweep, tuple):
            lo, hi, step = self.sweep
            count = int(np.floor((hi - lo) / step + 1e-9)) + 1
            return [lo + k * step for k in range(count)]
        return list(self.sweep)


def build_problem(spec: ExperimentSpec) -> NoisyProblem:
    """Assemble the experiment's problem with its seeded noise realisation."""
    n = spec.n if spec.n is not None else PROBLEM_DEFAULTS[spec.problem][0]
    eps = spec.config.epsilon
    if spec.problem == "deriv2":
        d2 = deriv2_assemble(n)
        return add_noise(d2.to_operator(), d2.g_vector, eps, spec.seed, normalize=False)
    op = diagonal_operator(1.0 / np.arange(1.0, n + 1.0))
    g = np.zeros(n)
    g[-1 if spec.problem == "diag-last" else 1] = 1.0
    return add_noise(op, g, eps, spec.seed, normalize=False)


def run_experiment(spec: ExperimentSpec) -> SolveReport:
    noisy = build_problem(spec)
    return solve(noisy.as_problem(), spec.config)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    iterations: int
    stop_reason: str
    final_residual: float
    smallest_zero: float


@dataclass(frozen=True)
class SweepResult:
    rows: list[SweepRow]
    zero_degree: int | None


def _sweep_point(spec: ExperimentSpec, noisy: NoisyProblem, lam: float) -> SweepRow:
    config = replace(spec.config, lam=lam)
    try:
        report = solve(noisy.as_problem(), config)
        iters = report.iterations
        reason = report.stop_reason.value
        final = float(report.residual_history[-1])
    except ArithmeticError as exc:
        iters, reason, final = 0, f"error:{type(exc).__name__}", float("nan")
    except ValueError:
        # dilation outside the method's admissible range; the zero
        # attachment below is still well defined there
        iters, reason, final = 0, "error:inadmissible", float("nan")
    zero = float("nan")
    if spec.zero_degree is not None:
        scheme = ultraspherical_scheme(UltrasphericalParams(spec.config.nu))
        zr = find_zeros(scheme, CoDilation(1, lam), ResidualKind.ASYMMETRIC, spec.zero_degree)
        if zr.zeros.size:
            zero = zr.smallest
    return SweepRow(lam, iters, reason, final, zero)


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> SweepResult:
    """One solve per dilation value; rows sorted by the dilation parameter.

    Each worker owns its problem instance, so points are independent;
    per-point failures are recorded in the row and the sweep continues.
    """
    lams = spec.sweep_values()
    if not lams:
        raise ValueError("spec has no sweep values")
    noisy = build_problem(spec)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda lam: _sweep_point(spec, noisy, lam), lams))
    else:
        rows = [_sweep_point(spec, noisy, lam) for lam in lams]
    rows.sort(key=lambda r: r.lam)
    return SweepResult(rows=rows, zero_degree=spec.zero_degree)


# (method, nu, lam) rows of the iteration-count table; the adaptive row
# reports its own optimal dilation, cg and Landweber ignore nu/lam.
TABLE1_ROWS = (
    [(Method.CODILATED_NU, 1.0, lam) for lam in (0.0, 0.5, 1.0, 1.5, 1.9, 1.99)]
    + [(Method.ADAPTIVE_CODILATED_ONE, 1.0, None)]
    + [(Method.CODILATED_NU, 1.0, 1.9999)]
    + [(Method.CODILATED_NU, 2.0, lam) for lam in (0.0, 0.5, 1.0, 3.9, 3.99, 3.999, 3.9999, 3.99998)]
    + [(Method.CG, None, None)]
)


def table1_rows(seed: int = DEFAULT_SEED, include_landweber: bool = False) -> list[dict]:
    """Iteration counts of every method on the deriv2 problem (N = 50,
    eps = 0.01, omega = 96.5, tau = 4).  The Landweber row is opt-in:
    it needs a few hundred thousand iterations.
    """
    rows = list(TABLE1_ROWS)
    if include_landweber:
        rows.append((Method.LANDWEBER, None, None))
    spec = ExperimentSpec(problem="deriv2", seed=seed)
    n, omega, eps, tau = PROBLEM_DEFAULTS["deriv2"]
    noisy = build_problem(
        replace(spec, config=SolverConfig(method=Method.CG, omega=omega, epsilon=eps, tau=tau))
    )
    out = []
    for method, nu, lam in rows:
        config = SolverConfig(
            method=method,
            nu=nu if nu is not None else 1.0,
            lam=lam if lam is not None else 1.0,
            omega=omega,
            epsilon=eps,
            tau=tau,
        )
        try:
            report = solve(noisy.as_problem(), config)
            iters = report.iterations
            reason = report.stop_reason.value
            chosen = report.chosen_lambda if report.chosen_lambda is not None else lam
        except ArithmeticError as exc:
            iters, reason, chosen = 0, f"error:{type(exc).__name__}", lam
        out.append(
            {
                "method": method.value,
                "nu": nu,
                "lambda": chosen,
                "iterations": iters,
                "stop_reason": reason,
            }
        )
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))  # plain shortest round-trip form, numpy scalars included
    return str(value)


def write_report_csv(path, report: SolveReport, config: SolverConfig, seed: int) -> None:
    """Header block of key=value comment lines, then (n, residual_norm) rows."""
    lines = [
        f"# method={config.method.value}",
        f"# nu={_fmt(config.nu)}",
        f"# lambda={_fmt(config.lam)}",
        f"# omega={_fmt(config.omega)}",
        f"# tau={_fmt(config.tau)}",
        f"# epsilon={_fmt(config.epsilon)}",
        f"# seed={seed}",
        f"# stop_reason={report.stop_reason.value}",
        f"# chosen_lambda={_fmt(report.chosen_lambda)}",
        "n,residual_norm",
    ]
    for n, rn in enumerate(report.residual_history):
        lines.append(f"{n},{_fmt(float(rn))}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_csv(path, result: SweepResult) -> None:
    lines = []
    if result.zero_degree is not None:
        lines.append(f"# zero_degree={result.zero_degree}")
    lines.append("lambda,iterations,stop_reason,final_residual,smallest_zero")
    for row in result.rows:
        lines.append(
            ",".join(
                [
                    _fmt(row.lam),
                    str(row.iterations),
                    row.stop_reason,
                    _fmt(row.final_residual),
                    _fmt(row.smallest_zero),
                ]
            )
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_table_csv(path, rows: list[dict]) -> None:
    lines = ["method,nu,lambda,iterations,stop_reason"]
    for row in rows:
        lines.append(
            ",".join(
                [
                    row["method"],
                    _fmt(row["nu"]),
                    _fmt(row["lambda"]),
                    str(row["iterations"]),
                    row["stop_reason"],
                ]
            )
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
