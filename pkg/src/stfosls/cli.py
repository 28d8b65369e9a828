"""Convergence-study driver: refine, assemble, solve, measure, report.

Writes one CSV per study with the header

    dofs,estimators,estimators_f,estimators_g,estimators_u0,estimators_u,estimators_Pf,estimators_sigma,estimators_u1

mapping in order to (dofs, ls_error, err_div_f, err_grad_plus_sigma, err_u0,
err_u_L2Q, err_Pf, err_sigma, err_uT), floats with 16 significant digits, and
prints a table of empirical orders of convergence (EOC) with respect to the
number of degrees of freedom: errors ~ dofs^EOC, so decaying errors give
negative rates.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import nullcontext
from dataclasses import dataclass

import numpy as np

from .assembly import assemble_factors, assemble_rhs, assemble_system
from .errors import ErrorReport, compute_errors
from .exact import DEFAULT_FOURIER_TERMS, PROBLEM_NAMES, make_problem
from .mesh import initial_tensor_mesh
from .projection import project
from .solver import SolveOptions, solve_spd
from .spaces import build_layout

CSV_HEADER = ("dofs,estimators,estimators_f,estimators_g,estimators_u0,"
              "estimators_u,estimators_Pf,estimators_sigma,estimators_u1")

# ErrorReport fields in CSV column order (after dofs)
CSV_FIELDS = ("ls_error", "err_div_f", "err_grad_plus_sigma", "err_u0",
              "err_u_L2Q", "err_Pf", "err_sigma", "err_uT")

# The initial mesh does not resolve the kink of the hat initial datum, so the
# non-smooth studies start reporting at the first refinement level.
_START_LEVEL = {"smooth_1d": 0, "nonsmooth_1d": 1, "smooth_2d": 0, "nonsmooth_2d": 1}

_DEFAULT_LEVELS = {
    ("smooth_1d", 1): 9,
    ("smooth_1d", 2): 7,
    ("nonsmooth_1d", 1): 8,
    ("nonsmooth_1d", 2): 5,
    ("smooth_2d", 1): 6,
    ("smooth_2d", 2): 5,
    ("nonsmooth_2d", 1): 5,
    ("nonsmooth_2d", 2): 4,
}


# Study default: the solver-module default of 1e-12 sits at the attainable
# double-precision residual floor on the deepest meshes; 1e-10 is reliably
# reachable and still more than four orders below the smallest measured error.
STUDY_TOL = 1e-10

# The zero-source hat-datum problem on the unit square has a tiny load vector
# relative to ||A|| ||x||, which raises the Jacobi-PCG residual floor to
# ~1.4e-8 at the deepest equal-scaling level; its study runs at 1e-7.
_DEFAULT_TOLS = {("nonsmooth_2d", 1): 1e-7}


@dataclass(frozen=True)
class StudyConfig:
    problem: str
    scaling: int = 1
    levels: int | None = None
    out: str | None = None
    solver: SolveOptions | None = None
    fourier_terms: int = DEFAULT_FOURIER_TERMS
    dof_budget: int = 2_000_000
    serial: bool = False

    def __post_init__(self):
        if self.problem not in PROBLEM_NAMES:
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.scaling not in (1, 2):
            raise ValueError("scaling must be 1 or 2")
        if self.levels is not None and self.levels < 2:
            raise ValueError("a convergence study needs at least 2 levels")

    @property
    def n_levels(self) -> int:
        return self.levels if self.levels is not None else \
            _DEFAULT_LEVELS[(self.problem, self.scaling)]

    @property
    def solver_options(self) -> SolveOptions:
        if self.solver is not None:
            return self.solver
        tol = _DEFAULT_TOLS.get((self.problem, self.scaling), STUDY_TOL)
        return SolveOptions(tol=tol)


@dataclass(frozen=True)
class RateTable:
    """EOC per consecutive level pair and per error column.

    Entries are None where either error sits below the trust threshold
    (10x solver tolerance)."""

    dofs: list[int]
    rates: dict[str, list[float | None]]

    def average_last(self, column: str, n_pairs: int = 3) -> float | None:
        vals = [r for r in self.rates[column][-n_pairs:] if r is not None]
        return sum(vals) / len(vals) if vals else None

    def format(self) -> str:
        cols = list(self.rates)
        lines = ["pair".ljust(16) + "".join(c.rjust(20) for c in cols)]
        n = len(self.dofs) - 1
        for i in range(n):
            label = f"{self.dofs[i]}->{self.dofs[i + 1]}"
            cells = []
            for c in cols:
                r = self.rates[c][i]
                cells.append(("  n/a" if r is None else f"{r:+.3f}").rjust(20))
            lines.append(label.ljust(16) + "".join(cells))
        avg = ["avg(last 3)".ljust(16)]
        for c in cols:
            r = self.average_last(c)
            avg.append(("  n/a" if r is None else f"{r:+.3f}").rjust(20))
        lines.append("".join(avg))
        return "\n".join(lines)


def compute_eoc(errors, dofs, threshold: float = 0.0):
    """Per-pair decay exponents: errors ~ dofs^EOC (negative when decaying).

    Non-positive or below-threshold errors yield None markers.
    """
    errors = list(errors)
    dofs = list(dofs)
    if len(errors) != len(dofs):
        raise ValueError("errors and dofs must have equal length")
    out = []
    for i in range(len(errors) - 1):
        e0, e1 = errors[i], errors[i + 1]
        if e0 <= threshold or e1 <= threshold:
            out.append(None)
        else:
            out.append(float(np.log(e1 / e0) / np.log(dofs[i + 1] / dofs[i])))
    return out


def rate_table(reports: list[ErrorReport], tol: float) -> RateTable:
    dofs = [r.dofs for r in reports]
    threshold = 10.0 * tol
    rates = {c: compute_eoc([getattr(r, c) for r in reports], dofs, threshold)
             for c in CSV_FIELDS}
    return RateTable(dofs=dofs, rates=rates)


@dataclass(frozen=True)
class StudyResult:
    config: StudyConfig
    reports: list[ErrorReport]
    rates: RateTable
    partial: bool = False  # dof budget reached before the requested depth


def _serial_context(enabled: bool):
    if not enabled:
        return nullcontext()
    try:
        from threadpoolctl import threadpool_limits
        return threadpool_limits(limits=1)
    except ImportError:
        return nullcontext()


def run_study(config: StudyConfig, log=None) -> StudyResult:
    """Run the refine -> assemble -> solve -> project -> measure loop."""
    def say(msg):
        if log is not None:
            print(msg, file=log, flush=True)

    data = make_problem(config.problem, config.fourier_terms)
    mesh = initial_tensor_mesh(data.domain, config.scaling)
    for _ in range(_START_LEVEL[config.problem]):
        mesh = mesh.refine_uniform()

    reports: list[ErrorReport] = []
    partial = False
    with _serial_context(config.serial):
        for level in range(config.n_levels):
            layout = build_layout(mesh)
            if layout.n_dofs > config.dof_budget:
                partial = True
                say(f"level {level}: {layout.n_dofs} dofs exceed budget "
                    f"{config.dof_budget}, stopping early (partial results)")
                break
            factors = assemble_factors(mesh, layout)
            A = assemble_system(factors, layout)
            F = assemble_rhs(data, mesh, layout)
            try:
                solution = solve_spd(A, F, layout, config.solver_options)
            except Exception as exc:
                raise RuntimeError(
                    f"solver failed at level {level} "
                    f"({layout.n_dofs} dofs): {exc}") from exc
            pf = project(data.f, mesh, layout)
            report = compute_errors(solution, data, mesh, pf)
            reports.append(report)
            say(f"level {level}: dofs={report.dofs} ls={report.ls_error:.6e} "
                f"cg_iters={solution.iterations}")
            mesh = mesh.refine_uniform()

    rates = rate_table(reports, config.solver_options.tol)
    result = StudyResult(config=config, reports=reports, rates=rates, partial=partial)
    if config.out:
        write_csv(config.out, reports)
    return result


def format_csv(reports: list[ErrorReport]) -> str:
    lines = [CSV_HEADER]
    for r in reports:
        vals = ",".join(f"{getattr(r, c):.15e}" for c in CSV_FIELDS)
        lines.append(f"{r.dofs},{vals}")
    return "\n".join(lines) + "\n"


def write_csv(path: str, reports: list[ErrorReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_csv(reports))


# Acceptance EOC bands (average over the last three level pairs); "decay"
# asserts strictly decreasing values instead of a rate.
ACCEPTANCE_BANDS: dict[tuple[str, int], dict[str, tuple[float, float] | str]] = {
    ("smooth_1d", 1): {
        "ls_error": (-0.55, -0.45),
        "err_u_L2Q": (-1.10, -0.90),
        "err_Pf": (-1.10, -0.90),
        "err_u0": (-1.10, -0.90),
        "err_uT": (-1.10, -0.90),
        "err_sigma": (-0.60, -0.45),
    },
    ("smooth_1d", 2): {
        "ls_error": (-0.38, -0.28),
        "err_u_L2Q": (-0.72, -0.60),
        "err_sigma": (-0.72, -0.60),
    },
    ("nonsmooth_1d", 1): {
        "ls_error": (-0.43, -0.33),
        "err_u_L2Q": (-0.68, -0.58),
        "err_uT": (-1.10, -0.85),
    },
    ("nonsmooth_1d", 2): {
        "ls_error": (-0.38, -0.28),
        "err_u_L2Q": (-0.72, -0.60),
        "err_sigma": (-0.56, -0.44),
        "err_u0": (-0.56, -0.44),
    },
    ("smooth_2d", 1): {
        "ls_error": (-0.38, -0.28),
        "err_u_L2Q": (-0.72, -0.58),
    },
    ("smooth_2d", 2): {
        "ls_error": (-0.30, -0.20),
        "err_u_L2Q": (-0.56, -0.44),
    },
    ("nonsmooth_2d", 1): {
        "ls_error": (-0.30, -0.20),
        "err_uT": "decay",
    },
    ("nonsmooth_2d", 2): {
        "ls_error": (-0.30, -0.20),
        "err_u_L2Q": (-0.56, -0.44),
    },
}


def check_rates(result: StudyResult) -> list[str]:
    """Violated acceptance bands for this study (empty = all good)."""
    key = (result.config.problem, result.config.scaling)
    bands = ACCEPTANCE_BANDS.get(key, {})
    problems = []
    for col, band in bands.items():
        if band == "decay":
            vals = [getattr(r, col) for r in result.reports]
            if any(b >= a for a, b in zip(vals, vals[1:])):
                problems.append(f"{col}: not strictly decreasing ({vals})")
            continue
        lo, hi = band
        avg = result.rates.average_last(col)
        if avg is None or not lo <= avg <= hi:
            problems.append(f"{col}: avg EOC {avg} outside [{lo}, {hi}]")
    return problems


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stfosls",
        description="Space-time least-squares convergence studies for the heat equation.")
    parser.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    parser.add_argument("--scaling", default="equal", choices=("equal", "parabolic"),
                        help="mesh scaling: equal (h_t ~ h_x) or parabolic (h_t ~ h_x^2)")
    parser.add_argument("--levels", type=int, default=None,
                        help="number of refinement levels to run (default per study)")
    parser.add_argument("--out", default=None, help="CSV output path")
    parser.add_argument("--solver", default="cg", choices=("cg", "direct"))
    parser.add_argument("--tol", type=float, default=None,
                        help="relative residual tolerance of the solver "
                             "(default 1e-10; 1e-7 for the non-smooth 2D "
                             "equal-scaling study)")
    parser.add_argument("--fourier-terms", type=int, default=DEFAULT_FOURIER_TERMS,
                        help="series truncation per coordinate (non-smooth data)")
    parser.add_argument("--dof-budget", type=int, default=2_000_000,
                        help="stop (with partial results) before exceeding this many dofs")
    parser.add_argument("--serial", action="store_true",
                        help="force fully deterministic single-threaded execution")
    parser.add_argument("--check-rates", action="store_true",
                        help="exit nonzero if the acceptance EOC bands are violated")
    args = parser.parse_args(argv)

    method = "direct_cholesky" if args.solver == "direct" else "cg"
    if args.tol is not None:
        solver = SolveOptions(method=method, tol=args.tol)
    elif method != "cg":
        solver = SolveOptions(method=method)
    else:
        solver = None  # per-study default tolerance
    config = StudyConfig(
        problem=args.problem,
        scaling=1 if args.scaling == "equal" else 2,
        levels=args.levels,
        out=args.out,
        solver=solver,
        fourier_terms=args.fourier_terms,
        dof_budget=args.dof_budget,
        serial=args.serial,
    )
    result = run_study(config, log=sys.stdout)
    if result.partial:
        print("note: stopped early at the dof budget; results are partial")
    print(result.rates.format())
    if args.check_rates:
        problems = check_rates(result)
        if problems:
            for p in problems:
                print(f"RATE CHECK FAILED [{config.problem}, s={config.scaling}] {p}")
            return 1
        print("rate check passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
