"""The eight error quantities reported per refinement level.

All volume terms are computed by elementwise tensor quadrature (elevated
rules, since the data are not piecewise polynomial); the traces at t = 0 and
t = T use spatial quadrature on the exact time slices, which is well defined
because the scalar variable is continuous in time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import RHS_SPACE_DEGREE, RHS_TIME_POINTS, spatial_geometry, spatial_rule
from .fields import FieldEvaluator
from .mesh import TensorMesh
from .projection import BrokenField, project
from .quadrature import gauss_interval
from .solver import SolutionPair


@dataclass(frozen=True)
class ErrorReport:
    """Least-squares error, its three components, and the L2 comparison
    errors against the reference solution, at one refinement level."""

    dofs: int
    ls_error: float
    err_div_f: float
    err_grad_plus_sigma: float
    err_u0: float
    err_u_L2Q: float
    err_Pf: float
    err_sigma: float
    err_uT: float

    COLUMNS = ("dofs", "ls_error", "err_div_f", "err_grad_plus_sigma", "err_u0",
               "err_u_L2Q", "err_Pf", "err_sigma", "err_uT")

    def as_row(self):
        return tuple(getattr(self, c) for c in self.COLUMNS)


def compute_errors(solution: SolutionPair, data, mesh: TensorMesh,
                   pf: BrokenField | None = None) -> ErrorReport:
    layout = solution.layout
    rule = spatial_rule(mesh.space, RHS_SPACE_DEGREE)
    t_rule = gauss_interval(RHS_TIME_POINTS)
    phys, jxw = spatial_geometry(mesh.space, rule)
    flat = phys.reshape(-1, mesh.space.dimension)
    ev = FieldEvaluator(layout, rule.points)
    if pf is None:
        pf = project(data.f, mesh, layout)

    acc = dict.fromkeys(("div", "grad", "u", "sigma", "pf"), 0.0)
    part = mesh.time
    tu = layout.temporal_u
    for m in range(part.n_elements):
        t0, h = part.breakpoints[m], part.lengths[m]
        times = t0 + h * t_rule.points
        w = (h * t_rule.weights)[:, None, None] * jxw[None, :, :]

        phi = tu.eval_basis(m, t_rule.points, 0)
        dphi = tu.eval_basis(m, t_rule.points, 1)
        u_h = ev.scalar_values(solution.u, m, phi)
        dt_u = ev.scalar_values(solution.u, m, dphi)
        grad_u = ev.scalar_gradient(solution.u, m, phi)     # (s, e, d)
        sig = ev.flux_values(solution.sigma, m)             # (e, q, d)
        div_sig = ev.flux_divergence(solution.sigma, m)
        div_tot = dt_u + div_sig[None]

        f_ex = np.zeros_like(u_h) if data.f is None else \
            data.f(times, flat).reshape(u_h.shape)
        u_ex = data.u_grid(times, flat).reshape(u_h.shape)
        grad_ex = data.grad_u_grid(times, flat).reshape(
            (len(times),) + sig.shape)

        acc["div"] += ((f_ex - div_tot) ** 2 * w).sum()
        gp = grad_u[:, :, None, :] + sig[None]
        acc["grad"] += ((gp ** 2).sum(axis=-1) * w).sum()
        acc["u"] += ((u_ex - u_h) ** 2 * w).sum()
        acc["sigma"] += ((((-grad_ex) - sig[None]) ** 2).sum(axis=-1) * w).sum()
        pf_vals = pf.at_ref_points(m, rule.points)
        acc["pf"] += ((pf_vals[None] - div_tot) ** 2 * w).sum()

    u0_ex = data.u0(flat).reshape(jxw.shape)
    trace0 = ev.scalar_trace(solution.u, 0)
    err_u0 = np.sqrt((((u0_ex - trace0) ** 2) * jxw).sum())

    uT_ex = data.u_at(part.end_time, flat).reshape(jxw.shape)
    traceT = ev.scalar_trace(solution.u, tu.n_dofs - 1)
    err_uT = np.sqrt((((uT_ex - traceT) ** 2) * jxw).sum())

    return ErrorReport(
        dofs=layout.n_dofs,
        ls_error=float(np.sqrt(acc["div"] + acc["grad"] + err_u0 ** 2)),
        err_div_f=float(np.sqrt(acc["div"])),
        err_grad_plus_sigma=float(np.sqrt(acc["grad"])),
        err_u0=float(err_u0),
        err_u_L2Q=float(np.sqrt(acc["u"])),
        err_Pf=float(np.sqrt(acc["pf"])),
        err_sigma=float(np.sqrt(acc["sigma"])),
        err_uT=float(err_uT),
    )


def data_l2_norms(data, mesh: TensorMesh) -> tuple[float, float]:
    """(||f||_{L2(Q)}^2, ||u0||_{L2}^2) by quadrature; used by the algebraic
    least-squares identity check."""
    rule = spatial_rule(mesh.space, RHS_SPACE_DEGREE)
    t_rule = gauss_interval(RHS_TIME_POINTS)
    phys, jxw = spatial_geometry(mesh.space, rule)
    flat = phys.reshape(-1, mesh.space.dimension)
    f_sq = 0.0
    if data.f is not None:
        part = mesh.time
        for m in range(part.n_elements):
            times = part.breakpoints[m] + part.lengths[m] * t_rule.points
            fv = data.f(times, flat).reshape((len(times),) + jxw.shape)
            w = (part.lengths[m] * t_rule.weights)[:, None, None] * jxw[None]
            f_sq += (fv ** 2 * w).sum()
    u0 = data.u0(flat).reshape(jxw.shape)
    return float(f_sq), float((u0 ** 2 * jxw).sum())


def algebraic_ls_error(A, F, x, data_norm_sq: float) -> float:
    """sqrt(x^T A x - 2 x^T F + ||f||^2 + ||u0||^2), the residual value of the
    quadratic functional at x; cross-checks the quadrature-based ls_error."""
    val = x @ (A @ x) - 2.0 * (x @ F) + data_norm_sq
    return float(np.sqrt(max(val, 0.0)))
