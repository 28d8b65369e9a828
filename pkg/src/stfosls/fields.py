"""Evaluation of discrete space-time fields at per-element reference points.

Used by the error and projection modules.  All evaluators are vectorized over
spatial elements; time enters through the element index of the slab and the
temporal basis values supplied by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spaces import ProductDofLayout


@dataclass
class FieldEvaluator:
    """Caches spatial basis tables at a fixed set of reference points."""

    layout: ProductDofLayout
    ref_points: np.ndarray

    psi: np.ndarray = field(init=False)        # (n_loc_u, n_q)
    grad_psi: np.ndarray = field(init=False)   # (n_el, n_loc_u, d)
    rho: np.ndarray = field(init=False)        # (n_el, n_loc_s, n_q, d)
    div_rho: np.ndarray = field(init=False)    # (n_el, n_loc_s, n_q)

    def __post_init__(self):
        su, ss = self.layout.spatial_u, self.layout.spatial_s
        self.psi = su.basis_values(self.ref_points)
        self.grad_psi = su.basis_gradients()
        self.rho, self.div_rho = ss.eval_basis(self.ref_points)

    def _gather_u(self, U: np.ndarray, rows) -> np.ndarray:
        """Per-element scalar coefficients (len(rows), n_el, n_loc), zero at
        constrained dofs."""
        ed = self.layout.spatial_u.element_dofs
        rows = np.asarray(rows)
        if U.shape[1] == 0:  # all scalar dofs constrained (coarsest meshes)
            return np.zeros((len(rows),) + ed.shape)
        safe = np.where(ed >= 0, ed, 0)
        vals = U[rows][:, safe]
        return np.where(ed[None, :, :] >= 0, vals, 0.0)

    def scalar_values(self, U: np.ndarray, m: int, phi: np.ndarray) -> np.ndarray:
        """u_h on slab m: (n_time_points, n_el, n_q); ``phi`` holds the
        temporal basis values (n_loc_t, n_time_points)."""
        coeffs = self._gather_u(U, self.layout.temporal_u.local_dofs(m))
        return np.einsum("is,iea,aq->seq", phi, coeffs, self.psi)

    def scalar_gradient(self, U: np.ndarray, m: int, phi: np.ndarray) -> np.ndarray:
        """grad_x u_h on slab m: (n_time_points, n_el, d), constant per element."""
        coeffs = self._gather_u(U, self.layout.temporal_u.local_dofs(m))
        return np.einsum("is,iea,ead->sed", phi, coeffs, self.grad_psi)

    def scalar_trace(self, U: np.ndarray, time_dof: int) -> np.ndarray:
        """u_h at a temporal mesh point: (n_el, n_q)."""
        coeffs = self._gather_u(U, [time_dof])[0]
        return np.einsum("ea,aq->eq", coeffs, self.psi)

    def _gather_s(self, S: np.ndarray, m: int) -> np.ndarray:
        row = self.layout.temporal_s.local_dofs(m)[0]
        return S[row][self.layout.spatial_s.element_dofs]  # (n_el, n_loc_s)

    def flux_values(self, S: np.ndarray, m: int) -> np.ndarray:
        """sigma_h on slab m (constant in time): (n_el, n_q, d)."""
        return np.einsum("eb,ebqd->eqd", self._gather_s(S, m), self.rho)

    def flux_divergence(self, S: np.ndarray, m: int) -> np.ndarray:
        """div_x sigma_h on slab m: (n_el, n_q)."""
        return np.einsum("eb,ebq->eq", self._gather_s(S, m), self.div_rho)


def reference_vertices(dimension: int) -> np.ndarray:
    if dimension == 1:
        return np.array([0.0, 1.0])
    return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


class ManufacturedDiscrete:
    """Data manufactured from a coefficient pair (u, sigma) of the trial space.

    Exposes the sources that make the pair the exact zero-residual minimizer:
    ``f`` = div_tx(u, sigma), ``grad_load`` = grad_x u + sigma, and ``u0`` =
    the t = 0 trace.  All three plug into the right-hand-side assembler's
    cellwise protocol.
    """

    def __init__(self, layout: ProductDofLayout, u_coeffs: np.ndarray,
                 sigma_coeffs: np.ndarray):
        self.layout = layout
        self.u_coeffs = np.asarray(u_coeffs, dtype=float)
        self.sigma_coeffs = np.asarray(sigma_coeffs, dtype=float)
        self._evaluators: dict[bytes, FieldEvaluator] = {}
        self.f = _ManufacturedDiv(self)
        self.u0 = _ManufacturedTrace(self)

    @property
    def grad_load(self):
        return _ManufacturedGrad(self)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.u_coeffs.ravel(), self.sigma_coeffs.ravel()])

    def evaluator(self, ref_points: np.ndarray) -> FieldEvaluator:
        key = np.ascontiguousarray(ref_points).tobytes()
        if key not in self._evaluators:
            self._evaluators[key] = FieldEvaluator(self.layout, ref_points)
        return self._evaluators[key]


class _ManufacturedDiv:
    def __init__(self, parent: ManufacturedDiscrete):
        self.parent = parent

    def eval_cells(self, m, times, phys_points, ref_points):
        p = self.parent
        ev = p.evaluator(ref_points)
        n_t = len(np.atleast_1d(times))
        dphi = p.layout.temporal_u.eval_basis(m, np.zeros(n_t), 1)
        dt_u = ev.scalar_values(p.u_coeffs, m, dphi)
        return dt_u + ev.flux_divergence(p.sigma_coeffs, m)[None]


class _ManufacturedGrad:
    def __init__(self, parent: ManufacturedDiscrete):
        self.parent = parent

    def eval_cells(self, m, times, phys_points, ref_points):
        p = self.parent
        ev = p.evaluator(ref_points)
        tloc = np.atleast_1d(times)
        part = p.layout.temporal_u.partition
        xi = (tloc - part.breakpoints[m]) / part.lengths[m]
        phi = p.layout.temporal_u.eval_basis(m, xi, 0)
        grad_u = ev.scalar_gradient(p.u_coeffs, m, phi)      # (s, e, d)
        sig = ev.flux_values(p.sigma_coeffs, m)              # (e, q, d)
        return grad_u[:, :, None, :] + sig[None]


class _ManufacturedTrace:
    def __init__(self, parent: ManufacturedDiscrete):
        self.parent = parent

    def trace_cells(self, phys_points, ref_points):
        ev = self.parent.evaluator(ref_points)
        return ev.scalar_trace(self.parent.u_coeffs, 0)
