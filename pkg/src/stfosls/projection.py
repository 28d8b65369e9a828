"""L2-orthogonal projection onto the broken space of piecewise polynomials
(constant in time, linear in space per spatial element) and the conservation
quantity || P f - div_tx u_h ||.

The broken space equals the range of the space-time divergence on the trial
space, so div_tx u_h itself is representable exactly as a BrokenField; fields
are stored by their nodal values at the reference vertices of each cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import _cellwise, spatial_geometry, spatial_rule, RHS_SPACE_DEGREE, RHS_TIME_POINTS
from .fields import FieldEvaluator, reference_vertices
from .mesh import TensorMesh
from .quadrature import gauss_interval
from .solver import SolutionPair
from .spaces import ProductDofLayout

# P1 nodal mass matrices on the reference cells, scaled by 1/measure
_REF_MASS_1D = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
_REF_MASS_2D = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


def _ref_mass(dimension: int) -> np.ndarray:
    return _REF_MASS_1D if dimension == 1 else _REF_MASS_2D


def _p1_values(dimension: int, ref_points: np.ndarray) -> np.ndarray:
    """Nodal P1 basis at reference points: (n_loc, n_q)."""
    if dimension == 1:
        xi = np.atleast_1d(ref_points)
        return np.stack([1.0 - xi, xi])
    pts = np.atleast_2d(ref_points)
    return np.stack([1.0 - pts[:, 0] - pts[:, 1], pts[:, 0], pts[:, 1]])


@dataclass(frozen=True)
class BrokenField:
    """Per-cell polynomial, constant in time and linear in space, stored as
    nodal values at the reference vertices: shape (n_t, n_el, d+1)."""

    mesh: TensorMesh
    values: np.ndarray

    @property
    def dimension(self) -> int:
        return self.mesh.space.dimension

    def at_ref_points(self, m: int, ref_points: np.ndarray) -> np.ndarray:
        lam = _p1_values(self.dimension, ref_points)
        return np.einsum("ei,iq->eq", self.values[m], lam)

    def eval_cells(self, time_element, times, phys_points, ref_points):
        """Adapter matching the right-hand-side assembler's data protocol."""
        vals = self.at_ref_points(time_element, ref_points)
        return np.broadcast_to(vals[None], (len(np.atleast_1d(times)),) + vals.shape)

    def norm(self) -> float:
        """Exact L2(Q) norm from the nodal mass matrices."""
        meas = self.mesh.space.element_measures
        ht = self.mesh.time.lengths
        M = _ref_mass(self.dimension)
        cell = np.einsum("mei,ij,mej->me", self.values, M, self.values)
        return float(np.sqrt(np.einsum("m,e,me->", ht, meas, cell)))

    def minus(self, other: BrokenField) -> BrokenField:
        return BrokenField(self.mesh, self.values - other.values)


def project(f, mesh: TensorMesh, layout: ProductDofLayout) -> BrokenField:
    """L2(Q)-orthogonal projection of pointwise data onto the broken space.

    Solves the decoupled nodal mass systems cell by cell; ``f`` may be None
    (zero field), a callable f(times, points), or a cellwise object.
    """
    n_t = mesh.time.n_elements
    n_el = mesh.space.n_elements
    d = mesh.space.dimension
    if f is None:
        return BrokenField(mesh, np.zeros((n_t, n_el, d + 1)))

    fc = _cellwise(f)
    rule = spatial_rule(mesh.space, RHS_SPACE_DEGREE)
    t_rule = gauss_interval(RHS_TIME_POINTS)
    phys, jxw = spatial_geometry(mesh.space, rule)
    lam = _p1_values(d, rule.points)
    meas = mesh.space.element_measures
    inv_mass = np.linalg.inv(_ref_mass(d))

    values = np.empty((n_t, n_el, d + 1))
    part = mesh.time
    for m in range(n_t):
        t0, h = part.breakpoints[m], part.lengths[m]
        times = t0 + h * t_rule.points
        fv = fc.eval_cells(m, times, phys, rule.points)  # (n_tq, n_el, n_q)
        b = np.einsum("seq,iq,eq,s->ei", fv, lam, jxw, t_rule.weights)
        values[m] = (b @ inv_mass.T) / meas[:, None]
    return BrokenField(mesh, values)


def divergence_field(solution: SolutionPair, mesh: TensorMesh) -> BrokenField:
    """div_tx(u_h, sigma_h) as an exact member of the broken space."""
    layout = solution.layout
    ev = FieldEvaluator(layout, reference_vertices(mesh.space.dimension))
    n_t = mesh.time.n_elements
    values = np.empty((n_t, mesh.space.n_elements, mesh.space.dimension + 1))
    for m in range(n_t):
        dphi = layout.temporal_u.eval_basis(m, np.array([0.0]), 1)
        dt_u = ev.scalar_values(solution.u, m, dphi)[0]
        values[m] = dt_u + ev.flux_divergence(solution.sigma, m)
    return BrokenField(mesh, values)


def conservation_error(f, solution: SolutionPair, mesh: TensorMesh) -> float:
    """|| P f - div_tx u_h ||_{L2(Q)} via the exact broken-space mass matrices."""
    pf = project(f, mesh, solution.layout)
    return pf.minus(divergence_field(solution, mesh)).norm()
