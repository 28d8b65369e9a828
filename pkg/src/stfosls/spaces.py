"""Degree-of-freedom maps and basis evaluation for the four factor spaces.

The trial space is the product of

* scalar block: continuous piecewise polynomials in time (degree k) tensor
  continuous piecewise polynomials in space (degree l, zero trace), and
* flux block: discontinuous piecewise polynomials in time (degree k-1) tensor
  the H(div)-conforming Raviart-Thomas space of order l.

Only k = l = 1 is supported; the API carries the degrees for forward
compatibility and rejects anything else.

On intervals the flux space coincides with continuous piecewise quadratics.
On triangles the order-1 Raviart-Thomas element has 8 local degrees of
freedom: two moments of the normal component per edge (against 1 and the
signed edge coordinate) and two interior moments against the coordinate unit
vectors.  All functionals are defined globally -- edges are parameterized from
their lower- to their higher-numbered vertex -- so shared-edge degrees of
freedom automatically agree between neighboring elements.  Local bases are
built per element by Piola-mapping a fixed set of reference generators
(v = J v_hat / det J, div v = div v_hat / det J) and inverting the 8x8 matrix
of functional values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import IntervalMesh, SpatialMesh, TensorMesh, TimePartition, TriangleMesh
from .quadrature import gauss_interval, triangle_rule


# ---------------------------------------------------------------------------
# temporal factor spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TemporalSpace:
    """Piecewise polynomials in time: continuous hats (S_k) or per-element
    discontinuous polynomials (P_{k-1})."""

    kind: str  # "continuous" | "discontinuous"
    degree: int
    partition: TimePartition

    def __post_init__(self):
        if self.kind == "continuous":
            if self.degree != 1:
                raise NotImplementedError("only degree-1 continuous time elements")
        elif self.kind == "discontinuous":
            if self.degree != 0:
                raise NotImplementedError("only degree-0 discontinuous time elements")
        else:
            raise ValueError(f"unknown temporal kind {self.kind!r}")

    @property
    def n_dofs(self) -> int:
        n = self.partition.n_elements
        return n + 1 if self.kind == "continuous" else n

    @property
    def n_local(self) -> int:
        return 2 if self.kind == "continuous" else 1

    def local_dofs(self, element: int) -> np.ndarray:
        if self.kind == "continuous":
            return np.array([element, element + 1])
        return np.array([element])

    def eval_basis(self, element: int, local_coords, derivative_order: int = 0) -> np.ndarray:
        """Shape-function values on one element, shape (n_local, n_points).

        ``local_coords`` live on [0, 1]; time derivatives are scaled by the
        element length (chain rule).
        """
        xi = np.atleast_1d(np.asarray(local_coords, dtype=float))
        if derivative_order not in (0, 1):
            raise ValueError("derivative_order must be 0 or 1")
        h = self.partition.lengths[element]
        if self.kind == "continuous":
            if derivative_order == 0:
                return np.stack([1.0 - xi, xi])
            return np.stack([np.full_like(xi, -1.0 / h), np.full_like(xi, 1.0 / h)])
        if derivative_order == 0:
            return np.ones((1, len(xi)))
        return np.zeros((1, len(xi)))


def eval_temporal_basis(space: TemporalSpace, element: int, local_coord,
                        derivative_order: int = 0) -> np.ndarray:
    return space.eval_basis(element, local_coord, derivative_order)


# ---------------------------------------------------------------------------
# spatial scalar space (Lagrange P1, zero trace)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpatialScalarSpace:
    """Continuous piecewise-linear functions vanishing on the boundary."""

    mesh: SpatialMesh
    degree: int

    vertex_to_dof: np.ndarray = field(init=False)
    element_dofs: np.ndarray = field(init=False)  # (n_el, n_local), -1 = constrained

    def __post_init__(self):
        if self.degree != 1:
            raise NotImplementedError("only degree-1 scalar elements")
        interior = ~self.mesh.boundary_vertex_mask
        vertex_to_dof = np.full(self.mesh.n_vertices, -1, dtype=np.int64)
        vertex_to_dof[interior] = np.arange(interior.sum())
        object.__setattr__(self, "vertex_to_dof", vertex_to_dof)
        if isinstance(self.mesh, IntervalMesh):
            elems = self.mesh.elements
        else:
            elems = self.mesh.triangles
        object.__setattr__(self, "element_dofs", vertex_to_dof[elems])

    @property
    def n_dofs(self) -> int:
        return int((self.vertex_to_dof >= 0).sum())

    @property
    def n_local(self) -> int:
        return self.mesh.dimension + 1

    def basis_values(self, ref_points) -> np.ndarray:
        """Reference shape functions, shape (n_local, n_points)."""
        if isinstance(self.mesh, IntervalMesh):
            xi = np.atleast_1d(np.asarray(ref_points, dtype=float))
            return np.stack([1.0 - xi, xi])
        pts = np.atleast_2d(np.asarray(ref_points, dtype=float))
        x, y = pts[:, 0], pts[:, 1]
        return np.stack([1.0 - x - y, x, y])

    def basis_gradients(self) -> np.ndarray:
        """Physical gradients, constant per element: shape (n_el, n_local, d)."""
        if isinstance(self.mesh, IntervalMesh):
            h = self.mesh.element_lengths
            g = np.empty((self.mesh.n_elements, 2, 1))
            g[:, 0, 0] = -1.0 / h
            g[:, 1, 0] = 1.0 / h
            return g
        p = self.mesh.vertices[self.mesh.triangles]  # (nt, 3, 2)
        area2 = 2.0 * self.mesh.element_measures
        g = np.empty((self.mesh.n_elements, 3, 2))
        for i in range(3):
            a, b = p[:, (i + 1) % 3], p[:, (i + 2) % 3]
            # grad of barycentric coordinate i: rotate opposite edge
            g[:, i, 0] = (a[:, 1] - b[:, 1]) / area2
            g[:, i, 1] = (b[:, 0] - a[:, 0]) / area2
        return g


# ---------------------------------------------------------------------------
# spatial flux spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalFluxSpace:
    """Continuous piecewise quadratics on an interval mesh (the 1D analogue of
    the order-1 Raviart-Thomas space); 'divergence' is the derivative."""

    mesh: IntervalMesh
    degree: int

    def __post_init__(self):
        if self.degree != 1:
            raise NotImplementedError("only order-1 flux elements")

    @property
    def n_dofs(self) -> int:
        return 2 * self.mesh.n_elements + 1

    @property
    def n_local(self) -> int:
        return 3

    @property
    def element_dofs(self) -> np.ndarray:
        n = self.mesh.n_elements
        e = np.arange(n)
        # vertices 0..n, then element midpoints
        return np.column_stack([e, n + 1 + e, e + 1])

    def eval_basis(self, ref_points):
        """(values, divergences) for all elements.

        values: (n_el, 3, n_points, 1); divergences: (n_el, 3, n_points).
        """
        xi = np.atleast_1d(np.asarray(ref_points, dtype=float))
        vals = np.stack([
            (1.0 - xi) * (1.0 - 2.0 * xi),
            4.0 * xi * (1.0 - xi),
            xi * (2.0 * xi - 1.0),
        ])  # (3, np)
        ders = np.stack([4.0 * xi - 3.0, 4.0 - 8.0 * xi, 4.0 * xi - 1.0])
        h = self.mesh.element_lengths
        n_el = self.mesh.n_elements
        values = np.broadcast_to(vals[None, :, :, None], (n_el, 3, len(xi), 1)).copy()
        divs = ders[None, :, :] / h[:, None, None]
        return values, divs


_RT1_N_GENERATORS = 8


def _rt1_generators(ref_points: np.ndarray):
    """Reference generator fields spanning RT1 and their divergences.

    Returns values (8, n_points, 2) and divergences (8, n_points).
    """
    x, y = ref_points[:, 0], ref_points[:, 1]
    one, zero = np.ones_like(x), np.zeros_like(x)
    vals = np.stack([
        np.stack([one, zero], axis=-1),
        np.stack([x, zero], axis=-1),
        np.stack([y, zero], axis=-1),
        np.stack([zero, one], axis=-1),
        np.stack([zero, x], axis=-1),
        np.stack([zero, y], axis=-1),
        np.stack([x * x, x * y], axis=-1),
        np.stack([x * y, y * y], axis=-1),
    ])
    divs = np.stack([zero, one, zero, zero, zero, one, 3.0 * x, 3.0 * y])
    return vals, divs


_REF_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class TriangleFluxSpace:
    """Order-1 Raviart-Thomas space on a triangle mesh."""

    mesh: TriangleMesh
    degree: int

    jacobians: np.ndarray = field(init=False)      # (nt, 2, 2)
    det_j: np.ndarray = field(init=False)          # (nt,)
    coeffs: np.ndarray = field(init=False)         # (nt, 8, 8) generator coefficients
    element_dofs: np.ndarray = field(init=False)   # (nt, 8)

    def __post_init__(self):
        if self.degree != 1:
            raise NotImplementedError("only order-1 flux elements")
        mesh = self.mesh
        p = mesh.vertices[mesh.triangles]  # (nt, 3, 2)
        jac = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=-1)
        det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        if (det <= 0).any():
            raise ValueError("degenerate or inverted element")
        object.__setattr__(self, "jacobians", jac)
        object.__setattr__(self, "det_j", det)
        object.__setattr__(self, "coeffs", self._build_coeffs(p, jac, det))
        edge_dofs = (2 * mesh.triangle_edges[:, :, None] + np.arange(2)).reshape(-1, 6)
        base = 2 * mesh.n_edges
        interior = base + 2 * np.arange(mesh.n_elements)[:, None] + np.arange(2)
        object.__setattr__(self, "element_dofs", np.hstack([edge_dofs, interior]))

    @property
    def n_dofs(self) -> int:
        return 2 * self.mesh.n_edges + 2 * self.mesh.n_elements

    @property
    def n_local(self) -> int:
        return _RT1_N_GENERATORS

    def _build_coeffs(self, p, jac, det):
        """Invert the matrix of global functionals applied to the Piola-mapped
        generators; column d of the result expands local shape function d."""
        mesh = self.mesh
        nt = mesh.n_elements
        n_mat = np.empty((nt, 8, 8))

        edge_rule = gauss_interval(3)
        s = edge_rule.points
        for j in range(3):  # local edge j: local vertices j -> (j+1) % 3
            va = mesh.triangles[:, j]
            vb = mesh.triangles[:, (j + 1) % 3]
            swap = va > vb  # canonical orientation: low -> high vertex id
            lo = np.where(swap, vb, va)
            hi = np.where(swap, va, vb)
            a, b = mesh.vertices[lo], mesh.vertices[hi]
            tang = b - a
            length = np.linalg.norm(tang, axis=1)
            normal = np.stack([tang[:, 1], -tang[:, 0]], axis=-1) / length[:, None]
            # reference coordinates of the edge endpoints within this triangle
            ra = np.where(swap[:, None], _REF_VERTICES[(j + 1) % 3], _REF_VERTICES[j])
            rb = np.where(swap[:, None], _REF_VERTICES[j], _REF_VERTICES[(j + 1) % 3])
            ref_pts = ra[:, None, :] + s[None, :, None] * (rb - ra)[:, None, :]  # (nt, ns, 2)
            gen_vals, _ = _rt1_generators(ref_pts.reshape(-1, 2))
            gen_vals = gen_vals.reshape(8, nt, len(s), 2).transpose(1, 0, 2, 3)
            phys = np.einsum("tij,tgpj->tgpi", jac, gen_vals) / det[:, None, None, None]
            vn = np.einsum("tgpi,ti->tgp", phys, normal)
            w = edge_rule.weights
            n_mat[:, 2 * j, :] = np.einsum("tgp,p->tg", vn, w) * length[:, None]
            n_mat[:, 2 * j + 1, :] = np.einsum("tgp,p->tg", vn * (2.0 * s - 1.0), w) * length[:, None]

        rule = triangle_rule(2)
        gen_vals, _ = _rt1_generators(rule.points)
        # det J cancels: int_K v dx = det J * sum_q w_q (J g / det J)
        interior = np.einsum("tij,gqj,q->tgi", jac, gen_vals, rule.weights)
        n_mat[:, 6, :] = interior[:, :, 0]
        n_mat[:, 7, :] = interior[:, :, 1]

        return np.linalg.inv(n_mat)  # (nt, gen, dof): column d expands shape function d

    def eval_basis(self, ref_points):
        """(values, divergences) of all local shape functions on all elements.

        values: (n_el, 8, n_points, 2); divergences: (n_el, 8, n_points).
        """
        pts = np.atleast_2d(np.asarray(ref_points, dtype=float))
        gen_vals, gen_divs = _rt1_generators(pts)
        phys = np.einsum("tij,gpj->tgpi", self.jacobians, gen_vals)
        phys /= self.det_j[:, None, None, None]
        values = np.einsum("tgd,tgpi->tdpi", self.coeffs, phys)
        divs = np.einsum("tgd,gp->tdp", self.coeffs, gen_divs) / self.det_j[:, None, None]
        return values, divs


SpatialFluxSpace = IntervalFluxSpace | TriangleFluxSpace


def eval_rt_basis(space: SpatialFluxSpace, ref_points, element: int | None = None):
    """Physical flux basis values and divergences, for one element or all.

    With an element index the arrays lose their leading element axis:
    values (n_local, n_points, d) and divergences (n_local, n_points).
    """
    values, divs = space.eval_basis(ref_points)
    if element is None:
        return values, divs
    return values[element], divs[element]


def make_flux_space(mesh: SpatialMesh, degree: int) -> SpatialFluxSpace:
    if isinstance(mesh, IntervalMesh):
        return IntervalFluxSpace(mesh, degree)
    return TriangleFluxSpace(mesh, degree)


# ---------------------------------------------------------------------------
# product layout
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductDofLayout:
    """Global indexing of the two blocks: row-major temporal x spatial.

    Scalar-block dof (i, a) sits at index i * n_spatial_u + a; flux-block dof
    (m, e) at sigma_offset + m * n_spatial_s + e.
    """

    temporal_u: TemporalSpace
    spatial_u: SpatialScalarSpace
    temporal_s: TemporalSpace
    spatial_s: SpatialFluxSpace

    @property
    def n_u(self) -> int:
        return self.temporal_u.n_dofs * self.spatial_u.n_dofs

    @property
    def n_sigma(self) -> int:
        return self.temporal_s.n_dofs * self.spatial_s.n_dofs

    @property
    def sigma_offset(self) -> int:
        return self.n_u

    @property
    def n_dofs(self) -> int:
        return self.n_u + self.n_sigma

    def split(self, x: np.ndarray):
        """Coefficient vector -> (u, sigma) arrays of shape
        (temporal dofs, spatial dofs)."""
        u = x[: self.n_u].reshape(self.temporal_u.n_dofs, self.spatial_u.n_dofs)
        s = x[self.n_u:].reshape(self.temporal_s.n_dofs, self.spatial_s.n_dofs)
        return u, s


def build_layout(mesh: TensorMesh, k: int = 1, l: int = 1) -> ProductDofLayout:
    if k < 1 or l < 1:
        raise ValueError("polynomial degrees k, l must be >= 1")
    if k != 1 or l != 1:
        raise NotImplementedError("only k = l = 1 is supported")
    return ProductDofLayout(
        temporal_u=TemporalSpace("continuous", k, mesh.time),
        spatial_u=SpatialScalarSpace(mesh.space, l),
        temporal_s=TemporalSpace("discontinuous", k - 1, mesh.time),
        spatial_s=make_flux_space(mesh.space, l),
    )
