"""Tensor-product space-time meshes: temporal partitions, interval and
triangle meshes, uniform refinement with equal or parabolic scaling.

Meshes are immutable; refinement returns new objects so that all levels of a
convergence study coexist.  Triangle meshes are red-refined (each triangle is
split into four by connecting the edge midpoints), which preserves the set of
triangle shapes exactly and keeps the quasi-uniformity constant of the initial
mesh.  Edges carry a canonical orientation from the lower to the higher vertex
index; flux degrees of freedom rely on this to get deterministic signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TimePartition:
    """Partition of the time interval (0, T) into open subintervals."""

    breakpoints: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.breakpoints, dtype=float)
        if pts.ndim != 1 or len(pts) < 2:
            raise ValueError("need at least two breakpoints")
        if pts[0] != 0.0:
            raise ValueError("partition must start at t = 0")
        if not (np.diff(pts) > 0).all():
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", pts)

    @property
    def n_elements(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def end_time(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def h_t(self) -> float:
        return float(self.lengths.max())

    def refine(self, bisections: int = 1) -> TimePartition:
        """Bisect every interval ``bisections`` times (2**bisections children)."""
        pts = self.breakpoints
        for _ in range(bisections):
            mids = 0.5 * (pts[:-1] + pts[1:])
            pts = np.sort(np.concatenate([pts, mids]))
        return TimePartition(pts)


@dataclass(frozen=True)
class IntervalMesh:
    """1D mesh of the interval (vertices sorted ascending, elements consecutive)."""

    vertices: np.ndarray  # (nv,)

    dimension = 1

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if not (np.diff(v) > 0).all():
            raise ValueError("vertices must be strictly increasing")
        object.__setattr__(self, "vertices", v)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_elements(self) -> int:
        return len(self.vertices) - 1

    @property
    def elements(self) -> np.ndarray:
        idx = np.arange(self.n_elements)
        return np.column_stack([idx, idx + 1])

    @property
    def boundary_vertex_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[[0, -1]] = True
        return mask

    @property
    def element_lengths(self) -> np.ndarray:
        return np.diff(self.vertices)

    @property
    def element_measures(self) -> np.ndarray:
        return self.element_lengths

    @property
    def element_diameters(self) -> np.ndarray:
        return self.element_lengths

    @property
    def h_x(self) -> float:
        return float(self.element_lengths.max())

    def refine(self) -> IntervalMesh:
        v = self.vertices
        mids = 0.5 * (v[:-1] + v[1:])
        return IntervalMesh(np.sort(np.concatenate([v, mids])))


def _triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0 = vertices[triangles[:, 0]]
    e1 = vertices[triangles[:, 1]] - p0
    e2 = vertices[triangles[:, 2]] - p0
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def _build_edges(triangles: np.ndarray):
    """Canonically oriented edge list plus the per-triangle edge map.

    Local edge j of a triangle connects local vertices j and (j+1) % 3.  Each
    global edge is stored as (a, b) with a < b.
    """
    raw = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=0
    )
    sorted_raw = np.sort(raw, axis=1)
    edges, inverse = np.unique(sorted_raw, axis=0, return_inverse=True)
    nt = len(triangles)
    triangle_edges = inverse.reshape(3, nt).T
    counts = np.bincount(inverse, minlength=len(edges))
    boundary_edge_mask = counts == 1
    return edges, triangle_edges, boundary_edge_mask


@dataclass(frozen=True)
class TriangleMesh:
    """Conforming triangulation with positively oriented triangles."""

    vertices: np.ndarray  # (nv, 2)
    triangles: np.ndarray  # (nt, 3), counter-clockwise

    dimension = 2

    edges: np.ndarray = field(init=False)
    triangle_edges: np.ndarray = field(init=False)
    boundary_edge_mask: np.ndarray = field(init=False)
    boundary_vertex_mask: np.ndarray = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        t = np.asarray(self.triangles, dtype=np.int64)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        if (_triangle_areas(v, t) <= 0).any():
            raise ValueError("triangles must be counter-clockwise with positive area")
        edges, tri_edges, bnd_edges = _build_edges(t)
        bnd_vertices = np.zeros(len(v), dtype=bool)
        bnd_vertices[edges[bnd_edges].ravel()] = True
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "triangle_edges", tri_edges)
        object.__setattr__(self, "boundary_edge_mask", bnd_edges)
        object.__setattr__(self, "boundary_vertex_mask", bnd_vertices)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def element_measures(self) -> np.ndarray:
        return _triangle_areas(self.vertices, self.triangles)

    @property
    def element_diameters(self) -> np.ndarray:
        p = self.vertices[self.triangles]  # (nt, 3, 2)
        d01 = np.linalg.norm(p[:, 0] - p[:, 1], axis=1)
        d12 = np.linalg.norm(p[:, 1] - p[:, 2], axis=1)
        d20 = np.linalg.norm(p[:, 2] - p[:, 0], axis=1)
        return np.maximum(np.maximum(d01, d12), d20)

    @property
    def h_x(self) -> float:
        return float(self.element_diameters.max())

    def refine(self) -> TriangleMesh:
        """Red refinement: one new vertex per edge, four children per triangle."""
        v, t = self.vertices, self.triangles
        mid = 0.5 * (v[self.edges[:, 0]] + v[self.edges[:, 1]])
        new_vertices = np.vstack([v, mid])
        m = self.n_vertices + self.triangle_edges  # midpoint vertex ids, (nt, 3)
        children = np.concatenate(
            [
                np.column_stack([t[:, 0], m[:, 0], m[:, 2]]),
                np.column_stack([t[:, 1], m[:, 1], m[:, 0]]),
                np.column_stack([t[:, 2], m[:, 2], m[:, 1]]),
                m,
            ],
            axis=0,
        )
        return TriangleMesh(new_vertices, children)


SpatialMesh = IntervalMesh | TriangleMesh


@dataclass(frozen=True)
class TensorMesh:
    """Logical product of a time partition and a spatial mesh.

    ``scaling`` selects the refinement regime: 1 bisects time once per spatial
    refinement (h_t ~ h_x), 2 bisects twice (h_t ~ h_x**2).
    """

    time: TimePartition
    space: SpatialMesh
    scaling: int = 1

    def __post_init__(self):
        if self.scaling not in (1, 2):
            raise ValueError("scaling must be 1 (equal) or 2 (parabolic)")

    @property
    def n_cells(self) -> int:
        return self.time.n_elements * self.space.n_elements

    def refine_uniform(self) -> TensorMesh:
        return TensorMesh(self.time.refine(self.scaling), self.space.refine(), self.scaling)


def initial_meshes(domain: str) -> tuple[TimePartition, SpatialMesh]:
    """Coarsest meshes: one time element on (0,1); the unit interval as a
    single element, or the unit square split into two triangles."""
    time = TimePartition(np.array([0.0, 1.0]))
    if domain == "unit_interval":
        return time, IntervalMesh(np.array([0.0, 1.0]))
    if domain == "unit_square":
        vertices = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        triangles = np.array([[0, 1, 3], [1, 2, 3]])
        return time, TriangleMesh(vertices, triangles)
    raise ValueError(f"unknown domain {domain!r}")


def initial_tensor_mesh(domain: str, scaling: int = 1) -> TensorMesh:
    time, space = initial_meshes(domain)
    return TensorMesh(time, space, scaling)


def mesh_stats(mesh: TensorMesh) -> tuple[float, float, int]:
    """(h_t, h_x, n_cells): maximal time step, maximal spatial diameter,
    number of space-time cells."""
    return mesh.time.h_t, mesh.space.h_x, mesh.n_cells
