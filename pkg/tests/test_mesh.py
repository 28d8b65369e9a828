import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stfosls.mesh import (IntervalMesh, TensorMesh, TimePartition, TriangleMesh,
                          initial_meshes, initial_tensor_mesh, mesh_stats)


def test_initial_unit_interval():
    time, space = initial_meshes("unit_interval")
    assert time.n_elements == 1
    assert time.breakpoints.tolist() == [0.0, 1.0]
    assert space.n_elements == 1
    assert space.n_vertices == 2
    assert space.boundary_vertex_mask.all()


def test_initial_unit_square():
    _, space = initial_meshes("unit_square")
    assert space.n_elements == 2
    assert space.n_vertices == 4
    assert space.n_edges == 5
    assert space.boundary_vertex_mask.all()
    assert space.element_measures.sum() == pytest.approx(1.0, abs=1e-15)
    tri_sets = {frozenset(map(tuple, space.vertices[t])) for t in space.triangles}
    assert frozenset({(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}) in tri_sets
    assert frozenset({(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)}) in tri_sets


def test_unknown_domain_rejected():
    with pytest.raises(ValueError):
        initial_meshes("unit_cube")


def test_refine_counts_2d_equal_scaling():
    mesh = initial_tensor_mesh("unit_square", scaling=1).refine_uniform()
    assert mesh.space.n_elements == 8
    assert mesh.time.n_elements == 2


def test_refine_counts_1d_parabolic_scaling():
    mesh = initial_tensor_mesh("unit_interval", scaling=2).refine_uniform()
    assert mesh.space.n_elements == 2
    assert mesh.time.n_elements == 4


def test_three_refinements_halve_sizes():
    mesh = initial_tensor_mesh("unit_interval", scaling=1)
    for _ in range(3):
        mesh = mesh.refine_uniform()
    h_t, h_x, _ = mesh_stats(mesh)
    assert h_x == pytest.approx(1 / 8, abs=1e-15)
    assert h_t == pytest.approx(1 / 8, abs=1e-15)


@pytest.mark.parametrize("scaling", [1, 2])
def test_scaling_ratio_constant_over_levels(scaling):
    mesh = initial_tensor_mesh("unit_interval", scaling)
    ratios = []
    for _ in range(4):
        mesh = mesh.refine_uniform()
        h_t, h_x, _ = mesh_stats(mesh)
        ratios.append(h_t / h_x ** scaling)
    assert max(ratios) == pytest.approx(min(ratios), rel=1e-12)


def test_mesh_stats_examples():
    square = initial_tensor_mesh("unit_square")
    h_t, h_x, n_cells = mesh_stats(square)
    assert h_x == pytest.approx(np.sqrt(2.0), abs=1e-15)
    assert h_t == pytest.approx(1.0)
    assert n_cells == 2

    interval = initial_tensor_mesh("unit_interval", scaling=1).refine_uniform()
    assert mesh_stats(interval) == pytest.approx((0.5, 0.5, 4))

    square2 = initial_tensor_mesh("unit_square", scaling=2)
    square2 = square2.refine_uniform().refine_uniform()
    h_t, h_x, _ = mesh_stats(square2)
    assert h_t == pytest.approx(1 / 16, abs=1e-15)
    assert h_x == pytest.approx(np.sqrt(2.0) / 4, abs=1e-15)


@pytest.mark.parametrize("domain", ["unit_interval", "unit_square"])
def test_measures_sum_to_domain_area_at_every_level(domain):
    mesh = initial_tensor_mesh(domain)
    for _ in range(5):
        assert mesh.space.element_measures.sum() == pytest.approx(1.0, abs=1e-12)
        mesh = mesh.refine_uniform()


@pytest.mark.parametrize("domain", ["unit_interval", "unit_square"])
def test_quasi_uniformity_ratio_preserved(domain):
    mesh = initial_tensor_mesh(domain)
    def ratio(m):
        sizes = m.space.element_diameters
        return sizes.max() / sizes.min()
    initial = ratio(mesh)
    for _ in range(4):
        mesh = mesh.refine_uniform()
        assert ratio(mesh) == pytest.approx(initial, rel=1e-12)


def test_red_refinement_preserves_triangle_shapes():
    def shape_signatures(space):
        p = space.vertices[space.triangles]
        sides = np.stack([
            np.linalg.norm(p[:, 0] - p[:, 1], axis=1),
            np.linalg.norm(p[:, 1] - p[:, 2], axis=1),
            np.linalg.norm(p[:, 2] - p[:, 0], axis=1),
        ], axis=1)
        sides = np.sort(sides, axis=1)
        sides /= sides[:, 2:3]
        return {tuple(np.round(s, 12)) for s in sides}

    mesh = initial_tensor_mesh("unit_square")
    sig0 = shape_signatures(mesh.space)
    for _ in range(3):
        mesh = mesh.refine_uniform()
        assert shape_signatures(mesh.space) == sig0


def test_shape_regularity_constant_preserved():
    mesh = initial_tensor_mesh("unit_square")
    def worst_ratio(m):
        return float((m.space.element_diameters ** 2 / m.space.element_measures).max())
    initial = worst_ratio(mesh)
    for _ in range(4):
        mesh = mesh.refine_uniform()
        assert worst_ratio(mesh) == pytest.approx(initial, rel=1e-12)


def test_edge_conformity():
    mesh = initial_tensor_mesh("unit_square")
    for _ in range(3):
        mesh = mesh.refine_uniform()
    space = mesh.space
    counts = np.zeros(space.n_edges, dtype=int)
    for t in range(space.n_elements):
        for e in space.triangle_edges[t]:
            counts[e] += 1
    assert (counts[space.boundary_edge_mask] == 1).all()
    assert (counts[~space.boundary_edge_mask] == 2).all()


def test_edges_canonically_oriented():
    mesh = initial_tensor_mesh("unit_square").refine_uniform()
    edges = mesh.space.edges
    assert (edges[:, 0] < edges[:, 1]).all()


def test_triangles_positively_oriented_after_refinement():
    mesh = initial_tensor_mesh("unit_square")
    for _ in range(3):
        mesh = mesh.refine_uniform()
        assert (mesh.space.element_measures > 0).all()


def test_meshes_immutable():
    time, space = initial_meshes("unit_interval")
    with pytest.raises(AttributeError):
        time.breakpoints = np.array([0.0, 2.0])
    with pytest.raises(AttributeError):
        space.vertices = np.array([0.0, 1.0])


def test_time_partition_validation():
    with pytest.raises(ValueError):
        TimePartition(np.array([0.5, 1.0]))  # must start at 0
    with pytest.raises(ValueError):
        TimePartition(np.array([0.0, 0.5, 0.5, 1.0]))  # not strictly increasing
    with pytest.raises(ValueError):
        TimePartition(np.array([0.0]))


def test_triangle_mesh_rejects_clockwise():
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        TriangleMesh(vertices, np.array([[0, 2, 1]]))


def test_tensor_mesh_rejects_bad_scaling():
    time, space = initial_meshes("unit_interval")
    with pytest.raises(ValueError):
        TensorMesh(time, space, scaling=3)


def test_interval_mesh_rejects_unsorted():
    with pytest.raises(ValueError):
        IntervalMesh(np.array([0.0, 0.7, 0.4, 1.0]))


@given(st.lists(st.floats(min_value=0.01, max_value=0.99), min_size=1, max_size=6,
                unique=True),
       st.integers(min_value=1, max_value=2))
@settings(max_examples=40, deadline=None)
def test_refined_partition_preserves_ratio_and_nests(interior, bisections):
    pts = np.sort(np.concatenate([[0.0, 1.0], interior]))
    part = TimePartition(pts)
    ratio = part.lengths.max() / part.lengths.min()
    fine = part.refine(bisections)
    assert fine.n_elements == part.n_elements * 2 ** bisections
    assert fine.lengths.max() / fine.lengths.min() == pytest.approx(ratio, rel=1e-9)
    # nested: every coarse breakpoint survives
    assert np.isin(part.breakpoints, fine.breakpoints).all()
