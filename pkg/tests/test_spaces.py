import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stfosls.mesh import TimePartition, initial_tensor_mesh
from stfosls.quadrature import gauss_interval, triangle_rule
from stfosls.spaces import (IntervalFluxSpace, SpatialScalarSpace, TemporalSpace,
                            TriangleFluxSpace, build_layout, eval_rt_basis,
                            eval_temporal_basis, _rt1_generators)


def refined(domain, n, scaling=1):
    mesh = initial_tensor_mesh(domain, scaling)
    for _ in range(n):
        mesh = mesh.refine_uniform()
    return mesh


# ---------------------------------------------------------------------------
# temporal spaces
# ---------------------------------------------------------------------------

def test_temporal_dimensions():
    part = TimePartition(np.linspace(0.0, 1.0, 5))
    assert TemporalSpace("continuous", 1, part).n_dofs == 5
    assert TemporalSpace("discontinuous", 0, part).n_dofs == 4


def test_temporal_basis_examples():
    part = TimePartition(np.array([0.0, 0.5, 1.0]))
    s1 = TemporalSpace("continuous", 1, part)
    vals = eval_temporal_basis(s1, 0, 0.5, 0)
    assert vals[:, 0] == pytest.approx([0.5, 0.5])
    ders = eval_temporal_basis(s1, 0, 0.25, 1)
    assert ders[:, 0] == pytest.approx([-2.0, 2.0])
    p0 = TemporalSpace("discontinuous", 0, part)
    assert eval_temporal_basis(p0, 1, 0.3, 0)[:, 0] == pytest.approx([1.0])
    assert eval_temporal_basis(p0, 1, 0.3, 1)[:, 0] == pytest.approx([0.0])


def test_temporal_partition_of_unity():
    part = TimePartition(np.array([0.0, 0.25, 0.7, 1.0]))
    s1 = TemporalSpace("continuous", 1, part)
    xi = np.linspace(0, 1, 7)
    for m in range(part.n_elements):
        assert s1.eval_basis(m, xi, 0).sum(axis=0) == pytest.approx(np.ones(7))


@given(st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=0, max_value=2))
@settings(max_examples=60, deadline=None)
def test_partition_of_unity_at_arbitrary_points(xi, element):
    part = TimePartition(np.array([0.0, 0.2, 0.65, 1.0]))
    s1 = TemporalSpace("continuous", 1, part)
    assert s1.eval_basis(element, xi, 0).sum() == pytest.approx(1.0, abs=1e-12)
    assert s1.eval_basis(element, xi, 1).sum() == pytest.approx(0.0, abs=1e-9)
    mesh = refined("unit_square", 1)
    scalar = SpatialScalarSpace(mesh.space, 1)
    pt = np.array([[xi * 0.5, (1 - xi) * 0.5]])  # stays inside the triangle
    assert scalar.basis_values(pt).sum() == pytest.approx(1.0, abs=1e-12)


def test_temporal_rejects_unsupported():
    part = TimePartition(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        TemporalSpace("weird", 1, part)
    with pytest.raises(NotImplementedError):
        TemporalSpace("continuous", 2, part)
    with pytest.raises(ValueError):
        TemporalSpace("continuous", 1, part).eval_basis(0, 0.5, 2)


# ---------------------------------------------------------------------------
# spatial scalar space
# ---------------------------------------------------------------------------

def test_scalar_space_interior_vertex_count_1d():
    mesh = refined("unit_interval", 3)
    space = SpatialScalarSpace(mesh.space, 1)
    assert space.n_dofs == mesh.space.n_vertices - 2


def test_scalar_partition_of_unity():
    for domain in ("unit_interval", "unit_square"):
        mesh = refined(domain, 2)
        space = SpatialScalarSpace(mesh.space, 1)
        pts = gauss_interval(3).points if domain == "unit_interval" \
            else triangle_rule(2).points
        vals = space.basis_values(pts)
        assert vals.sum(axis=0) == pytest.approx(np.ones(vals.shape[1]))


def test_scalar_gradients_sum_to_zero():
    mesh = refined("unit_square", 2)
    space = SpatialScalarSpace(mesh.space, 1)
    g = space.basis_gradients()
    assert np.abs(g.sum(axis=1)).max() < 1e-13


# ---------------------------------------------------------------------------
# flux spaces
# ---------------------------------------------------------------------------

def test_interval_flux_divergence_is_lagrange_derivative():
    mesh = refined("unit_interval", 2)
    space = IntervalFluxSpace(mesh.space, 1)
    xi = np.linspace(0.0, 1.0, 9)
    vals, divs = space.eval_basis(xi)
    # finite-difference derivative of the quadratic shape functions
    eps = 1e-6
    v_plus, _ = space.eval_basis(xi + eps)
    v_minus, _ = space.eval_basis(xi - eps)
    h = mesh.space.element_lengths
    fd = (v_plus - v_minus)[:, :, :, 0] / (2 * eps * h[:, None, None])
    assert np.abs(fd - divs).max() < 1e-6


def test_rt_dof_count_on_initial_square():
    mesh = initial_tensor_mesh("unit_square")
    space = TriangleFluxSpace(mesh.space, 1)
    assert space.n_dofs == 2 * 5 + 2 * 2 == 14
    assert space.n_local == 8  # (l+1)(l+3) for l = 1


def test_rt_constant_field_reproduced():
    mesh = initial_tensor_mesh("unit_square")
    space = TriangleFluxSpace(mesh.space, 1)
    rule = triangle_rule(4)
    vals, _ = eval_rt_basis(space, rule.points)
    for t in range(mesh.space.n_elements):
        V = vals[t].reshape(8, -1).T  # (n_q * 2, 8)
        target = np.tile([1.0, 0.0], rule.n_points)
        coeffs, *_ = np.linalg.lstsq(V, target, rcond=None)
        assert np.abs(V @ coeffs - target).max() < 1e-11


def test_piola_divergence_of_reference_identity_field():
    # the reference field (x, y) = g2 + g6 has divergence 2; its Piola image
    # on each physical triangle must have constant divergence 2 / det J
    mesh = refined("unit_square", 1)
    space = TriangleFluxSpace(mesh.space, 1)
    pts = triangle_rule(2).points
    _, gen_divs = _rt1_generators(pts)
    phys_div = (gen_divs[1] + gen_divs[5])[None, :] / space.det_j[:, None]
    assert np.allclose(phys_div, 2.0 / space.det_j[:, None], atol=1e-14)
    assert (space.det_j > 0).all()


def test_rt_normal_continuity_across_interior_edges():
    mesh = refined("unit_square", 2)
    tm = mesh.space
    space = TriangleFluxSpace(tm, 1)
    neighbors = {}
    for t in range(tm.n_elements):
        for e in tm.triangle_edges[t]:
            neighbors.setdefault(int(e), []).append(t)
    s = gauss_interval(4).points
    worst = 0.0
    for e in np.where(~tm.boundary_edge_mask)[0]:
        t1, t2 = neighbors[int(e)]
        a, b = tm.edges[e]
        va, vb = tm.vertices[a], tm.vertices[b]
        tang = vb - va
        normal = np.array([tang[1], -tang[0]]) / np.linalg.norm(tang)
        pts = va[None, :] + s[:, None] * tang[None, :]

        def ref_coords(t):
            tri = tm.triangles[t]
            p0 = tm.vertices[tri[0]]
            J = np.stack([tm.vertices[tri[1]] - p0, tm.vertices[tri[2]] - p0], axis=-1)
            return np.linalg.solve(J, (pts - p0).T).T

        v1, _ = space.eval_basis(ref_coords(t1))
        v2, _ = space.eval_basis(ref_coords(t2))
        d1 = list(space.element_dofs[t1])
        d2 = list(space.element_dofs[t2])
        for gd in (2 * e, 2 * e + 1):
            vn1 = v1[t1, d1.index(gd)] @ normal
            vn2 = v2[t2, d2.index(gd)] @ normal
            worst = max(worst, np.abs(vn1 - vn2).max())
    assert worst <= 1e-12


def test_rt_divergence_lies_in_p1():
    mesh = refined("unit_square", 1)
    space = TriangleFluxSpace(mesh.space, 1)
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    check = np.array([[0.2, 0.3], [0.5, 0.1], [0.1, 0.6], [0.25, 0.25]])
    _, divs = space.eval_basis(np.vstack([verts, check]))
    lam = np.hstack([1 - check.sum(axis=1, keepdims=True), check])
    interp = np.einsum("tdv,pv->tdp", divs[:, :, :3], lam)
    assert np.abs(interp - divs[:, :, 3:]).max() <= 1e-12


# ---------------------------------------------------------------------------
# product layout
# ---------------------------------------------------------------------------

def test_layout_example_1d_two_space_elements():
    mesh = refined("unit_interval", 0)
    mesh = mesh.refine_uniform()
    # one time element, two space elements
    from stfosls.mesh import TensorMesh, TimePartition
    mesh = TensorMesh(TimePartition(np.array([0.0, 1.0])), mesh.space, 1)
    layout = build_layout(mesh)
    assert layout.n_u == 2 * 1 == 2
    assert layout.n_sigma == 1 * 5 == 5
    assert layout.n_dofs == 7


def test_layout_initial_interval_has_empty_scalar_block():
    layout = build_layout(initial_tensor_mesh("unit_interval"))
    assert layout.n_u == 0
    assert layout.n_dofs == layout.n_sigma


def test_layout_initial_square_flux_dofs():
    layout = build_layout(initial_tensor_mesh("unit_square"))
    assert layout.spatial_s.n_dofs == 14


def test_layout_row_major_indexing():
    mesh = refined("unit_interval", 2)
    layout = build_layout(mesh)
    x = np.arange(layout.n_dofs, dtype=float)
    u, s = layout.split(x)
    assert u[0, 1] == 1.0
    assert u[1, 0] == layout.spatial_u.n_dofs
    assert s[0, 0] == layout.sigma_offset


def test_layout_rejects_bad_degrees():
    mesh = initial_tensor_mesh("unit_interval")
    with pytest.raises(ValueError):
        build_layout(mesh, k=0, l=1)
    with pytest.raises(ValueError):
        build_layout(mesh, k=1, l=0)
    with pytest.raises(NotImplementedError):
        build_layout(mesh, k=2, l=1)


def test_dofs_growth_factor_towards_asymptotic():
    mesh = refined("unit_interval", 3)
    prev = build_layout(mesh).n_dofs
    factors = []
    for _ in range(3):
        mesh = mesh.refine_uniform()
        cur = build_layout(mesh).n_dofs
        factors.append(cur / prev)
        prev = cur
    # s = 1, d = 1: dofs scale with 2^(d+s) = 4 per level
    assert factors[-1] == pytest.approx(4.0, rel=0.1)
