"""Assembly of the least-squares system via Kronecker products of temporal and
spatial factor matrices, plus an independent space-time element-loop assembler
used as a test oracle on small meshes.

With scalar-block basis phi_i(t) psi_a(x) and flux-block basis chi_m(t) rho_e(x),
the bilinear form

    <div u + div_x sigma, ...> + <grad_x u + sigma, ...> + <u(0), v(0)>

factors into

    A_uu = K_t x M_x + M_t x K_x + E0_t x M_x
    A_us = C_t x B_x + Mm_t x G_x
    A_ss = Mc_t x (D_x + M_rt)

where the temporal factors are M_t (mass), K_t (stiffness), E0_t (trace at
t=0, assembled exactly by basis evaluation), Mc_t (discontinuous mass),
C_t[i,m] = int phi_i' chi_m, Mm_t[i,m] = int phi_i chi_m, and the spatial
factors are M_x/K_x (scalar mass/stiffness), M_rt (flux mass),
D_x[e,f] = int div rho_e div rho_f, B_x[a,e] = int psi_a div rho_e and
G_x[a,e] = int grad psi_a . rho_e.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import IntervalMesh, SpatialMesh, TensorMesh
from .quadrature import QuadratureRule, gauss_interval, triangle_rule
from .spaces import ProductDofLayout, TemporalSpace

# Quadrature defaults: assembly integrands are polynomial (degree <= 2(l+1) in
# space, <= 2k in time) and integrated exactly; right-hand sides with general
# data use elevated rules so consistency error stays below discretization error.
ASSEMBLY_SPACE_DEGREE = 4
RHS_SPACE_DEGREE = 7
RHS_TIME_POINTS = 5


def spatial_rule(mesh: SpatialMesh, degree: int) -> QuadratureRule:
    if isinstance(mesh, IntervalMesh):
        return gauss_interval(max(1, (degree + 2) // 2))
    return triangle_rule(degree)


def spatial_geometry(mesh: SpatialMesh, rule: QuadratureRule):
    """Physical quadrature points and scaled weights for every element.

    Returns (points, jxw): points is (n_el, n_q, d), jxw is (n_el, n_q) with
    sum(jxw[e]) = |element e|.
    """
    if isinstance(mesh, IntervalMesh):
        h = mesh.element_lengths
        pts = mesh.vertices[:-1, None] + rule.points[None, :] * h[:, None]
        jxw = h[:, None] * rule.weights[None, :]
        return pts[:, :, None], jxw
    p = mesh.vertices[mesh.triangles]
    jac = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=-1)
    pts = p[:, None, 0, :] + np.einsum("tij,qj->tqi", jac, rule.points)
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    # weights sum to the reference area 1/2, so the scale is det J = 2 |K|
    jxw = det[:, None] * rule.weights[None, :]
    return pts, jxw


@dataclass(frozen=True)
class FactorMatrices:
    """Temporal and spatial factor matrices of the system (all CSR)."""

    M_t: sp.csr_matrix
    K_t: sp.csr_matrix
    E0_t: sp.csr_matrix
    Mc_t: sp.csr_matrix
    C_t: sp.csr_matrix
    Mm_t: sp.csr_matrix
    M_x: sp.csr_matrix
    K_x: sp.csr_matrix
    M_rt: sp.csr_matrix
    D_x: sp.csr_matrix
    B_x: sp.csr_matrix
    G_x: sp.csr_matrix


def _scatter(rows, cols, vals, shape) -> sp.csr_matrix:
    m = sp.coo_matrix((np.asarray(vals).ravel(),
                       (np.asarray(rows).ravel(), np.asarray(cols).ravel())),
                      shape=shape)
    return m.tocsr()


def _temporal_pair_matrix(test: TemporalSpace, trial: TemporalSpace,
                          d_test: int, d_trial: int) -> sp.csr_matrix:
    """int (d^d_test phi_i) (d^d_trial chi_m) dt over the shared partition."""
    rule = gauss_interval(2)
    part = test.partition
    rows, cols, vals = [], [], []
    for m in range(part.n_elements):
        h = part.lengths[m]
        a = test.eval_basis(m, rule.points, d_test)
        b = trial.eval_basis(m, rule.points, d_trial)
        loc = np.einsum("iq,jq,q->ij", a, b, rule.weights) * h
        di, dj = test.local_dofs(m), trial.local_dofs(m)
        rows.append(np.repeat(di, len(dj)))
        cols.append(np.tile(dj, len(di)))
        vals.append(loc)
    return _scatter(np.concatenate(rows), np.concatenate(cols), np.concatenate([v.ravel() for v in vals]),
                    (test.n_dofs, trial.n_dofs))


def _temporal_trace_matrix(space: TemporalSpace) -> sp.csr_matrix:
    """phi_i(0) phi_j(0), assembled exactly from basis values at t = 0."""
    v = space.eval_basis(0, np.array([0.0]), 0)[:, 0]
    dofs = space.local_dofs(0)
    full = np.zeros(space.n_dofs)
    full[dofs] = v
    nz = np.nonzero(full)[0]
    rows = np.repeat(nz, len(nz))
    cols = np.tile(nz, len(nz))
    vals = np.outer(full[nz], full[nz])
    return _scatter(rows, cols, vals, (space.n_dofs, space.n_dofs))


def _scalar_pairs(element_dofs: np.ndarray, local: np.ndarray, shape):
    """Scatter per-element local matrices for a scalar space, dropping
    constrained (-1) dofs."""
    n_el, n_loc = element_dofs.shape
    rows = np.repeat(element_dofs, n_loc, axis=1)
    cols = np.tile(element_dofs, (1, n_loc))
    vals = local.reshape(n_el, -1)
    keep = (rows >= 0) & (cols >= 0)
    return _scatter(rows[keep], cols[keep], vals[keep], shape)


def assemble_factors(mesh: TensorMesh, layout: ProductDofLayout) -> FactorMatrices:
    tu, ts = layout.temporal_u, layout.temporal_s
    M_t = _temporal_pair_matrix(tu, tu, 0, 0)
    K_t = _temporal_pair_matrix(tu, tu, 1, 1)
    E0_t = _temporal_trace_matrix(tu)
    Mc_t = _temporal_pair_matrix(ts, ts, 0, 0)
    C_t = _temporal_pair_matrix(tu, ts, 1, 0)
    Mm_t = _temporal_pair_matrix(tu, ts, 0, 0)

    su, ss = layout.spatial_u, layout.spatial_s
    space = mesh.space
    rule = spatial_rule(space, ASSEMBLY_SPACE_DEGREE)
    _, jxw = spatial_geometry(space, rule)

    psi = su.basis_values(rule.points)             # (n_loc_u, n_q)
    grad_psi = su.basis_gradients()                # (n_el, n_loc_u, d)
    rho, div_rho = ss.eval_basis(rule.points)      # (n_el, n_loc_s, n_q, d), (n_el, n_loc_s, n_q)

    n_u, n_s = su.n_dofs, ss.n_dofs
    shape_uu, shape_ss, shape_us = (n_u, n_u), (n_s, n_s), (n_u, n_s)

    loc_m = np.einsum("aq,bq,eq->eab", psi, psi, jxw)
    M_x = _scalar_pairs(su.element_dofs, loc_m, shape_uu)

    meas = jxw.sum(axis=1)
    loc_k = np.einsum("ead,ebd,e->eab", grad_psi, grad_psi, meas)
    K_x = _scalar_pairs(su.element_dofs, loc_k, shape_uu)

    ed = ss.element_dofs
    n_loc_s = ed.shape[1]
    rows_s = np.repeat(ed, n_loc_s, axis=1)
    cols_s = np.tile(ed, (1, n_loc_s))
    loc_mrt = np.einsum("eaqd,ebqd,eq->eab", rho, rho, jxw)
    M_rt = _scatter(rows_s, cols_s, loc_mrt, shape_ss)
    loc_d = np.einsum("eaq,ebq,eq->eab", div_rho, div_rho, jxw)
    D_x = _scatter(rows_s, cols_s, loc_d, shape_ss)

    edu = su.element_dofs
    n_loc_u = edu.shape[1]
    rows_us = np.repeat(edu, n_loc_s, axis=1)
    cols_us = np.tile(ed, (1, n_loc_u))
    keep = rows_us >= 0
    loc_b = np.einsum("aq,ebq,eq->eab", psi, div_rho, jxw).reshape(len(edu), -1)
    B_x = _scatter(rows_us[keep], cols_us[keep], loc_b[keep], shape_us)
    loc_g = np.einsum("ead,ebqd,eq->eab", grad_psi, rho, jxw).reshape(len(edu), -1)
    G_x = _scatter(rows_us[keep], cols_us[keep], loc_g[keep], shape_us)

    return FactorMatrices(M_t=M_t, K_t=K_t, E0_t=E0_t, Mc_t=Mc_t, C_t=C_t, Mm_t=Mm_t,
                          M_x=M_x, K_x=K_x, M_rt=M_rt, D_x=D_x, B_x=B_x, G_x=G_x)


def assemble_system(factors: FactorMatrices, layout: ProductDofLayout) -> sp.csr_matrix:
    """Realize the block-Kronecker structure as one symmetric CSR matrix."""
    f = factors
    if (f.M_t.shape[0] != layout.temporal_u.n_dofs
            or f.M_x.shape[0] != layout.spatial_u.n_dofs
            or f.Mc_t.shape[0] != layout.temporal_s.n_dofs
            or f.M_rt.shape[0] != layout.spatial_s.n_dofs):
        raise ValueError("factor matrices inconsistent with layout")
    A_ss = sp.kron(f.Mc_t, f.D_x + f.M_rt, format="csr")
    if layout.n_u == 0:
        return A_ss
    A_uu = (sp.kron(f.K_t, f.M_x) + sp.kron(f.M_t, f.K_x)
            + sp.kron(f.E0_t, f.M_x)).tocsr()
    A_us = (sp.kron(f.C_t, f.B_x) + sp.kron(f.Mm_t, f.G_x)).tocsr()
    return sp.bmat([[A_uu, A_us], [A_us.T, A_ss]], format="csr")


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------

class _CallableData:
    """Adapter evaluating f(times, points) on flattened physical points."""

    def __init__(self, func):
        self.func = func

    def eval_cells(self, time_element, times, phys_points, ref_points):
        n_el, n_q = phys_points.shape[:2]
        flat = phys_points.reshape(n_el * n_q, -1)
        vals = np.asarray(self.func(np.asarray(times, dtype=float), flat))
        return vals.reshape(len(times), n_el, n_q)


def _cellwise(f):
    if f is None:
        return None
    if hasattr(f, "eval_cells"):
        return f
    return _CallableData(f)


def assemble_rhs(data, mesh: TensorMesh, layout: ProductDofLayout,
                 grad_load=None) -> np.ndarray:
    """Load vector F(v) = <f, div v> + <u0, v(0)> (+ <g, grad v + tau> when a
    gradient load is supplied, used by manufactured-solution tests).

    ``data`` provides ``f`` (callable, cellwise object, or None for f = 0) and
    ``u0`` (callable on points, or None).
    """
    su, ss = layout.spatial_u, layout.spatial_s
    tu, ts = layout.temporal_u, layout.temporal_s
    space = mesh.space
    rule = spatial_rule(space, RHS_SPACE_DEGREE)
    t_rule = gauss_interval(RHS_TIME_POINTS)
    phys, jxw = spatial_geometry(space, rule)

    psi = su.basis_values(rule.points)
    grad_psi = su.basis_gradients()
    rho, div_rho = ss.eval_basis(rule.points)

    F_u = np.zeros((tu.n_dofs, su.n_dofs))
    F_s = np.zeros((ts.n_dofs, ss.n_dofs))

    f = _cellwise(data.f)
    u0 = data.u0
    g = _cellwise(grad_load)

    edu, eds = su.element_dofs, ss.element_dofs
    keep_u = edu >= 0

    part = mesh.time
    for m in range(part.n_elements):
        t0, h = part.breakpoints[m], part.lengths[m]
        times = t0 + h * t_rule.points
        tw = h * t_rule.weights
        phi = tu.eval_basis(m, t_rule.points, 0)
        dphi = tu.eval_basis(m, t_rule.points, 1)
        chi = ts.eval_basis(m, t_rule.points, 0)
        if f is not None:
            fv = f.eval_cells(m, times, phys, rule.points)  # (nt_q, n_el, n_q)
            # scalar block: <f, phi_i' psi_a>
            cell_u = np.einsum("seq,aq,eq,is,s->iea", fv, psi, jxw, dphi, tw)
            for i, gi in enumerate(tu.local_dofs(m)):
                np.add.at(F_u[gi], edu[keep_u], cell_u[i][keep_u])
            # flux block: <f, chi_m div rho_e>
            cell_s = np.einsum("seq,ebq,eq,js,s->jeb", fv, div_rho, jxw, chi, tw)
            for j, gj in enumerate(ts.local_dofs(m)):
                np.add.at(F_s[gj], eds, cell_s[j])
        if g is not None:
            gv = g.eval_cells(m, times, phys, rule.points)  # (nt_q, n_el, n_q, d)
            cell_u = np.einsum("seqd,ead,eq,is,s->iea", gv, grad_psi, jxw, phi, tw)
            for i, gi in enumerate(tu.local_dofs(m)):
                np.add.at(F_u[gi], edu[keep_u], cell_u[i][keep_u])
            cell_s = np.einsum("seqd,ebqd,eq,js,s->jeb", gv, rho, jxw, chi, tw)
            for j, gj in enumerate(ts.local_dofs(m)):
                np.add.at(F_s[gj], eds, cell_s[j])

    if u0 is not None and su.n_dofs > 0:
        if hasattr(u0, "trace_cells"):
            u0v = u0.trace_cells(phys, rule.points)
        else:
            u0v = np.asarray(u0(phys.reshape(-1, space.dimension))).reshape(jxw.shape)
        load = np.einsum("eq,aq,eq->ea", u0v, psi, jxw)
        trace = tu.eval_basis(0, np.array([0.0]), 0)[:, 0]
        for i, gi in enumerate(tu.local_dofs(0)):
            if trace[i] != 0.0:
                np.add.at(F_u[gi], edu[keep_u], trace[i] * load[keep_u])

    F = np.concatenate([F_u.ravel(), F_s.ravel()])
    if not np.isfinite(F).all():
        raise ValueError("load vector has non-finite entries; check the data evaluators")
    return F


# ---------------------------------------------------------------------------
# brute-force space-time assembler (test oracle)
# ---------------------------------------------------------------------------

def assemble_system_bruteforce(mesh: TensorMesh, layout: ProductDofLayout) -> sp.csr_matrix:
    """Direct space-time element-loop assembly of the same bilinear form.

    Independent of the Kronecker path; quadratic cost, small meshes only.
    """
    su, ss = layout.spatial_u, layout.spatial_s
    tu, ts = layout.temporal_u, layout.temporal_s
    space = mesh.space
    rule = spatial_rule(space, ASSEMBLY_SPACE_DEGREE)
    t_rule = gauss_interval(3)
    _, jxw = spatial_geometry(space, rule)
    psi = su.basis_values(rule.points)
    grad_psi = su.basis_gradients()
    rho, div_rho = ss.eval_basis(rule.points)
    d = space.dimension
    n_q = rule.n_points
    n_el = space.n_elements

    n = layout.n_dofs
    rows, cols, vals = [], [], []
    part = mesh.time
    for m in range(part.n_elements):
        h = part.lengths[m]
        tw = h * t_rule.weights
        phi = tu.eval_basis(m, t_rule.points, 0)
        dphi = tu.eval_basis(m, t_rule.points, 1)
        chi = ts.eval_basis(m, t_rule.points, 0)
        gu = tu.local_dofs(m)
        gs = ts.local_dofs(m)
        for e in range(n_el):
            # combined local dof list: scalar-block then flux-block entries
            shape = (len(tw), n_q, d)
            gdofs = []
            div_parts = []   # (n_tq, n_q) per local dof
            vec_parts = []   # (n_tq, n_q, d) per local dof
            for i, gti in enumerate(gu):
                for a in range(su.n_local):
                    ga = su.element_dofs[e, a]
                    if ga < 0:
                        continue
                    gdofs.append(gti * su.n_dofs + ga)
                    div_parts.append(np.outer(dphi[i], psi[a, :]))
                    vec_parts.append(np.broadcast_to(
                        phi[i][:, None, None] * grad_psi[e, a][None, None, :], shape))
            for j, gtj in enumerate(gs):
                for b in range(ss.n_local):
                    gdofs.append(layout.sigma_offset + gtj * ss.n_dofs + ss.element_dofs[e, b])
                    div_parts.append(np.outer(chi[j], div_rho[e, b]))
                    vec_parts.append(np.broadcast_to(
                        chi[j][:, None, None] * rho[e, b][None, :, :], shape))
            gdofs = np.array(gdofs)
            dv = np.stack(div_parts)            # (n_ld, n_tq, n_q)
            vc = np.stack(vec_parts)
            w = tw[:, None] * jxw[e][None, :]
            loc = np.einsum("isq,jsq,sq->ij", dv, dv, w)
            loc += np.einsum("isqd,jsqd,sq->ij", vc, vc, w)
            rows.append(np.repeat(gdofs, len(gdofs)))
            cols.append(np.tile(gdofs, len(gdofs)))
            vals.append(loc.ravel())

    # trace term <u(0), v(0)>: spatial mass between scalar dofs at time dof 0
    if su.n_dofs > 0:
        trace = tu.eval_basis(0, np.array([0.0]), 0)[:, 0]
        for e in range(n_el):
            gdofs, weights = [], []
            for i, gti in enumerate(tu.local_dofs(0)):
                if trace[i] == 0.0:
                    continue
                for a in range(su.n_local):
                    ga = su.element_dofs[e, a]
                    if ga < 0:
                        continue
                    gdofs.append(gti * su.n_dofs + ga)
                    weights.append(trace[i] * psi[a, :])
            if not gdofs:
                continue
            gdofs = np.array(gdofs)
            wts = np.stack(weights)
            loc = np.einsum("iq,jq,q->ij", wts, wts, jxw[e])
            rows.append(np.repeat(gdofs, len(gdofs)))
            cols.append(np.tile(gdofs, len(gdofs)))
            vals.append(loc.ravel())

    return _scatter(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), (n, n))
