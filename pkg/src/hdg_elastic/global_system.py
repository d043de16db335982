"""Global skeleton assembly, sparse solve, reconstruction and oracles.

Skeleton unknowns are the face trace coefficients on all non-Dirichlet faces,
ordered by face index (faces are sorted by vertex triple at mesh build time)
and component-major within a face. Dirichlet faces carry known coefficients
obtained by face-wise L2 projection of the boundary datum.

Besides the hybridized (condensed) path, this module assembles the full
uncondensed systems - both the second-order form in (stress, displacement,
traces) and the first-order form in the unscaled stress - as oracles.
"""

import json
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .local_ops import (VARIANTS, FluxVariant, assemble_local_blocks, condense,
                        factorize_local, recover)
from .mesh import BoundaryTag

_RESIDUAL_TOL = 1e-8


class SingularSystemError(RuntimeError):
    pass


def _zero_vector_field(x, n=None):
    x = np.asarray(x)
    return np.zeros(x.shape[:-1] + (3,))


@dataclass(frozen=True)
class ProblemData:
    """Frequency, volume load and boundary data (second-order scaling).

    f is the volume load of the second-order equation; g_d, g_n, g_r are the
    Dirichlet, traction and impedance data. Omitted fields default to zero.
    f and g_d are callables of points (..., 3); g_n and g_r take
    (points, outward unit normal of the boundary face).
    """
    kappa: float
    f: callable = None
    g_d: callable = None
    g_n: callable = None
    g_r: callable = None

    def load(self):
        return self.f if self.f is not None else _zero_vector_field

    def dirichlet(self):
        return self.g_d if self.g_d is not None else _zero_vector_field

    def neumann(self):
        return self.g_n if self.g_n is not None else _zero_vector_field

    def impedance(self):
        return self.g_r if self.g_r is not None else _zero_vector_field


class SkeletonMap:
    """Numbering of active (non-Dirichlet) face trace unknowns."""

    def __init__(self, mesh, nFd):
        self.nFd = nFd
        self.active = [fi for fi, f in enumerate(mesh.faces)
                       if f.tag != BoundaryTag.DIRICHLET]
        self.dirichlet = [fi for fi, f in enumerate(mesh.faces)
                          if f.tag == BoundaryTag.DIRICHLET]
        self.offset = {fi: i * nFd for i, fi in enumerate(self.active)}
        self.ndof = len(self.active) * nFd

    def face_dofs(self, fi):
        base = self.offset[fi]
        return np.arange(base, base + self.nFd)


def solve_dirichlet_trace(disc, g_d):
    """Face-wise projection of the Dirichlet datum; zeros on other faces."""
    mesh = disc.mesh
    values = np.zeros((mesh.num_faces, 3, disc.nF), dtype=complex)
    for fi, face in enumerate(mesh.faces):
        if face.tag == BoundaryTag.DIRICHLET:
            values[fi] = disc.project_face(fi, g_d)
    return values


def load_moments(disc, e, f):
    """Moments (f, w) against the element W basis, flattened (3*nW,)."""
    pts, wts = disc.element_points(e), disc.element_weights(e)
    psi, _ = disc.scalar_basis(e, "W")
    vals = np.asarray(f(pts))
    return np.einsum("q,qd,qj->dj", wts, vals, psi).ravel()


def face_moments(disc, fi, g):
    """Moments <g, mu> against the face basis, flattened (3*nF,)."""
    fd = disc.face_data(fi)
    vals = np.asarray(g(fd.points))
    return np.einsum("q,qd,ql->dl", fd.weights, vals, fd.chi).ravel()


def boundary_normal(disc, fi):
    """Outward unit normal of a boundary face (the owner's outward normal)."""
    mesh = disc.mesh
    face = mesh.faces[fi]
    if face.neighbor >= 0:
        raise ValueError(f"face {fi} is not a boundary face")
    lf = int(np.flatnonzero(mesh.element_faces[face.owner] == fi)[0])
    return mesh.element_face_signs[face.owner, lf] * face.normal


def boundary_moments(disc, fi, g):
    """Moments <g(x, n), mu> on a boundary face, flattened (3*nF,)."""
    fd = disc.face_data(fi)
    n = boundary_normal(disc, fi)
    vals = np.asarray(g(fd.points, n))
    return np.einsum("q,qd,ql->dl", fd.weights, vals, fd.chi).ravel()


@dataclass
class HybridSystem:
    matrix: sps.csr_matrix
    rhs: np.ndarray
    skeleton: SkeletonMap
    dirichlet_values: np.ndarray  # (nfaces, 3, nF), zero off Dirichlet faces
    kappa: float
    variant: FluxVariant


def assemble_hybrid(disc, material, data, variant):
    """Condensed skeleton system for the trace unknowns."""
    mesh = disc.mesh
    nFd = 3 * disc.nF
    skel = SkeletonMap(mesh, nFd)
    dir_values = solve_dirichlet_trace(disc, data.dirichlet())
    rhs = np.zeros(skel.ndof, dtype=complex)
    rows, cols, vals = [], [], []

    for e in range(mesh.num_elements):
        blocks = assemble_local_blocks(disc, material, e)
        fact = factorize_local(blocks, data.kappa, variant)
        S, load_map = condense(fact)
        local_rhs = load_map @ load_moments(disc, e, data.load())
        faces = mesh.element_faces[e]
        tags = [mesh.faces[fi].tag for fi in faces]
        for lr in range(4):
            if tags[lr] == BoundaryTag.DIRICHLET:
                continue
            rdofs = skel.face_dofs(faces[lr])
            rblock = slice(lr * nFd, (lr + 1) * nFd)
            acc = local_rhs[rblock].copy()
            for lc in range(4):
                cblock = slice(lc * nFd, (lc + 1) * nFd)
                if tags[lc] == BoundaryTag.DIRICHLET:
                    acc -= S[rblock, cblock] @ dir_values[faces[lc]].ravel()
                else:
                    cdofs = skel.face_dofs(faces[lc])
                    rr, cc = np.meshgrid(rdofs, cdofs, indexing="ij")
                    rows.append(rr.ravel())
                    cols.append(cc.ravel())
                    vals.append(S[rblock, cblock].ravel())
            rhs[rdofs] += acc

    for fi, face in enumerate(mesh.faces):
        if face.tag == BoundaryTag.NEUMANN:
            rhs[skel.face_dofs(fi)] += boundary_moments(disc, fi, data.neumann())
        elif face.tag == BoundaryTag.IMPEDANCE:
            dofs = skel.face_dofs(fi)
            rows.append(dofs)
            cols.append(dofs)
            vals.append(np.full(nFd, -1j * data.kappa))
            rhs[dofs] += boundary_moments(disc, fi, data.impedance())

    matrix = sps.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(skel.ndof, skel.ndof))
    return HybridSystem(matrix, rhs, skel, dir_values, data.kappa, variant)


def solve_skeleton(system):
    """Sparse direct solve of the condensed system; returns (nfaces, 3, nF)."""
    try:
        lu = spla.splu(system.matrix.tocsc())
        x = lu.solve(system.rhs)
    except RuntimeError as exc:
        raise SingularSystemError(f"skeleton solve failed: {exc}") from exc
    scale = max(np.linalg.norm(system.rhs), np.linalg.norm(x), 1e-300)
    residual = np.linalg.norm(system.matrix @ x - system.rhs) / scale
    if not np.isfinite(x).all() or residual > _RESIDUAL_TOL:
        raise SingularSystemError(
            f"skeleton solve did not converge (relative residual {residual:.3e})")
    skel = system.skeleton
    nF = system.dirichlet_values.shape[2]
    uhat = system.dirichlet_values.copy()
    for fi in skel.active:
        uhat[fi] = x[skel.face_dofs(fi)].reshape(3, nF)
    return uhat


@dataclass
class SolutionFields:
    """Element-wise coefficients of the discrete solution.

    sigma holds the second-order stress variable (sigma-tilde); for the
    first-order variant the unscaled stress is (i/kappa) * sigma."""
    kappa: float
    variant_tag: str
    k: int
    sigma: np.ndarray   # (ne, 6, nV) packed stress coefficients
    u: np.ndarray       # (ne, 3, nW)
    uhat: np.ndarray    # (nfaces, 3, nF)
    meta: dict = field(default_factory=dict)

    def first_order_stress(self):
        if self.kappa == 0:
            raise ValueError("unscaled stress is undefined at kappa = 0")
        return (1j / self.kappa) * self.sigma


def reconstruct(disc, material, data, variant, uhat):
    """Element-by-element recovery of (stress, displacement) from traces."""
    mesh = disc.mesh
    ne = mesh.num_elements
    sigma = np.zeros((ne, 6, disc.nV), dtype=complex)
    u = np.zeros((ne, 3, disc.nW), dtype=complex)
    for e in range(ne):
        blocks = assemble_local_blocks(disc, material, e)
        fact = factorize_local(blocks, data.kappa, variant)
        m_local = np.concatenate([uhat[fi].ravel() for fi in mesh.element_faces[e]])
        sigma[e], u[e] = recover(fact, m_local, load_moments(disc, e, data.load()))
    return SolutionFields(data.kappa, variant.tag, disc.k, sigma, u, uhat)


def solve_time_harmonic(disc, material, data, variant):
    """Assemble, solve and reconstruct. Returns (solution, info dict)."""
    t0 = time.perf_counter()
    system = assemble_hybrid(disc, material, data, variant)
    t1 = time.perf_counter()
    uhat = solve_skeleton(system)
    solution = reconstruct(disc, material, data, variant, uhat)
    t2 = time.perf_counter()
    ne = disc.mesh.num_elements
    info = {
        "dofs_skeleton": system.skeleton.ndof,
        "dofs_total": ne * (6 * disc.nV + 3 * disc.nW)
        + disc.mesh.num_faces * 3 * disc.nF,
        "assemble_s": t1 - t0,
        "solve_s": t2 - t1,
    }
    solution.meta.update(info)
    return solution, info


# ---- uncondensed oracles ----


def _global_layout(disc):
    mesh = disc.mesh
    ne = mesh.num_elements
    nS, nW3, nFd = 6 * disc.nV, 3 * disc.nW, 3 * disc.nF
    off_s = 0
    off_u = ne * nS
    off_m = off_u + ne * nW3
    ndof = off_m + mesh.num_faces * nFd
    return nS, nW3, nFd, off_s, off_u, off_m, ndof


def assemble_monolithic(disc, material, data, variant=None, form="second"):
    """Full sparse system over (stress, displacement, all traces).

    form='second': the alpha-family system in the second-order stress.
    form='first':  the first-order system in the unscaled stress (load and
    traction data divided by -i*kappa accordingly).
    Returns (matrix, rhs, layout) with layout = (nS, nW3, nFd, offsets...)."""
    mesh = disc.mesh
    kappa = data.kappa
    if form == "first":
        if kappa == 0:
            raise ValueError("first-order form requires kappa != 0")
        alpha = None
    else:
        variant = variant if variant is not None else VARIANTS["first_order"]
        alpha = variant.alpha(kappa)
    nS, nW3, nFd, off_s, off_u, off_m, ndof = _global_layout(disc)
    mat = sps.lil_matrix((ndof, ndof), dtype=complex)
    rhs = np.zeros(ndof, dtype=complex)
    data_scale = 1j / kappa if form == "first" else 1.0

    for e in range(mesh.num_elements):
        b = assemble_local_blocks(disc, material, e)
        sl_s = slice(off_s + e * nS, off_s + (e + 1) * nS)
        sl_u = slice(off_u + e * nW3, off_u + (e + 1) * nW3)
        if form == "second":
            mat[sl_s, sl_s] += b.A
            mat[sl_s, sl_u] += b.D.T
            mat[sl_u, sl_s] += b.D
            mat[sl_u, sl_u] += kappa ** 2 * b.M - alpha * b.T11
        else:
            mat[sl_s, sl_s] += 1j * kappa * b.A
            mat[sl_s, sl_u] += -b.D.T
            mat[sl_u, sl_s] += b.D
            mat[sl_u, sl_u] += 1j * kappa * b.M + b.T11
        rhs[sl_u] += data_scale * load_moments(disc, e, data.load())
        for lf in range(4):
            fi = mesh.element_faces[e, lf]
            sl_m = slice(off_m + fi * nFd, off_m + (fi + 1) * nFd)
            tag = mesh.faces[fi].tag
            if form == "second":
                mat[sl_s, sl_m] += -b.N[lf].T
                mat[sl_u, sl_m] += alpha * b.tau * b.G[lf].T
                if tag != BoundaryTag.DIRICHLET:
                    mat[sl_m, sl_s] += b.N[lf]
                    mat[sl_m, sl_u] += -alpha * b.tau * b.G[lf]
                    mat[sl_m, sl_m] += alpha * b.tau * np.eye(nFd)
            else:
                mat[sl_s, sl_m] += b.N[lf].T
                mat[sl_u, sl_m] += -b.tau * b.G[lf].T
                if tag != BoundaryTag.DIRICHLET:
                    mat[sl_m, sl_s] += -b.N[lf]
                    mat[sl_m, sl_u] += -b.tau * b.G[lf]
                    mat[sl_m, sl_m] += b.tau * np.eye(nFd)

    for fi, face in enumerate(mesh.faces):
        sl_m = slice(off_m + fi * nFd, off_m + (fi + 1) * nFd)
        if face.tag == BoundaryTag.DIRICHLET:
            mat[sl_m, sl_m] = np.eye(nFd)
            rhs[off_m + fi * nFd: off_m + (fi + 1) * nFd] = \
                disc.project_face(fi, data.dirichlet()).ravel()
        elif face.tag == BoundaryTag.NEUMANN:
            gn = boundary_moments(disc, fi, data.neumann())
            rng = np.arange(off_m + fi * nFd, off_m + (fi + 1) * nFd)
            rhs[rng] += data_scale * gn if form == "second" else -data_scale * gn
        elif face.tag == BoundaryTag.IMPEDANCE:
            if form == "first":
                raise ValueError("impedance oracle implemented for the second-order form")
            rng = np.arange(off_m + fi * nFd, off_m + (fi + 1) * nFd)
            for i in rng:
                mat[i, i] += -1j * kappa
            rhs[rng] += boundary_moments(disc, fi, data.impedance())

    return mat.tocsr(), rhs, (nS, nW3, nFd, off_s, off_u, off_m, ndof)


def solve_monolithic(disc, material, data, variant=None, form="second"):
    """Direct solve of the uncondensed system; returns SolutionFields."""
    mat, rhs, layout = assemble_monolithic(disc, material, data, variant, form)
    nS, nW3, nFd, off_s, off_u, off_m, ndof = layout
    x = spla.spsolve(mat.tocsc(), rhs)
    residual = np.linalg.norm(mat @ x - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if not np.isfinite(x).all() or residual > _RESIDUAL_TOL:
        raise SingularSystemError(
            f"monolithic solve did not converge (relative residual {residual:.3e})")
    ne = disc.mesh.num_elements
    sigma = x[off_s:off_s + ne * nS].reshape(ne, 6, disc.nV)
    u = x[off_u:off_u + ne * nW3].reshape(ne, 3, disc.nW)
    uhat = x[off_m:].reshape(disc.mesh.num_faces, 3, disc.nF)
    tag = "first_order_unscaled" if form == "first" else variant.tag if variant else "first_order"
    return SolutionFields(data.kappa, tag, disc.k, sigma, u, uhat)


# ---- transmission residual and export ----


def flux_residual(disc, material, data, variant, solution):
    """Max skeleton-equation residual of a reconstructed solution.

    Interior faces: single-valuedness of the numerical flux moments.
    Neumann/impedance faces: the corresponding boundary condition."""
    mesh = disc.mesh
    nFd = 3 * disc.nF
    alpha = variant.alpha(data.kappa)
    acc = np.zeros((mesh.num_faces, nFd), dtype=complex)
    for e in range(mesh.num_elements):
        b = assemble_local_blocks(disc, material, e)
        s = solution.sigma[e].ravel()
        u = solution.u[e].ravel()
        for lf in range(4):
            fi = mesh.element_faces[e, lf]
            m = solution.uhat[fi].ravel()
            acc[fi] += b.N[lf] @ s - alpha * b.tau * (b.G[lf] @ u - m)
    worst = 0.0
    for fi, face in enumerate(mesh.faces):
        if face.tag == BoundaryTag.DIRICHLET:
            continue
        want = np.zeros(nFd, dtype=complex)
        if face.tag == BoundaryTag.NEUMANN:
            want = boundary_moments(disc, fi, data.neumann())
        elif face.tag == BoundaryTag.IMPEDANCE:
            want = boundary_moments(disc, fi, data.impedance()) \
                + 1j * data.kappa * solution.uhat[fi].ravel()
        worst = max(worst, float(np.abs(acc[fi] - want).max()))
    return worst


def save_solution(path, solution, header=None):
    """Binary export: coefficient arrays plus a JSON header."""
    meta = {"kappa": solution.kappa, "variant": solution.variant_tag,
            "k": solution.k}
    meta.update(solution.meta)
    if header:
        meta.update(header)
    np.savez(path, header=json.dumps(meta, sort_keys=True),
             sigma=solution.sigma, u=solution.u, uhat=solution.uhat)


def load_solution(path):
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["header"]))
        sol = SolutionFields(meta["kappa"], meta["variant"], meta["k"],
                             data["sigma"], data["u"], data["uhat"], meta)
    return sol
