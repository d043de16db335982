"""Element and face discretization data for the hybrid method.

Per element K of degree k:
  V: symmetric-matrix-valued P_k   (6 packed components, layout c*nV + i)
  W: vector-valued P_{k+1}         (3 components, layout d*nW + j)
Per face F:
  M: vector-valued P_k on the face (3 components, layout d*nF + l)

Scalar bases are the reference orthonormal bases scaled to be L2-orthonormal
on the physical element/face, so mass matrices are identities and L2
projections are plain quadrature moments. Face bases are single-valued: they
are defined through the face chart induced by the sorted global vertex triple
and both incident elements evaluate the same functions.
"""

from dataclasses import dataclass

import numpy as np

from .basis import SimplexBasis, simplex_space_dim
from .mesh import LOCAL_FACES
from .quadrature import simplex_rule


@dataclass(frozen=True)
class FaceData:
    points: np.ndarray    # (nq, 3) physical quadrature points
    weights: np.ndarray   # (nq,) physical weights (sum to face area)
    chi: np.ndarray       # (nq, nF) orthonormal face basis values
    chart_origin: np.ndarray
    chart_jac: np.ndarray  # (3, 2)
    scale: float           # 1/sqrt(2*area)


class Discretization:
    """Bases, quadrature and geometry caches for a given mesh and degree k."""

    def __init__(self, mesh, k, exactness=None):
        if k < 0:
            raise ValueError(f"polynomial degree k must be >= 0, got {k}")
        self.mesh = mesh
        self.k = int(k)
        self.exactness = int(exactness) if exactness is not None else 2 * (k + 1) + 2
        if self.exactness < 2 * (k + 1):
            raise ValueError("quadrature exactness too low for the mass matrices")

        self.tet_basis_v = SimplexBasis("tetrahedron", k)       # V scalar factor
        self.tet_basis_w = SimplexBasis("tetrahedron", k + 1)   # W scalar factor
        self.tri_basis = SimplexBasis("triangle", k)            # skeleton scalar factor
        self.nV = self.tet_basis_v.n
        self.nW = self.tet_basis_w.n
        self.nF = self.tri_basis.n

        self.vol_rule = simplex_rule("tetrahedron", self.exactness)
        self.face_rule = simplex_rule("triangle", self.exactness)
        self.phi_ref, self.dphi_ref = self.tet_basis_v.eval(self.vol_rule.points)
        self.psi_ref, self.dpsi_ref = self.tet_basis_w.eval(self.vol_rule.points)
        self.chi_ref, _ = self.tri_basis.eval(self.face_rule.points)

        ne = mesh.num_elements
        self.jac = np.empty((ne, 3, 3))
        self.jac_inv = np.empty((ne, 3, 3))
        self.det_jac = np.empty(ne)
        self.h = np.empty(ne)
        for e in range(ne):
            v = mesh.element_vertices(e)
            J = (v[1:] - v[0]).T
            self.jac[e] = J
            self.jac_inv[e] = np.linalg.inv(J)
            self.det_jac[e] = np.linalg.det(J)
            self.h[e] = mesh.element_diameter(e)
        if np.any(self.det_jac <= 0):
            raise ValueError("mesh contains non-positively oriented elements")

        self._face_data = [self._build_face_data(fi) for fi in range(mesh.num_faces)]

    # ---- faces ----

    def _build_face_data(self, fi):
        face = self.mesh.faces[fi]
        va, vb, vc = (self.mesh.vertices[v] for v in face.vertices)
        jac = np.column_stack([vb - va, vc - va])
        pts = va + self.face_rule.points @ jac.T
        wts = self.face_rule.weights * (2.0 * face.area)
        scale = 1.0 / np.sqrt(2.0 * face.area)
        chi = self.chi_ref * scale
        return FaceData(pts, wts, chi, va, jac, scale)

    def face_data(self, fi):
        return self._face_data[fi]

    def face_basis_at(self, fi, phys_points):
        """Orthonormal face basis values at physical points on face fi."""
        fd = self._face_data[fi]
        # least-squares chart inversion (points assumed on the face plane)
        ref = np.linalg.lstsq(fd.chart_jac, (phys_points - fd.chart_origin).T, rcond=None)[0].T
        vals, _ = self.tri_basis.eval(ref)
        return vals * fd.scale

    # ---- elements ----

    def element_points(self, e):
        """Physical volume quadrature points, (nq, 3)."""
        v0 = self.mesh.element_vertices(e)[0]
        return v0 + self.vol_rule.points @ self.jac[e].T

    def element_weights(self, e):
        return self.vol_rule.weights * self.det_jac[e]

    def scalar_basis(self, e, which):
        """Values and physical gradients of the element scalar basis at volume
        quadrature points. which is 'V' (degree k) or 'W' (degree k+1)."""
        vals_ref, grads_ref = (self.phi_ref, self.dphi_ref) if which == "V" \
            else (self.psi_ref, self.dpsi_ref)
        s = 1.0 / np.sqrt(self.det_jac[e])
        vals = vals_ref * s
        grads = np.einsum("qnd,de->qne", grads_ref, self.jac_inv[e]) * s
        return vals, grads

    def scalar_basis_at(self, e, phys_points, which):
        """Element scalar basis values at arbitrary physical points."""
        basis = self.tet_basis_v if which == "V" else self.tet_basis_w
        v0 = self.mesh.element_vertices(e)[0]
        ref = (np.asarray(phys_points) - v0) @ self.jac_inv[e].T
        vals, _ = basis.eval(ref)
        return vals / np.sqrt(self.det_jac[e])

    def tau(self, e):
        """Stabilization weight: inverse element diameter."""
        return 1.0 / self.h[e]

    # ---- projections ----

    def project_w(self, e, field):
        """L2 projection of a vector field (callable x -> (..., 3)) onto W|_K.

        Returns coefficients of shape (3, nW)."""
        pts, wts = self.element_points(e), self.element_weights(e)
        vals = np.asarray(field(pts))
        psi, _ = self.scalar_basis(e, "W")
        return np.einsum("q,qd,qj->dj", wts, vals, psi)

    def project_v(self, e, field):
        """L2 projection of a symmetric matrix field (x -> (..., 3, 3)) onto V|_K.

        Returns packed coefficients of shape (6, nV). Raises on asymmetric input."""
        from .materials import pack_sym
        pts, wts = self.element_points(e), self.element_weights(e)
        packed = pack_sym(np.asarray(field(pts)))
        phi, _ = self.scalar_basis(e, "V")
        return np.einsum("q,qc,qi->ci", wts, packed, phi)

    def project_face(self, fi, field):
        """L2 projection of a vector field onto the face space M|_F, (3, nF)."""
        fd = self._face_data[fi]
        vals = np.asarray(field(fd.points))
        return np.einsum("q,qd,ql->dl", fd.weights, vals, fd.chi)

    def eval_w(self, e, coeffs, phys_points):
        """Evaluate a W field from coefficients (3, nW) at physical points."""
        psi = self.scalar_basis_at(e, phys_points, "W")
        return np.einsum("dj,qj->qd", coeffs, psi)

    def eval_v_packed(self, e, coeffs, phys_points):
        """Evaluate a V field (packed entries, (6, nV)) at physical points."""
        phi = self.scalar_basis_at(e, phys_points, "V")
        return np.einsum("ci,qi->qc", coeffs, phi)

    def eval_face(self, fi, coeffs, phys_points):
        """Evaluate a face field from coefficients (3, nF) at physical points."""
        chi = self.face_basis_at(fi, phys_points)
        return np.einsum("dl,ql->qd", coeffs, chi)
