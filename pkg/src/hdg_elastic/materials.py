"""Isotropic linear elastic material laws: stiffness, compliance, wavespeeds.

Symmetric 3x3 tensors are packed as 6-vectors of matrix entries in the order
(11, 22, 33, 23, 13, 12); off-diagonal entries are stored unscaled, and the
Frobenius pairing carries an explicit factor 2 on the off-diagonal slots.

Coefficient fields are given both as vectorized numpy callables (points of
shape (..., 3)) and as sympy expressions in x1, x2, x3 so that manufactured
data can be derived symbolically.
"""

from dataclasses import dataclass

import numpy as np
import sympy as sp

SYM_COMPONENTS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
FROBENIUS_WEIGHTS = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])

# E_c: unit symmetric matrix for packed component c (both off-diagonal slots set)
SYM_MATS = np.zeros((6, 3, 3))
for _c, (_i, _j) in enumerate(SYM_COMPONENTS):
    SYM_MATS[_c, _i, _j] = 1.0
    SYM_MATS[_c, _j, _i] = 1.0

_SYM_TOL = 1e-12
_TRACE_PICK = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])

X1, X2, X3 = sp.symbols("x1 x2 x3", real=True)


def pack_sym(mat):
    """(..., 3, 3) symmetric matrices -> (..., 6) packed entries."""
    mat = np.asarray(mat)
    skew = np.abs(mat - np.swapaxes(mat, -1, -2)).max()
    scale = max(np.abs(mat).max(), 1.0)
    if skew > _SYM_TOL * scale:
        raise ValueError(f"matrix field is not symmetric (max asymmetry {skew:.3e})")
    return np.stack([mat[..., i, j] for i, j in SYM_COMPONENTS], axis=-1)


def unpack_sym(packed):
    """(..., 6) packed entries -> (..., 3, 3) symmetric matrices."""
    packed = np.asarray(packed)
    return np.einsum("...c,cij->...ij", packed, SYM_MATS.astype(packed.dtype, copy=False))


def _as_field(value):
    """Turn a constant into a vectorized coefficient callable."""
    if callable(value):
        return value
    const = float(value)
    return lambda x: np.full(np.asarray(x).shape[:-1], const)


@dataclass(frozen=True)
class Material:
    """rho, lam, mu as callables of points (..., 3); sympy twins for data derivation."""
    rho: callable
    lam: callable
    mu: callable
    rho_expr: sp.Expr
    lam_expr: sp.Expr
    mu_expr: sp.Expr

    def validate(self, points):
        lam, mu, rho = self.lam(points), self.mu(points), self.rho(points)
        if np.any(mu <= 0) or np.any(3 * lam + 2 * mu <= 0):
            raise ValueError("material moduli violate mu > 0, 3*lam + 2*mu > 0")
        if np.any(rho <= 0):
            raise ValueError("material density must be positive")

    def stiffness_packed(self, points):
        """(..., 6, 6) entry representation of C xi = 2 mu xi + lam tr(xi) I."""
        lam = np.asarray(self.lam(points), dtype=float)
        mu = np.asarray(self.mu(points), dtype=float)
        eye = np.eye(6)
        tr = np.outer(_TRACE_PICK, _TRACE_PICK)
        return 2.0 * mu[..., None, None] * eye + lam[..., None, None] * tr

    def compliance_packed(self, points):
        """(..., 6, 6) entry representation of the inverse law A = C^-1."""
        lam = np.asarray(self.lam(points), dtype=float)
        mu = np.asarray(self.mu(points), dtype=float)
        eye = np.eye(6)
        tr = np.outer(_TRACE_PICK, _TRACE_PICK)
        coef = lam / (2.0 * mu * (2.0 * mu + 3.0 * lam))
        return eye / (2.0 * mu[..., None, None]) - coef[..., None, None] * tr

    def compliance_bound(self, points):
        """Pointwise spectral norm of A: max(1/(2 mu), 1/(2 mu + 3 lam))."""
        lam = np.asarray(self.lam(points), dtype=float)
        mu = np.asarray(self.mu(points), dtype=float)
        return np.maximum(1.0 / (2.0 * mu), 1.0 / (2.0 * mu + 3.0 * lam))

    def wavespeeds(self, points):
        """(c_p, c_s) = (sqrt((lam + 2 mu)/rho), sqrt(mu/rho))."""
        lam = np.asarray(self.lam(points), dtype=float)
        mu = np.asarray(self.mu(points), dtype=float)
        rho = np.asarray(self.rho(points), dtype=float)
        return np.sqrt((lam + 2.0 * mu) / rho), np.sqrt(mu / rho)


def apply_stiffness(material, points, xi):
    """C xi for a symmetric matrix field xi of shape (..., 3, 3)."""
    packed = pack_sym(xi)
    return unpack_sym(np.einsum("...cd,...d->...c", material.stiffness_packed(points), packed))


def apply_compliance(material, points, xi):
    """A xi = C^-1 xi for a symmetric matrix field xi of shape (..., 3, 3)."""
    packed = pack_sym(xi)
    return unpack_sym(np.einsum("...cd,...d->...c", material.compliance_packed(points), packed))


def isotropic(lam, mu, rho):
    """Constant-coefficient isotropic material."""
    lam, mu, rho = float(lam), float(mu), float(rho)
    if mu <= 0 or 3 * lam + 2 * mu <= 0:
        raise ValueError("require mu > 0 and 3*lam + 2*mu > 0")
    if rho <= 0:
        raise ValueError("density must be positive")
    return Material(_as_field(rho), _as_field(lam), _as_field(mu),
                    sp.Float(rho), sp.Float(lam), sp.Float(mu))


def variable_preset():
    """Smooth variable-coefficient preset on the unit cube."""
    rho_e = 1 + X1 ** 2 + X2 ** 2 + X3 ** 2
    lam_e = 2 + sp.Rational(2, 10) * X1 ** 2 + sp.Rational(3, 10) * X2 ** 2 \
        + sp.Rational(4, 100) * X3 ** 2
    mu_e = 3 + sp.Rational(5, 10) * X2 ** 2 + sp.Rational(3, 100) * X3 ** 2

    def rho(x):
        x = np.asarray(x, dtype=float)
        return 1 + (x ** 2).sum(axis=-1)

    def lam(x):
        x = np.asarray(x, dtype=float)
        return 2 + 0.2 * x[..., 0] ** 2 + 0.3 * x[..., 1] ** 2 + 0.04 * x[..., 2] ** 2

    def mu(x):
        x = np.asarray(x, dtype=float)
        return 3 + 0.5 * x[..., 1] ** 2 + 0.03 * x[..., 2] ** 2

    return Material(rho, lam, mu, rho_e, lam_e, mu_e)
