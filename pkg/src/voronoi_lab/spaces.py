"""Exact geometry of the constant-curvature model spaces.

Points are plain numpy arrays in an embedding: R^n for the Euclidean space
and the flat 2-torus, the radius-1/k sphere in R^{n+1}, and the upper sheet
of the hyperboloid <x,x>_M = -1/k^2 in Minkowski R^{n,1} (last coordinate is
the timelike one).  All operations broadcast over leading axes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Model",
    "CurvatureSpace",
    "AntipodalError",
    "euclidean",
    "sphere",
    "hyperbolic",
    "flat_torus",
    "s_alpha",
    "s_alpha_power_integral",
    "ball_volume_expansion",
]

_POINT_TOL = 1e-12
_TANGENT_TOL = 1e-10


class AntipodalError(ValueError):
    """log_map is undefined at (nearly) antipodal sphere points."""


class Model(enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLIC = "hyperbolic"
    FLAT_TORUS2 = "flat_torus2"


def s_alpha(alpha, t):
    """The radial scale function: sin(a t)/a, t, or sinh(|a| t)/|a|.

    Branches on the sign of ``alpha`` (positive for the sphere of curvature
    alpha^2, negative for hyperbolic curvature -alpha^2, zero flat).  A
    series branch for |alpha|*t < 1e-4 avoids cancellation near alpha = 0.
    """
    alpha = np.asarray(alpha, dtype=float)
    t = np.asarray(t, dtype=float)
    signed_sq = alpha * np.abs(alpha)  # +a^2, -a^2 or 0
    small = np.abs(alpha * t) < 1e-4
    at = np.abs(alpha) * t
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = np.where(
            alpha > 0,
            np.sin(at) / np.where(small, 1.0, np.abs(alpha)),
            np.sinh(np.where(small, 0.0, at)) / np.where(small, 1.0, np.abs(alpha)),
        )
    series = t * (1.0 - signed_sq * t * t / 6.0 + signed_sq ** 2 * t ** 4 / 120.0)
    out = np.where(small, series, exact)
    if out.ndim == 0:
        return float(out)
    return out


def _s_alpha_sq_integral(alpha, r):
    # closed form of int_0^r s_alpha(t)^2 dt for alpha != 0
    a = abs(alpha)
    if alpha > 0:
        return r / (2 * a * a) - math.sin(2 * a * r) / (4 * a ** 3)
    return math.sinh(2 * a * r) / (4 * a ** 3) - r / (2 * a * a)


def s_alpha_power_integral(alpha, power, r, quad=None):
    """int_0^r s_alpha(t)^power dt.

    Closed forms for power in {0, 1, 2} and for alpha = 0; small-|alpha|r
    series; adaptive quadrature otherwise.
    """
    if r < 0:
        raise ValueError("negative radius")
    if r == 0.0:
        return 0.0
    alpha = float(alpha)
    p = power
    if alpha == 0.0:
        return r ** (p + 1) / (p + 1)
    if abs(alpha * r) < 1e-4:
        k_signed = alpha * abs(alpha)
        lead = r ** (p + 1) / (p + 1)
        corr = -p * k_signed * r ** (p + 3) / (6 * (p + 3))
        quart = (p * (p - 1) / 72.0 + p / 120.0) * k_signed ** 2 * r ** (p + 5) / (p + 5)
        return lead + corr + quart
    if p == 0:
        return r
    a = abs(alpha)
    if p == 1:
        if alpha > 0:
            return (1.0 - math.cos(a * r)) / (a * a)
        return (math.cosh(a * r) - 1.0) / (a * a)
    if p == 2:
        return _s_alpha_sq_integral(alpha, r)
    from .quadrature import integrate

    return integrate(lambda t: s_alpha(alpha, t) ** p, 0.0, r, spec=quad)


def ball_volume_expansion(n, scal, r):
    """Two-term small-radius geodesic ball volume polynomial.

    kappa_n r^n - kappa_n * scal * r^{n+2} / (6 (n+2)); no remainder term.
    """
    from .constants import kappa

    kn = kappa(n)
    return kn * r ** n - kn * scal * r ** (n + 2) / (6.0 * (n + 2))


def _gram_schmidt(vectors, dot, tol=1e-8):
    """Orthonormalize rows under the bilinear form ``dot``, dropping
    near-degenerate ones."""
    basis = []
    for v in vectors:
        w = v.astype(float).copy()
        for b in basis:
            w -= dot(w, b) * b
        nrm2 = dot(w, w)
        if nrm2 > tol:
            basis.append(w / math.sqrt(nrm2))
    return basis


@dataclass(frozen=True)
class CurvatureSpace:
    """Model descriptor: Euclidean / sphere / hyperbolic / flat 2-torus.

    ``k`` is the curvature scale: the sphere has radius 1/k (sectional
    curvature +k^2), hyperbolic space has curvature -k^2.  Flat models force
    k = 0.
    """

    model: Model
    n: int
    k: float = 0.0
    torus_period: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if self.model in (Model.SPHERE, Model.HYPERBOLIC):
            if not self.k > 0:
                raise ValueError(f"{self.model.value} requires k > 0")
        else:
            if self.k != 0.0:
                raise ValueError(f"{self.model.value} forces k = 0")
        if self.model is Model.FLAT_TORUS2:
            if self.n != 2:
                raise ValueError("flat torus is 2-dimensional here")
            if not self.torus_period > 0:
                raise ValueError("torus requires a positive period")
        elif self.torus_period != 0.0:
            raise ValueError("torus_period only applies to the flat torus")

    # -- scalar descriptors -------------------------------------------------

    @property
    def ambient_dim(self):
        if self.model in (Model.SPHERE, Model.HYPERBOLIC):
            return self.n + 1
        return self.n

    @property
    def alpha(self):
        """Signed curvature scale driving s_alpha: +k, -k or 0."""
        if self.model is Model.SPHERE:
            return self.k
        if self.model is Model.HYPERBOLIC:
            return -self.k
        return 0.0

    @property
    def sectional_curvature(self):
        if self.model is Model.SPHERE:
            return self.k ** 2
        if self.model is Model.HYPERBOLIC:
            return -self.k ** 2
        return 0.0

    def ricci(self):
        return (self.n - 1) * self.sectional_curvature

    def scal(self):
        return self.n * (self.n - 1) * self.sectional_curvature

    @property
    def injectivity_radius(self):
        if self.model is Model.SPHERE:
            return math.pi / self.k
        if self.model is Model.FLAT_TORUS2:
            return self.torus_period / 2.0
        return math.inf

    @property
    def antipodal_tol(self):
        return 1e-8 * (math.pi / self.k) if self.model is Model.SPHERE else 0.0

    # -- bilinear form ------------------------------------------------------

    def form_dot(self, a, b):
        """The embedding bilinear form (Euclidean, or Minkowski with the last
        coordinate timelike)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.model is Model.HYPERBOLIC:
            return np.sum(a[..., :-1] * b[..., :-1], axis=-1) - a[..., -1] * b[..., -1]
        return np.sum(a * b, axis=-1)

    def tangent_norm(self, v):
        return np.sqrt(np.maximum(self.form_dot(v, v), 0.0))

    # -- point validity -----------------------------------------------------

    def project_point(self, x):
        """Renormalize onto the constraint surface (or reduce torus coords)."""
        x = np.asarray(x, dtype=float)
        if self.model is Model.SPHERE:
            nrm = np.linalg.norm(x, axis=-1, keepdims=True)
            return x / (self.k * nrm)
        if self.model is Model.HYPERBOLIC:
            q = -self.form_dot(x, x)
            scale = 1.0 / (self.k * np.sqrt(q))
            out = x * scale[..., None]
            return np.where(out[..., -1:] > 0, out, -out)
        if self.model is Model.FLAT_TORUS2:
            return np.mod(x, self.torus_period)
        return x

    def check_point(self, x, tol=_POINT_TOL):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim:
            raise ValueError(
                f"expected ambient dimension {self.ambient_dim}, got {x.shape[-1]}")
        if self.model is Model.SPHERE:
            return np.all(np.abs(self.form_dot(x, x) - 1.0 / self.k ** 2) < tol)
        if self.model is Model.HYPERBOLIC:
            ok = np.abs(self.form_dot(x, x) + 1.0 / self.k ** 2) < 1e-9
            return np.all(ok & (x[..., -1] > 0))
        if self.model is Model.FLAT_TORUS2:
            return np.all((x >= 0) & (x < self.torus_period))
        return True

    def project_tangent(self, x, v):
        """Project an ambient vector onto the tangent space at x."""
        v = np.asarray(v, dtype=float)
        if self.model is Model.SPHERE:
            coef = self.form_dot(x, v) * self.k ** 2
            return v - coef[..., None] * x
        if self.model is Model.HYPERBOLIC:
            coef = self.form_dot(x, v) * self.k ** 2
            return v + coef[..., None] * x
        return v

    def check_tangent(self, x, v, tol=_TANGENT_TOL):
        if self.model in (Model.SPHERE, Model.HYPERBOLIC):
            return np.all(np.abs(self.form_dot(x, v)) * self.k ** 2 < tol)
        return True

    # -- metric operations --------------------------------------------------

    def distance(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape[-1] != self.ambient_dim or b.shape[-1] != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        if self.model is Model.SPHERE:
            c = np.clip(self.k ** 2 * self.form_dot(a, b), -1.0, 1.0)
            return np.arccos(c) / self.k
        if self.model is Model.HYPERBOLIC:
            c = np.maximum(-self.k ** 2 * self.form_dot(a, b), 1.0)
            return np.arccosh(c) / self.k
        if self.model is Model.FLAT_TORUS2:
            d = np.abs(a - b)
            d = np.minimum(d, self.torus_period - d)
            return np.sqrt(np.sum(d * d, axis=-1))
        return np.linalg.norm(a - b, axis=-1)

    def exp_map(self, x, v):
        """Follow the geodesic from x with initial velocity v for unit time."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.model is Model.EUCLIDEAN:
            return x + v
        if self.model is Model.FLAT_TORUS2:
            return np.mod(x + v, self.torus_period)
        nrm = self.tangent_norm(v)
        th = self.k * nrm
        small = th < 1e-14
        safe = np.where(small, 1.0, nrm)
        if self.model is Model.SPHERE:
            out = np.cos(th)[..., None] * x + (np.sin(th) / (self.k * safe))[..., None] * v
        else:
            out = np.cosh(th)[..., None] * x + (np.sinh(th) / (self.k * safe))[..., None] * v
        out = np.where(small[..., None], x + v, out)
        return self.project_point(out)

    def log_map(self, x, y):
        """Inverse of exp_map on the injectivity ball."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.model is Model.EUCLIDEAN:
            return y - x
        if self.model is Model.FLAT_TORUS2:
            d = y - x
            d = np.mod(d + self.torus_period / 2.0, self.torus_period) - self.torus_period / 2.0
            return d
        d = self.distance(x, y)
        if self.model is Model.SPHERE:
            if np.any(d >= math.pi / self.k - self.antipodal_tol):
                raise AntipodalError("log_map undefined near the antipode")
        w = self.project_tangent(x, y)
        wn = self.tangent_norm(w)
        scale = np.where(wn < 1e-15, 0.0, d / np.where(wn < 1e-15, 1.0, wn))
        return scale[..., None] * w

    def parallel_transport(self, x, y, v):
        """Transport v in T_x M along the minimizing geodesic to T_y M."""
        if self.model in (Model.EUCLIDEAN, Model.FLAT_TORUS2):
            return np.asarray(v, dtype=float).copy()
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        v = np.asarray(v, dtype=float)
        log_xy = self.log_map(x, y)
        d = self.tangent_norm(log_xy)
        if np.all(d < 1e-15):
            return v.copy()
        u = log_xy / np.where(d < 1e-15, 1.0, d)[..., None]
        a = self.form_dot(v, u)
        th = self.k * d
        if self.model is Model.SPHERE:
            u_at_y = np.cos(th)[..., None] * u - (self.k * np.sin(th))[..., None] * x
        else:
            u_at_y = np.cosh(th)[..., None] * u + (self.k * np.sinh(th))[..., None] * x
        out = v - a[..., None] * u + a[..., None] * u_at_y
        return self.project_tangent(y, out)

    def tangent_frame(self, x):
        """Deterministic orthonormal basis of T_x M (Gram-Schmidt on the
        canonical ambient axes, skipping near-degenerate ones)."""
        x = np.asarray(x, dtype=float)
        dim = self.ambient_dim
        if self.model in (Model.EUCLIDEAN, Model.FLAT_TORUS2):
            return [np.eye(dim)[i] for i in range(self.n)]
        cands = [self.project_tangent(x, np.eye(dim)[i]) for i in range(dim)]
        basis = _gram_schmidt(cands, self.form_dot)
        if len(basis) != self.n:
            raise ValueError("failed to build a tangent frame")
        return basis

    # -- radial geometry ----------------------------------------------------

    def _check_radius(self, r):
        if r < 0:
            raise ValueError("negative radius")
        if self.model is Model.SPHERE and r > math.pi / self.k + 1e-12:
            raise ValueError("radius exceeds pi/k on the sphere")
        if self.model is Model.FLAT_TORUS2 and r > self.torus_period / 2.0 + 1e-12:
            raise ValueError("radius exceeds half the torus period")

    def radial_jacobian(self, r):
        """Jacobian of geodesic spherical coordinates: s_alpha(r)^{n-1}."""
        self._check_radius(r)
        return s_alpha(self.alpha, r) ** (self.n - 1)

    def ball_volume(self, r, quad=None):
        """Volume of the geodesic ball of radius r."""
        from .constants import sigma

        self._check_radius(r)
        return sigma(self.n - 1) * s_alpha_power_integral(self.alpha, self.n - 1, r, quad=quad)

    def total_volume(self):
        if self.model is Model.SPHERE:
            return self.ball_volume(math.pi / self.k)
        if self.model is Model.FLAT_TORUS2:
            return self.torus_period ** 2
        return math.inf


def euclidean(n):
    return CurvatureSpace(Model.EUCLIDEAN, n)


def sphere(n, k=1.0):
    return CurvatureSpace(Model.SPHERE, n, k=k)


def hyperbolic(n, k=1.0):
    return CurvatureSpace(Model.HYPERBOLIC, n, k=k)


def flat_torus(period=1.0):
    return CurvatureSpace(Model.FLAT_TORUS2, 2, torus_period=period)
