"""Exact cell-statistics formulas and asymptotic expansions.

Conventions: ``r`` in the vertex-density functions is the normalized radius
lambda^{1/n} * (geodesic circumradius); section-volume integrals use the
physical radius.  The scale function branch is s_alpha(t) = sin(alpha t)/alpha
for alpha > 0 (see README for the competing convention and why this one is
the consistent choice).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants as cn
from .quadrature import QuadratureSpec, integrate
from .spaces import CurvatureSpace, Model, s_alpha

__all__ = [
    "QuadratureSpec",
    "MomentEstimate",
    "mean_volume_exact",
    "mean_N_2d_exact",
    "vertex_density_exact",
    "mean_N_quadrature",
    "section_mean_volume_exact",
    "section_mean_N_exact",
    "asymptotic_mean_N",
    "asymptotic_density_const_curv",
    "radial_volume_integral",
    "mc_simplex_moment",
]

_EXP_CUTOFF = 45.0  # e^{-45} is below the double-precision noise floor here


def _require_model(space, allowed, what):
    if space.model not in allowed:
        raise ValueError(f"{what} is not defined for model {space.model.value}")


def radial_volume_integral(alpha, n, r):
    """Vectorized int_0^r s_alpha(t)^{n-1} dt (ball volume / sigma_{n-1})."""
    r = np.asarray(r, dtype=float)
    p = n - 1
    a = abs(alpha)
    k_signed = alpha * a
    series = (
        r ** (p + 1) / (p + 1)
        - p * k_signed * r ** (p + 3) / (6.0 * (p + 3))
        + (p * (p - 1) / 72.0 + p / 120.0) * k_signed ** 2 * r ** (p + 5) / (p + 5)
    )
    if alpha == 0.0:
        out = r ** (p + 1) / (p + 1)
    elif p == 1:
        exact = (1.0 - np.cos(a * r)) / (a * a) if alpha > 0 \
            else (np.cosh(a * r) - 1.0) / (a * a)
        out = np.where(np.abs(alpha * r) < 1e-4, series, exact)
    elif p == 2:
        if alpha > 0:
            exact = r / (2 * a * a) - np.sin(2 * a * r) / (4 * a ** 3)
        else:
            exact = np.sinh(2 * a * np.minimum(r, 350.0 / a)) / (4 * a ** 3) - r / (2 * a * a)
        out = np.where(np.abs(alpha * r) < 1e-4, series, exact)
    else:
        from .spaces import s_alpha_power_integral

        out = np.array([s_alpha_power_integral(alpha, p, float(ri))
                        for ri in np.atleast_1d(r)]).reshape(np.shape(r))
    if out.ndim == 0:
        return float(out)
    return out


def _normalized_alpha(space, lam):
    return space.alpha * lam ** (-1.0 / space.n)


def _normalized_range(space, lam):
    """Upper limit of the normalized radial coordinate (sphere only finite)."""
    if space.model is Model.SPHERE:
        return lam ** (1.0 / space.n) * math.pi / space.k
    return math.inf


def _truncation_radius(alpha, n, prefactor, cutoff=_EXP_CUTOFF):
    """Smallest r with prefactor * int_0^r s_alpha^{n-1} > cutoff."""
    lo, hi = 0.0, 1.0
    while prefactor * radial_volume_integral(alpha, n, hi) < cutoff:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("failed to bracket the truncation radius")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if prefactor * radial_volume_integral(alpha, n, mid) < cutoff:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(hi, 1.0):
            break
    return hi


def mean_volume_exact(space, lam):
    """Exact mean cell volume: 1/lambda, with the finite-volume correction
    on the sphere."""
    _require_model(space, (Model.SPHERE, Model.HYPERBOLIC, Model.EUCLIDEAN),
                   "mean_volume_exact")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if space.model is Model.SPHERE:
        n, k = space.n, space.k
        expo = 2.0 * cn.sigma(n - 1) * cn.wallis(n - 1) * lam / k ** n
        return (1.0 - math.exp(-expo)) / lam
    return 1.0 / lam


def mean_N_2d_exact(space, lam):
    """Exact mean vertex count of the two-dimensional cell."""
    if space.n != 2:
        raise ValueError("closed form only available for n = 2")
    _require_model(space, (Model.SPHERE, Model.HYPERBOLIC, Model.EUCLIDEAN),
                   "mean_N_2d_exact")
    if space.model is Model.EUCLIDEAN:
        return 6.0
    k2 = space.k ** 2
    if space.model is Model.HYPERBOLIC:
        return 6.0 + 3.0 * k2 / (math.pi * lam)
    corr = 3.0 * k2 / (math.pi * lam)
    return 6.0 - corr + math.exp(-4.0 * math.pi * lam / k2) * (6.0 + corr)


def vertex_density_exact(space, lam, r):
    """Radial density g_lambda(r, u) of the normalized vertex process.

    Vectorized over r.  On the sphere both the small circumball and its
    antipodal complement contribute an exponential term.
    """
    _require_model(space, (Model.SPHERE, Model.HYPERBOLIC, Model.EUCLIDEAN),
                   "vertex_density_exact")
    n = space.n
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("negative normalized radius")
    alpha = _normalized_alpha(space, lam)
    a = cn.a_n(n)
    sig = cn.sigma(n - 1)
    inner = sig * radial_volume_integral(alpha, n, r)
    jac = s_alpha(alpha, r) ** (n * n - 1)
    if space.model is Model.SPHERE:
        top = _normalized_range(space, lam)
        if np.any(r > top * (1 + 1e-12)):
            raise ValueError("normalized radius beyond lambda^{1/n} pi / k")
        total = sig * radial_volume_integral(alpha, n, top)
        with np.errstate(over="ignore"):
            dens = a * (np.exp(-inner) + np.exp(-(total - inner))) * jac
    else:
        dens = a * np.exp(-np.minimum(inner, 700.0)) * jac
    if dens.ndim == 0:
        return float(dens)
    return dens


def mean_N_quadrature(space, lam, spec=None):
    """Mean vertex count by integrating the exact vertex density."""
    _require_model(space, (Model.SPHERE, Model.HYPERBOLIC, Model.EUCLIDEAN),
                   "mean_N_quadrature")
    n = space.n
    sig = cn.sigma(n - 1)
    if space.model is Model.SPHERE:
        top = _normalized_range(space, lam)
    else:
        alpha = _normalized_alpha(space, lam)
        top = _truncation_radius(alpha, n, sig)
    f = lambda rr: vertex_density_exact(space, lam, rr)
    return sig * integrate(f, 0.0, top, spec=spec)


def section_mean_volume_exact(space, s, lam, spec=None):
    """Mean s-content of the section of the cell by a totally geodesic M_s."""
    _require_model(space, (Model.SPHERE, Model.HYPERBOLIC, Model.EUCLIDEAN),
                   "section_mean_volume_exact")
    n = space.n
    if not 1 <= s <= n:
        raise ValueError("1 <= s <= n required")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    alpha = space.alpha
    sig_n = cn.sigma(n - 1)
    if space.model is Model.SPHERE:
        top = math.pi / space.k
    else:
        top = _truncation_radius(alpha, n, lam * sig_n)

    def f(rr):
        expo = lam * sig_n * radial_volume_integral(alpha, n, rr)
        return np.exp(-np.minimum(expo, 700.0)) * s_alpha(alpha, rr) ** (s - 1)

    return cn.sigma(s - 1) * integrate(f, 0.0, top, spec=spec)


def section_mean_N_exact(space, s, lam, spec=None):
    """Mean vertex count of the section of the cell by M_s."""
    _require_model(space, (Model.SPHERE, Model.HYPERBOLIC, Model.EUCLIDEAN),
                   "section_mean_N_exact")
    n = space.n
    if not 1 <= s <= n:
        raise ValueError("1 <= s <= n required")
    alpha = _normalized_alpha(space, lam)
    sig = cn.sigma(n - 1)
    pref = cn.delta_ns(n, s)
    if space.model is Model.SPHERE:
        top = _normalized_range(space, lam)
        total = sig * radial_volume_integral(alpha, n, top)

        def f(rr):
            inner = sig * radial_volume_integral(alpha, n, rr)
            with np.errstate(over="ignore"):
                return (np.exp(-inner) + np.exp(-(total - inner))) \
                    * s_alpha(alpha, rr) ** (s * n - 1)
    else:
        top = _truncation_radius(alpha, n, sig)

        def f(rr):
            inner = sig * radial_volume_integral(alpha, n, rr)
            return np.exp(-np.minimum(inner, 700.0)) * s_alpha(alpha, rr) ** (s * n - 1)

    return pref * integrate(f, 0.0, top, spec=spec)


def asymptotic_mean_N(n, scal, lam):
    """Two-term expansion e_n - d_n Scal / lambda^{2/n}."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return cn.e_n(n) - cn.d_n(n) * scal * lam ** (-2.0 / n)


def asymptotic_density_const_curv(space, lam, r):
    """Second-order vertex-density expansion, constant-curvature case.

    For constant sectional curvature K the direction-dependent terms
    collapse: Ric(u) = (n-1)K and the simplex-weighted Ricci moment equals
    (n-1)K k_n / sigma_{n-1}.  The bracket signs follow from the ball-volume
    and Jacobian expansions; integrating this density over r reproduces
    asymptotic_mean_N exactly, which pins them down (the per-term display in
    the source derivation prints two of the signs flipped; see README).
    """
    _require_model(space, (Model.SPHERE, Model.HYPERBOLIC, Model.EUCLIDEAN),
                   "asymptotic_density_const_curv")
    n = space.n
    r = np.asarray(r, dtype=float)
    K = space.sectional_curvature
    ric = (n - 1) * K
    scal = n * (n - 1) * K
    delta_ric = ric * cn.k_n(n) / cn.sigma(n - 1)
    a = cn.a_n(n)
    lead = a * r ** (n * n - 1)
    second = (
        -(a * ric + n * delta_ric) / 6.0 * r ** (n * n + 1)
        + cn.b_n(n) * scal * r ** (n * n + n + 1)
    )
    out = np.exp(-cn.kappa(n) * r ** n) * (lead + second * lam ** (-2.0 / n))
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    std_error: float
    samples: int


def mc_simplex_moment(n, s=None, weight=None, sample_count=100_000, seed=0,
                      integrate_direction=False):
    """Monte Carlo simplex moment over uniform unit directions.

    Draws u_1..u_s uniformly on S^{n-1}, forms the s-simplex spanned by -u
    and the projections of the u_i onto V_s (u fixed to the first axis of
    V_s, or averaged over S^{s-1} when integrate_direction is set), and
    averages simplex volume times ``weight(u, us)``.  The result carries the
    sigma_{n-1}^s surface normalization (times sigma_{s-1} when the u
    average is included), so with weight 1 and fixed u it estimates
    delta_ns / sigma_{s-1}, e.g. k_n / sigma_{n-1} at s = n.
    """
    if s is None:
        s = n
    if not 1 <= s <= n:
        raise ValueError("1 <= s <= n required")
    if sample_count < 100:
        raise ValueError("sample_count must be at least 100")
    rng = np.random.default_rng(seed)
    fact = math.factorial(s)
    batch = 200_000
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < sample_count:
        b = min(batch, sample_count - done)
        if integrate_direction:
            u = rng.standard_normal((b, s))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
        else:
            u = np.zeros((b, s))
            u[:, 0] = 1.0
        us = rng.standard_normal((b, s, n))
        us /= np.linalg.norm(us, axis=2, keepdims=True)
        edges = us[:, :, :s] + u[:, None, :]
        vols = np.abs(np.linalg.det(edges)) / fact
        if weight is not None:
            w = np.array([weight(u[i], us[i]) for i in range(b)])
            vols = vols * w
        total += float(vols.sum())
        total_sq += float((vols ** 2).sum())
        done += b
    mean = total / sample_count
    var = max(total_sq / sample_count - mean * mean, 0.0)
    norm = cn.sigma(n - 1) ** s
    if integrate_direction:
        norm *= cn.sigma(s - 1)
    return MomentEstimate(
        mean=norm * mean,
        std_error=norm * math.sqrt(var / sample_count),
        samples=sample_count,
    )
