"""Dimensional constants of the cell-statistics expansions.

Everything is a Gamma-function closed form.  The Gamma implementation is a
Lanczos approximation (g=7, 9 coefficients) so the package carries no
special-function dependency and reproduces bit patterns across platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

__all__ = [
    "gamma",
    "kappa",
    "sigma",
    "wallis",
    "e_n",
    "d_n",
    "a_n",
    "b_n",
    "k_n",
    "v_ns",
    "u_ns",
    "w_ns",
    "e_ns",
    "delta_ns",
    "f_ns",
    "g_ns",
    "h_ns",
    "ExpansionConstants",
    "section_constants",
    "expansion_constants",
]

# Lanczos coefficients, g = 7, 9 terms; relative error < 1e-13 on x > 0.5.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x):
    """Gamma function via Lanczos; reflection formula below 0.5."""
    x = float(x)
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


@lru_cache(maxsize=None)
def kappa(n):
    """Volume of the Euclidean unit n-ball."""
    if n < 1:
        raise ValueError("n >= 1 required")
    return 2.0 * math.pi ** (n / 2.0) / (n * gamma(n / 2.0))


@lru_cache(maxsize=None)
def sigma(m):
    """Total measure of the unit m-sphere S^m in R^{m+1}."""
    if m < 0:
        raise ValueError("m >= 0 required")
    return 2.0 * math.pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0)


@lru_cache(maxsize=None)
def wallis(m):
    """m-th Wallis integral int_0^{pi/2} sin^m t dt."""
    if m < 0:
        raise ValueError("m >= 0 required")
    return gamma((m + 1) / 2.0) * gamma(0.5) / (2.0 * gamma((m + 2) / 2.0))


@lru_cache(maxsize=None)
def e_n(n):
    """Mean vertex count of the Euclidean typical cell (intensity-free)."""
    _check_n(n)
    return (
        2.0
        * math.pi ** ((n - 1) / 2.0)
        * n ** (n - 2)
        * (gamma(n / 2.0) / gamma((n + 1) / 2.0)) ** n
        * gamma((n * n + 1) / 2.0)
        / gamma(n * n / 2.0)
    )


@lru_cache(maxsize=None)
def d_n(n):
    """Coefficient of -Scal / lambda^{2/n} in the mean vertex count."""
    _check_n(n)
    return (
        math.pi ** ((n - 3) / 2.0)
        * n ** (n + 2.0 / n - 1)
        / (gamma(n + 1.0) * 2.0 ** (2.0 / n) * (n + 2))
        * gamma(n + 2.0 / n)
        * gamma(n / 2.0) ** (n + 2.0 / n)
        * gamma((n * n + 1) / 2.0)
        / (gamma(n * n / 2.0) * gamma((n + 1) / 2.0) ** n)
    )


@lru_cache(maxsize=None)
def a_n(n):
    """Leading vertex-density coefficient: g(r) = a_n r^{n^2-1} e^{-kappa_n r^n}."""
    _check_n(n)
    return (
        2.0 ** n
        * math.pi ** ((n * n - 1) / 2.0)
        * gamma((n * n + 1) / 2.0)
        * gamma(n / 2.0)
        / (gamma(n + 1.0) * gamma((n + 1) / 2.0) ** n * gamma(n * n / 2.0))
    )


@lru_cache(maxsize=None)
def b_n(n):
    """Second-order density coefficient multiplying Scal r^{n^2+n+1}."""
    _check_n(n)
    return (
        2.0 ** n
        * gamma((n * n + 1) / 2.0)
        * math.pi ** ((n * n + n - 1) / 2.0)
        / (3.0 * gamma(n + 1.0) * n * (n + 2) * gamma(n * n / 2.0) * gamma((n + 1) / 2.0) ** n)
    )


@lru_cache(maxsize=None)
def k_n(n):
    """Total simplex moment over n+1 unit directions (Miles constant)."""
    _check_n(n)
    return delta_ns(n, n)


@lru_cache(maxsize=None)
def delta_ns(n, s):
    """Simplex moment over one direction in V_s and s ambient directions.

    (2^{s+1}/s!) * Gamma((ns+1)/2)/Gamma(ns/2) * pi^{(ns+s-1)/2}
                 / Gamma((n+1)/2)^s.

    Reduces to the Miles constant at s = n and to 2 sigma_{n-1} at s = 1.
    """
    _check_ns(n, s)
    return (
        2.0 ** (s + 1)
        / gamma(s + 1.0)
        * gamma((n * s + 1) / 2.0)
        / gamma(n * s / 2.0)
        * math.pi ** ((n * s + s - 1) / 2.0)
        / gamma((n + 1) / 2.0) ** s
    )


@lru_cache(maxsize=None)
def e_ns(n, s):
    """Mean vertex count of the s-section of the Euclidean typical cell."""
    _check_ns(n, s)
    return delta_ns(n, s) * gamma(float(s)) / (n * kappa(n) ** s)


@lru_cache(maxsize=None)
def v_ns(n, s):
    """Leading section-volume coefficient: E[vol_s] ~ v_ns lambda^{-s/n}."""
    _check_ns(n, s)
    return (
        2.0 ** (1 - s / n)
        * n ** (s / n - 1)
        * gamma(s / n)
        * gamma(n / 2.0) ** (s / n)
        / gamma(s / 2.0)
    )


@lru_cache(maxsize=None)
def u_ns(n, s):
    """Section-volume coefficient of +Scal(M) lambda^{-(s+2)/n}."""
    _check_ns(n, s)
    return (
        (s + 2)
        * n ** ((s + 2.0) / n - 2)
        * gamma((s + 2.0) / n)
        * gamma(n / 2.0) ** ((s + 2.0) / n)
        / (3.0 * gamma(s / 2.0) * (n + 2) * 2.0 ** ((s + 2.0) / n) * math.pi)
    )


@lru_cache(maxsize=None)
def w_ns(n, s):
    """Section-volume coefficient of -Scal(M_s) lambda^{-(s+2)/n}."""
    _check_ns(n, s)
    return (
        n ** ((s + 2.0) / n - 1)
        * gamma((s + 2.0) / n)
        * gamma(n / 2.0) ** ((s + 2.0) / n)
        / (3.0 * gamma(s / 2.0) * s * 2.0 ** ((s + 2.0) / n) * math.pi)
    )


@lru_cache(maxsize=None)
def f_ns(n, s):
    """Section vertex-count coefficient of +Scal(M) lambda^{-2/n}."""
    _check_ns(n, s)
    return (
        delta_ns(n, s)
        * (s * n + 2)
        * gamma(s + 2.0 / n)
        / (6.0 * n * n * (n + 2) * kappa(n) ** (s + 2.0 / n))
    )


@lru_cache(maxsize=None)
def g_ns(n, s):
    """Section vertex-count coefficient of -Scal(M_s) lambda^{-2/n}."""
    _check_ns(n, s)
    return delta_ns(n, s) * gamma(s + 2.0 / n) / (6.0 * s * n * kappa(n) ** (s + 2.0 / n))


@lru_cache(maxsize=None)
def h_ns(n, s):
    """Section vertex-count coefficient of -Delta_{Ric,n,s} lambda^{-2/n}."""
    _check_ns(n, s)
    return s * gamma(s + 2.0 / n) / (6.0 * n * kappa(n) ** (s + 2.0 / n))


def _check_n(n):
    if not isinstance(n, int) or n < 2:
        raise ValueError("n must be an integer >= 2")


def _check_ns(n, s):
    _check_n(n)
    if not isinstance(s, int) or not 1 <= s <= n:
        raise ValueError("s must be an integer with 1 <= s <= n")


@dataclass(frozen=True)
class ExpansionConstants:
    """Named bundle of all expansion constants for one (n, s)."""

    n: int
    s: int | None = None
    values: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.values[name]


def expansion_constants(n, s=None):
    """All constants for dimension n (and optional section dimension s)."""
    _check_n(n)
    vals = {
        "kappa_n": kappa(n),
        "sigma_n_minus_1": sigma(n - 1),
        "wallis_n_minus_1": wallis(n - 1),
        "e_n": e_n(n),
        "d_n": d_n(n),
        "a_n": a_n(n),
        "b_n": b_n(n),
        "k_n": k_n(n),
    }
    if s is not None:
        vals.update(section_constants(n, s).values)
    return ExpansionConstants(n=n, s=s, values=vals)


def section_constants(n, s):
    """Constants of the s-section expansions for an ambient dimension n.

    Note: the second-order vertex-count coefficients (f, g, h) and the
    pair (e_ns, delta_ns) are computed from the simplex-moment constant
    delta_ns above, which is normalized so that e_ns(n, n) = e_n and
    e_ns(n, 1) = 2 hold exactly; see README for the cross-checks.
    """
    _check_ns(n, s)
    vals = {
        "v_ns": v_ns(n, s),
        "u_ns": u_ns(n, s),
        "w_ns": w_ns(n, s),
        "e_ns": e_ns(n, s),
        "f_ns": f_ns(n, s),
        "g_ns": g_ns(n, s),
        "h_ns": h_ns(n, s),
        "delta_ns": delta_ns(n, s),
    }
    return ExpansionConstants(n=n, s=s, values=vals)
