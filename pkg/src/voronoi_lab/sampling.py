"""Homogeneous Poisson point process sampling on the model spaces.

Randomness comes from counter-based Philox streams keyed by a master seed
and a replicate index, so replicates are independent and reproducible under
any thread schedule.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .spaces import CurvatureSpace, Model

__all__ = [
    "WindowKind",
    "Window",
    "NucleusCloud",
    "make_rng_streams",
    "sample_ppp",
    "hyperbolic_window_radius",
    "full_sphere_window",
    "ball_window",
    "torus_window",
]


class WindowKind(enum.Enum):
    FULL_SPHERE = "full_sphere"
    GEODESIC_BALL = "geodesic_ball"
    TORUS_FUNDAMENTAL_DOMAIN = "torus"


@dataclass(frozen=True)
class Window:
    kind: WindowKind
    space: CurvatureSpace
    center: np.ndarray | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.kind is WindowKind.FULL_SPHERE:
            if self.space.model is not Model.SPHERE:
                raise ValueError("full-sphere window requires a spherical space")
        elif self.kind is WindowKind.TORUS_FUNDAMENTAL_DOMAIN:
            if self.space.model is not Model.FLAT_TORUS2:
                raise ValueError("torus window requires the flat torus")
        else:
            if self.center is None or self.radius is None:
                raise ValueError("geodesic ball window needs center and radius")
            if self.radius >= self.space.injectivity_radius:
                raise ValueError("ball radius must stay below the injectivity radius")
            if not self.space.check_point(self.center, tol=1e-9):
                raise ValueError("window center is not a valid point")

    def volume(self):
        if self.kind is WindowKind.FULL_SPHERE:
            return self.space.total_volume()
        if self.kind is WindowKind.TORUS_FUNDAMENTAL_DOMAIN:
            return self.space.torus_period ** 2
        return self.space.ball_volume(self.radius)

    def contains(self, x):
        if self.kind is WindowKind.GEODESIC_BALL:
            return self.space.distance(self.center, x) <= self.radius + 1e-9
        return True

    def describe(self):
        d = {"kind": self.kind.value}
        if self.kind is WindowKind.GEODESIC_BALL:
            d["radius"] = self.radius
            d["center"] = [float(c) for c in np.asarray(self.center)]
        return d


def full_sphere_window(space):
    return Window(WindowKind.FULL_SPHERE, space)


def ball_window(space, center, radius):
    return Window(WindowKind.GEODESIC_BALL, space, center=np.asarray(center, dtype=float),
                  radius=float(radius))


def torus_window(space):
    return Window(WindowKind.TORUS_FUNDAMENTAL_DOMAIN, space)


@dataclass
class NucleusCloud:
    """One Poisson sample: the nuclei, intensity, window and provenance."""

    points: np.ndarray
    lam: float
    window: Window
    seed: int
    stream_id: int

    def __len__(self):
        return len(self.points)

    def to_json_lines(self):
        """Bit-exact serialization: one JSON object per point with hex floats."""
        header = {
            "lambda": self.lam,
            "seed": self.seed,
            "stream_id": self.stream_id,
            "window": self.window.describe(),
            "count": int(len(self.points)),
        }
        lines = [json.dumps(header, sort_keys=True)]
        for p in self.points:
            lines.append(json.dumps({"coords": [float.hex(float(c)) for c in p]}))
        return "\n".join(lines) + "\n"

    @staticmethod
    def coords_from_json_lines(text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = json.loads(lines[0])
        pts = np.array(
            [[float.fromhex(c) for c in json.loads(ln)["coords"]] for ln in lines[1:]]
        )
        if len(pts) != header["count"]:
            raise ValueError("corrupt cloud serialization")
        return header, pts


def make_rng_streams(master_seed, replicate_index, substream=None):
    """Independent, reproducible Generator for (seed, replicate) pairs."""
    key = (replicate_index,) if substream is None else (replicate_index, substream)
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))


def _uniform_directions(space, center, count, rng):
    """Uniform unit tangent vectors at ``center``."""
    frame = np.stack(space.tangent_frame(center))  # (n, ambient)
    g = rng.standard_normal((count, space.n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g @ frame


def _sample_ball_radii(space, radius, count, rng):
    """Radial inverse-CDF sampling for density prop. to the radial Jacobian."""
    if count == 0:
        return np.zeros(0)
    total = space.ball_volume(radius)
    targets = rng.random(count) * total
    if space.model is Model.EUCLIDEAN:
        return radius * (targets / total) ** (1.0 / space.n)
    # vectorized bisection on the closed-form/quadrature volume profile
    from .closed_forms import radial_volume_integral
    from .constants import sigma

    sig = sigma(space.n - 1)
    lo = np.zeros(count)
    hi = np.full(count, float(radius))
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        vols = sig * radial_volume_integral(space.alpha, space.n, mid)
        below = vols < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) < 1e-12 * max(radius, 1.0):
            break
    return 0.5 * (lo + hi)


def sample_ppp(window, lam, rng, stream_id=0, seed=0):
    """Sample a homogeneous Poisson process of intensity lam on the window.

    Count is Poisson(lam * vol(window)); given the count the points are
    i.i.d. uniform with respect to Riemannian volume.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    space = window.space
    mean = lam * window.volume()
    count = int(rng.poisson(mean))
    if window.kind is WindowKind.FULL_SPHERE:
        g = rng.standard_normal((count, space.ambient_dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        pts = g / space.k
    elif window.kind is WindowKind.TORUS_FUNDAMENTAL_DOMAIN:
        pts = rng.random((count, 2)) * space.torus_period
    else:
        radii = _sample_ball_radii(space, window.radius, count, rng)
        dirs = _uniform_directions(space, window.center, count, rng)
        pts = space.exp_map(np.broadcast_to(window.center, dirs.shape), radii[:, None] * dirs)
    return NucleusCloud(points=pts, lam=lam, window=window, seed=seed, stream_id=stream_id)


def hyperbolic_window_radius(n, k, lam, epsilon, model=Model.HYPERBOLIC):
    """Window radius certifying the unobserved exterior is negligible.

    Covering-style bound: with N = lam*vol(B_R) expected points and m blocks
    of radius R/8 tiling the window, the probability that the cell of the
    center (or one of its circumball tests) depends on the exterior is at
    most (N + 1) * m * exp(-lam * vol(B_{R/8})).  Returns the smallest R on
    a 1e-3 grid with that bound below epsilon.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    from .spaces import euclidean, hyperbolic

    space = hyperbolic(n, k) if model is Model.HYPERBOLIC else euclidean(n)

    def bound(R):
        vol_r = space.ball_volume(R)
        vol_block = space.ball_volume(R / 8.0)
        m = 3 ** n * max(vol_r / vol_block, 1.0)
        return (lam * vol_r + 1.0) * m * math.exp(-lam * vol_block)

    lo, hi = 1e-3, 1e-3
    while bound(hi) >= epsilon:
        hi *= 2.0
        if hi > 1e9:
            raise RuntimeError("window radius search failed to bracket")
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if bound(mid) >= epsilon:
            lo = mid
        else:
            hi = mid
    return math.ceil(hi * 1000.0) / 1000.0
