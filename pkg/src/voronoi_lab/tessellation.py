"""Circumcenter predicates and Voronoi cell enumeration.

Vertices of the cell of the distinguished nucleus x0 are the centers of
balls circumscribed to x0 and n other nuclei whose open interior contains
no nucleus.  On the sphere every non-degenerate tuple has two circumballs
with antipodal centers; both enter the empty-ball test with their own radii.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .sampling import NucleusCloud, WindowKind
from .spaces import Model

__all__ = [
    "DegenerateInput",
    "DegeneratePosition",
    "UncertifiedCell",
    "VoronoiVertex",
    "CellSummary",
    "circumcenters",
    "cell_contains",
    "enumerate_cell_vertices",
    "cell_volume_mc",
    "polygon_area_2d",
    "full_tessellation_counts",
    "section_cell_vertices",
    "section_cell_volume_mc",
]

_EQ_TOL = 1e-9


class DegenerateInput(ValueError):
    """Co-geodesic / rank-deficient circumcenter input."""


class DegeneratePosition(RuntimeError):
    """Co-spherical configuration detected; resample the replicate."""


class UncertifiedCell(RuntimeError):
    """Cell statistics requested without a window-independence certificate."""


@dataclass(frozen=True)
class VoronoiVertex:
    point: np.ndarray
    generators: tuple
    circumradius: float
    r_norm: float | None = None
    direction: np.ndarray | None = None


@dataclass
class CellSummary:
    vertices: list = field(default_factory=list)
    vertex_count: int = 0
    volume: object = None
    certified: bool = True


def _cloud_points(cloud):
    if isinstance(cloud, NucleusCloud):
        return cloud.points
    return np.asarray(cloud, dtype=float)


def _null_vectors(mats):
    """Null vectors of batched (B, m, m+1) full-rank matrices via cofactors."""
    mc = mats.shape[2]
    cols = []
    for j in range(mc):
        sub = np.delete(mats, j, axis=2)
        cols.append(((-1.0) ** j) * np.linalg.det(sub))
    return np.stack(cols, axis=1)


def _dist_rows(space, centers, pts):
    """Distance matrix (B, N) from center rows to cloud points."""
    if space.model is Model.SPHERE:
        ip = centers @ pts.T
        return np.arccos(np.clip(space.k ** 2 * ip, -1.0, 1.0)) / space.k
    if space.model is Model.HYPERBOLIC:
        ip = centers[:, :-1] @ pts[:, :-1].T - np.outer(centers[:, -1], pts[:, -1])
        return np.arccosh(np.maximum(-space.k ** 2 * ip, 1.0)) / space.k
    if space.model is Model.FLAT_TORUS2:
        diff = np.abs(centers[:, None, :] - pts[None, :, :])
        diff = np.minimum(diff, space.torus_period - diff)
        return np.sqrt(np.sum(diff * diff, axis=2))
    sq = (np.sum(centers ** 2, axis=1)[:, None] + np.sum(pts ** 2, axis=1)[None, :]
          - 2.0 * centers @ pts.T)
    return np.sqrt(np.maximum(sq, 0.0))


def _torus_unroll(space, x0, sub_pts):
    """Subset points unrolled into the copy nearest their joint centroid."""
    p = space.torus_period
    rel = np.mod(sub_pts - x0[..., None, :] + p / 2.0, p) - p / 2.0
    pts = x0[..., None, :] + rel
    centroid = (pts.sum(axis=-2) + x0) / (pts.shape[-2] + 1)
    rel = np.mod(sub_pts - centroid[..., None, :] + p / 2.0, p) - p / 2.0
    return centroid[..., None, :] + rel


def _euclid_solve(x0s, sub):
    """Circumcenters of rows of point sets in flat coordinates.

    x0s: (B, d) base points, sub: (B, n, d) subsets; bisector equations
    (x_i - x0) . c = (|x_i|^2 - |x0|^2)/2.
    """
    w = sub - x0s[:, None, :]
    rhs = 0.5 * np.sum(sub * sub - x0s[:, None, :] ** 2, axis=2)
    dets = np.abs(np.linalg.det(w))
    scale = np.prod(np.linalg.norm(w, axis=2), axis=1)
    ok = dets > 1e-12 * np.maximum(scale, 1e-300)
    centers = np.zeros((sub.shape[0], sub.shape[2]))
    if np.any(ok):
        centers[ok] = np.linalg.solve(w[ok], rhs[ok])
    radii = np.linalg.norm(centers - x0s, axis=1)
    return centers, radii, ok


def _circumcenters_batch(space, x0, pts, subsets):
    """Candidate circumballs for each subset row (indices into pts).

    Returns (centers, radii, valid, subset_row); the sphere contributes two
    rows per subset (antipodal centers, each with its own radius).
    """
    if subsets.size == 0:
        d = space.ambient_dim
        return (np.zeros((0, d)), np.zeros(0), np.zeros(0, dtype=bool),
                np.zeros(0, dtype=int))
    sub = pts[subsets]                           # (B, n, d)
    rows = np.arange(sub.shape[0])
    if space.model in (Model.SPHERE, Model.HYPERBOLIC):
        w = sub - x0
        mats = w.copy()
        if space.model is Model.HYPERBOLIC:
            mats[:, :, -1] = -mats[:, :, -1]
        v = _null_vectors(mats)
        scale = np.prod(np.linalg.norm(w, axis=2), axis=1)
        vn = np.linalg.norm(v, axis=1)
        nondeg = vn > 1e-12 * np.maximum(scale, 1e-300)
        if space.model is Model.SPHERE:
            c1 = v / (space.k * np.where(vn > 0, vn, 1.0))[:, None]
            centers = np.concatenate([c1, -c1])
            radii = space.distance(x0, centers)
            return centers, radii, np.concatenate([nondeg, nondeg]), \
                np.concatenate([rows, rows])
        q = space.form_dot(v, v)
        timelike = q < -1e-12 * np.maximum(vn, 1e-300) ** 2
        denom = np.where(timelike, np.sqrt(np.maximum(-q, 1e-300)), 1.0)
        c = v / (space.k * denom)[:, None]
        c = np.where(c[:, -1:] > 0, c, -c)
        return c, space.distance(x0, c), nondeg & timelike, rows
    if space.model is Model.FLAT_TORUS2:
        x0s = np.broadcast_to(x0, (sub.shape[0], 2)).copy()
        unrolled = _torus_unroll(space, x0s, sub)
        centers, radii, ok = _euclid_solve(x0s, unrolled)
        ok = ok & (radii < space.torus_period / 2.0)
        centers = np.mod(centers, space.torus_period)
        return centers, radii, ok, rows
    x0s = np.broadcast_to(x0, (sub.shape[0], space.n)).copy()
    centers, radii, ok = _euclid_solve(x0s, sub)
    return centers, radii, ok, rows


def circumcenters(space, points):
    """All circumballs of n+1 points (first point in the role of x0).

    Euclidean / torus: the unique classical one; sphere: the two antipodal
    ones; hyperbolic: one, or none when the points admit no circumball.
    Raises DegenerateInput on affinely degenerate input.
    """
    points = np.asarray(points, dtype=float)
    if points.shape[0] != space.n + 1:
        raise ValueError("need exactly n+1 points")
    x0 = points[0]
    rest = points[1:]
    subsets = np.arange(space.n)[None, :]
    centers, radii, valid, _ = _circumcenters_batch(space, x0, rest, subsets)
    if space.model is Model.HYPERBOLIC and not np.any(valid):
        w = rest - x0
        mats = w.copy()
        mats[:, -1] *= -1.0
        v = _null_vectors(mats[None])[0]
        scale = max(float(np.prod(np.linalg.norm(w, axis=1))), 1e-300)
        if np.linalg.norm(v) <= 1e-12 * scale:
            raise DegenerateInput("points are affinely degenerate")
        return []
    if not np.all(valid):
        raise DegenerateInput("points are affinely degenerate")
    return [(centers[i], float(radii[i])) for i in range(len(centers))]


def cell_contains(space, x0, cloud, x):
    """True where x is at least as close to x0 as to every nucleus."""
    pts = _cloud_points(cloud)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xs = x[None, :] if single else x
    d0 = space.distance(xs, x0)
    if len(pts) == 0:
        inside = np.ones(len(xs), dtype=bool)
    else:
        dmin = _dist_rows(space, xs, pts).min(axis=1)
        inside = d0 <= dmin + _EQ_TOL
    return bool(inside[0]) if single else inside


def _accept_empty(space, pts, centers, radii, valid, n_generators):
    """Indices of candidate balls whose open interior misses the cloud.

    Raises DegeneratePosition when a ball carries more boundary points than
    generators (co-spherical configuration).
    """
    acc = []
    if len(centers) == 0:
        return acc
    dmat = _dist_rows(space, centers, pts)
    dmin = dmat.min(axis=1)
    tol = _EQ_TOL * (1.0 + radii)
    candidates = np.nonzero(valid & (dmin >= radii - tol))[0]
    for i in candidates:
        boundary = int(np.count_nonzero(np.abs(dmat[i] - radii[i]) <= tol[i]))
        if boundary > n_generators:
            raise DegeneratePosition("co-spherical nuclei within tolerance")
        acc.append(int(i))
    return acc


def _certify(window, space, vertices):
    if window is None or window.kind is not WindowKind.GEODESIC_BALL:
        return True
    if not vertices:
        return False
    for v in vertices:
        reach = space.distance(window.center, v.point) + v.circumradius
        if reach > window.radius - _EQ_TOL:
            return False
    return True


def _small_radius(space, r):
    if space.model is Model.SPHERE:
        return min(r, math.pi / space.k - r)
    return r


def _make_vertex(space, x0, center, radius, gens, lam):
    direction = None
    if radius > 0 and not (space.model is Model.SPHERE
                           and radius >= math.pi / space.k - space.antipodal_tol):
        direction = space.log_map(x0, center) / radius
    r_norm = None if lam is None else lam ** (1.0 / space.n) * radius
    return VoronoiVertex(point=center, generators=gens, circumradius=float(radius),
                         r_norm=r_norm, direction=direction)


def enumerate_cell_vertices(space, x0, cloud, k_candidates=None):
    """Vertices of the cell of x0 by candidate-pruned circumball enumeration.

    With k_candidates = len(cloud) the enumeration is exhaustive over all
    n-subsets.  The pruned default escalates (doubling the candidate count)
    until every accepted circumball is small against the candidate horizon,
    which makes the pruned output equal to the exhaustive one: a valid
    circumball of radius r only involves generators within 2r of x0.
    """
    pts = _cloud_points(cloud)
    x0 = np.asarray(x0, dtype=float)
    n = space.n
    lam = cloud.lam if isinstance(cloud, NucleusCloud) else None
    window = cloud.window if isinstance(cloud, NucleusCloud) else None
    N = len(pts)
    if N < n:
        return CellSummary(certified=_certify(window, space, []))

    d0 = space.distance(np.broadcast_to(x0, pts.shape), pts)
    order = np.argsort(d0, kind="stable")
    k = min(k_candidates if k_candidates else max(4 * n, 30), N)
    forced = k_candidates is not None

    while True:
        cand = order[:k]
        subsets = np.array(list(itertools.combinations(range(k), n)), dtype=int)
        subsets_global = cand[subsets]
        centers, radii, valid, rows = _circumcenters_batch(space, x0, pts, subsets_global)
        acc = _accept_empty(space, pts, centers, radii, valid, n)
        if k >= N or forced:
            break
        horizon = float(d0[order[k - 1]])
        if acc and 2.0 * max(_small_radius(space, radii[i]) for i in acc) <= horizon:
            break
        k = min(2 * k, N)

    vertices = [
        _make_vertex(space, x0, centers[i], radii[i],
                     tuple(int(g) for g in subsets_global[rows[i]]), lam)
        for i in acc
    ]
    _check_distinct(space, vertices)
    return CellSummary(vertices=vertices, vertex_count=len(vertices),
                       certified=_certify(window, space, vertices))


def _check_distinct(space, vertices):
    for a, b in itertools.combinations(vertices, 2):
        if a.generators != b.generators and \
                space.distance(a.point, b.point) < _EQ_TOL:
            raise DegeneratePosition("coincident vertices from distinct generators")


def _sample_in_ball(space, center, radius, count, rng):
    from .sampling import _sample_ball_radii, _uniform_directions

    radii = _sample_ball_radii(space, radius, count, rng)
    dirs = _uniform_directions(space, center, count, rng)
    return space.exp_map(np.broadcast_to(center, dirs.shape), radii[:, None] * dirs)


def cell_volume_mc(space, x0, cloud, vertices, point_budget, rng):
    """Hit-or-miss cell volume inside B(x0, 2 max circumradius).

    The farthest point of the (geodesically convex) cell from x0 is one of
    its vertices, so the sampling ball covers the cell and the estimator is
    unbiased.
    """
    from .estimators import Estimate

    summary = vertices if isinstance(vertices, CellSummary) else None
    verts = summary.vertices if summary else list(vertices)
    if not verts:
        raise UncertifiedCell("cell has no enumerated vertices")
    if summary is not None and not summary.certified:
        raise UncertifiedCell("cell is not certified window-independent")
    rho = min(2.0 * max(v.circumradius for v in verts),
              0.999 * space.injectivity_radius)
    count = int(point_budget)
    samples = _sample_in_ball(space, x0, rho, count, rng)
    hits = cell_contains(space, x0, cloud, samples)
    p = float(np.count_nonzero(hits)) / count
    vol = space.ball_volume(rho)
    return Estimate(mean=vol * p,
                    std_error=vol * math.sqrt(max(p * (1.0 - p), 0.0) / count),
                    replicates=count, master_seed=0, certified_fraction=1.0)


def _triangle_area(space, a, b, c):
    K = space.sectional_curvature
    if K == 0.0:
        u = space.log_map(a, b)
        v = space.log_map(a, c)
        return 0.5 * abs(u[0] * v[1] - u[1] * v[0])
    angles = 0.0
    for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
        u = space.log_map(p, q)
        v = space.log_map(p, r)
        cosang = space.form_dot(u, v) / (space.tangent_norm(u) * space.tangent_norm(v))
        angles += math.acos(max(-1.0, min(1.0, float(cosang))))
    return (angles - math.pi) / K


def polygon_area_2d(space, x0, boundary):
    """Area of a geodesic polygon star-shaped around x0 (n = 2 only).

    Triangulates from x0; curved triangles use angle excess over the
    sectional curvature, flat ones the cross product.  The boundary must be
    ordered counterclockwise; a winding check rejects non-simple inputs.
    """
    if space.n != 2:
        raise ValueError("polygon areas only in dimension 2")
    pts = [np.asarray(p, dtype=float) for p in boundary]
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 boundary vertices")
    frame = space.tangent_frame(x0)
    angles = []
    for p in pts:
        t = space.log_map(x0, p)
        angles.append(math.atan2(float(space.form_dot(t, frame[1])),
                                 float(space.form_dot(t, frame[0]))))
    total = 0.0
    for i in range(len(pts)):
        step = (angles[(i + 1) % len(pts)] - angles[i]) % (2.0 * math.pi)
        if step <= 0 or step >= math.pi:
            raise DegenerateInput("boundary does not wind simply around x0")
        total += step
    if abs(total - 2.0 * math.pi) > 1e-6:
        raise DegenerateInput("boundary winding != 1")
    return sum(_triangle_area(space, x0, pts[i], pts[(i + 1) % len(pts)])
               for i in range(len(pts)))


def full_tessellation_counts(space, cloud, m_neighbors=16):
    """Face/edge/vertex counts of the whole tessellation on S^2_k or the torus.

    V counts empty circumballs over nucleus triples (both antipodal balls on
    the sphere; 9-copy unrolling on the torus), F is the nucleus count,
    E = 3V/2 by normality, euler = F - E + V.
    """
    if not (space.model is Model.FLAT_TORUS2
            or (space.model is Model.SPHERE and space.n == 2)):
        raise ValueError("full tessellations only on S^2 or the flat torus")
    pts = _cloud_points(cloud)
    N = len(pts)
    if N < 4:
        raise ValueError("need at least 4 nuclei")
    dmat = _dist_rows(space, pts, pts)

    m = min(m_neighbors, N - 1)
    while True:
        nbr = np.argsort(dmat, axis=1, kind="stable")[:, 1:m + 1]
        triples = set()
        for i in range(N):
            for j, k2 in itertools.combinations(nbr[i].tolist(), 2):
                triples.add(tuple(sorted((i, j, k2))))
        tri = np.array(sorted(triples), dtype=int)
        V = 0
        r_small_max = 0.0
        for i0 in range(3):
            # treat each triple as (x0; pair) once, with x0 = first member
            pass
        x0s = pts[tri[:, 0]]
        sub = pts[tri[:, 1:]]
        if space.model is Model.SPHERE:
            w = sub - x0s[:, None, :]
            v = _null_vectors(w)
            vn = np.linalg.norm(v, axis=1)
            scale = np.prod(np.linalg.norm(w, axis=2), axis=1)
            nondeg = vn > 1e-12 * np.maximum(scale, 1e-300)
            c1 = v / (space.k * np.where(vn > 0, vn, 1.0))[:, None]
            centers = np.concatenate([c1, -c1])
            radii = np.concatenate([space.distance(x0s, c1),
                                    space.distance(x0s, -c1)])
            valid = np.concatenate([nondeg, nondeg])
        else:
            unrolled = _torus_unroll(space, x0s, sub)
            centers, radii, valid = _euclid_solve(x0s, unrolled)
            valid = valid & (radii < space.torus_period / 2.0)
            centers = np.mod(centers, space.torus_period)
        dmat_c = _dist_rows(space, centers, pts)
        dmin = dmat_c.min(axis=1)
        tol = _EQ_TOL * (1.0 + radii)
        empty = valid & (dmin >= radii - tol)
        boundary = (np.abs(dmat_c - radii[:, None]) <= tol[:, None]).sum(axis=1)
        if np.any(empty & (boundary > 3)):
            raise DegeneratePosition("four co-circular nuclei")
        V = int(np.count_nonzero(empty))
        r_acc = radii[empty]
        r_small = np.minimum(r_acc, math.pi / space.k - r_acc) \
            if space.model is Model.SPHERE else r_acc
        if m >= N - 1:
            break
        horizon = float(dmat[np.arange(N), nbr[:, -1]].min())
        if len(r_small) == 0 or 2.0 * float(r_small.max()) <= horizon:
            break
        m = min(2 * m, N - 1)

    if V % 2 != 0:
        raise DegeneratePosition("odd vertex count; 2E = 3V violated")
    F = N
    E = 3 * V // 2
    return F, E, V, F - E + V


# -- sections ----------------------------------------------------------------


def _section_embedding(space, x0, basis):
    basis = [np.asarray(b, dtype=float) for b in basis]
    for b in basis:
        if abs(space.form_dot(b, b) - 1.0) > 1e-8:
            raise ValueError("basis vectors must be unit under the model form")
        if not space.check_tangent(x0, b, tol=1e-8):
            raise ValueError("basis vectors must be tangent at x0")
    for a, b in itertools.combinations(basis, 2):
        if abs(space.form_dot(a, b)) > 1e-8:
            raise ValueError("basis must be orthonormal")
    return np.stack(basis)


def _section_circumcenters(space, x0, B, pts, subsets):
    """Circumballs with center constrained to M_s = exp_x0(span B)."""
    if subsets.size == 0:
        d = space.ambient_dim
        return (np.zeros((0, d)), np.zeros(0), np.zeros(0, dtype=bool),
                np.zeros(0, dtype=int))
    sub = pts[subsets]
    nrow = sub.shape[0]
    rows = np.arange(nrow)
    s = B.shape[0]
    if space.model is Model.EUCLIDEAN:
        w = sub - x0                                    # (B_, s, d)
        M = np.einsum("bij,kj->bik", w, B)              # (B_, s, s)
        rhs = 0.5 * np.sum(sub * sub - x0 * x0, axis=2) - w @ x0
        dets = np.abs(np.linalg.det(M))
        scale = np.prod(np.linalg.norm(w, axis=2), axis=1)
        ok = dets > 1e-12 * np.maximum(scale, 1e-300)
        coef = np.zeros((nrow, s))
        if np.any(ok):
            coef[ok] = np.linalg.solve(M[ok], rhs[ok])
        centers = x0 + coef @ B
        return centers, np.linalg.norm(centers - x0, axis=1), ok, rows
    F = np.concatenate([x0[None, :], B], axis=0)        # (s+1, d)
    w = sub - x0
    wJ = w.copy()
    if space.model is Model.HYPERBOLIC:
        wJ[:, :, -1] = -wJ[:, :, -1]
    M = np.einsum("bij,kj->bik", wJ, F)                 # (B_, s, s+1)
    a = _null_vectors(M)                                # (B_, s+1)
    c_raw = a @ F
    scale = np.prod(np.linalg.norm(w, axis=2), axis=1)
    nondeg = np.linalg.norm(a, axis=1) > 1e-12 * np.maximum(scale, 1e-300)
    cn = np.linalg.norm(c_raw, axis=1)
    if space.model is Model.SPHERE:
        c1 = c_raw / (space.k * np.where(cn > 0, cn, 1.0))[:, None]
        centers = np.concatenate([c1, -c1])
        radii = space.distance(x0, centers)
        valid = np.concatenate([nondeg & (cn > 0), nondeg & (cn > 0)])
        return centers, radii, valid, np.concatenate([rows, rows])
    q = space.form_dot(c_raw, c_raw)
    timelike = q < -1e-12 * np.maximum(cn, 1e-300) ** 2
    denom = np.where(timelike, np.sqrt(np.maximum(-q, 1e-300)), 1.0)
    c = c_raw / (space.k * denom)[:, None]
    c = np.where(c[:, -1:] > 0, c, -c)
    return c, space.distance(x0, c), nondeg & timelike, rows


def section_cell_vertices(space, x0, cloud, basis, k_candidates=None):
    """Vertices of the section of the cell of x0 by M_s = exp_x0(span basis).

    A section vertex is an empty circumball center constrained to M_s,
    circumscribed to x0 and s nuclei; emptiness is with respect to the full
    n-dimensional cloud.
    """
    if space.model is Model.FLAT_TORUS2:
        raise ValueError("sections are not supported on the torus")
    pts = _cloud_points(cloud)
    x0 = np.asarray(x0, dtype=float)
    B = _section_embedding(space, x0, basis)
    s = B.shape[0]
    lam = cloud.lam if isinstance(cloud, NucleusCloud) else None
    N = len(pts)
    if N < s:
        return []
    d0 = space.distance(np.broadcast_to(x0, pts.shape), pts)
    order = np.argsort(d0, kind="stable")
    k = min(k_candidates if k_candidates else max(4 * s + 10, 30), N)
    forced = k_candidates is not None

    while True:
        cand = order[:k]
        subsets = np.array(list(itertools.combinations(range(k), s)), dtype=int)
        subsets_global = cand[subsets]
        centers, radii, valid, rows = _section_circumcenters(space, x0, B, pts,
                                                             subsets_global)
        acc = _accept_empty(space, pts, centers, radii, valid, s)
        if k >= N or forced:
            break
        horizon = float(d0[order[k - 1]])
        if acc and 2.0 * max(_small_radius(space, radii[i]) for i in acc) <= horizon:
            break
        k = min(2 * k, N)

    return [
        _make_vertex(space, x0, centers[i], radii[i],
                     tuple(int(g) for g in subsets_global[rows[i]]), lam)
        for i in acc
    ]


def section_cell_volume_mc(space, x0, cloud, basis, point_budget, rng,
                           vertices=None):
    """Hit-or-miss s-content of the section inside a geodesic ball of M_s.

    The submanifold M_s is itself a constant-curvature space of dimension s
    with the same curvature scale, so radial sampling uses the s-dimensional
    radial Jacobian.
    """
    from .closed_forms import radial_volume_integral
    from .constants import sigma
    from .estimators import Estimate

    B = _section_embedding(space, x0, basis)
    s = B.shape[0]
    pts = _cloud_points(cloud)
    if vertices is None:
        vertices = section_cell_vertices(space, x0, cloud, basis)
    if vertices:
        rho = 2.0 * max(v.circumradius for v in vertices)
    else:
        d_near = float(np.min(space.distance(np.broadcast_to(x0, pts.shape), pts))) \
            if len(pts) else 1.0
        rho = 2.0 * d_near
    rho = min(rho, 0.999 * space.injectivity_radius)
    count = int(point_budget)

    if s == 1:
        radii = rho * rng.random(count)
        signs = np.where(rng.random(count) < 0.5, 1.0, -1.0)
        dirs = signs[:, None] * B[0]
        vol = 2.0 * rho
    else:
        total = radial_volume_integral(space.alpha, s, rho)
        targets = rng.random(count) * total
        lo = np.zeros(count)
        hi = np.full(count, rho)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = radial_volume_integral(space.alpha, s, mid) < targets
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        radii = 0.5 * (lo + hi)
        vol = sigma(s - 1) * total
        g = rng.standard_normal((count, s))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        dirs = g @ B
    samples = space.exp_map(np.broadcast_to(x0, dirs.shape), radii[:, None] * dirs)
    hits = cell_contains(space, x0, cloud, samples)
    p = float(np.count_nonzero(hits)) / count
    return Estimate(mean=vol * p,
                    std_error=vol * math.sqrt(max(p * (1.0 - p), 0.0) / count),
                    replicates=count, master_seed=0, certified_fraction=1.0)
