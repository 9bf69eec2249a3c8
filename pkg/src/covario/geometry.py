"""Convex bodies in the plane and in space.

A :class:`ConvexBody` stores its extreme points together with the facet
halfspaces ``<normal, x> <= offset``. Bodies are immutable; every operation
below returns a new body. Planar work runs through the compiled clipper in
:mod:`covario._kernels`; spatial hulls come from Qhull via scipy.

Degenerate results of :func:`intersect` are returned as :class:`Empty` or
:class:`LowerDimensional` values instead of raising.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from covario import _kernels
from covario.errors import DegenerateBodyError, DimensionMismatchError, TruncationError

#: relative tolerance (times diameter) for geometric predicates
GEOM_RTOL = 1e-9
#: relative tolerance used when cleaning hulls of redundant points
HULL_RTOL = 1e-12
#: volumes below this times diameter**n count as lower dimensional
VOLUME_RTOL = 1e-13
#: facet-incidence tolerance for spatial hulls
HULL3_RTOL = 1e-10


@dataclass(frozen=True)
class Smoothness:
    """``approx_order`` is None for exact polytopes, else the vertex count of
    the polytope standing in for a strictly convex body."""

    approx_order: int | None = None

    @property
    def is_polytope(self):
        return self.approx_order is None

    def to_json(self):
        if self.approx_order is None:
            return "polytope"
        return {"strictly_convex_approx": int(self.approx_order)}

    def __str__(self):
        if self.approx_order is None:
            return "Polytope"
        return f"StrictlyConvexApprox({self.approx_order})"


POLYTOPE = Smoothness()


def strictly_convex_approx(k: int) -> Smoothness:
    return Smoothness(int(k))


@dataclass(frozen=True, eq=False)
class Empty:
    dim: int

    volume = 0.0
    is_body = False

    def __repr__(self):
        return f"Empty(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class LowerDimensional:
    """Non-empty intersection without interior; ``points`` spans it."""

    dim: int
    points: np.ndarray

    volume = 0.0
    is_body = False

    def __repr__(self):
        return f"LowerDimensional(dim={self.dim}, npoints={len(self.points)})"


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _extent(pts):
    return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))


def polygon_area_centroid(poly):
    """Signed shoelace area and centroid of a vertex cycle (duplicates allowed)."""
    x = poly[:, 0]
    y = poly[:, 1]
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    # shift to the first vertex for accuracy far from the origin
    x0, y0 = x[0], y[0]
    xs, ys, xns, yns = x - x0, y - y0, xn - x0, yn - y0
    cr = xs * yns - xns * ys
    area = 0.5 * cr.sum()
    if area == 0.0:
        return 0.0, poly.mean(axis=0)
    cx = ((xs + xns) * cr).sum() / (6.0 * area) + x0
    cy = ((ys + yns) * cr).sum() / (6.0 * area) + y0
    return float(area), np.array([cx, cy])


def _hull2d(pts):
    scale = _extent(pts)
    if not scale > 0:
        raise DegenerateBodyError("body has no interior")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = np.ascontiguousarray(pts[order])
    verts = p[_kernels.monotone_chain(p, 0.0)]
    if len(verts) < 3:
        raise DegenerateBodyError("body has no interior")
    verts = verts[_kernels.prune_flat(np.ascontiguousarray(verts), HULL_RTOL * scale)]
    verts = np.roll(verts, -int(np.lexsort((verts[:, 1], verts[:, 0]))[0]), axis=0)
    area, _ = polygon_area_centroid(verts)
    if area <= VOLUME_RTOL * scale * scale:
        raise DegenerateBodyError("body has no interior")
    return verts


def _halfspaces2d(verts):
    e = np.roll(verts, -1, axis=0) - verts
    n = np.column_stack((e[:, 1], -e[:, 0]))
    n /= np.linalg.norm(n, axis=1)[:, None]
    return n, np.einsum("ij,ij->i", n, verts)


def _hull3d(pts):
    scale = _extent(pts)
    if not scale > 0:
        raise DegenerateBodyError("body has no interior")
    try:
        hull = ConvexHull(pts)
    except (QhullError, ValueError) as exc:
        raise DegenerateBodyError("body has no interior") from exc
    if hull.volume <= VOLUME_RTOL * scale**3:
        raise DegenerateBodyError("body has no interior")
    tol = HULL3_RTOL * scale
    cand = pts[hull.vertices]
    keep = _dedupe(cand, tol)
    if len(keep) < len(cand):
        # near-coincident vertices leave sliver facets; rebuild without them
        pts = cand[keep]
        hull = ConvexHull(pts)
    reps_n, reps_b = [], []
    for eq in hull.equations:
        n, b = eq[:3], -eq[3]
        if reps_n:
            rn = np.asarray(reps_n)
            hit = np.nonzero(
                (np.abs(rn - n).max(axis=1) <= 1e-8) & (np.abs(np.asarray(reps_b) - b) <= tol)
            )[0]
            if len(hit):
                continue
        reps_n.append(n)
        reps_b.append(b)
    normals = np.asarray(reps_n)
    cand = pts[hull.vertices]
    inc = np.abs(cand @ normals.T - np.asarray(reps_b)) <= tol
    verts = cand[inc.sum(axis=1) >= 3]
    offsets = (verts @ normals.T).max(axis=0)
    return verts, normals, offsets


def _dedupe(pts, tol):
    """Indices of points left after merging any within ``tol`` of an earlier one."""
    keep = []
    for i, p in enumerate(pts):
        if not keep or np.abs(pts[keep] - p).max(axis=1).min() > tol:
            keep.append(i)
    return np.array(keep)


def _faces3d(verts, normals, offsets, tol):
    faces = []
    inc = np.abs(verts @ normals.T - offsets) <= tol
    for j, n in enumerate(normals):
        idx = np.nonzero(inc[:, j])[0]
        pts = verts[idx]
        c = pts.mean(axis=0)
        u = pts[0] - c
        u /= np.linalg.norm(u)
        w = np.cross(n, u)
        ang = np.arctan2((pts - c) @ w, (pts - c) @ u)
        faces.append(idx[np.argsort(ang)])
    return faces


class ConvexBody:
    """Full-dimensional convex polytope in R^2 or R^3.

    Parameters
    ----------
    points : array_like, shape (m, n)
        Any finite point set; the body is its convex hull. Redundant points
        are discarded, so ``vertices`` holds extreme points only (CCW in 2D).
    smoothness : Smoothness
        Tag telling whether the body is an exact polytope or stands in for a
        strictly convex body.
    """

    def __init__(self, points, smoothness: Smoothness = POLYTOPE):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise DimensionMismatchError(f"points must have shape (m, 2) or (m, 3), got {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("coordinates must be finite")
        if pts.shape[1] == 2:
            verts = _hull2d(pts)
            normals, offsets = _halfspaces2d(verts)
        else:
            verts, normals, offsets = _hull3d(pts)
        self._set(verts, normals, offsets, smoothness)

    def _set(self, verts, normals, offsets, smoothness):
        self.vertices = _readonly(verts)
        self.normals = _readonly(normals)
        self.offsets = _readonly(offsets)
        self.smoothness = smoothness

    @classmethod
    def _trusted(cls, verts, normals, offsets, smoothness, faces=None, diameter=None):
        body = cls.__new__(cls)
        body._set(verts, normals, offsets, smoothness)
        if faces is not None:
            body.__dict__["faces"] = faces
        if diameter is not None:
            body.__dict__["diameter"] = diameter
        return body

    @classmethod
    def from_halfspaces(cls, normals, offsets, smoothness: Smoothness = POLYTOPE):
        """Bounded intersection of ``<normal, x> <= offset`` halfspaces."""
        normals = np.asarray(normals, dtype=float)
        offsets = np.asarray(offsets, dtype=float).ravel()
        if normals.ndim != 2 or normals.shape[1] not in (2, 3) or len(normals) != len(offsets):
            raise DimensionMismatchError("halfspaces must be (normals (h, n), offsets (h,))")
        lens = np.linalg.norm(normals, axis=1)
        if (lens == 0).any():
            raise ValueError("zero halfspace normal")
        normals = normals / lens[:, None]
        offsets = offsets / lens
        n = normals.shape[1]
        big = 1e8 * max(1.0, float(np.abs(offsets).max()))
        approx = _clip_box(np.full(n, -big), np.full(n, big), normals, offsets)
        if approx is None or len(approx) < n + 1:
            raise DegenerateBodyError("halfspaces do not bound a full-dimensional set")
        lo, hi = approx.min(axis=0), approx.max(axis=0)
        if (hi >= 0.5 * big).any() or (lo <= -0.5 * big).any():
            raise DegenerateBodyError("halfspaces describe an unbounded set")
        pad = 0.5 * (hi - lo) + 1.0
        pts = _clip_box(lo - pad, hi + pad, normals, offsets)
        if pts is None:
            raise DegenerateBodyError("halfspaces do not bound a full-dimensional set")
        return cls(_snap_to_planes(cls(pts).vertices, normals, offsets), smoothness)

    # ---- basic attributes -------------------------------------------------

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def _vol_centroid(self):
        if self.dim == 2:
            area, c = polygon_area_centroid(self.vertices)
            return abs(area), c
        ref = self.vertices.mean(axis=0)
        vol = 0.0
        mom = np.zeros(3)
        for f in self.faces:
            p = self.vertices[f]
            a = p[0] - ref
            b = p[1:-1] - ref
            c = p[2:] - ref
            v = np.abs(np.einsum("j,ij->i", a, np.cross(b, c))) / 6.0
            vol += v.sum()
            mom += (v[:, None] * (ref + p[0] + p[1:-1] + p[2:]) / 4.0).sum(axis=0)
        return float(vol), mom / vol

    @property
    def volume(self) -> float:
        return self._vol_centroid[0]

    @property
    def centroid(self) -> np.ndarray:
        return self._vol_centroid[1].copy()

    is_body = True

    @cached_property
    def faces(self):
        if self.dim != 3:
            raise AttributeError("faces are only kept for spatial bodies")
        return _faces3d(self.vertices, self.normals, self.offsets, HULL3_RTOL * self.diameter)

    @cached_property
    def diameter(self) -> float:
        return float(_kernels.max_pair_distance(self.vertices))

    @property
    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def slack(self, points):
        """``max_j <n_j, p> - b_j`` per point; negative strictly inside."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return (p @ self.normals.T - self.offsets).max(axis=1)

    def contains(self, points, tol=0.0):
        return self.slack(points) <= tol

    def distance(self, points):
        """Euclidean distance from each point to the body (0 inside)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(p))
        outside = self.slack(p) > 0
        if not outside.any():
            return out
        q = p[outside]
        if self.dim == 2:
            a = self.vertices
            b = np.roll(a, -1, axis=0)
            out[outside] = _point_segment_dist(q, a, b).min(axis=1)
        else:
            tris = np.array([[f[0], f[i], f[i + 1]] for f in self.faces for i in range(1, len(f) - 1)])
            v = self.vertices
            out[outside] = _point_triangle_dist(q, v[tris[:, 0]], v[tris[:, 1]], v[tris[:, 2]])
        return out

    def to_json(self):
        return {
            "dim": self.dim,
            "kind": "vertices",
            "data": self.vertices.tolist(),
            "smoothness": self.smoothness.to_json(),
        }

    def __repr__(self):
        return f"ConvexBody(dim={self.dim}, nvertices={len(self.vertices)}, {self.smoothness})"


def _point_segment_dist(q, a, b):
    """Distances, shape (len(q), len(a)), from points to segments [a_i, b_i]."""
    out = np.empty((len(q), len(a)))
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    for i in range(0, len(q), 256):
        r = q[i : i + 256, None, :] - a[None, :, :]
        s = np.clip(np.einsum("pij,ij->pi", r, d) / dd, 0.0, 1.0)
        out[i : i + 256] = np.linalg.norm(r - s[..., None] * d, axis=-1)
    return out


def _point_triangle_dist(q, A, B, C):
    """Minimum distance from each point in q to the union of triangles."""
    n = np.cross(B - A, C - A)
    n /= np.linalg.norm(n, axis=1)[:, None]
    out = np.empty(len(q))
    edges = [(A, B), (B, C), (C, A)]
    for i, p in enumerate(q):
        h = np.einsum("ij,ij->i", p - A, n)
        proj = p - h[:, None] * n
        inside = np.ones(len(A), dtype=bool)
        for u, w in edges:
            inside &= np.einsum("ij,ij->i", np.cross(w - u, proj - u), n) >= 0
        best = np.where(inside, np.abs(h), np.inf)
        for u, w in edges:
            d = w - u
            s = np.clip(np.einsum("ij,ij->i", p - u, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
            best = np.minimum(best, np.linalg.norm(p - u - s[:, None] * d, axis=1))
        out[i] = best.min()
    return out


def _box_points(lo, hi):
    n = len(lo)
    corners = np.array(np.meshgrid(*[[0, 1]] * n, indexing="ij")).reshape(n, -1).T
    return lo + corners * (hi - lo)


def _snap_to_planes(verts, normals, offsets):
    """Re-solve each vertex from its incident halfspace planes.

    Clipping builds vertices by successive edge interpolation, which adds up
    rounding; a least-squares solve over the incident planes removes it.
    """
    tol = GEOM_RTOL * _extent(verts)
    n = verts.shape[1]
    out = verts.copy()
    res = verts @ normals.T - offsets
    for i, r in enumerate(res):
        inc = np.abs(r) <= tol
        if inc.sum() < n:
            continue
        A, b = normals[inc], offsets[inc]
        if np.linalg.matrix_rank(A) < n:
            continue
        x = np.linalg.lstsq(A, b, rcond=None)[0]
        if np.linalg.norm(x - verts[i]) <= tol:
            out[i] = x
    return out


def _clip_box(lo, hi, normals, offsets):
    """Vertices of ``box ∩ halfspaces`` or None if it has no interior."""
    if len(lo) == 2:
        sq = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
        out = _kernels.clip_polygon(sq, np.ascontiguousarray(normals), np.ascontiguousarray(offsets))
        return out if len(out) >= 3 else None
    res = _clip3d(_box_points(lo, hi), normals, offsets)
    return res if isinstance(res, np.ndarray) else None


def _clip3d(points, normals, offsets):
    """Clip the hull of ``points`` by halfspaces.

    Returns the vertex array of the result, or a ``("lower", pts)`` /
    ``("empty", None)`` tuple for degenerate outcomes.
    """
    try:
        hull = ConvexHull(points)
    except QhullError:
        return ("lower", points)
    verts = points[hull.vertices]
    remap = np.full(len(points), -1)
    remap[hull.vertices] = np.arange(len(hull.vertices))
    simp = remap[hull.simplices]
    edges = np.unique(np.sort(np.vstack([simp[:, [0, 1]], simp[:, [1, 2]], simp[:, [0, 2]]]), axis=1), axis=0)
    for n, c in zip(normals, offsets):
        s = verts @ n - c
        inside = s <= 0.0
        if inside.all():
            continue
        if not inside.any():
            return ("empty", None)
        cross = inside[edges[:, 0]] != inside[edges[:, 1]]
        e = edges[cross]
        sa, sb = s[e[:, 0]], s[e[:, 1]]
        r = sa / (sa - sb)
        new = verts[e[:, 0]] + r[:, None] * (verts[e[:, 1]] - verts[e[:, 0]])
        pts = np.vstack([verts[inside], new])
        try:
            hull = ConvexHull(pts)
        except QhullError:
            return ("lower", pts)
        verts = pts[hull.vertices]
        remap = np.full(len(pts), -1)
        remap[hull.vertices] = np.arange(len(hull.vertices))
        simp = remap[hull.simplices]
        edges = np.unique(
            np.sort(np.vstack([simp[:, [0, 1]], simp[:, [1, 2]], simp[:, [0, 2]]]), axis=1), axis=0
        )
    return verts


# ---- transforms -----------------------------------------------------------


def _as_point(x, dim):
    x = np.asarray(x, dtype=float).ravel()
    if x.shape != (dim,):
        raise DimensionMismatchError(f"expected a point in R^{dim}, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("coordinates must be finite")
    return x


def _check_same_dim(*bodies):
    dims = {b.dim for b in bodies}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")


def _faces_or_none(body):
    return body.__dict__.get("faces")


def _diameter_or_none(body, factor=1.0):
    d = body.__dict__.get("diameter")
    return None if d is None else d * factor


def translate(body: ConvexBody, x) -> ConvexBody:
    x = _as_point(x, body.dim)
    return ConvexBody._trusted(
        body.vertices + x, body.normals, body.offsets + body.normals @ x, body.smoothness,
        _faces_or_none(body), _diameter_or_none(body),
    )


def _lex_first(verts):
    i = np.lexsort((verts[:, 1], verts[:, 0]))[0]
    return int(i)


def reflect(body: ConvexBody) -> ConvexBody:
    """The point reflection ``-body``."""
    v, n = -body.vertices, -body.normals
    if body.dim == 2:
        # negation is a half-turn, so the cycle stays counterclockwise
        r = _lex_first(v)
        v, n = np.roll(v, -r, axis=0), np.roll(n, -r, axis=0)
        return ConvexBody._trusted(v, n, np.roll(body.offsets, -r), body.smoothness, None, _diameter_or_none(body))
    return ConvexBody._trusted(v, n, body.offsets, body.smoothness, _faces_or_none(body), _diameter_or_none(body))


def dilate(body: ConvexBody, t: float, center=None) -> ConvexBody:
    """Image of ``body`` under ``p -> center + t (p - center)``, ``t > 0``."""
    t = float(t)
    if not t > 0:
        raise ValueError(f"dilation factor must be positive, got {t}")
    c = np.zeros(body.dim) if center is None else _as_point(center, body.dim)
    return ConvexBody._trusted(
        c + t * (body.vertices - c),
        body.normals,
        t * body.offsets + (1.0 - t) * (body.normals @ c),
        body.smoothness,
        _faces_or_none(body),
        _diameter_or_none(body, t),
    )


def _edge_angles(verts):
    e = np.roll(verts, -1, axis=0) - verts
    ang = np.arctan2(e[:, 1], e[:, 0])
    # both polygons start at their lexicographic minimum, so edge angles run
    # monotonically through (-pi/2, 3pi/2]
    ang = np.where(ang <= -0.5 * np.pi, ang + 2.0 * np.pi, ang)
    return e, ang


def _combine_smoothness(a, b):
    if a.smoothness.is_polytope or b.smoothness.is_polytope:
        return POLYTOPE
    return strictly_convex_approx(min(a.smoothness.approx_order, b.smoothness.approx_order))


def minkowski_sum(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """``{p + q : p in a, q in b}``."""
    _check_same_dim(a, b)
    smooth = POLYTOPE
    if not a.smoothness.is_polytope and not b.smoothness.is_polytope:
        smooth = strictly_convex_approx(max(a.smoothness.approx_order, b.smoothness.approx_order))
    if a.dim == 2:
        ea, aa = _edge_angles(a.vertices)
        eb, ab = _edge_angles(b.vertices)
        order = np.argsort(np.concatenate([aa, ab]), kind="stable")
        steps = np.vstack([ea, eb])[order]
        start = a.vertices[0] + b.vertices[0]
        pts = start + np.vstack([np.zeros((1, 2)), np.cumsum(steps, axis=0)[:-1]])
        return ConvexBody(pts, smooth)
    sums = (a.vertices[:, None, :] + b.vertices[None, :, :]).reshape(-1, 3)
    return ConvexBody(sums, smooth)


def intersect(a: ConvexBody, b: ConvexBody):
    """Exact ``a ∩ b`` as a body, or :class:`Empty` / :class:`LowerDimensional`."""
    _check_same_dim(a, b)
    scale = max(a.diameter, b.diameter)
    if a.dim == 2:
        raw = _kernels.clip_polygon(
            np.ascontiguousarray(a.vertices), np.ascontiguousarray(b.normals), np.ascontiguousarray(b.offsets)
        )
        if len(raw) == 0:
            return Empty(2)
        area, _ = polygon_area_centroid(raw)
        if abs(area) <= VOLUME_RTOL * scale * scale:
            return LowerDimensional(2, raw)
    else:
        raw = _clip3d(a.vertices, b.normals, b.offsets)
        if isinstance(raw, tuple):
            kind, pts = raw
            return Empty(3) if kind == "empty" else LowerDimensional(3, pts)
    try:
        return ConvexBody(raw, _combine_smoothness(a, b))
    except DegenerateBodyError:
        return LowerDimensional(a.dim, raw)


def volume(body) -> float:
    return float(body.volume)


def centroid(body: ConvexBody) -> np.ndarray:
    if not getattr(body, "is_body", False):
        raise DegenerateBodyError("centroid of a degenerate set")
    return body.centroid


def support_function(body: ConvexBody, u) -> float:
    """``max_{p in body} <u, p>`` for a direction ``u`` (normalized here)."""
    u = _as_point(u, body.dim)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise ValueError("zero direction")
    return float((body.vertices @ (u / norm)).max())


def hausdorff_distance(a: ConvexBody, b: ConvexBody) -> float:
    """Exact Hausdorff distance; for convex sets it is attained at vertices."""
    _check_same_dim(a, b)
    return float(max(b.distance(a.vertices).max(), a.distance(b.vertices).max()))


@dataclass(frozen=True)
class HomothetyCheckResult:
    is_homothetic: bool
    scale: float
    shift: np.ndarray
    hausdorff_residual: float


def is_homothetic(a: ConvexBody, b: ConvexBody, tol: float = GEOM_RTOL) -> HomothetyCheckResult:
    """Test ``b == scale * a + shift``.

    Volume ratio fixes the scale and the centroids fix the shift, so only a
    single Hausdorff comparison is needed. The residual is relative to the
    diameter of ``b``.
    """
    _check_same_dim(a, b)
    if not (a.is_body and b.is_body):
        raise DegenerateBodyError("homothety test needs full-dimensional bodies")
    t = (b.volume / a.volume) ** (1.0 / a.dim)
    x = b.centroid - t * a.centroid
    cand = translate(dilate(a, t), x)
    res = hausdorff_distance(cand, b) / b.diameter
    return HomothetyCheckResult(bool(res <= tol), float(t), x, float(res))


# ---- truncated cylinders and cones ----------------------------------------


@dataclass(frozen=True)
class TruncationBox:
    """Axis-aligned box standing in for all of space around a computation."""

    center: np.ndarray
    half_widths: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).ravel()
        h = np.asarray(self.half_widths, dtype=float).ravel()
        if h.shape == (1,) and c.size > 1:
            h = np.full(c.size, h[0])
        if c.shape != h.shape or c.size not in (2, 3):
            raise DimensionMismatchError("box center and half widths must both be in R^2 or R^3")
        if not (h > 0).all():
            raise ValueError("box half widths must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_widths", h)

    @property
    def dim(self):
        return self.center.size

    @property
    def lo(self):
        return self.center - self.half_widths

    @property
    def hi(self):
        return self.center + self.half_widths

    def as_body(self) -> ConvexBody:
        return ConvexBody(_box_points(self.lo, self.hi))

    @staticmethod
    def required_margin(bodies, probe_length=0.0):
        return 2.0 * (sum(b.diameter for b in bodies) + float(probe_length))

    def check(self, bodies, probe_length=0.0):
        """Raise :class:`TruncationError` unless every body sits inside the box
        with the required clearance."""
        _check_same_dim(*bodies)
        if bodies and bodies[0].dim != self.dim:
            raise DimensionMismatchError("box and bodies differ in dimension")
        margin = self.required_margin(bodies, probe_length)
        for b in bodies:
            lo, hi = b.bounds
            gap = min((lo - self.lo).min(), (self.hi - hi).min())
            if gap < margin:
                raise TruncationError(
                    f"truncation box too small: clearance {gap:.6g} < required margin {margin:.6g}"
                )

    @classmethod
    def around(cls, bodies, probe_length=0.0, slack=1.5):
        """Smallest-ish box passing :meth:`check` with ``slack`` times the margin."""
        lo = np.min([b.bounds[0] for b in bodies], axis=0)
        hi = np.max([b.bounds[1] for b in bodies], axis=0)
        margin = cls.required_margin(bodies, probe_length)
        return cls(0.5 * (lo + hi), 0.5 * (hi - lo) + slack * margin)


def cylinder_extend(body: ConvexBody, v, box: TruncationBox) -> ConvexBody:
    """``{x + s v : x in body, s real}`` truncated to ``box``."""
    v = _as_point(v, body.dim)
    speed = np.linalg.norm(v)
    if speed == 0:
        raise ValueError("zero cylinder direction")
    box.check([body])
    reach = np.linalg.norm(box.half_widths) + np.linalg.norm(body.centroid - box.center) + body.diameter
    s = 2.0 * reach / speed
    swept = ConvexBody(np.vstack([body.vertices - s * v, body.vertices + s * v]), POLYTOPE)
    out = intersect(swept, box.as_body())
    if not out.is_body:
        raise TruncationError("cylinder misses the truncation box")
    return out


def cone_extend(body: ConvexBody, apex, box: TruncationBox) -> ConvexBody:
    """``{apex + t (x - apex) : x in body, t >= 0}`` truncated to ``box``.

    The cone is cut out by the facets of ``hull(body ∪ {apex})`` that pass
    through the apex, so the truncation is exact everywhere inside the box.
    """
    apex = _as_point(apex, body.dim)
    box.check([body])
    if not (np.all(apex > box.lo) and np.all(apex < box.hi)):
        raise TruncationError("cone apex lies outside the truncation box")
    tol = GEOM_RTOL * body.diameter
    if body.slack(apex)[0] < -tol:
        return box.as_body()
    hull = ConvexBody(np.vstack([body.vertices, apex]), POLYTOPE)
    incident = np.abs(hull.normals @ apex - hull.offsets) <= tol
    if not incident.any():
        raise DegenerateBodyError("apex is not on the hull boundary")
    bx = box.as_body()
    normals = np.vstack([hull.normals[incident], bx.normals])
    offsets = np.concatenate([hull.normals[incident] @ apex, bx.offsets])
    return ConvexBody.from_halfspaces(normals, offsets)


def same_vertex_set(a: ConvexBody, b: ConvexBody, tol: float) -> bool:
    """Order-free comparison of vertex sets."""
    if a.dim != b.dim or len(a.vertices) != len(b.vertices):
        return False
    d = np.linalg.norm(a.vertices[:, None, :] - b.vertices[None, :, :], axis=-1)
    return bool(d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol)
