"""Cross covariogram ``g(x) = |K ∩ (L + x)|`` at points and along segments."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from covario import _kernels
from covario.errors import DegenerateBodyError
from covario.geometry import (
    VOLUME_RTOL,
    ConvexBody,
    Empty,
    LowerDimensional,
    _as_point,
    _check_same_dim,
    _combine_smoothness,
    intersect,
    minkowski_sum,
    polygon_area_centroid,
    reflect,
    translate,
)

#: total vertex budget for intersection polygons kept in a profile
RETAIN_VERTEX_CAP = 4096


@dataclass(frozen=True)
class IntersectionSummary:
    """Stand-in for an intersection dropped to respect the retention cap."""

    volume: float
    centroid: np.ndarray
    is_body = False


def _overlap(K: ConvexBody, L: ConvexBody, x):
    """Volume, centroid and raw vertex set of ``K ∩ (L + x)``.

    Volume is 0 for empty or lower-dimensional overlaps; the centroid is then
    None.
    """
    if K.dim == 2:
        sub = np.ascontiguousarray(L.vertices + x)
        raw = _kernels.clip_polygon(sub, np.ascontiguousarray(K.normals), np.ascontiguousarray(K.offsets))
        if len(raw) < 3:
            return 0.0, None, raw
        area, c = polygon_area_centroid(raw)
        scale = max(K.diameter, L.diameter)
        if abs(area) <= VOLUME_RTOL * scale * scale:
            return 0.0, None, raw
        return abs(area), c, raw
    res = intersect(K, translate(L, x))
    if not res.is_body:
        return 0.0, None, res
    return res.volume, res.centroid, res


def evaluate(K: ConvexBody, L: ConvexBody, x) -> float:
    """``|K ∩ (L + x)|``; zero when the overlap has no interior."""
    _check_same_dim(K, L)
    x = _as_point(x, K.dim)
    return _overlap(K, L, x)[0]


def support_sumset(K: ConvexBody, L: ConvexBody) -> ConvexBody:
    """``K + (-L)``, the closed support of ``g``."""
    _check_same_dim(K, L)
    return minkowski_sum(K, reflect(L))


@dataclass(frozen=True)
class SegmentProbe:
    """The segment ``a + t w``, ``t in [-1, 1]``, sampled at ``samples`` points."""

    a: np.ndarray
    w: np.ndarray
    samples: int = 33

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).ravel()
        w = np.asarray(self.w, dtype=float).ravel()
        if a.shape != w.shape or a.size not in (2, 3):
            raise ValueError("probe midpoint and direction must both be in R^2 or R^3")
        if not (np.isfinite(a).all() and np.isfinite(w).all()):
            raise ValueError("probe coordinates must be finite")
        if not np.any(w != 0):
            raise ValueError("probe direction must be non-zero")
        m = int(self.samples)
        if m < 5 or m % 2 == 0:
            raise ValueError(f"sample count must be odd and >= 5, got {m}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "samples", m)

    @property
    def dim(self):
        return self.a.size

    @property
    def t(self) -> np.ndarray:
        m = self.samples
        return -1.0 + 2.0 * np.arange(m) / (m - 1)

    def points(self) -> np.ndarray:
        return self.a + self.t[:, None] * self.w

    def reversed(self) -> "SegmentProbe":
        return SegmentProbe(self.a, -self.w, self.samples)

    def to_json(self):
        return {"a": self.a.tolist(), "w": self.w.tolist(), "samples": self.samples}


@dataclass(frozen=True)
class SegmentProfile:
    probe: SegmentProbe
    g_values: np.ndarray
    g_root_values: np.ndarray
    intersections: list = field(repr=False)
    centroids: np.ndarray = field(repr=False)

    @property
    def t(self):
        return self.probe.t

    @property
    def dim(self):
        return self.probe.dim

    def reversed(self) -> "SegmentProfile":
        """The same data seen along ``-w``."""
        return SegmentProfile(
            self.probe.reversed(),
            self.g_values[::-1].copy(),
            self.g_root_values[::-1].copy(),
            self.intersections[::-1],
            self.centroids[::-1].copy(),
        )


def _retention_order(m):
    mid = m // 2
    order = [mid, mid + 1, mid - 1, m - 1, 0, m - 2, 1]
    order = [i for i in order if 0 <= i < m]
    rest = [i for i in range(m) if i not in order]
    out = []
    for i in order + rest:
        if i not in out:
            out.append(i)
    return out


def eval_segment(K: ConvexBody, L: ConvexBody, probe: SegmentProbe, retain_cap: int = RETAIN_VERTEX_CAP) -> SegmentProfile:
    """Sample ``g`` along the probe and keep the intersections.

    Intersection bodies are kept (centre first, then the ends, then the rest)
    until their vertex count would exceed ``retain_cap``; the remainder keeps
    only volume and centroid.
    """
    _check_same_dim(K, L)
    if probe.dim != K.dim:
        raise ValueError("probe and bodies differ in dimension")
    pts = probe.points()
    m = probe.samples
    g = np.zeros(m)
    cents = np.full((m, K.dim), np.nan)
    raws = [None] * m
    for i, x in enumerate(pts):
        vol, c, raw = _overlap(K, L, x)
        g[i] = vol
        if c is not None:
            cents[i] = c
        raws[i] = raw
    inter = [None] * m
    budget = retain_cap
    for i in _retention_order(m):
        raw = raws[i]
        if g[i] == 0.0:
            if isinstance(raw, (Empty, LowerDimensional)):
                inter[i] = raw
            elif raw is None or len(raw) == 0:
                inter[i] = Empty(K.dim)
            else:
                inter[i] = LowerDimensional(K.dim, raw)
            continue
        body = raw if isinstance(raw, ConvexBody) else None
        nverts = len(body.vertices) if body is not None else len(raw)
        if nverts <= budget:
            if body is None:
                body = _body_from_raw(raw, K, L)
            if body is not None:
                inter[i] = body
                budget -= len(body.vertices)
                continue
        inter[i] = IntersectionSummary(g[i], cents[i].copy())
    root = g ** (1.0 / K.dim)
    return SegmentProfile(probe, g, root, inter, cents)


def _body_from_raw(raw, K, L):
    try:
        return ConvexBody(raw, _combine_smoothness(K, L))
    except DegenerateBodyError:
        return None
