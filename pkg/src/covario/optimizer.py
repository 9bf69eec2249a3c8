"""Maximizing the covariogram over translations.

``g^(1/n)`` is concave on its support, so every line restriction is unimodal
and a golden-section search along it is exact up to its bracket width. The
outer loop cycles through coordinate directions, adds a pattern move along
each cycle's net displacement, and tries a few random directions before
declaring convergence so that kinks cannot stall it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from covario.covariogram import _overlap, support_sumset
from covario.errors import CovarioError
from covario.geometry import ConvexBody, _check_same_dim

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

#: default convergence tolerance, relative to the sumset diameter
POS_RTOL = 1e-7
#: restarts agree when their spread is at most this many position tolerances
SPREAD_FACTOR = 10.0
#: initial half-width of the planar polish window, relative to the diameter
POLISH_RTOL = 1e-4
#: values agree within this relative tolerance
VALUE_RTOL = 1e-12


class Certificate(str, enum.Enum):
    UNIQUE = "UniqueByStrictConcavity"
    PLATEAU = "PlateauSuspected"
    NUMERIC = "NumericOnly"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MaxResult:
    argmax: np.ndarray
    value: float
    certificate: Certificate
    restarts_agreed: int
    spread: float
    pos_tol: float
    spread_tol: float
    restart_argmaxes: np.ndarray
    restart_values: np.ndarray
    flat_directions: int

    def to_json(self):
        return {
            "argmax": self.argmax.tolist(),
            "value": self.value,
            "certificate": str(self.certificate),
            "restarts_agreed": self.restarts_agreed,
            "spread": self.spread,
            "pos_tol": self.pos_tol,
            "spread_tol": self.spread_tol,
            "flat_directions": self.flat_directions,
            "restarts": [{"argmax": p.tolist(), "value": float(v)} for p, v in zip(self.restart_argmaxes, self.restart_values)],
        }


class _Objective:
    """``g`` on a fixed pair, with the sumset halfspaces for line brackets."""

    def __init__(self, K, L):
        self.K, self.L = K, L
        self.sumset = support_sumset(K, L)
        self.normals = np.asarray(self.sumset.normals)
        self.offsets = np.asarray(self.sumset.offsets)
        self.evals = 0

    def __call__(self, x):
        self.evals += 1
        return _overlap(self.K, self.L, x)[0]

    def chord(self, x, u):
        """Parameter interval ``[lo, hi]`` with ``x + s u`` in the sumset."""
        nu = self.normals @ u
        room = self.offsets - self.normals @ x
        lo, hi = -np.inf, np.inf
        pos, neg = nu > 1e-300, nu < -1e-300
        if pos.any():
            hi = float(np.min(room[pos] / nu[pos]))
        if neg.any():
            lo = float(np.max(room[neg] / nu[neg]))
        return min(lo, 0.0), max(hi, 0.0)


def _golden(fun, lo, hi, tol):
    """Maximizer of a unimodal ``fun`` on ``[lo, hi]`` and its value."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def _line_step(obj, x, fx, u, tol):
    lo, hi = obj.chord(x, u)
    if hi - lo <= tol:
        return x, fx
    s, fs = _golden(lambda s: obj(x + s * u), lo, hi, tol)
    if fs > fx:
        return x + s * u, fs
    return x, fx


def _unit(v):
    return v / np.linalg.norm(v)


def _climb(obj, x, pos_tol, rng, max_cycles=400):
    n = x.size
    basis = np.eye(n)
    fx = obj(x)
    line_tol = 0.1 * pos_tol
    for _ in range(max_cycles):
        start = x.copy()
        for u in basis:
            x, fx = _line_step(obj, x, fx, u, line_tol)
        step = x - start
        if np.linalg.norm(step) > pos_tol:
            x, fx = _line_step(obj, x, fx, _unit(step), line_tol)
            continue
        # stalled on the axes: a handful of random directions gets past kinks
        moved = False
        for _ in range(2 * n + 2):
            u = _unit(rng.standard_normal(n))
            y, fy = _line_step(obj, x, fx, u, line_tol)
            if np.linalg.norm(y - x) > pos_tol:
                x, fx, moved = y, fy, True
                break
            x, fx = y, fy
        if not moved:
            break
    return x, fx


def _polish2d(obj, x, fx, pos_tol, radius):
    """Nested golden search over a square window around ``x``.

    The inner maximum over the second coordinate is concave in the first
    (partial maximization keeps concavity), so both levels are unimodal and
    kinks do not matter. If the optimum lands on the window edge the window
    grows, since for a concave function an interior window maximum is global.
    """
    line_tol = 1e-3 * pos_tol
    e2 = np.array([0.0, 1.0])
    for _ in range(12):
        center = x.copy()
        lo1, hi1 = obj.chord(center, np.array([1.0, 0.0]))
        lo1, hi1 = max(lo1, -radius), min(hi1, radius)
        inner = {}

        def column(s):
            base = center + np.array([s, 0.0])
            lo2, hi2 = obj.chord(base, e2)
            lo2, hi2 = max(lo2, -radius), min(hi2, radius)
            if hi2 - lo2 <= line_tol:
                r, fr = 0.5 * (lo2 + hi2), obj(base + 0.5 * (lo2 + hi2) * e2)
            else:
                r, fr = _golden(lambda r: obj(base + r * e2), lo2, hi2, line_tol)
            inner[s] = r
            return fr

        s, fs = _golden(column, lo1, hi1, line_tol)
        y = center + np.array([s, inner[s]])
        if fs >= fx:
            x, fx = y, fs
        off = np.abs(y - center)
        if off.max() < radius - 4 * line_tol:
            break
        radius *= 10.0
    return x, fx


def _sample_sumset(sumset: ConvexBody, count, rng):
    """Random interior points of the sumset, pulled a little toward its centroid."""
    lo, hi = sumset.bounds
    c = sumset.centroid
    out = []
    while len(out) < count:
        p = rng.uniform(lo, hi)
        if sumset.slack(p[None, :])[0] < 0:
            out.append(c + 0.95 * (p - c))
    return np.array(out)


def _directions(n):
    if n == 2:
        ang = np.pi * np.arange(8) / 4
        return np.column_stack((np.cos(ang), np.sin(ang)))
    dirs = [s * e for e in np.eye(3) for s in (1, -1)]
    dirs += [np.array([a, b, c]) / math.sqrt(3) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
    return np.array(dirs)


def _flat_directions(obj, x, fx, diam, value_tol):
    """Directions from ``x`` along which ``g`` stays at its maximum over a
    sizeable distance (both probe distances must register as flat)."""
    count = 0
    for u in _directions(x.size):
        lo, hi = obj.chord(x, u)
        reach = hi
        flat = True
        for frac in (1e-3, 2e-2):
            s = min(frac * diam, 0.5 * reach)
            if s <= 1e-6 * diam or abs(obj(x + s * u) - fx) > value_tol:
                flat = False
                break
        count += flat
    return count


def maximize(
    K: ConvexBody, L: ConvexBody, restarts: int = 8, pos_tol: float | None = None,
    seed: int = 0, spread_tol: float | None = None, value_rtol: float = VALUE_RTOL,
) -> MaxResult:
    """Locate ``argmax g`` by restarted line-search ascent on ``g``.

    Line searches compare ``g``; the ordering is the same as for ``g^(1/n)``.
    ``pos_tol`` defaults to ``1e-7`` times the sumset diameter and
    ``spread_tol`` to ten times that.
    """
    _check_same_dim(K, L)
    if restarts < 1:
        raise ValueError("need at least one restart")
    obj = _Objective(K, L)
    diam = obj.sumset.diameter
    pos_tol = POS_RTOL * diam if pos_tol is None else float(pos_tol)
    spread_tol = SPREAD_FACTOR * pos_tol if spread_tol is None else float(spread_tol)
    if pos_tol <= 0 or spread_tol <= 0:
        raise ValueError("tolerances must be positive")
    rng = np.random.default_rng(seed)
    starts = _sample_sumset(obj.sumset, restarts, rng)
    pts, vals = [], []
    for x0 in starts:
        if obj(x0) <= 0:
            continue
        x, fx = _climb(obj, x0, pos_tol, rng)
        if x.size == 2:
            x, fx = _polish2d(obj, x, fx, pos_tol, POLISH_RTOL * diam)
        pts.append(x)
        vals.append(fx)
    if not pts:
        raise CovarioError("every restart started outside the support")
    pts, vals = np.array(pts), np.array(vals)
    best = int(np.argmax(vals))
    xb, fb = pts[best], float(vals[best])
    diff = pts[:, None, :] - pts[None, :, :]
    spread = float(np.sqrt((diff**2).sum(-1)).max())
    agreed = int((np.linalg.norm(pts - xb, axis=1) <= spread_tol).sum())
    value_tol = value_rtol * max(fb, 1e-300)
    flats = _flat_directions(obj, xb, fb, diam, value_tol)
    values_agree = bool(np.all(np.abs(vals - fb) <= max(value_tol, 1e-9 * fb)))
    if flats > 0 or (spread > spread_tol and values_agree):
        cert = Certificate.PLATEAU
    elif spread <= spread_tol:
        cert = Certificate.UNIQUE
    else:
        cert = Certificate.NUMERIC
    return MaxResult(xb, fb, cert, agreed, spread, pos_tol, spread_tol, pts, vals, flats)


@dataclass(frozen=True)
class LevelSetReport:
    h: float
    max_value: float
    argmax: np.ndarray
    chords: int
    min_midpoint_excess: float
    min_relative_excess: float
    all_positive: bool
    plateau_detected: bool
    min_radius: float
    max_radius: float

    def to_json(self):
        return {
            "h": self.h,
            "max_value": self.max_value,
            "argmax": self.argmax.tolist(),
            "chords": self.chords,
            "min_midpoint_excess": self.min_midpoint_excess,
            "min_relative_excess": self.min_relative_excess,
            "all_positive": self.all_positive,
            "plateau_detected": self.plateau_detected,
            "min_radius": self.min_radius,
            "max_radius": self.max_radius,
        }


def _ray_extent(obj, x, u, level, iters=80):
    """Largest ``r`` (to bisection precision) with ``g(x + r u) >= level``.

    ``g`` is nonincreasing along rays leaving the argmax, so bisection is
    valid; the inside end is returned.
    """
    _, hi = obj.chord(x, u)
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if obj(x + mid * u) >= level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(hi, 1.0):
            break
    return lo


def _random_unit(rng, n):
    return _unit(rng.standard_normal(n))


def level_set_probe(
    K: ConvexBody, L: ConvexBody, h: float, chords: int = 100, seed: int = 0,
    max_result: MaxResult | None = None, value_rtol: float = VALUE_RTOL, min_angle: float = math.pi / 6,
) -> LevelSetReport:
    """Check midpoint convexity of ``{g >= h}`` along random chords.

    Chord endpoints sit on rays from the argmax whose directions differ by at
    least ``min_angle``. A chord longer than ``1e-4`` of the sumset diameter
    whose midpoint clears ``h`` by no more than ``value_rtol * max g`` counts
    as plateau evidence. ``h`` may equal the maximum, in which case the level
    is taken a relative ``value_rtol`` below it.
    """
    _check_same_dim(K, L)
    if chords < 1:
        raise ValueError("need at least one chord")
    obj = _Objective(K, L)
    res = max_result if max_result is not None else maximize(K, L, seed=seed)
    top = res.value
    if not (0 < h <= top * (1 + value_rtol)):
        raise ValueError(f"level {h!r} outside (0, max g = {top!r}]")
    level = min(h, top * (1 - value_rtol))
    x = res.argmax
    n = x.size
    diam = obj.sumset.diameter
    rng = np.random.default_rng(seed)
    cos_min = math.cos(min_angle)
    excess, radii = [], []
    plateau = False
    while len(excess) < chords:
        u, w = _random_unit(rng, n), _random_unit(rng, n)
        if u @ w > cos_min:
            continue
        ru = _ray_extent(obj, x, u, level)
        rw = _ray_extent(obj, x, w, level)
        p, q = x + ru * u, x + rw * w
        e = obj(0.5 * (p + q)) - level
        excess.append(e)
        radii += [ru, rw]
        if np.linalg.norm(p - q) > 1e-4 * diam and e <= value_rtol * top:
            plateau = True
    excess = np.array(excess)
    m = float(excess.min())
    return LevelSetReport(
        float(h), top, x, int(chords), m, m / level, bool((excess > 0).all()), plateau,
        float(min(radii)), float(max(radii)),
    )
