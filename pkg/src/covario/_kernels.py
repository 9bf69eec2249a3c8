"""Compiled inner loops for planar polygon work.

Everything here takes and returns plain float64 arrays so the callers in
:mod:`covario.geometry` can stay in numpy land.
"""
import numba
import numpy as np


@numba.njit(cache=True)
def clip_polygon(poly, normals, offsets):
    """Clip a convex polygon by a list of halfplanes ``<n, x> <= c``.

    Sutherland-Hodgman, one halfplane at a time. Halfplanes that leave every
    vertex inside are skipped. Returns an ``(m, 2)`` array; ``m == 0`` means
    the intersection is empty. Near-duplicate vertices are left in place.
    """
    k = poly.shape[0]
    cap = k + 2 * normals.shape[0] + 8
    cur = np.empty((cap, 2))
    nxt = np.empty((cap, 2))
    cur[:k] = poly
    s = np.empty(cap)
    for j in range(normals.shape[0]):
        nx = normals[j, 0]
        ny = normals[j, 1]
        c = offsets[j]
        any_out = False
        any_in = False
        for i in range(k):
            s[i] = nx * cur[i, 0] + ny * cur[i, 1] - c
            if s[i] > 0.0:
                any_out = True
            else:
                any_in = True
        if not any_out:
            continue
        if not any_in:
            return np.empty((0, 2))
        m = 0
        for i in range(k):
            ip = i + 1 if i + 1 < k else 0
            sp = s[i]
            sq = s[ip]
            if sp <= 0.0:
                nxt[m, 0] = cur[i, 0]
                nxt[m, 1] = cur[i, 1]
                m += 1
            if (sp <= 0.0) != (sq <= 0.0):
                r = sp / (sp - sq)
                nxt[m, 0] = cur[i, 0] + r * (cur[ip, 0] - cur[i, 0])
                nxt[m, 1] = cur[i, 1] + r * (cur[ip, 1] - cur[i, 1])
                m += 1
            if m >= cap - 2:
                break
        tmp = cur
        cur = nxt
        nxt = tmp
        k = m
    return cur[:k].copy()


@numba.njit(cache=True)
def _cross(o0, o1, a0, a1, b0, b1):
    return (a0 - o0) * (b1 - o1) - (a1 - o1) * (b0 - o0)


@numba.njit(cache=True)
def monotone_chain(pts, dist_tol):
    """Counterclockwise hull of lexicographically sorted points.

    A point is dropped when it lies within ``dist_tol`` of the chord joining
    its neighbours, which also removes duplicates. Returns vertex indices
    into ``pts``, starting at the lexicographically smallest point. With a
    positive tolerance a near-collinear interior point can win the sort and
    evict a true corner; call with zero and then :func:`prune_flat`.
    """
    n = pts.shape[0]
    hull = np.empty(2 * n + 1, dtype=np.int64)
    h = 0
    for i in range(n):
        while h >= 2:
            o = hull[h - 2]
            a = hull[h - 1]
            dx = pts[i, 0] - pts[o, 0]
            dy = pts[i, 1] - pts[o, 1]
            span = np.sqrt(dx * dx + dy * dy)
            cr = _cross(pts[o, 0], pts[o, 1], pts[a, 0], pts[a, 1], pts[i, 0], pts[i, 1])
            if cr <= dist_tol * span:
                h -= 1
            else:
                break
        hull[h] = i
        h += 1
    lower = h + 1
    for i in range(n - 2, -1, -1):
        while h >= lower:
            o = hull[h - 2]
            a = hull[h - 1]
            dx = pts[i, 0] - pts[o, 0]
            dy = pts[i, 1] - pts[o, 1]
            span = np.sqrt(dx * dx + dy * dy)
            cr = _cross(pts[o, 0], pts[o, 1], pts[a, 0], pts[a, 1], pts[i, 0], pts[i, 1])
            if cr <= dist_tol * span:
                h -= 1
            else:
                break
        hull[h] = i
        h += 1
    # last point repeats the first
    return hull[: h - 1].copy()


def warm_up():
    """Trigger compilation so the first timed call is not charged for it."""
    sq = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    clip_polygon(sq, np.array([[1.0, 0.0]]), np.array([0.5]))
    prune_flat(sq[monotone_chain(sq[np.lexsort((sq[:, 1], sq[:, 0]))], 0.0)], 1e-12)


@numba.njit(cache=True)
def _segment_distance(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    u = 0.0
    if ll > 0.0:
        u = min(1.0, max(0.0, ((px - ax) * dx + (py - ay) * dy) / ll))
    ex, ey = px - ax - u * dx, py - ay - u * dy
    return np.sqrt(ex * ex + ey * ey)


@numba.njit(cache=True)
def prune_flat(verts, dist_tol):
    """Mask of cyclic polygon vertices to keep after repeatedly dropping the
    vertex closest to the segment between its neighbours, while that distance
    is within ``dist_tol``."""
    n = verts.shape[0]
    keep = np.ones(n, dtype=np.bool_)
    alive = n
    while alive > 3:
        best = np.inf
        arg = -1
        for i in range(n):
            if not keep[i]:
                continue
            j = (i - 1) % n
            while not keep[j]:
                j = (j - 1) % n
            k = (i + 1) % n
            while not keep[k]:
                k = (k + 1) % n
            d = _segment_distance(verts[i, 0], verts[i, 1], verts[j, 0], verts[j, 1], verts[k, 0], verts[k, 1])
            if d < best:
                best = d
                arg = i
        if best > dist_tol:
            break
        keep[arg] = False
        alive -= 1
    return keep


@numba.njit(cache=True)
def max_pair_distance(pts):
    best = 0.0
    n, d = pts.shape
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(d):
                t = pts[i, k] - pts[j, k]
                s += t * t
            if s > best:
                best = s
    return np.sqrt(best)
