"""Body constructors and the body JSON format.

A body file looks like::

    {"dim": 2, "kind": "vertices", "data": [[0, 0], [1, 0], [0, 1]],
     "smoothness": "polytope"}

``kind`` may also be ``"halfspaces"`` (``data`` rows are ``[*normal, offset]``)
or ``"generator"`` (``data`` is ``{"name": ..., **params}``).
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from covario.errors import CovarioError
from covario.geometry import POLYTOPE, ConvexBody, Smoothness, strictly_convex_approx


class BodyFormatError(CovarioError, ValueError):
    pass


def box(lo, hi) -> ConvexBody:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != hi.shape or not (hi > lo).all():
        raise ValueError("box needs lo < hi componentwise")
    n = lo.size
    corners = np.array(np.meshgrid(*[[0, 1]] * n, indexing="ij")).reshape(n, -1).T
    return ConvexBody(lo + corners * (hi - lo))


def regular_polygon(k: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> ConvexBody:
    if k < 3:
        raise ValueError("a polygon needs at least 3 vertices")
    ang = phase + 2.0 * np.pi * np.arange(k) / k
    pts = np.asarray(center, dtype=float) + radius * np.column_stack((np.cos(ang), np.sin(ang)))
    return ConvexBody(pts)


def _fibonacci_sphere(k):
    i = np.arange(k) + 0.5
    z = 1.0 - 2.0 * i / k
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack((r * np.cos(phi), r * np.sin(phi), z))


def disk_approx(k: int, radius: float = 1.0, center=None, dim: int | None = None) -> ConvexBody:
    """Inscribed k-gon (or k-point spherical polytope in 3D) tagged as a
    stand-in for the round body."""
    center = np.zeros(dim or 2) if center is None else np.asarray(center, dtype=float)
    dim = dim or center.size
    if center.size != dim:
        raise ValueError("center and dimension disagree")
    if dim == 2:
        return ConvexBody(regular_polygon(k, radius, center).vertices, strictly_convex_approx(k))
    if dim == 3:
        return ConvexBody(center + radius * _fibonacci_sphere(k), strictly_convex_approx(k))
    raise ValueError(f"unsupported dimension {dim}")


def ellipse_approx(k: int, semi_axes=(1.0, 1.0), center=(0.0, 0.0), angle: float = 0.0) -> ConvexBody:
    ang = 2.0 * np.pi * np.arange(k) / k
    a, b = semi_axes
    pts = np.column_stack((a * np.cos(ang), b * np.sin(ang)))
    c, s = math.cos(angle), math.sin(angle)
    pts = pts @ np.array([[c, s], [-s, c]]) + np.asarray(center, dtype=float)
    return ConvexBody(pts, strictly_convex_approx(k))


def simplex(dim: int = 2, scale: float = 1.0, origin=None) -> ConvexBody:
    o = np.zeros(dim) if origin is None else np.asarray(origin, dtype=float)
    return ConvexBody(o + scale * np.vstack([np.zeros(dim), np.eye(dim)]))


def _perp_basis(direction):
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    if d.size == 2:
        return d, [np.array([-d[1], d[0]])]
    helper = np.eye(3)[np.argmin(np.abs(d))]
    u = np.cross(d, helper)
    u /= np.linalg.norm(u)
    return d, [u, np.cross(d, u)]


def cone_fixture(apex=(0.0, 0.0), direction=(1.0, 0.0), half_angle: float = math.pi / 4, length: float = 10.0):
    """Cone with the given apex and axis, truncated at ``length`` along the axis.

    In 3D the cross-section is a square, so the cone is a pyramid.
    """
    apex = np.asarray(apex, dtype=float)
    d, perps = _perp_basis(direction)
    spread = length * math.tan(half_angle)
    far = apex + length * d
    if len(perps) == 1:
        pts = [apex, far + spread * perps[0], far - spread * perps[0]]
    else:
        u, w = perps
        pts = [apex] + [far + spread * (su * u + sw * w) for su in (-1, 1) for sw in (-1, 1)]
    return ConvexBody(np.array(pts))


def cylinder_fixture(center=(0.0, 0.0), direction=(1.0, 0.0), half_length: float = 5.0, half_width: float = 0.5):
    """Strip (2D) or square prism (3D) along ``direction``, truncated at
    ``half_length``."""
    c = np.asarray(center, dtype=float)
    d, perps = _perp_basis(direction)
    pts = []
    for sd in (-1, 1):
        if len(perps) == 1:
            for sp in (-1, 1):
                pts.append(c + sd * half_length * d + sp * half_width * perps[0])
        else:
            for su in (-1, 1):
                for sw in (-1, 1):
                    pts.append(c + sd * half_length * d + half_width * (su * perps[0] + sw * perps[1]))
    return ConvexBody(np.array(pts))


GENERATORS = {
    "box": box,
    "regular_polygon": regular_polygon,
    "disk_approx": disk_approx,
    "ellipse_approx": ellipse_approx,
    "simplex": simplex,
    "cone_fixture": cone_fixture,
    "cylinder_fixture": cylinder_fixture,
}


def _parse_smoothness(raw) -> Smoothness:
    if raw is None or raw == "polytope":
        return POLYTOPE
    if isinstance(raw, dict) and "strictly_convex_approx" in raw:
        return strictly_convex_approx(int(raw["strictly_convex_approx"]))
    raise BodyFormatError(f"unknown smoothness {raw!r}")


def body_from_dict(doc: dict) -> ConvexBody:
    try:
        dim = int(doc["dim"])
        kind = doc["kind"]
        data = doc["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise BodyFormatError(f"malformed body JSON: {exc}") from exc
    if dim not in (2, 3):
        raise BodyFormatError(f"dim must be 2 or 3, got {dim}")
    smooth = _parse_smoothness(doc.get("smoothness"))
    try:
        if kind == "vertices":
            pts = np.asarray(data, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != dim:
                raise BodyFormatError(f"vertices must be a list of {dim}-vectors")
            return ConvexBody(pts, smooth)
        if kind == "halfspaces":
            rows = np.asarray(data, dtype=float)
            if rows.ndim != 2 or rows.shape[1] != dim + 1:
                raise BodyFormatError(f"halfspace rows must have {dim + 1} entries")
            return ConvexBody.from_halfspaces(rows[:, :dim], rows[:, dim], smooth)
        if kind == "generator":
            if isinstance(data, list) and len(data) == 2 and isinstance(data[0], str):
                name, params = data[0], dict(data[1])
            else:
                params = dict(data)
                name = params.pop("name")
            if name not in GENERATORS:
                raise BodyFormatError(f"unknown generator {name!r}")
            body = GENERATORS[name](**params)
            if body.dim != dim:
                raise BodyFormatError(f"generator produced a {body.dim}-dimensional body, expected {dim}")
            if "smoothness" in doc:
                body = ConvexBody(body.vertices, smooth)
            return body
    except (TypeError, KeyError) as exc:
        raise BodyFormatError(f"malformed body JSON: {exc}") from exc
    raise BodyFormatError(f"unknown body kind {kind!r}")


def load_body(path) -> ConvexBody:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BodyFormatError(f"cannot read body file {path}: {exc}") from exc
    return body_from_dict(doc)


def dump_body(body: ConvexBody, path) -> None:
    Path(path).write_text(json.dumps(body.to_json(), indent=1) + "\n")


def random_polygon(rng, npts: int = 8, radius: float = 1.0, center=(0.0, 0.0)) -> ConvexBody:
    """Hull of ``npts`` uniform points in a disk; redrawn until it has area."""
    while True:
        r = radius * np.sqrt(rng.uniform(0, 1, npts))
        a = rng.uniform(0, 2 * np.pi, npts)
        pts = np.asarray(center, dtype=float) + np.column_stack((r * np.cos(a), r * np.sin(a)))
        try:
            body = ConvexBody(pts)
        except CovarioError:
            continue
        if body.volume > 0.05 * radius**2:
            return body


def random_polytope3d(rng, npts: int = 12, radius: float = 1.0, center=(0.0, 0.0, 0.0)) -> ConvexBody:
    while True:
        pts = np.asarray(center, dtype=float) + rng.uniform(-radius, radius, (npts, 3))
        try:
            body = ConvexBody(pts)
        except CovarioError:
            continue
        if body.volume > 0.05 * radius**3:
            return body
