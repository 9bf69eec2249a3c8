"""Named fixtures: body pairs with probes whose classification is known in advance.

Sizes are chosen so every fixture fits a half-width 20 truncation box under
the margin rule of :class:`~covario.geometry.TruncationBox`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from covario.bodies import box as make_box
from covario.bodies import cone_fixture, cylinder_fixture, disk_approx
from covario.concavity import Classification
from covario.covariogram import SegmentProbe
from covario.geometry import ConvexBody, TruncationBox, reflect, translate

DEFAULT_BOX_HALF_WIDTH = 20.0

PLATEAU = "Plateau"
STRICT_LEVEL_SETS = "StrictlyConvexLevelSets"


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self):
        return {"name": self.name, "params": dict(self.params), "seed": self.seed}


@dataclass
class Fixture:
    spec: ScenarioSpec
    K: ConvexBody
    L: ConvexBody
    probes: list
    expected: list
    level_sets: str | None
    box: TruncationBox
    facts: dict = field(default_factory=dict)

    def manifest(self):
        return {
            "scenario": self.spec.to_json(),
            "probes": [
                {**p.to_json(), "expected": str(e)} for p, e in zip(self.probes, self.expected)
            ],
            "level_sets": self.level_sets,
            "box": {"center": self.box.center.tolist(), "half_widths": self.box.half_widths.tolist()},
            "facts": self.facts,
        }


def _positive(params, key, default):
    val = float(params.get(key, default))
    if not val > 0 or not math.isfinite(val):
        raise ValueError(f"parameter {key!r} must be positive, got {val}")
    return val


def _containment(p, seed, m):
    outer, inner = _positive(p, "outer", 2.0), _positive(p, "inner", 1.0)
    if inner >= outer:
        raise ValueError("inner square must be smaller than the outer one")
    K = make_box([-outer, -outer], [outer, outer])
    L = make_box([-inner, -inner], [inner, inner])
    step = 0.5 * (outer - inner)
    probes = [SegmentProbe([0, 0], [step, 0], m), SegmentProbe([0, 0], [0, step], m)]
    return K, L, probes, [Classification.CONSTANT] * 2, PLATEAU, {"plateau_height": L.volume}


def _cylinder_v0(p, seed, m):
    # K slides inside a strip of the same height, so the overlap stays K
    side, half = _positive(p, "side", 0.5), _positive(p, "half_length", 3.0)
    K = make_box([0, 0], [side, side])
    L = make_box([-half, 0], [half, side])
    probes = [SegmentProbe([0, 0], [1, 0], m), SegmentProbe([0.1, 0], [1.5, 0], m)]
    return K, L, probes, [Classification.CONSTANT] * 2, None, {"lambda": 0.0, "v": [0.0, 0.0]}


def _cylinder_vw(p, seed, m):
    # a square slides inside a strip, so the overlap travels with it
    side, half = _positive(p, "side", 0.5), _positive(p, "half_length", 3.0)
    K = make_box([-half, 0], [half, 1])
    L = make_box([0, 0], [side, side])
    probes = [SegmentProbe([0, 0.25], [1, 0], m), SegmentProbe([-0.5, 0.2], [1.5, 0.15], m)]
    return K, L, probes, [Classification.CONSTANT] * 2, None, {"lambda": 0.0, "v": "w"}


def _cylinder_generic(p, seed, m):
    # K is invariant along v and L along v - w, which are not perpendicular
    v = np.array([1.0, 0.0])
    w = np.asarray(p.get("w", [1.25, 0.5]), dtype=float)
    width = _positive(p, "half_width", 0.25)
    K = cylinder_fixture([0, 0], v, _positive(p, "half_length_k", 2.0), width)
    L = cylinder_fixture([0, 0], v - w, _positive(p, "half_length_l", 1.5), width)
    probes = [SegmentProbe([0, 0], w, m)]
    facts = {"lambda": 0.0, "v": v.tolist(), "w": w.tolist()}
    return K, L, probes, [Classification.CONSTANT], None, facts


def _cone_pair(p, seed, m):
    # opposing right-angle cones sharing the apex at the origin
    length = _positive(p, "length", 2.0)
    K = cone_fixture([0, 0], [1, 0], math.pi / 4, length)
    L = cone_fixture([0, 0], [-1, 0], math.pi / 4, length)
    probes = [SegmentProbe([1, 0], [0.5, 0], m), SegmentProbe([1, 0.2], [0.5, 0.1], m)]
    facts = {"lambda": 0.5, "v": [0.0, 0.0], "beta": 0.5 / math.sqrt(2.0)}
    return K, L, probes, [Classification.AFFINE_NON_CONSTANT] * 2, None, facts


def _square_self(p, seed, m):
    K = make_box([0, 0], [1, 1])
    probes = [SegmentProbe([0.5, 0.5], [0.5, 0.5], m)]
    facts = {"beta": -0.5, "lambda_reversed": 1.0, "v_reversed": [-1.0, -1.0]}
    return K, K, probes, [Classification.AFFINE_NON_CONSTANT], None, facts


def _disk_pair(p, seed, m):
    k = int(p.get("k", 2048))
    r1, r2 = _positive(p, "r1", 1.0), _positive(p, "r2", 0.75)
    if k < 8:
        raise ValueError("disk approximations need k >= 8")
    if r1 == r2:
        raise ValueError("DiskPair uses distinct radii")
    K, L = disk_approx(k, r1), disk_approx(k, r2)
    # keep every sample in the annulus where the two boundaries cross
    probes = [
        SegmentProbe([1.0, 0.0], [0.2, 0.0], m),
        SegmentProbe([0.0, 0.9], [0.15, 0.1], m),
        SegmentProbe([-0.7, -0.7], [0.1, -0.1], m),
    ]
    facts = {"meet_annulus": [abs(r1 - r2), r1 + r2], "plateau_height": min(K.volume, L.volume)}
    return K, L, probes, [Classification.STRICTLY_CONCAVE] * 3, PLATEAU, facts


def _symmetric_mrs(p, seed, m):
    sx, sy = _positive(p, "sx", 1.0), _positive(p, "sy", 0.7)
    ang = 2 * np.pi * np.arange(6) / 6
    K = ConvexBody(np.column_stack((sx * np.cos(ang), sy * np.sin(ang))))
    return K, K, [], [], STRICT_LEVEL_SETS, {"argmax": [0.0, 0.0]}


def random_triangle(rng, min_area=0.1):
    while True:
        pts = rng.uniform(-1.0, 1.0, size=(3, 2))
        e1, e2 = pts[1] - pts[0], pts[2] - pts[0]
        if abs(e1[0] * e2[1] - e1[1] * e2[0]) / 2 >= min_area:
            return ConvexBody(pts)


def _reflection_pair(p, seed, m):
    K = random_triangle(np.random.default_rng(seed))
    return K, reflect(K), [], [], STRICT_LEVEL_SETS, {}


_BUILDERS = {
    "Containment": _containment,
    "CylinderV0": _cylinder_v0,
    "CylinderVW": _cylinder_vw,
    "CylinderGeneric": _cylinder_generic,
    "ConePair": _cone_pair,
    "SquareSelf": _square_self,
    "DiskPair": _disk_pair,
    "SymmetricMRS": _symmetric_mrs,
    "ReflectionPair": _reflection_pair,
}

NAMES = tuple(_BUILDERS)


def catalog() -> list[ScenarioSpec]:
    return [ScenarioSpec(name) for name in NAMES]


def get(name: str) -> ScenarioSpec:
    if name not in _BUILDERS:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(NAMES)}")
    return ScenarioSpec(name)


def build(spec: ScenarioSpec, box: TruncationBox | None = None, samples: int = 33) -> Fixture:
    """Expand a spec into bodies, probes and expectations.

    Raises ``ValueError`` for unknown names or bad parameters and
    :class:`~covario.errors.TruncationError` if ``box`` is too small for a probe.
    """
    if spec.name not in _BUILDERS:
        raise ValueError(f"unknown scenario {spec.name!r}")
    K, L, probes, expected, level, facts = _BUILDERS[spec.name](dict(spec.params), spec.seed, samples)
    if box is None:
        box = TruncationBox(np.zeros(K.dim), np.full(K.dim, DEFAULT_BOX_HALF_WIDTH))
    for pr in probes:
        box.check([K, translate(L, pr.a)], float(np.linalg.norm(pr.w)))
    return Fixture(spec, K, L, probes, expected, level, box, facts)
