"""Concavity of ``g^(1/n)`` along segments and the structures behind its failure.

Along a segment where ``g^(1/n)`` is affine the overlaps ``S_t`` form a
homothetic family ``S_t = (1 + t lam) S_0 + t v``. :func:`recover_witness`
reads ``(lam, v)`` off a sampled profile; :func:`verify_constant_case` and
:func:`verify_affine_case` rebuild the truncated cylinders (``lam == 0``) or
cones (``lam > 0``) that explain the family and measure how well they do.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from covario.covariogram import SegmentProbe, SegmentProfile, eval_segment
from covario.errors import ClassificationError, CovarioError, DegenerateBodyError, WitnessValidationError
from covario.geometry import (
    GEOM_RTOL,
    ConvexBody,
    TruncationBox,
    _check_same_dim,
    _point_segment_dist,
    cone_extend,
    cylinder_extend,
    dilate,
    hausdorff_distance,
    intersect,
    minkowski_sum,
    translate,
)

#: second differences below this times g^(1/n)(a) count as zero
CLASSIFY_RTOL = 1e-7
#: relative tolerance for witness validation
WITNESS_RTOL = 1e-8
#: reconstruction passes when max symmetric difference <= this times |S_0|
RECON_RTOL = 1e-8


class Classification(str, enum.Enum):
    STRICTLY_CONCAVE = "StrictlyConcave"
    CONSTANT = "Constant"
    AFFINE_NON_CONSTANT = "AffineNonConstant"
    MIXED = "Mixed"
    OUTSIDE_SUPPORT = "OutsideSupport"

    def __str__(self):
        return self.value

    @property
    def is_affine(self):
        return self in (Classification.CONSTANT, Classification.AFFINE_NON_CONSTANT)


@dataclass(frozen=True)
class ConcavityReport:
    classification: Classification
    slope_beta: float
    max_second_difference: float
    min_second_difference: float
    strictness_margin: float
    tol: float
    second_differences: np.ndarray = field(repr=False)
    flags: tuple = ()

    def to_json(self):
        return {
            "classification": str(self.classification),
            "slope_beta": self.slope_beta,
            "max_second_difference": self.max_second_difference,
            "min_second_difference": self.min_second_difference,
            "strictness_margin": self.strictness_margin,
            "tol": self.tol,
            "flags": list(self.flags),
        }


def classify_segment(profile: SegmentProfile, tol: float | None = None, rel_tol: float = CLASSIFY_RTOL) -> ConcavityReport:
    """Classify ``g^(1/n)`` on the probe from central second differences.

    A zero value is allowed at either end sample (the segment may end on the
    support boundary); a zero anywhere else means the probe leaves the
    support. ``tol`` defaults to ``rel_tol * g^(1/n)(a)``.
    """
    f = np.asarray(profile.g_root_values, dtype=float)
    t = profile.t
    m = len(f)
    if m < 9:
        raise ClassificationError(f"classification needs at least 9 samples, got {m}")
    inside = profile.g_values > 0
    n_in = int(inside.sum())
    nan = float("nan")
    if n_in == 0:
        return ConcavityReport(Classification.OUTSIDE_SUPPORT, nan, nan, nan, nan, nan, np.array([]))
    if n_in < 3:
        raise ClassificationError(f"only {n_in} samples lie in the support")
    if tol is None:
        ref = f[m // 2] if f[m // 2] > 0 else f.max()
        tol = rel_tol * ref
    if not inside[1:-1].all():
        run = np.nonzero(inside)[0]
        ff, tt = f[run], t[run]
        d = ff[:-2] - 2 * ff[1:-1] + ff[2:]
        beta = float(np.polyfit(tt, ff, 1)[0])
        return ConcavityReport(
            Classification.OUTSIDE_SUPPORT, beta, float(d.max(initial=nan)), float(d.min(initial=nan)),
            float(-d.max(initial=nan)), float(tol), d,
        )
    d = f[:-2] - 2.0 * f[1:-1] + f[2:]
    beta = float(np.polyfit(t, f, 1)[0])
    dmax, dmin = float(d.max()), float(d.min())
    if max(abs(dmax), abs(dmin)) <= tol:
        cls = Classification.CONSTANT if abs(beta) <= tol else Classification.AFFINE_NON_CONSTANT
    elif dmax < -tol:
        cls = Classification.STRICTLY_CONCAVE
    else:
        cls = Classification.MIXED
    return ConcavityReport(cls, beta, dmax, dmin, -dmax, float(tol), d)


def classify(K: ConvexBody, L: ConvexBody, probe: SegmentProbe, rel_tol: float = CLASSIFY_RTOL):
    """Evaluate and classify in one go; returns ``(profile, report)``.

    When both bodies stand in for strictly convex ones and the segment comes
    out affine, the report carries a flag; a genuine strictly convex pair can
    only do that on its top plateau.
    """
    profile = eval_segment(K, L, probe)
    report = classify_segment(profile, rel_tol=rel_tol)
    if report.classification.is_affine and not (K.smoothness.is_polytope or L.smoothness.is_polytope):
        top = min(K.volume, L.volume)
        k = min(K.smoothness.approx_order, L.smoothness.approx_order)
        slack = top * 4.0 * np.pi**2 / k**2
        flag = "affine_at_plateau_level" if profile.g_values.max() >= top - slack else "affine_below_plateau"
        report = ConcavityReport(**{**report.__dict__, "flags": (flag,)})
    return profile, report


@dataclass(frozen=True)
class HomothetyWitness:
    """``S_t = (1 + t lam) S_0 + t v`` along the probe (dilation about the origin)."""

    lam: float
    v: np.ndarray
    reference: ConvexBody
    t_plus: float
    max_residual: float

    def to_json(self):
        return {"lambda": self.lam, "v": self.v.tolist(), "t_plus": self.t_plus,
                "max_residual": self.max_residual, "reference_volume": self.reference.volume}


def recover_witness(profile: SegmentProfile, tol: float = WITNESS_RTOL) -> HomothetyWitness:
    """Read ``(lam, v)`` off an affine profile and check it at every sample.

    ``lam`` comes from the ``g^(1/n)`` ratio and ``v`` from the centroid drift
    between ``t = 0`` and the largest in-support sample ``t_plus``. Every
    in-support sample must then match in volume and centroid, and every
    retained intersection must match the predicted body in Hausdorff distance.
    """
    n = profile.dim
    t = profile.t
    g = profile.g_values
    f = profile.g_root_values
    mid = len(t) // 2
    ref = profile.intersections[mid]
    if not isinstance(ref, ConvexBody):
        raise DegenerateBodyError("the overlap at the probe midpoint has no interior")
    pos = np.nonzero((g > 0) & (t > 0))[0]
    if len(pos) == 0:
        raise DegenerateBodyError("no in-support sample with t > 0")
    ip = pos[-1]
    tp = float(t[ip])
    lam = (f[ip] - f[mid]) / (tp * f[mid])
    if abs(lam) > 1.0 + 1e-6:
        raise WitnessValidationError(f"recovered lambda {lam:.6g} is outside [-1, 1]", abs(lam) - 1.0)
    lam = float(np.clip(lam, -1.0, 1.0))
    c0 = profile.centroids[mid]
    v = (profile.centroids[ip] - (1.0 + tp * lam) * c0) / tp
    scale = ref.diameter
    worst = 0.0
    for i in np.nonzero(g > 0)[0]:
        s = 1.0 + t[i] * lam
        worst = max(worst, abs(g[i] - s**n * g[mid]) / g[mid])
        worst = max(worst, np.linalg.norm(profile.centroids[i] - (s * c0 + t[i] * v)) / scale)
        body = profile.intersections[i]
        if isinstance(body, ConvexBody) and i != mid:
            pred = translate(dilate(ref, s), t[i] * v)
            worst = max(worst, hausdorff_distance(pred, body) / body.diameter)
    if worst > tol:
        raise WitnessValidationError(f"witness does not reproduce the segment (residual {worst:.3g})", worst)
    return HomothetyWitness(lam, v, ref, tp, float(worst))


@dataclass(frozen=True)
class ReconstructionReport:
    kind: str
    per_t_symdiff: list
    max_symdiff: float
    reference_volume: float
    tolerance: float
    K_ext: ConvexBody = field(repr=False)
    L_ext: ConvexBody = field(repr=False)

    @property
    def relative_max_symdiff(self):
        return self.max_symdiff / self.reference_volume

    @property
    def passed(self):
        return self.max_symdiff <= self.tolerance * self.reference_volume

    def to_json(self):
        return {
            "kind": self.kind,
            "max_symdiff": self.max_symdiff,
            "relative_max_symdiff": self.relative_max_symdiff,
            "reference_volume": self.reference_volume,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "per_t": [{"t": t, "symdiff": a, "symdiff_translated_form": b} for t, a, b in self.per_t_symdiff],
            "K_ext": self.K_ext.to_json(),
            "L_ext": self.L_ext.to_json(),
        }


def symmetric_difference_volume(A, B) -> float:
    """``|A Δ B|`` for convex (possibly degenerate) sets."""
    va, vb = A.volume, B.volume
    if not (A.is_body and B.is_body):
        return va + vb
    return max(0.0, va + vb - 2.0 * intersect(A, B).volume)


def _box_for(bodies, probe, extra_points=()):
    box = TruncationBox.around(bodies, np.linalg.norm(probe.w))
    pts = [np.asarray(p, dtype=float) for p in extra_points]
    if not pts:
        return box
    margin = TruncationBox.required_margin(bodies, np.linalg.norm(probe.w))
    lo = np.minimum(box.lo, np.min(pts, axis=0) - margin)
    hi = np.maximum(box.hi, np.max(pts, axis=0) + margin)
    return TruncationBox(0.5 * (lo + hi), 0.5 * (hi - lo))


def _overlap_body(K, L, x):
    return intersect(K, translate(L, x))


def verify_constant_case(
    K: ConvexBody, L: ConvexBody, probe: SegmentProbe, witness: HomothetyWitness,
    box: TruncationBox | None = None, tol: float = RECON_RTOL, lam_tol: float = WITNESS_RTOL,
) -> ReconstructionReport:
    """Compare ``K ∩ (L + a + t w)`` with ``K' ∩ (L' + t w)`` and ``(K' ∩ L') + t v``.

    ``K'`` is the cylinder along ``v`` over ``K`` and ``L'`` the cylinder
    along ``v - w`` over ``L + a``; either collapses to the body itself when
    its direction vanishes.
    """
    _check_same_dim(K, L)
    if abs(witness.lam) > lam_tol:
        raise CovarioError(f"constant case needs lambda = 0, got {witness.lam:.3g}")
    a, w, v = probe.a, probe.w, witness.v
    La = translate(L, a)
    if box is None:
        box = _box_for([K, La], probe)
    box.check([K, La], np.linalg.norm(w))
    vtol = GEOM_RTOL * max(K.diameter, L.diameter)
    Kp = K if np.linalg.norm(v) <= vtol else cylinder_extend(K, v, box)
    Lp = La if np.linalg.norm(v - w) <= vtol else cylinder_extend(La, v - w, box)
    core = intersect(Kp, Lp)
    rows = []
    for t in probe.t:
        actual = _overlap_body(K, L, a + t * w)
        rebuilt = _overlap_body(Kp, Lp, t * w)
        moved = translate(core, t * v) if core.is_body else core
        rows.append((float(t), symmetric_difference_volume(actual, rebuilt), symmetric_difference_volume(actual, moved)))
    worst = max(max(r[1], r[2]) for r in rows)
    return ReconstructionReport("Cylinder", rows, worst, witness.reference.volume, tol, Kp, Lp)


def verify_affine_case(
    K: ConvexBody, L: ConvexBody, probe: SegmentProbe, witness: HomothetyWitness,
    box: TruncationBox | None = None, tol: float = RECON_RTOL,
) -> ReconstructionReport:
    """Compare ``K ∩ (L + a + t w)`` with ``K'' ∩ (L'' + t w)`` and
    ``(1 + t lam)(K'' ∩ L'') + t v``.

    ``K''`` is the cone over ``K`` with apex ``-v/lam``, ``L''`` the cone over
    ``L + a`` with apex ``-(v - w)/lam``. The probe must be oriented so that
    ``lam > 0``.
    """
    _check_same_dim(K, L)
    lam = witness.lam
    if not lam > 0:
        raise CovarioError(f"affine case needs lambda > 0 (reverse the probe), got {lam:.3g}")
    a, w, v = probe.a, probe.w, witness.v
    La = translate(L, a)
    apex_k = -v / lam
    apex_l = -(v - w) / lam
    if box is None:
        box = _box_for([K, La], probe, [apex_k, apex_l])
    box.check([K, La], np.linalg.norm(w))
    Kpp = cone_extend(K, apex_k, box)
    Lpp = cone_extend(La, apex_l, box)
    core = intersect(Kpp, Lpp)
    rows = []
    for t in probe.t:
        actual = _overlap_body(K, L, a + t * w)
        rebuilt = _overlap_body(Kpp, Lpp, t * w)
        s = 1.0 + t * lam
        if core.is_body and s > 0:
            moved = translate(dilate(core, s), t * v)
        else:
            moved = core if not core.is_body else _point_set(core.dim)
        rows.append((float(t), symmetric_difference_volume(actual, rebuilt), symmetric_difference_volume(actual, moved)))
    worst = max(max(r[1], r[2]) for r in rows)
    return ReconstructionReport("Cone", rows, worst, witness.reference.volume, tol, Kpp, Lpp)


def _point_set(dim):
    from covario.geometry import LowerDimensional

    return LowerDimensional(dim, np.zeros((1, dim)))


def parallelogram_constancy(K, L, a, v, w, per_side: int = 5):
    """Largest ``|g(x) - g(a)|`` over a grid strictly inside the parallelogram
    spanned by ``a ± v ± (w - v)``."""
    from covario.covariogram import evaluate

    a, v, w = (np.asarray(z, dtype=float) for z in (a, v, w))
    g0 = evaluate(K, L, a)
    s = np.linspace(-1.0, 1.0, per_side + 2)[1:-1]
    pts = [a + p * v + q * (w - v) for p in s for q in s]
    dev = max(abs(evaluate(K, L, x) - g0) for x in pts)
    return float(dev), g0, np.array(pts)


class Dichotomy(str, enum.Enum):
    BOUNDARIES_MEET = "BoundariesMeet"
    K_CONTAINS_L = "K_contains_L"
    L_CONTAINS_K = "L_contains_K"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DichotomyResult:
    kind: Dichotomy
    boundary_gap: float


def _boundary_gap_2d(A, B):
    ia = B.slack(A.vertices) < 0
    ib = A.slack(B.vertices) < 0
    if ia.any() and not ia.all() or ib.any() and not ib.all():
        return 0.0
    a0, a1 = A.vertices, np.roll(A.vertices, -1, axis=0)
    b0, b1 = B.vertices, np.roll(B.vertices, -1, axis=0)
    # boundaries cross iff some pair of edges properly intersects
    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    P, Q = a0[:, None, :], a1[:, None, :]
    R, S = b0[None, :, :], b1[None, :, :]
    o1, o2 = orient(P, Q, R), orient(P, Q, S)
    o3, o4 = orient(R, S, P), orient(R, S, Q)
    if ((o1 * o2 <= 0) & (o3 * o4 <= 0)).any():
        return 0.0
    return float(min(_point_segment_dist(a0, b0, b1).min(), _point_segment_dist(b0, a0, a1).min()))


def boundary_dichotomy(K: ConvexBody, L: ConvexBody, x, tol: float | None = None) -> DichotomyResult:
    """Do ``∂K`` and ``∂(L + x)`` meet, or does one body hold the other inside?

    Containment is decided from vertex slacks; the boundary gap is measured
    independently (exactly in the plane) so callers can check the two agree.
    """
    _check_same_dim(K, L)
    Lx = translate(L, x)
    if not intersect(K, Lx).is_body and intersect(K, Lx).__class__.__name__ == "Empty":
        raise DegenerateBodyError("the bodies do not intersect")
    if tol is None:
        tol = GEOM_RTOL * max(K.diameter, L.diameter)
    if (K.slack(Lx.vertices) < -tol).all():
        kind = Dichotomy.K_CONTAINS_L
    elif (Lx.slack(K.vertices) < -tol).all():
        kind = Dichotomy.L_CONTAINS_K
    else:
        kind = Dichotomy.BOUNDARIES_MEET
    if K.dim == 2:
        gap = _boundary_gap_2d(K, Lx)
    elif kind is Dichotomy.K_CONTAINS_L:
        gap = float(-K.slack(Lx.vertices).max())
    elif kind is Dichotomy.L_CONTAINS_K:
        gap = float(-Lx.slack(K.vertices).max())
    else:
        gap = 0.0
    return DichotomyResult(kind, gap)


def bm_defect(A: ConvexBody, B: ConvexBody) -> float:
    """``|(A + B)/2|^(1/n) - (|A|^(1/n) + |B|^(1/n))/2``, never negative for
    convex bodies."""
    _check_same_dim(A, B)
    n = A.dim
    mid = dilate(minkowski_sum(A, B), 0.5)
    return float(mid.volume ** (1.0 / n) - 0.5 * (A.volume ** (1.0 / n) + B.volume ** (1.0 / n)))


@dataclass
class SegmentAnalysis:
    """Everything :func:`analyze_segment` learned about one probe."""

    profile: SegmentProfile
    report: ConcavityReport
    oriented_probe: SegmentProbe
    witness: HomothetyWitness | None = None
    reconstruction: ReconstructionReport | None = None
    reversed: bool = False


def analyze_segment(K, L, probe, rel_tol=CLASSIFY_RTOL, recon_tol=RECON_RTOL, box=None) -> SegmentAnalysis:
    """Classify, and for affine segments recover the witness and rebuild the
    cylinders or cones. Decreasing affine profiles are reversed first so that
    ``lam >= 0``."""
    profile = eval_segment(K, L, probe)
    report = classify_segment(profile, rel_tol=rel_tol)
    out = SegmentAnalysis(profile, report, probe)
    if not report.classification.is_affine:
        return out
    if report.classification is Classification.AFFINE_NON_CONSTANT and report.slope_beta < 0:
        profile = profile.reversed()
        out.oriented_probe = profile.probe
        out.reversed = True
    out.witness = recover_witness(profile)
    if report.classification is Classification.CONSTANT:
        out.reconstruction = verify_constant_case(K, L, out.oriented_probe, out.witness, box, recon_tol)
    else:
        out.reconstruction = verify_affine_case(K, L, out.oriented_probe, out.witness, box, recon_tol)
    return out
