"""Cross covariograms of convex bodies in the plane and in space."""
from covario.concavity import (
    Classification,
    analyze_segment,
    bm_defect,
    boundary_dichotomy,
    classify_segment,
    recover_witness,
    verify_affine_case,
    verify_constant_case,
)
from covario.covariogram import SegmentProbe, eval_segment, evaluate, support_sumset
from covario.geometry import (
    ConvexBody,
    Empty,
    LowerDimensional,
    TruncationBox,
    centroid,
    cone_extend,
    cylinder_extend,
    dilate,
    hausdorff_distance,
    intersect,
    is_homothetic,
    minkowski_sum,
    reflect,
    support_function,
    translate,
    volume,
)
from covario.optimizer import level_set_probe, maximize

__version__ = "0.1.0"

__all__ = [
    "Classification", "ConvexBody", "Empty", "LowerDimensional", "SegmentProbe", "TruncationBox",
    "analyze_segment", "bm_defect", "boundary_dichotomy", "centroid", "classify_segment", "cone_extend",
    "cylinder_extend", "dilate", "eval_segment", "evaluate", "hausdorff_distance", "intersect",
    "is_homothetic", "level_set_probe", "maximize", "minkowski_sum", "recover_witness", "reflect",
    "support_function", "support_sumset", "translate", "verify_affine_case", "verify_constant_case", "volume",
]
