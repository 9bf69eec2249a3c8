"""One test per acceptance criterion. Each prints its pass/fail line, and the
same lines are repeated in the terminal summary."""
import time

import pytest
from conftest import ACCEPTANCE_LINES

from covario import acceptance

TIME_BUDGET = 60.0


def check(number):
    t0 = time.perf_counter()
    res = getattr(acceptance, f"criterion_{number}")(seed=0)
    elapsed = time.perf_counter() - t0
    line = res.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert elapsed < TIME_BUDGET, f"criterion {number} took {elapsed:.1f}s"
    return res


def test_criterion_1_box_product_formula():
    r = check(1)
    assert r.details["points"] == 441
    assert r.details["max_abs_error"] <= 1e-12
    assert r.passed


def test_criterion_2_disk_lens():
    r = check(2)
    assert r.details["max_abs_error"] <= 1e-4
    assert r.passed


def test_criterion_3_root_concavity():
    r = check(3)
    assert r.details["triples"] == 500
    assert r.details["min_defect"] >= -1e-9
    assert r.passed


@pytest.mark.slow
def test_criterion_4_strict_concavity():
    r = check(4)
    d = r.details
    assert d["disk_probes"] == 100 and d["disk_failures"] == 0
    assert d["disk_probes_meeting"] == 100
    assert d["ellipse_probes"] == 100 and d["ellipse_failures"] == 0
    assert d["ellipse_max_g_below_min_volume"]
    assert min(d["disk_min_margin"], d["ellipse_min_margin"]) >= 1e-6
    assert r.passed


def test_criterion_5_cylinder_reconstruction():
    r = check(5)
    assert r.details["worst_relative_symdiff"] <= 1e-8
    assert r.details["parallelogram_points"] == 25
    assert r.passed


def test_criterion_6_cone_reconstruction():
    r = check(6)
    assert r.details["worst_relative_symdiff"] <= 1e-8
    assert r.details["square_beta_error"] <= 1e-9
    assert r.passed


def test_criterion_7_meeting_versus_containment():
    r = check(7)
    d = r.details
    assert d["probes"] == 200 and d["affine_segments"] == 0
    assert d["boundaries_meet"] and d["containment_detected"]
    assert d["plateau_through_origin"] == "Constant"
    assert r.passed


@pytest.mark.slow
def test_criterion_8_unique_maximizer():
    r = check(8)
    assert r.details["polygons"] == 10
    assert r.details["max_relative_spread"] <= 1e-6
    assert r.details["min_midpoint_excess"] > 0
    assert r.passed


@pytest.mark.slow
def test_criterion_9_grid_oracle():
    r = check(9)
    assert r.details["fixtures"] == 5
    assert r.details["max_cells"] <= 2
    assert r.details["max_relative_value_gap"] <= 1e-6
    assert r.passed


def test_criterion_10_brunn_minkowski():
    r = check(10)
    assert r.details["pairs"] == 200
    assert r.details["min_defect"] >= -1e-12
    assert r.details["mismatches"] == 0
    assert r.passed
