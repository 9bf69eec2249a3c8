import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from covario.errors import CovarioError
from covario.geometry import ConvexBody

settings.register_profile(
    "covario", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("covario")

ACCEPTANCE_LINES = []


@st.composite
def polygons(draw, max_vertices=12, radius=1.0):
    """Convex polygons from hulls of random points, skipping slivers."""
    n = draw(st.integers(3, max_vertices))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    cx, cy = draw(st.floats(-2, 2)), draw(st.floats(-2, 2))
    for _ in range(50):
        pts = np.array([cx, cy]) + rng.uniform(-radius, radius, (max(n, 3), 2))
        try:
            body = ConvexBody(pts)
        except CovarioError:
            continue
        if body.volume > 0.05 * radius**2:
            return body
    return ConvexBody(np.array([[cx, cy], [cx + 1, cy], [cx, cy + 1]]))


@st.composite
def polytopes(draw, npts=10):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    while True:
        try:
            body = ConvexBody(rng.uniform(-1, 1, (npts, 3)))
        except CovarioError:
            continue
        if body.volume > 0.05:
            return body


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
