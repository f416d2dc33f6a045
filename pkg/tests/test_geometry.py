import cmath
import math

import pytest
from hypothesis import given, strategies as st

from saddlenode.algebra import Poly1
from saddlenode.geometry import (
    Arc,
    DegeneratePathError,
    FormalClass,
    PathPlan,
    Ray,
    SectorFrame,
    asymptotic_path,
    base_point,
    dogleg_path,
    sigma_for,
)


@pytest.mark.parametrize("mu,sigma", [(1, 0), (0, 1), (-1.5, 2), (-2, 3), (0.1j, 0), (-3 + 1e-9j, 0)])
def test_sigma_examples(mu, sigma):
    assert sigma_for(mu) == sigma


@given(
    st.one_of(
        st.floats(min_value=-50, max_value=50),
        st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
    )
)
def test_sigma_leaves_nonpositive_axis(mu):
    s = sigma_for(mu) + complex(mu)
    assert not (s.imag == 0 and s.real <= 0)


def test_formal_class_validation():
    assert FormalClass(1, 0).sigma == 1
    with pytest.raises(ValueError):
        FormalClass(1, -1.0, sigma=1)
    with pytest.raises(ValueError):
        FormalClass(1, 0, P=Poly1([0, 1]))
    with pytest.raises(ValueError):
        FormalClass(1, 0, P=Poly1([1, 1, 1]))
    with pytest.raises(ValueError):
        FormalClass(0, 0)


def test_base_point_examples():
    assert base_point(1, 0, 5) == pytest.approx(-5)
    assert base_point(2, 0, 1) == pytest.approx(1j)
    assert base_point(4, 3, 1) == pytest.approx(cmath.exp(1j * 7 * math.pi / 4))
    with pytest.raises(ValueError):
        base_point(1, 0, 0)


def test_asymptotic_path_k1():
    f = SectorFrame(1, 0, 5.0)
    p = asymptotic_path(f, 0.05)
    arc, ray = p.segments
    assert (arc.radius, arc.start, arc.end) == (5.0, math.pi, 0.0)
    assert (ray.angle, ray.start, ray.end) == (0.0, 5.0, 0.05)


def test_k1_continued_frame_shares_base_point():
    a = SectorFrame(1, 0, 5.0, side=1)
    b = SectorFrame(1, 1, 5.0, side=-1)
    assert a.x_base == pytest.approx(b.x_base)
    arc = asymptotic_path(b, 0.05).segments[0]
    # sweeps the lower half plane: pi -> 2 pi, i.e. -pi -> 0 shifted by one turn
    assert (arc.start, arc.end) == (math.pi, 2 * math.pi)


def test_degenerate_path():
    with pytest.raises(DegeneratePathError, match="degenerate path"):
        asymptotic_path(SectorFrame(1, 0, 5.0), 10.0)
    with pytest.raises(DegeneratePathError):
        PathPlan((Arc(1, 0, 1),), 0.1)
    with pytest.raises(DegeneratePathError):
        PathPlan((Ray(0, 0.1, 1.0),), 0.1)


def _path_points(plan, n=200):
    for seg in plan.segments:
        for i in range(n + 1):
            t = i / n
            if isinstance(seg, Arc):
                yield seg.radius, seg.start + t * (seg.end - seg.start)
            else:
                yield seg.start + t * (seg.end - seg.start), seg.angle


@pytest.mark.parametrize("k", [1, 2, 3, 5])
@pytest.mark.parametrize("side", [1, -1])
@pytest.mark.parametrize("shape", ["arc", "dogleg"])
def test_paths_stay_in_sector(k, side, shape):
    for j in range(k + 1):
        f = SectorFrame(k, j, 2.0, side)
        plan = asymptotic_path(f, 1e-3) if shape == "arc" else dogleg_path(f, 1e-3)
        radii = []
        for r, a in _path_points(plan):
            radii.append(r)
            assert abs(a - f.theta) <= math.pi / k + f.beta + 1e-12
        assert min(radii) == pytest.approx(1e-3)
        assert max(radii) == pytest.approx(2.0)
        assert plan.start_arg == f.arg_base
