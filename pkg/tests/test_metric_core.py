import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fplab.corpus import FIG1
from fplab.metric_core import (
    GridNotClosed,
    InstanceFormatError,
    MetricValidationError,
    SampledSystem,
    SelfMap,
    instance_to_dict,
    iterate,
    load_instance,
    metric_violations,
    perimeter,
    validate_metric,
)

from conftest import instances


def test_paper_spaces_validate(fig1, ch4):
    assert fig1[0].n == 4 and ch4[0].n == 4


def test_broken_triangle_reported_by_name():
    d = [row[:] for row in FIG1["distance"]]
    d[1][3] = d[3][1] = 3
    with pytest.raises(MetricValidationError) as info:
        validate_metric("ABCD", d)
    tri = [v for v in info.value.violations if v.kind == "TriangleViolationAt"]
    assert ("B", "C", "D") in [v.labels for v in tri]
    assert ("D", "C", "B") in [v.labels for v in tri]


def test_all_violations_reported_together():
    d = [[1, 2, 0], [3, 0, 5], [0, 5, 0]]
    kinds = sorted({v.kind for v in metric_violations("abc", d)})
    assert kinds == ["AsymmetricAt", "NonzeroDiagonalAt", "TriangleViolationAt", "ZeroOffDiagonalAt"]


def test_non_square():
    (v,) = metric_violations("ab", [[0, 1, 2], [1, 0, 1]])
    assert v.kind == "NonSquare"


def test_off_diagonal_tolerance():
    assert [v.kind for v in metric_violations("ab", [[0, 1e-10], [1e-10, 0]], tol=1e-9)] == ["ZeroOffDiagonalAt"]
    assert metric_violations("ab", [[0, 1e-10], [1e-10, 0]], tol=1e-12) == []


def test_triangle_uses_additive_tolerance():
    d = [[0, 1, 2 + 5e-10], [1, 0, 1], [2 + 5e-10, 1, 0]]
    assert metric_violations("abc", d, tol=1e-9) == []
    assert metric_violations("abc", d, tol=1e-10) != []


def test_space_is_read_only(fig1):
    with pytest.raises(ValueError):
        fig1[0].dist[0, 1] = 7.0


def test_iterate_examples(fig1, ch4):
    space, T = fig1
    assert space.labels[iterate(space, T, space.index("A"), 2)] == "C"
    space, T = ch4
    assert iterate(space, T, 3, 2) == 0
    assert iterate(space, T, 3, 0) == 3


def test_perimeter_examples(fig1, ch4):
    space, _ = fig1
    a, b, d = (space.index(x) for x in "ABD")
    assert perimeter(space, a, b, d) == 10
    assert perimeter(space, a, a, a) == 0
    assert perimeter(ch4[0], 0, 1, 2) == 4


@given(instances, st.data())
def test_perimeter_permutation_invariant(inst, data):
    space, _ = inst
    pts = data.draw(st.tuples(*[st.integers(0, space.n - 1)] * 3))
    values = {perimeter(space, *p) for p in itertools.permutations(pts)}
    assert max(values) - min(values) <= 1e-12


@given(instances, st.data())
def test_iterate_composes(inst, data):
    space, T = inst
    x = data.draw(st.integers(0, space.n - 1))
    a, b = data.draw(st.integers(0, 12)), data.draw(st.integers(0, 12))
    assert iterate(space, T, x, a + b) == iterate(space, T, iterate(space, T, x, a), b)


@given(instances)
def test_validated_spaces_satisfy_axioms_exhaustively(inst):
    space, _ = inst
    d, n = space.dist, space.n
    for i, j, k in itertools.product(range(n), repeat=3):
        assert d[i, k] <= d[i, j] + d[j, k] + space.tol
    assert np.all(d == d.T) and np.all(np.diag(d) == 0)


def test_self_map_range_checked():
    with pytest.raises(ValueError):
        SelfMap((0, 2))


def test_instance_round_trip(fig1):
    space, T = fig1
    assert instance_to_dict(space, T) == FIG1
    s2, T2 = load_instance(instance_to_dict(space, T))
    assert T2 == T and np.array_equal(s2.dist, space.dist)


@pytest.mark.parametrize("bad", [
    {"points": ["a", "b"], "distance": [[0, 1], [1, 0]], "map": {"a": "b"}},
    {"points": ["a", "b"], "distance": [[0, 1], [1, 0]], "map": {"a": "b", "b": "c"}},
    {"points": ["a", "b"], "distance": [[0, 1], [1, 0]], "map": {"a": "a", "b": "b", "c": "a"}},
    {"points": ["a", "b"], "distance": [[0, 1], [1, 0]]},
])
def test_instance_format_errors(bad):
    with pytest.raises(InstanceFormatError):
        load_instance(bad)


def test_remark4_grid_closed():
    s = SampledSystem.uniform("remark4", 1000, extra=[0.25])
    assert s.n == 1001  # 1/4 already lies on the grid
    assert s.points[s.image[-1]] == 0.25
    assert all(s.points[t] == 0.0 for t in s.image[:-1])


def test_grid_not_closed():
    # 1/4 is missing from a grid of thirds
    with pytest.raises(GridNotClosed):
        SampledSystem.uniform("remark4", 3)


def test_sampled_points_strictly_increasing():
    with pytest.raises(ValueError):
        SampledSystem((0.0, 0.5, 0.5, 1.0), "remark4")
