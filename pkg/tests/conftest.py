from __future__ import annotations

import itertools

import pytest
from hypothesis import strategies as st

from fplab.corpus import CHATTERJEA4, FIG1, IDENTITY3, SWAP
from fplab.metric_core import SelfMap, load_instance, validate_metric


@pytest.fixture
def fig1():
    return load_instance(FIG1)


@pytest.fixture
def ch4():
    return load_instance(CHATTERJEA4)


@pytest.fixture
def swap():
    return load_instance(SWAP)


@pytest.fixture
def ident():
    return load_instance(IDENTITY3)


@st.composite
def line_instances(draw, min_n=2, max_n=7):
    """Distinct integer points on the line (|x - y| is a metric) with an arbitrary map."""
    n = draw(st.integers(min_n, max_n))
    pts = draw(st.lists(st.integers(0, 40), min_size=n, max_size=n, unique=True))
    image = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    space = validate_metric([str(p) for p in pts], [[abs(a - b) for b in pts] for a in pts])
    return space, SelfMap(tuple(image))


@st.composite
def plane_instances(draw, min_n=2, max_n=7):
    """Points in the plane under the L1 metric, arbitrary map."""
    n = draw(st.integers(min_n, max_n))
    pts = draw(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=n, max_size=n, unique=True))
    image = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    d = [[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pts] for a in pts]
    return validate_metric([f"{x}_{y}" for x, y in pts], d), SelfMap(tuple(image))


instances = st.one_of(line_instances(), plane_instances())


# -- brute-force oracle: plain loops over the defining inequalities ----------

def oracle_tuples(kind, n, t):
    if kind == "perimeter_triangle":
        return list(itertools.combinations(range(n), 3))
    pairs = [(x, y) for x in range(n) for y in range(n)]
    if kind in ("banach", "kannan", "chatterjea"):
        return [(x, y) for x, y in pairs if x != y]
    if kind in ("orbital_triangular", "orbital_chatterjea"):
        return [(x, y) for x, y in pairs if x != y and y != t[x]]
    return [(x, y) for x, y in pairs if len({x, y, t[x]}) == 3]


def oracle_sides(kind, d, t, tup):
    if kind == "perimeter_triangle":
        x, y, z = tup
        return (d[t[x]][t[y]] + d[t[y]][t[z]] + d[t[z]][t[x]], d[x][y] + d[y][z] + d[z][x])
    x, y = tup
    tx, ty, ttx = t[x], t[y], t[t[x]]
    if kind == "banach":
        return d[tx][ty], d[x][y]
    if kind == "kannan":
        return d[tx][ty], d[x][tx] + d[y][ty]
    if kind == "chatterjea":
        return d[tx][ty], d[x][ty] + d[y][tx]
    left = d[tx][ttx] + d[ttx][ty] + d[ty][tx]
    if kind in ("orbital_triangular", "orbital_triangular_strict"):
        return left, d[x][tx] + d[tx][y] + d[y][x]
    if kind == "orbital_kannan":
        return left, d[x][tx] + d[y][ty] + d[tx][ttx]
    return left, d[x][ty] + d[y][tx] + d[x][ttx] + d[y][ttx] + d[tx][ty]


def oracle_constant(kind, space, T, tol=1e-9):
    """(constant or None if vacuous, admissible count); inf for infinite."""
    d = space.dist.tolist()
    t = list(T.image)
    tuples = oracle_tuples(kind, space.n, t)
    best = 0.0
    for tup in tuples:
        lhs, rhs = oracle_sides(kind, d, t, tup)
        if lhs <= tol and rhs <= tol:
            continue
        best = max(best, float("inf") if rhs <= tol else lhs / rhs)
    return (best if tuples else None), len(tuples)
