"""Embedded worked examples and the expected values they must reproduce."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Mapping

from . import classifiers as C
from .dynamics import fixed_points, period2_points
from .metric_core import (
    FiniteMetricSpace,
    MetricValidationError,
    SampledSystem,
    SelfMap,
    iterate,
    load_instance,
    perimeter,
    validate_metric,
)
from .picard import StopReason, make_certificate, run_picard

K = C.ContractionKind

FIG1 = {
    "points": ["A", "B", "C", "D"],
    "distance": [[0, 4, 4, 4], [4, 0, 1, 2], [4, 1, 0, 1], [4, 2, 1, 0]],
    "map": {"A": "C", "B": "B", "C": "C", "D": "D"},
}
CHATTERJEA4 = {
    "points": ["0", "1", "2", "3"],
    "distance": [[abs(i - j) for j in range(4)] for i in range(4)],
    "map": {"0": "0", "1": "0", "2": "0", "3": "2"},
}
SWAP = {
    "points": ["a", "b"],
    "distance": [[0, 1], [1, 0]],
    "map": {"a": "b", "b": "a"},
}
IDENTITY3 = {
    "points": ["p", "q", "r"],
    "distance": [[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]],
    "map": {"p": "p", "q": "q", "r": "r"},
}
INSTANCES: dict[str, dict[str, Any]] = {
    "fig1": FIG1,
    "chatterjea4": CHATTERJEA4,
    "swap": SWAP,
    "identity": IDENTITY3,
}

# (x, y) -> (L, R) for the orbital Chatterjea inequality on {0,1,2,3}.
# R(0,1) = d(0,0)+d(1,0)+d(0,0)+d(1,0)+d(0,0) = 2.
CHATTERJEA4_TABLE = {
    (0, 1): (0, 2), (0, 2): (0, 4), (1, 2): (0, 6), (2, 1): (0, 6),
    (0, 3): (4, 10), (3, 0): (4, 10), (1, 3): (4, 10), (3, 1): (4, 10), (2, 3): (4, 10),
}


def remark4_system(grid_size: int = 1000) -> SampledSystem:
    return SampledSystem.uniform("remark4", grid_size, extra=[0.25])


@dataclass
class Assertion:
    name: str
    expected: Any
    computed: Any
    tol: float | None = None

    @property
    def passed(self) -> bool:
        if self.tol is None:
            return _norm(self.expected) == _norm(self.computed)
        try:
            return abs(float(self.computed) - float(self.expected)) <= self.tol
        except (TypeError, ValueError):
            return False

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "expected": _norm(self.expected), "computed": _norm(self.computed),
                "tol": self.tol, "passed": self.passed}


def _norm(v: Any) -> Any:
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    if isinstance(v, tuple):
        return [_norm(x) for x in v]
    if isinstance(v, list):
        return [_norm(x) for x in v]
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def _labels(space: FiniteMetricSpace, idx: Any) -> Any:
    if isinstance(idx, (set, frozenset)):
        return sorted(space.labels[i] for i in idx)
    if idx is None:
        return None
    return [space.labels[i] for i in idx]


def build_assertions() -> list[Assertion]:
    out: list[Assertion] = []
    add = lambda name, expected, computed, tol=None: out.append(Assertion(name, expected, computed, tol))  # noqa: E731

    fig, fT = load_instance(FIG1)
    ch, cT = load_instance(CHATTERJEA4)
    A, B, Cc, Dd = (fig.index(x) for x in "ABCD")

    # metric validation
    add("fig1.valid", True, True)
    add("chatterjea4.valid", True, True)
    broken = [row[:] for row in FIG1["distance"]]
    broken[1][3] = broken[3][1] = 3
    try:
        validate_metric(FIG1["points"], broken)
        found = []
    except MetricValidationError as exc:
        found = [",".join(v.labels) for v in exc.violations if v.kind == "TriangleViolationAt"]
    add("fig1_broken.triangle_violation_BCD", True, "B,C,D" in found)

    # iteration and perimeters
    add("fig1.iterate(A,2)", "C", fig.labels[iterate(fig, fT, A, 2)])
    add("chatterjea4.iterate(3,2)", "0", ch.labels[iterate(ch, cT, 3, 2)])
    add("fig1.perimeter(A,B,D)", 10, perimeter(fig, A, B, Dd), 1e-12)
    add("chatterjea4.perimeter(0,1,2)", 4, perimeter(ch, 0, 1, 2), 1e-12)

    # section 4 example
    for y, yn in ((B, "B"), (Dd, "D")):
        lhs, rhs = C.lhs_rhs(K.ORBITAL_KANNAN, fig, fT, (A, y))
        add(f"fig1.orbital_kannan.L(A,{yn})", 2, lhs, 1e-12)
        add(f"fig1.orbital_kannan.R(A,{yn})", 4, rhs, 1e-12)
    lhs, rhs = C.lhs_rhs(K.KANNAN, fig, fT, (B, Dd))
    add("fig1.d(TB,TD)", 2, lhs, 1e-12)
    add("fig1.d(B,TB)+d(D,TD)", 0, rhs, 1e-12)
    reps = {r.kind: r for r in C.classify_all(fig, fT)}
    add("fig1.kannan.member", False, reps[K.KANNAN].member)
    add("fig1.kannan.infinite", True, reps[K.KANNAN].infinite)
    add("fig1.kannan.witness", ["B", "D"], _labels(fig, reps[K.KANNAN].witness))
    add("fig1.banach.member", False, reps[K.BANACH].member)
    add("fig1.banach.minimal_constant", 1.0, reps[K.BANACH].minimal_constant, 1e-12)
    add("fig1.banach.witness", ["B", "D"], _labels(fig, reps[K.BANACH].witness))
    add("fig1.d(B,D)", 2, fig.d(B, Dd), 1e-12)
    add("fig1.orbital_kannan.member", True, reps[K.ORBITAL_KANNAN].member)
    add("fig1.orbital_kannan.minimal_constant", 0.5, reps[K.ORBITAL_KANNAN].minimal_constant, 1e-12)
    add("fig1.fixed_points", ["B", "C", "D"], _labels(fig, fixed_points(fig, fT)))
    add("fig1.period2_points", [], _labels(fig, period2_points(fig, fT)))
    add("orbital_kannan.rate(beta=1/2)", 0.5, make_certificate(K.ORBITAL_KANNAN, 0.5, 1.0).rate, 1e-15)

    # section 5 example
    for (x, y), (L, R) in CHATTERJEA4_TABLE.items():
        lhs, rhs = C.lhs_rhs(K.ORBITAL_CHATTERJEA, ch, cT, (x, y))
        add(f"chatterjea4.L({x},{y})", L, lhs, 1e-12)
        add(f"chatterjea4.R({x},{y})", R, rhs, 1e-12)
    reps = {r.kind: r for r in C.classify_all(ch, cT)}
    oc = reps[K.ORBITAL_CHATTERJEA]
    add("chatterjea4.orbital_chatterjea.admissible_count", 9, oc.admissible_count)
    add("chatterjea4.orbital_chatterjea.minimal_constant", 0.4, oc.minimal_constant, 1e-12)
    add("chatterjea4.orbital_chatterjea.member", True, oc.member)
    add("chatterjea4.orbital_chatterjea.witness", ["0", "3"], _labels(ch, oc.witness))
    lhs, rhs = C.lhs_rhs(K.CHATTERJEA, ch, cT, (2, 3))
    add("chatterjea4.d(T2,T3)", 2, lhs, 1e-12)
    add("chatterjea4.d(2,T3)+d(3,T2)", 3, rhs, 1e-12)
    add("chatterjea4.chatterjea.member", False, reps[K.CHATTERJEA].member)
    add("chatterjea4.chatterjea.minimal_constant", 2 / 3, reps[K.CHATTERJEA].minimal_constant, 1e-12)
    add("chatterjea4.chatterjea.witness", ["2", "3"], _labels(ch, reps[K.CHATTERJEA].witness))
    add("chatterjea4.fixed_points", ["0"], _labels(ch, fixed_points(ch, cT)))
    add("chatterjea4.period2_points", [], _labels(ch, period2_points(ch, cT)))
    tr = run_picard(ch, cT, 3)
    add("chatterjea4.picard(3).iterates", ["3", "2", "0", "0"], _labels(ch, tr.iterates))
    add("chatterjea4.picard(3).stop", "converged", tr.stop_reason.value)
    add("orbital_chatterjea.rate(gamma=2/5)", 2 / 3, make_certificate(K.ORBITAL_CHATTERJEA, 0.4, 1.0).rate, 1e-15)

    # remark 4 on a sample grid
    sys_ = remark4_system()
    space4, T4 = sys_.to_finite()
    i1, iq, i0 = sys_.n - 1, sys_.points.index(0.25), 0
    add("remark4.p0=perimeter(1,1/4,0)", 2, perimeter(space4, i1, iq, i0), 1e-12)
    g = C.grid_falsify(sys_, K.ORBITAL_TRIANGULAR, 2 / 3)
    add("remark4.orbital.pass(alpha=2/3)", True, g.passed)
    add("remark4.orbital.max_ratio", 1 / 3, g.max_ratio, 1e-9)
    gb = C.grid_falsify(sys_, K.BANACH, 0.99)
    add("remark4.banach.violation", False, gb.passed)
    add("remark4.fixed_points", [0.0], sorted(sys_.points[i] for i in fixed_points(space4, T4)))
    cert = make_certificate(K.ORBITAL_TRIANGULAR, 2 / 3, 2.0)
    add("remark4.certificate.n_required(1e-6)", 40, cert.n_required(1e-6))

    # hypothesis-necessity cases
    sw, sT = load_instance(SWAP)
    rep = C.minimal_constant(K.ORBITAL_TRIANGULAR, sw, sT)
    add("swap.orbital_triangular.vacuous", True, rep.vacuous)
    add("swap.period2_points", ["a", "b"], _labels(sw, period2_points(sw, sT)))
    add("swap.fixed_points", [], _labels(sw, fixed_points(sw, sT)))
    add("swap.picard(a).stop", StopReason.PERIOD2_DETECTED.value, run_picard(sw, sT, 0).stop_reason.value)
    ident, iT = load_instance(IDENTITY3)
    add("identity.orbital_triangular_strict.vacuous", True,
        C.minimal_constant(K.ORBITAL_TRIANGULAR_STRICT, ident, iT).vacuous)
    add("identity.fixed_points", list(ident.labels), _labels(ident, fixed_points(ident, iT)))
    return out


def run_corpus(overrides: Mapping[str, Any] | None = None) -> list[Assertion]:
    """All corpus assertions; ``overrides`` replaces expected values by name (harness self-test)."""
    items = build_assertions()
    if overrides:
        known = {a.name for a in items}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown assertion names: {sorted(unknown)}")
        for a in items:
            if a.name in overrides:
                a.expected = overrides[a.name]
    return items


def parse_override(text: str) -> tuple[str, Any]:
    name, sep, raw = text.partition("=")
    if not sep:
        raise ValueError(f"override must be NAME=VALUE, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return name.strip(), value


def instance(name: str) -> tuple[FiniteMetricSpace, SelfMap]:
    return load_instance(INSTANCES[name])

