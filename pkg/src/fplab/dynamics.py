"""Brute-force orbit structure of a self-map on a finite space."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .metric_core import FiniteMetricSpace, SelfMap


@dataclass(frozen=True)
class OrbitAnalysis:
    fixed_points: frozenset[int]
    period2_points: frozenset[int]
    # point -> (fixed point reached, steps), or None if the orbit ends in a longer cycle
    eventually_fixed: dict[int, tuple[int, int] | None]

    def to_dict(self, labels: tuple[str, ...]) -> dict[str, Any]:
        ev = {}
        for i in sorted(self.eventually_fixed):
            hit = self.eventually_fixed[i]
            ev[labels[i]] = "cyclic" if hit is None else {"limit": labels[hit[0]], "steps": hit[1]}
        return {
            "fixed_points": [labels[i] for i in sorted(self.fixed_points)],
            "period2_points": [labels[i] for i in sorted(self.period2_points)],
            "eventually_fixed": ev,
        }


def fixed_points(space: FiniteMetricSpace, T: SelfMap) -> frozenset[int]:
    return frozenset(i for i, t in enumerate(T.image) if t == i)


def period2_points(space: FiniteMetricSpace, T: SelfMap) -> frozenset[int]:
    """Points of prime period 2: T^2 x = x and Tx != x."""
    t = T.image
    return frozenset(i for i in range(T.n) if t[i] != i and t[t[i]] == i)


def analyze(space: FiniteMetricSpace, T: SelfMap) -> OrbitAnalysis:
    if T.n != space.n:
        raise ValueError("map and space sizes differ")
    fixed = fixed_points(space, T)
    ev: dict[int, tuple[int, int] | None] = {}
    for start in range(T.n):
        x, hit = start, None
        # every orbit enters its cycle within n steps
        for steps in range(T.n + 1):
            if x in fixed:
                hit = (x, steps)
                break
            x = T.image[x]
        ev[start] = hit
    return OrbitAnalysis(fixed, period2_points(space, T), ev)
