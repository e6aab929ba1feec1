"""Seeded random metric spaces and self-maps.

Randomness comes from SplitMix64 (Steele, Lea & Flood 2014) so a seed
reproduces the same instance in any language:

    state += 0x9E3779B97F4A7C15
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                    (all arithmetic mod 2**64)

Floats are ``(z >> 11) * 2**-53`` in [0, 1); bounded integers are
``(z * bound) >> 64`` (Lemire's multiply-shift, no rejection step).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric_core import FiniteMetricSpace, SelfMap, validate_metric

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MAP_STREAM_SALT = 0xD1B54A32D192ED03
MAP_STYLES = ("uniform", "contractive-biased", "with-fixed-point")


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, bound: int) -> int:
        return (self.next_u64() * bound) >> 64

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()


@dataclass(frozen=True)
class GeneratorConfig:
    """``distance_range`` applies before shortest-path closure, which can only shrink distances."""

    n: int
    seed: int = 0
    distance_range: tuple[float, float] = (1.0, 10.0)
    map_style: str = "uniform"
    subset_size: int | None = None  # contractive-biased only; default 1 + below(max(1, n // 3))

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")
        lo, hi = self.distance_range
        if not 0 < lo <= hi:
            raise ValueError("need 0 < lo <= hi")
        if self.map_style not in MAP_STYLES:
            raise ValueError(f"map_style must be one of {MAP_STYLES}")
        if self.subset_size is not None and not 1 <= self.subset_size <= self.n:
            raise ValueError("subset_size must be in [1, n]")


def shortest_path_closure(d: np.ndarray) -> np.ndarray:
    """Floyd-Warshall; a symmetric input stays exactly symmetric."""
    d = np.array(d, dtype=float)
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def random_space(config: GeneratorConfig) -> FiniteMetricSpace:
    rng = SplitMix64(config.seed)
    n = config.n
    lo, hi = config.distance_range
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = rng.uniform(lo, hi)
    d = shortest_path_closure(d)
    return validate_metric([str(i) for i in range(n)], d, tol=1e-12)


def random_map(config: GeneratorConfig, space: FiniteMetricSpace | None = None) -> SelfMap:
    n = config.n
    if space is not None and space.n != n:
        raise ValueError("space size differs from config.n")
    rng = SplitMix64(config.seed ^ MAP_STREAM_SALT)
    if config.map_style == "contractive-biased":
        k = config.subset_size if config.subset_size is not None else 1 + rng.below(max(1, n // 3))
        pool = list(range(n))
        for i in range(k):  # partial Fisher-Yates
            j = i + rng.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        targets = pool[:k]
        return SelfMap(tuple(targets[rng.below(k)] for _ in range(n)))
    image = [rng.below(n) for _ in range(n)]
    if config.map_style == "with-fixed-point":
        f = rng.below(n)
        image[f] = f
    return SelfMap(tuple(image))


def random_instance(config: GeneratorConfig) -> tuple[FiniteMetricSpace, SelfMap]:
    space = random_space(config)
    return space, random_map(config, space)


def corpus_configs(count: int = 1200, n_min: int = 3, n_max: int = 12) -> list[GeneratorConfig]:
    """Deterministic sweep used by the property and acceptance suites."""
    span = n_max - n_min + 1
    return [
        GeneratorConfig(n=n_min + (s // 3) % span, seed=s, map_style=MAP_STYLES[s % 3])
        for s in range(count)
    ]
