"""Finite metric spaces, self-maps, and sampled interval systems.

Everything here is immutable after construction. Distance matrices are
stored as read-only float64 numpy arrays.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


def default_tol() -> float:
    """Comparison tolerance, overridable through the ``FPLAB_TOL`` env var."""
    raw = os.environ.get("FPLAB_TOL")
    if raw is None:
        return DEFAULT_TOL
    tol = float(raw)
    if not tol > 0:
        raise ValueError(f"FPLAB_TOL must be positive, got {raw!r}")
    return tol


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple[int, ...] = ()
    labels: tuple[str, ...] = ()
    detail: str = ""

    def __str__(self) -> str:
        where = ",".join(self.labels) if self.labels else ",".join(map(str, self.indices))
        text = f"{self.kind}({where})"
        return f"{text}: {self.detail}" if self.detail else text


class MetricValidationError(ValueError):
    """Raised with the complete list of axiom violations."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class InstanceFormatError(ValueError):
    pass


def metric_violations(labels: Sequence[str], matrix: Any, tol: float = DEFAULT_TOL) -> list[Violation]:
    """Return every metric-axiom violation of ``matrix`` (empty list if valid)."""
    labels = [str(x) for x in labels]
    n = len(labels)
    out: list[Violation] = []
    if len(set(labels)) != n:
        dup = sorted({x for x in labels if labels.count(x) > 1})
        out.append(Violation("DuplicateLabel", labels=tuple(dup)))
    try:
        d = np.asarray(matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        return out + [Violation("NonSquare", detail=f"not a numeric matrix: {exc}")]
    if d.ndim != 2 or d.shape != (n, n):
        return out + [Violation("NonSquare", detail=f"shape {d.shape} for {n} labels")]
    if not np.all(np.isfinite(d)):
        bad = np.argwhere(~np.isfinite(d))
        out += [Violation("NonFiniteAt", (int(i), int(j)), (labels[i], labels[j])) for i, j in bad]
        return out

    def lab(*idx: int) -> tuple[str, ...]:
        return tuple(labels[i] for i in idx)

    for i in range(n):
        if d[i, i] != 0:
            out.append(Violation("NonzeroDiagonalAt", (i,), lab(i), f"d={float(d[i, i])!r}"))
    for i, j in np.argwhere(np.triu(d != d.T, 1)):
        i, j = int(i), int(j)
        out.append(Violation("AsymmetricAt", (i, j), lab(i, j), f"{float(d[i, j])!r} != {float(d[j, i])!r}"))
    off = ~np.eye(n, dtype=bool)
    for i, j in np.argwhere(off & (d <= tol)):
        i, j = int(i), int(j)
        if i < j or d[i, j] != d[j, i]:
            out.append(Violation("ZeroOffDiagonalAt", (i, j), lab(i, j), f"d={float(d[i, j])!r}"))
    # triangle: d[i,k] <= d[i,j] + d[j,k] + tol, j is the intermediate point
    for j in range(n):
        bad = d > d[:, j, None] + d[None, j, :] + tol
        for i, k in np.argwhere(bad):
            i, k = int(i), int(k)
            out.append(
                Violation(
                    "TriangleViolationAt",
                    (i, j, k),
                    lab(i, j, k),
                    f"{float(d[i, k])!r} > {float(d[i, j])!r} + {float(d[j, k])!r}",
                )
            )
    return out


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    labels: tuple[str, ...]
    dist: np.ndarray
    tol: float = DEFAULT_TOL
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.tol < 0:
            raise ValueError("tol must be non-negative")
        labels = tuple(str(x) for x in self.labels)
        violations = metric_violations(labels, self.dist, self.tol)
        if violations:
            raise MetricValidationError(violations)
        d = np.array(self.dist, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown point {label!r}") from None

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def perimeter(self, x: int, y: int, z: int) -> float:
        return perimeter(self, x, y, z)


def validate_metric(labels: Sequence[str], matrix: Any, tol: float = DEFAULT_TOL) -> FiniteMetricSpace:
    """Build a validated space; raises :class:`MetricValidationError` listing all violations."""
    return FiniteMetricSpace(tuple(labels), matrix, tol)


@dataclass(frozen=True)
class SelfMap:
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(i) for i in self.image)
        n = len(image)
        bad = [i for i, t in enumerate(image) if not 0 <= t < n]
        if bad:
            raise ValueError(f"image index out of range at {bad}")
        object.__setattr__(self, "image", image)

    @property
    def n(self) -> int:
        return len(self.image)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.image, dtype=np.intp)

    def __call__(self, i: int) -> int:
        return self.image[i]

    @classmethod
    def identity(cls, n: int) -> SelfMap:
        return cls(tuple(range(n)))

    @classmethod
    def constant(cls, n: int, value: int) -> SelfMap:
        return cls((value,) * n)


def iterate(space: FiniteMetricSpace, T: SelfMap, x: int, k: int) -> int:
    """T^k x by k table lookups."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if T.n != space.n:
        raise ValueError("map and space sizes differ")
    for _ in range(k):
        x = T.image[x]
    return x


def perimeter(space: FiniteMetricSpace, x: int, y: int, z: int) -> float:
    d = space.dist
    return float(d[x, y] + d[y, z] + d[z, x])


# -- JSON instance format ---------------------------------------------------

def load_instance(obj: Mapping[str, Any], tol: float = DEFAULT_TOL) -> tuple[FiniteMetricSpace, SelfMap]:
    """Parse ``{"points", "distance", "map"}``; raises MetricValidationError on bad metrics."""
    try:
        points = [str(p) for p in obj["points"]]
        matrix = obj["distance"]
        mapping = obj["map"]
    except (KeyError, TypeError) as exc:
        raise InstanceFormatError(f"instance must have points, distance and map: {exc}") from None
    if not isinstance(mapping, Mapping):
        raise InstanceFormatError("map must be an object point -> point")
    space = validate_metric(points, matrix, tol)
    keys = {str(k) for k in mapping}
    missing = [p for p in points if p not in keys]
    extra = sorted(keys - set(points))
    if missing or extra or len(mapping) != len(points):
        raise InstanceFormatError(f"map must cover every point exactly once (missing={missing}, unknown={extra})")
    image = []
    for p in points:
        target = str(mapping[p])
        if target not in space._index:
            raise InstanceFormatError(f"map sends {p!r} to unknown point {target!r}")
        image.append(space.index(target))
    return space, SelfMap(tuple(image))


def instance_to_dict(space: FiniteMetricSpace, T: SelfMap) -> dict[str, Any]:
    return {
        "points": list(space.labels),
        "distance": [[_num(v) for v in row] for row in space.dist.tolist()],
        "map": {space.labels[i]: space.labels[t] for i, t in enumerate(T.image)},
    }


def _num(v: float) -> int | float:
    return int(v) if float(v).is_integer() else float(v)


# -- sampled real-interval systems -----------------------------------------

def remark4_map(x: float) -> float:
    """0 on [0,1), 1/4 at 1: discontinuous at 1."""
    return 0.25 if x == 1.0 else 0.0


MAP_FAMILIES: dict[str, Callable[[float], float]] = {"remark4": remark4_map}


class GridNotClosed(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SampledSystem:
    """Finite sample of an interval with a built-in map family; distance |a - b|.

    The grid must be closed under the map: every image is looked up (within
    ``tol``) among the sample points rather than projected.
    """

    points: tuple[float, ...]
    family: str
    tol: float = DEFAULT_TOL
    image: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or len(pts) < 1:
            raise ValueError("need a non-empty 1-d point list")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("sample points must be strictly increasing")
        try:
            rule = MAP_FAMILIES[self.family]
        except KeyError:
            raise ValueError(f"unknown map family {self.family!r}") from None
        lo, hi = pts[0], pts[-1]
        image = []
        for p in pts:
            t = rule(float(p))
            if not lo - self.tol <= t <= hi + self.tol:
                raise GridNotClosed(f"image {t!r} of {p!r} leaves the interval")
            k = int(np.searchsorted(pts, t))
            near = [j for j in (k - 1, k) if 0 <= j < len(pts) and abs(pts[j] - t) <= self.tol]
            if not near:
                raise GridNotClosed(f"image {t!r} of {p!r} is not a sample point")
            image.append(near[-1])
        object.__setattr__(self, "points", tuple(float(p) for p in pts))
        object.__setattr__(self, "image", tuple(image))

    @property
    def n(self) -> int:
        return len(self.points)

    @classmethod
    def uniform(cls, family: str, grid_size: int, extra: Sequence[float] = (), lo: float = 0.0,
                hi: float = 1.0, tol: float = DEFAULT_TOL) -> SampledSystem:
        """``grid_size`` equal subintervals of [lo, hi] plus ``extra`` points, deduplicated."""
        if grid_size < 1:
            raise ValueError("grid_size must be >= 1")
        pts = lo + (hi - lo) * np.arange(grid_size + 1) / grid_size
        pts = np.unique(np.concatenate([pts, np.asarray(extra, dtype=float)]))
        return cls(tuple(pts), family, tol)

    def to_finite(self) -> tuple[FiniteMetricSpace, SelfMap]:
        """The sample as a finite metric space (validation is O(n^3), so skipped)."""
        pts = np.asarray(self.points)
        d = np.abs(pts[:, None] - pts[None, :])
        d.setflags(write=False)
        space = object.__new__(FiniteMetricSpace)
        labels = tuple(repr(p) for p in self.points)
        object.__setattr__(space, "labels", labels)
        object.__setattr__(space, "dist", d)
        object.__setattr__(space, "tol", self.tol)
        object.__setattr__(space, "_index", {x: i for i, x in enumerate(labels)})
        return space, SelfMap(self.image)
