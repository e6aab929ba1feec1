"""Exact minimal contraction constants over finite spaces.

For each class the defining inequality is ``lhs <= C * rhs`` over a set of
admissible tuples. The minimal constant is the maximum of ``lhs / rhs``.
Pair classes are evaluated row-block by row-block as dense numpy arrays, so
a scan can be split across threads; the reduction uses a total order on
``(ratio, lhs, index tuple)`` and is independent of the split.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np

from .metric_core import DEFAULT_TOL, FiniteMetricSpace, SampledSystem, SelfMap


class ContractionKind(str, Enum):
    BANACH = "banach"
    KANNAN = "kannan"
    CHATTERJEA = "chatterjea"
    PERIMETER_TRIANGLE = "perimeter_triangle"
    ORBITAL_TRIANGULAR = "orbital_triangular"
    ORBITAL_TRIANGULAR_STRICT = "orbital_triangular_strict"
    ORBITAL_KANNAN = "orbital_kannan"
    ORBITAL_CHATTERJEA = "orbital_chatterjea"

    @classmethod
    def parse(cls, name: str | ContractionKind) -> ContractionKind:
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown contraction class {name!r}; choose from {[k.value for k in cls]}") from None


K = ContractionKind

THRESHOLDS: dict[ContractionKind, float] = {
    K.BANACH: 1.0,
    K.KANNAN: 0.5,
    K.CHATTERJEA: 0.5,
    K.PERIMETER_TRIANGLE: 1.0,
    K.ORBITAL_TRIANGULAR: 1.0,
    K.ORBITAL_TRIANGULAR_STRICT: 1.0,
    K.ORBITAL_KANNAN: 2.0 / 3.0,
    K.ORBITAL_CHATTERJEA: 0.5,
}

ALL_KINDS: tuple[ContractionKind, ...] = tuple(ContractionKind)
TRIPLE_KINDS = frozenset({K.PERIMETER_TRIANGLE})


class InadmissibleTuple(ValueError):
    pass


@dataclass(frozen=True)
class ClassificationReport:
    kind: ContractionKind
    member: bool
    minimal_constant: float | None  # None when vacuous, math.inf when infinite
    witness: tuple[int, ...] | None
    admissible_count: int
    threshold: float
    witness_lhs: float | None = None
    witness_rhs: float | None = None

    @property
    def vacuous(self) -> bool:
        return self.admissible_count == 0

    @property
    def infinite(self) -> bool:
        return self.minimal_constant == math.inf

    def to_dict(self, labels: Sequence[str] | None = None) -> dict[str, Any]:
        if self.witness is None:
            witness = None
        else:
            names = [labels[i] for i in self.witness] if labels is not None else list(self.witness)
            witness = dict(zip("xyz", names))
        if self.minimal_constant is None:
            const: Any = None
        elif self.infinite:
            const = "infinite"
        else:
            const = self.minimal_constant
        return {
            "class": self.kind.value,
            "member": self.member,
            "threshold": self.threshold,
            "minimal_constant": const,
            "vacuous": self.vacuous,
            "witness": witness,
            "admissible_count": self.admissible_count,
        }


class _Ctx:
    """Precomputed arrays shared by all classes for one (space, map)."""

    def __init__(self, space: FiniteMetricSpace, T: SelfMap):
        if T.n != space.n:
            raise ValueError("map and space sizes differ")
        self.n = space.n
        self.D = space.dist
        self.T = T.array
        self.T2 = self.T[self.T]
        idx = np.arange(self.n)
        self.disp = self.D[idx, self.T]  # d(x, Tx)
        self.DTT = self.D[np.ix_(self.T, self.T)]  # d(Tx, Ty)


def _pair_block(kind: ContractionKind, c: _Ctx, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """lhs, rhs and admissibility mask for x in ``rows`` and all y."""
    D, T, T2 = c.D, c.T, c.T2
    n = c.n
    x = rows[:, None]
    y = np.arange(n)[None, :]
    Tx = T[rows][:, None]
    T2x = T2[rows][:, None]
    Ty = T[None, :]
    neq = x != y
    if kind is K.BANACH:
        return c.DTT[rows], D[rows], neq
    if kind is K.KANNAN:
        return c.DTT[rows], c.disp[rows][:, None] + c.disp[None, :], neq
    if kind is K.CHATTERJEA:
        return c.DTT[rows], D[x, Ty] + D[y, Tx], neq
    # orbital left side: d(Tx,T^2x) + d(T^2x,Ty) + d(Ty,Tx)
    lhs = c.disp[T[rows]][:, None] + D[T2x, Ty] + D[Ty, Tx]
    if kind in (K.ORBITAL_TRIANGULAR, K.ORBITAL_TRIANGULAR_STRICT):
        rhs = c.disp[rows][:, None] + D[Tx, y] + D[y, x]
        mask = neq & (y != Tx)
        if kind is K.ORBITAL_TRIANGULAR_STRICT:
            mask &= x != Tx
        return lhs, rhs, mask
    if kind is K.ORBITAL_KANNAN:
        rhs = c.disp[rows][:, None] + c.disp[None, :] + c.disp[T[rows]][:, None]
        return lhs, rhs, neq & (y != Tx) & (x != Tx)
    if kind is K.ORBITAL_CHATTERJEA:
        rhs = D[x, Ty] + D[y, Tx] + D[x, T2x] + D[y, T2x] + D[Tx, Ty]
        return lhs, rhs, neq & (y != Tx)
    raise ValueError(f"{kind} is not a pair class")


def _triple_block(c: _Ctx, i: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unordered triples i < j < k for fixed i, laid out over (j, k)."""
    D, DTT, n = c.D, c.DTT, c.n
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    lhs = DTT[i][:, None] + DTT + DTT[i][None, :]
    rhs = D[i][:, None] + D + D[i][None, :]
    mask = (j > i) & (k > j)
    return lhs, rhs, mask


# best candidate: (ratio, lhs, index tuple); larger ratio wins, then larger
# lhs, then the lexicographically smallest index tuple
_Best = tuple[float, float, tuple[int, ...], float]


def _better(a: _Best | None, b: _Best | None) -> _Best | None:
    if a is None:
        return b
    if b is None:
        return a
    if (a[0], a[1]) != (b[0], b[1]):
        return a if (a[0], a[1]) > (b[0], b[1]) else b
    return a if a[2] <= b[2] else b


def _reduce_block(lhs: np.ndarray, rhs: np.ndarray, mask: np.ndarray, tol: float,
                  index_of: Any) -> tuple[int, _Best | None]:
    count = int(mask.sum())
    if count == 0:
        return 0, None
    skip = (lhs <= tol) & (rhs <= tol)
    inf = (rhs <= tol) & (lhs > tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(inf, np.inf, np.where(skip, 0.0, lhs / np.where(rhs > tol, rhs, 1.0)))
    ratio = np.where(mask, ratio, -np.inf)
    key_lhs = np.where(skip, 0.0, lhs)
    top = ratio.max()
    cand = ratio == top
    best_lhs = key_lhs[cand].max()
    pos = int(np.flatnonzero(cand & (key_lhs == best_lhs))[0])  # row-major => lexicographic
    flat = np.unravel_index(pos, ratio.shape)
    return count, (float(top), float(best_lhs), index_of(*flat), float(rhs[flat]))


def _blocks(kind: ContractionKind, n: int, block: int) -> list[np.ndarray | int]:
    if kind in TRIPLE_KINDS:
        return list(range(max(n - 2, 0)))
    return [np.arange(s, min(s + block, n)) for s in range(0, n, block)]


def _scan(kind: ContractionKind, c: _Ctx, tol: float, workers: int,
          block: int | None) -> tuple[int, _Best | None]:
    if block is None:
        block = 256 if workers <= 1 else max(1, math.ceil(c.n / (4 * workers)))

    def work(b: Any) -> tuple[int, _Best | None]:
        if kind in TRIPLE_KINDS:
            lhs, rhs, mask = _triple_block(c, b)
            return _reduce_block(lhs, rhs, mask, tol, lambda j, k: (b, int(j), int(k)))
        lhs, rhs, mask = _pair_block(kind, c, b)
        return _reduce_block(lhs, rhs, mask, tol, lambda r, y: (int(b[r]), int(y)))

    blocks = _blocks(kind, c.n, block)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    total, best = 0, None
    for cnt, cand in parts:
        total += cnt
        best = _better(best, cand)
    return total, best


def is_admissible(kind: ContractionKind, T: SelfMap, tup: Sequence[int]) -> bool:
    kind = ContractionKind.parse(kind)
    if kind in TRIPLE_KINDS:
        return len(tup) == 3 and len(set(tup)) == 3
    if len(tup) != 2:
        return False
    x, y = tup
    Tx = T.image[x]
    if kind in (K.BANACH, K.KANNAN, K.CHATTERJEA):
        return x != y
    if kind in (K.ORBITAL_TRIANGULAR, K.ORBITAL_CHATTERJEA):
        return x != y and y != Tx
    return x != y and y != Tx and x != Tx


def lhs_rhs(kind: ContractionKind | str, space: FiniteMetricSpace, T: SelfMap,
            tup: Sequence[int]) -> tuple[float, float]:
    """Both sides of the class inequality at one admissible tuple."""
    kind = ContractionKind.parse(kind)
    tup = tuple(int(i) for i in tup)
    if not is_admissible(kind, T, tup):
        raise InadmissibleTuple(f"{tup} is not admissible for {kind.value}")
    d = space.d
    t = T.image
    if kind is K.PERIMETER_TRIANGLE:
        x, y, z = tup
        return (d(t[x], t[y]) + d(t[y], t[z]) + d(t[z], t[x]), d(x, y) + d(y, z) + d(z, x))
    x, y = tup
    Tx, Ty = t[x], t[y]
    T2x = t[Tx]
    if kind is K.BANACH:
        return d(Tx, Ty), d(x, y)
    if kind is K.KANNAN:
        return d(Tx, Ty), d(x, Tx) + d(y, Ty)
    if kind is K.CHATTERJEA:
        return d(Tx, Ty), d(x, Ty) + d(y, Tx)
    lhs = d(Tx, T2x) + d(T2x, Ty) + d(Ty, Tx)
    if kind is K.ORBITAL_KANNAN:
        return lhs, d(x, Tx) + d(y, Ty) + d(Tx, T2x)
    if kind is K.ORBITAL_CHATTERJEA:
        return lhs, d(x, Ty) + d(y, Tx) + d(x, T2x) + d(y, T2x) + d(Tx, Ty)
    return lhs, d(x, Tx) + d(Tx, y) + d(y, x)


def minimal_constant(kind: ContractionKind | str, space: FiniteMetricSpace, T: SelfMap,
                     tol: float = DEFAULT_TOL, workers: int = 1, block: int | None = None,
                     _ctx: _Ctx | None = None) -> ClassificationReport:
    """Supremum of lhs/rhs over admissible tuples, with its witness.

    Tuples with both sides within ``tol`` of zero are ignored; a tuple with
    ``rhs <= tol < lhs`` makes the constant infinite.
    """
    kind = ContractionKind.parse(kind)
    c = _ctx if _ctx is not None else _Ctx(space, T)
    count, best = _scan(kind, c, tol, workers, block)
    threshold = THRESHOLDS[kind]
    if count == 0 or best is None:
        return ClassificationReport(kind, True, None, None, 0, threshold)
    const = best[0]
    return ClassificationReport(
        kind=kind,
        member=const < threshold - tol,
        minimal_constant=const,
        witness=best[2],
        admissible_count=count,
        threshold=threshold,
        witness_lhs=best[1],
        witness_rhs=best[3],
    )


def classify_all(space: FiniteMetricSpace, T: SelfMap, tol: float = DEFAULT_TOL,
                 kinds: Iterable[ContractionKind | str] | None = None,
                 workers: int = 1, block: int | None = None) -> list[ClassificationReport]:
    wanted = {ContractionKind.parse(k) for k in kinds} if kinds is not None else set(ALL_KINDS)
    c = _Ctx(space, T)
    return [minimal_constant(k, space, T, tol, workers, block, _ctx=c) for k in ALL_KINDS if k in wanted]


def constant_order_key(report: ClassificationReport) -> float:
    """Vacuous at the bottom, Infinite at the top."""
    return -math.inf if report.minimal_constant is None else report.minimal_constant


@dataclass(frozen=True)
class GridCheck:
    kind: ContractionKind
    constant: float
    max_ratio: float | None
    witness: tuple[float, ...] | None
    admissible_count: int
    passed: bool
    note: str = "a pass on a finite sample is evidence, not a proof, for the full interval"

    def to_dict(self) -> dict[str, Any]:
        ratio: Any = self.max_ratio
        if ratio == math.inf:
            ratio = "infinite"
        return {
            "class": self.kind.value,
            "constant": self.constant,
            "max_ratio": ratio,
            "witness": None if self.witness is None else dict(zip("xyz", self.witness)),
            "admissible_count": self.admissible_count,
            "verdict": "pass" if self.passed else "violation",
            "note": self.note,
        }


def grid_falsify(system: SampledSystem, kind: ContractionKind | str, constant: float,
                 tol: float = DEFAULT_TOL, workers: int = 1) -> GridCheck:
    """Max lhs/rhs over admissible sample tuples, compared against ``constant``."""
    kind = ContractionKind.parse(kind)
    space, T = system.to_finite()
    rep = minimal_constant(kind, space, T, tol, workers)
    if rep.witness is None:
        return GridCheck(kind, constant, None, None, 0, True)
    wit = tuple(system.points[i] for i in rep.witness)
    passed = rep.minimal_constant <= constant + tol
    return GridCheck(kind, constant, rep.minimal_constant, wit, rep.admissible_count, passed)
