"""Picard iteration with a-priori error certificates.

The three orbital classes each give a geometric decay of some orbit quantity:

* orbital triangular: perimeters ``p_i <= alpha * p_{i-1}``, rate ``alpha``;
* orbital Kannan: displacements ``d_{n+1} <= lam * d_n`` with
  ``lam = beta / (2 - 2 beta)``;
* orbital Chatterjea: perimeters with rate ``mu = gamma / (1 - gamma)``.

Summing the tail of the orbit gives ``d(x_n, x*) <= rate**(n-1) / (1-rate) * q0``
where ``q0`` is ``p_0`` (perimeter classes) or ``d_0`` (Kannan).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .classifiers import THRESHOLDS, ContractionKind
from .metric_core import DEFAULT_TOL, FiniteMetricSpace, SampledSystem, SelfMap

K = ContractionKind
CERTIFIED_KINDS = (K.ORBITAL_TRIANGULAR, K.ORBITAL_CHATTERJEA, K.ORBITAL_KANNAN)


class StopReason(str, Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    PERIOD2_DETECTED = "period2_detected"


@dataclass(frozen=True)
class PicardTrace:
    """Orbit x_0, x_1, ... of a Picard run.

    ``steps`` is the index n at which the run stopped. On convergence the
    iterates run through x_{n+1} and d(x_n, x_{n+1}) <= eps; on period-2
    detection they run through x_{n+2} with x_{n+2} = x_n.
    """

    iterates: tuple[int, ...]
    d_seq: tuple[float, ...]
    p_seq: tuple[float, ...]
    stop_reason: StopReason
    steps: int

    @property
    def limit(self) -> int | None:
        return self.iterates[-1] if self.stop_reason is StopReason.CONVERGED else None


def _as_finite(system: FiniteMetricSpace | SampledSystem, T: SelfMap | None) -> tuple[FiniteMetricSpace, SelfMap]:
    if isinstance(system, SampledSystem):
        return system.to_finite()
    if T is None:
        raise ValueError("a map is required for a finite space")
    return system, T


def run_picard(space: FiniteMetricSpace | SampledSystem, T: SelfMap | None, start: int,
               eps: float = DEFAULT_TOL, max_iter: int = 10_000, tol: float = DEFAULT_TOL) -> PicardTrace:
    if not eps > 0:
        raise ValueError("eps must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    space, T = _as_finite(space, T)
    if not 0 <= start < space.n:
        raise ValueError(f"start index {start} out of range")
    D, t = space.dist, T.image
    xs = [start, t[start]]
    reason = StopReason.MAX_ITERATIONS
    n = 0
    while n < max_iter:
        if D[xs[n], xs[n + 1]] <= eps:
            reason = StopReason.CONVERGED
            break
        if len(xs) < n + 3:
            xs.append(t[xs[n + 1]])
        if D[xs[n], xs[n + 2]] <= tol:
            reason = StopReason.PERIOD2_DETECTED
            break
        n += 1
    d_seq = tuple(float(D[a, b]) for a, b in zip(xs, xs[1:]))
    p_seq = tuple(float(D[a, b] + D[b, c] + D[c, a]) for a, b, c in zip(xs, xs[1:], xs[2:]))
    return PicardTrace(tuple(xs), d_seq, p_seq, reason, n)


class ConstantAtOrAboveThreshold(ValueError):
    pass


def class_rate(kind: ContractionKind, constant: float) -> float:
    kind = ContractionKind.parse(kind)
    if kind is K.ORBITAL_TRIANGULAR:
        return constant
    if kind is K.ORBITAL_KANNAN:
        return constant / (2.0 - 2.0 * constant)
    if kind is K.ORBITAL_CHATTERJEA:
        return constant / (1.0 - constant)
    raise ValueError(f"no certificate for class {kind.value}")


@dataclass(frozen=True)
class ConvergenceCertificate:
    kind: ContractionKind
    constant: float
    rate: float
    initial: float

    @property
    def initial_name(self) -> str:
        return "d_0" if self.kind is K.ORBITAL_KANNAN else "p_0"

    def bound(self, n: int) -> float:
        """A-priori bound on d(x_n, x*)."""
        if self.initial == 0:
            return 0.0
        if self.rate == 0:
            return math.inf if n == 0 else (self.initial if n == 1 else 0.0)
        return self.rate ** (n - 1) / (1.0 - self.rate) * self.initial

    def n_required(self, eps: float) -> int:
        """Smallest n >= 1 with bound(n) <= eps."""
        if not eps > 0:
            raise ValueError("eps must be positive")
        if self.initial == 0:
            return 1
        if self.rate == 0:
            return 1 if self.initial <= eps else 2
        est = math.log(eps * (1.0 - self.rate) / self.initial) / math.log(self.rate) + 1.0
        n = max(1, math.ceil(est))
        # closed form is only a starting point; settle by direct evaluation
        while n > 1 and self.bound(n - 1) <= eps:
            n -= 1
        while self.bound(n) > eps:
            n += 1
        return n

    def to_dict(self) -> dict[str, Any]:
        return {
            "class": self.kind.value,
            "constant": self.constant,
            "rate": self.rate,
            "initial_quantity": self.initial_name,
            "initial": self.initial,
        }


def make_certificate(kind: ContractionKind | str, constant: float, initial: float) -> ConvergenceCertificate:
    kind = ContractionKind.parse(kind)
    if kind not in CERTIFIED_KINDS:
        raise ValueError(f"no certificate for class {kind.value}")
    if constant < 0 or math.isnan(constant):
        raise ValueError("constant must be non-negative")
    if not constant < THRESHOLDS[kind]:
        raise ConstantAtOrAboveThreshold(f"{kind.value} constant {constant} >= {THRESHOLDS[kind]}")
    if initial < 0:
        raise ValueError("initial quantity must be non-negative")
    return ConvergenceCertificate(kind, float(constant), class_rate(kind, constant), float(initial))


def certificate_for_trace(kind: ContractionKind | str, constant: float, trace: PicardTrace) -> ConvergenceCertificate:
    """Certificate seeded with the trace's own p_0 (or d_0 for Kannan)."""
    kind = ContractionKind.parse(kind)
    if kind is K.ORBITAL_KANNAN:
        q0 = trace.d_seq[0]
    else:
        q0 = trace.p_seq[0] if trace.p_seq else 0.0
    return make_certificate(kind, constant, q0)


class InvariantViolation(AssertionError):
    def __init__(self, check: TraceCheck):
        self.check = check
        super().__init__(f"{check.name} violated at index {check.index}: {check.lhs!r} > {check.rhs!r}")


@dataclass(frozen=True)
class TraceCheck:
    name: str
    index: int
    lhs: float
    rhs: float
    ok: bool = field(default=True)


def check_trace(trace: PicardTrace, cert: ConvergenceCertificate, space: FiniteMetricSpace,
                tol: float = DEFAULT_TOL, strict: bool = False) -> list[TraceCheck]:
    """Per-step contraction inequalities and the distance-to-limit bound.

    Steps taken from an already fixed iterate are skipped. With
    ``strict=True`` the first failing check raises :class:`InvariantViolation`.
    """
    checks: list[TraceCheck] = []
    xs, D = trace.iterates, space.dist
    if cert.kind is K.ORBITAL_KANNAN:
        for i in range(len(trace.d_seq) - 1):
            if xs[i] == xs[i + 1]:
                continue
            lhs, rhs = trace.d_seq[i + 1], cert.rate * trace.d_seq[i]
            checks.append(TraceCheck("d_{n+1} <= lam*d_n", i + 1, lhs, rhs, lhs <= rhs + tol))
    else:
        name = "p_i <= alpha*p_{i-1}" if cert.kind is K.ORBITAL_TRIANGULAR else "p_i <= mu*p_{i-1}"
        for i in range(1, len(trace.p_seq)):
            if xs[i - 1] == xs[i]:
                continue
            lhs, rhs = trace.p_seq[i], cert.rate * trace.p_seq[i - 1]
            checks.append(TraceCheck(name, i, lhs, rhs, lhs <= rhs + tol))
    limit = trace.limit
    if limit is not None:
        for i, x in enumerate(xs):
            lhs, rhs = float(D[x, limit]), cert.bound(i)
            checks.append(TraceCheck("d(x_n,x*) <= bound(n)", i, lhs, rhs, lhs <= rhs + tol))
    if strict:
        for c in checks:
            if not c.ok:
                raise InvariantViolation(c)
    return checks
