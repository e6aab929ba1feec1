"""``fplab`` command line.

Exit codes: 0 success, 1 domain verdict failure (invalid metric, failed
assertion, violated hypothesis), 2 usage or IO error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from typing import Any, Sequence

from . import __version__
from . import classifiers as C
from .corpus import parse_override, run_corpus
from .dynamics import analyze
from .generator import MAP_STYLES, GeneratorConfig, random_instance
from .metric_core import (
    InstanceFormatError,
    MetricValidationError,
    SampledSystem,
    default_tol,
    instance_to_dict,
    load_instance,
)
from .picard import (
    CERTIFIED_KINDS,
    ConstantAtOrAboveThreshold,
    certificate_for_trace,
    check_trace,
    run_picard,
)

MAX_N_PAIRS = 2000
MAX_N_TRIPLES = 300


class UsageError(Exception):
    pass


def _round(v: Any) -> Any:
    """12 significant digits for every float in a JSON payload."""
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            return str(v)
        r = float(f"{v:.12g}")
        return int(r) if r.is_integer() and abs(r) < 2**53 else r
    if isinstance(v, dict):
        return {k: _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_round(x) for x in v]
    return v


def _emit(obj: Any) -> None:
    sys.stdout.write(json.dumps(_round(obj), indent=2) + "\n")


def _read(path: str) -> bytes:
    try:
        if path == "-":
            return sys.stdin.buffer.read()
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _parse(raw: bytes) -> dict[str, Any]:
    try:
        obj = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise UsageError("instance JSON must be an object")
    return obj


def _load(args: argparse.Namespace):
    raw = _read(args.file)
    obj = _parse(raw)
    try:
        space, T = load_instance(obj, args.tol)
    except InstanceFormatError as exc:
        raise UsageError(str(exc)) from None
    return raw, space, T


def _report(args: argparse.Namespace, command: str, raw: bytes | None, result: Any,
            started: float) -> dict[str, Any]:
    rep: dict[str, Any] = {"tool": "fplab", "version": __version__, "command": command}
    if raw is not None:
        rep["input_digest"] = "sha256:" + hashlib.sha256(raw).hexdigest()
    rep["tol"] = args.tol
    rep["result"] = result
    if getattr(args, "timing", False):
        rep["elapsed_s"] = time.perf_counter() - started
    return rep


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _invalid(args: argparse.Namespace, exc: MetricValidationError) -> int:
    if args.json:
        _emit({"valid": False, "violations": [str(v) for v in exc.violations]})
    else:
        print("invalid")
        for v in exc.violations:
            print(f"  {v}")
    return 1


def cmd_validate(args: argparse.Namespace) -> int:
    obj = _parse(_read(args.file))
    try:
        load_instance(obj, args.tol)
    except MetricValidationError as exc:
        return _invalid(args, exc)
    except InstanceFormatError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        _emit({"valid": True, "n": len(obj["points"])})
    else:
        print("valid")
    return 0


def _kinds(text: str | None) -> list[C.ContractionKind]:
    if not text:
        return list(C.ALL_KINDS)
    try:
        return [C.ContractionKind.parse(k) for k in text.split(",") if k.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_caps(n: int, kinds: Sequence[C.ContractionKind]) -> None:
    if n > MAX_N_PAIRS:
        raise UsageError(f"n = {n} exceeds the pair-class cap {MAX_N_PAIRS}")
    if n > MAX_N_TRIPLES and any(k in C.TRIPLE_KINDS for k in kinds):
        raise UsageError(f"n = {n} exceeds the triple-class cap {MAX_N_TRIPLES}; pass --classes")


def cmd_classify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    try:
        raw, space, T = _load(args)
    except MetricValidationError as exc:
        return _invalid(args, exc)
    kinds = _kinds(args.classes)
    _check_caps(space.n, kinds)
    reports = C.classify_all(space, T, args.tol, kinds, workers=args.workers)
    dyn = analyze(space, T)
    if args.json:
        result = {
            "classes": [r.to_dict(space.labels) for r in reports],
            "dynamics": dyn.to_dict(space.labels),
        }
        _emit(_report(args, "classify", raw, result, started))
        return 0
    print(f"{'class':<27} {'member':<7} {'constant':<14} {'threshold':<10} witness")
    for r in reports:
        d = r.to_dict(space.labels)
        const = "vacuous" if r.vacuous else _fmt(d["minimal_constant"])
        wit = "-" if d["witness"] is None else ",".join(d["witness"].values())
        print(f"{r.kind.value:<27} {str(r.member):<7} {const:<14} {_fmt(r.threshold):<10} {wit}")
    dd = dyn.to_dict(space.labels)
    print(f"fixed points: {dd['fixed_points']}  period-2 points: {dd['period2_points']}")
    return 0


def cmd_fixed_points(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    try:
        raw, space, T = _load(args)
    except MetricValidationError as exc:
        return _invalid(args, exc)
    dyn = analyze(space, T).to_dict(space.labels)
    if args.json:
        _emit(_report(args, "fixed-points", raw, {"dynamics": dyn}, started))
    else:
        print(f"fixed points: {dyn['fixed_points']}")
        print(f"period-2 points: {dyn['period2_points']}")
        for p, hit in dyn["eventually_fixed"].items():
            print(f"  {p}: cyclic" if hit == "cyclic" else f"  {p}: -> {hit['limit']} in {hit['steps']} steps")
    return 0


def _pick_class(args: argparse.Namespace, space, T) -> tuple[C.ContractionKind, float] | None:
    if args.cls == "none":
        return None
    if args.cls == "auto":
        if args.constant is not None:
            raise UsageError("--constant needs an explicit --class")
        reports = {r.kind: r for r in C.classify_all(space, T, args.tol, CERTIFIED_KINDS)}
        for kind in CERTIFIED_KINDS:
            r = reports[kind]
            if r.member and not r.vacuous:
                return kind, r.minimal_constant
        return None
    try:
        kind = C.ContractionKind.parse(args.cls)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if kind not in CERTIFIED_KINDS:
        raise UsageError(f"certificates exist only for {[k.value for k in CERTIFIED_KINDS]}")
    if args.constant is not None:
        return kind, args.constant
    r = C.minimal_constant(kind, space, T, args.tol)
    if r.vacuous:
        raise UsageError(f"{kind.value} is vacuous on this instance; no certificate")
    return kind, r.minimal_constant


def cmd_picard(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    try:
        raw, space, T = _load(args)
    except MetricValidationError as exc:
        return _invalid(args, exc)
    if not args.eps > 0 or args.max_iter < 1:
        raise UsageError("need --eps > 0 and --max-iter >= 1")
    try:
        start = space.index(args.start)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    choice = _pick_class(args, space, T)
    trace = run_picard(space, T, start, args.eps, args.max_iter, args.tol)
    lab = space.labels
    result: dict[str, Any] = {
        "iterates": [lab[i] for i in trace.iterates],
        "stop": trace.stop_reason.value,
        "steps": trace.steps,
        "limit": None if trace.limit is None else lab[trace.limit],
        "d_seq": list(trace.d_seq),
        "p_seq": list(trace.p_seq),
    }
    code = 0
    if choice is not None:
        kind, const = choice
        try:
            cert = certificate_for_trace(kind, const, trace)
        except ConstantAtOrAboveThreshold as exc:
            raise UsageError(str(exc)) from None
        checks = check_trace(trace, cert, space, args.tol)
        failed = [c for c in checks if not c.ok]
        result["certificate"] = cert.to_dict()
        result["certificate"]["n_required(eps)"] = cert.n_required(args.eps)
        result["bound_checks"] = "pass" if not failed else "fail"
        result["failed_checks"] = [
            {"check": c.name, "index": c.index, "lhs": c.lhs, "rhs": c.rhs} for c in failed
        ]
        if failed:
            code = 1
    else:
        result["bound_checks"] = "skipped"
    message = None
    if trace.stop_reason.value == "period2_detected":
        message = (f"period-2 orbit {lab[trace.iterates[-3]]} <-> {lab[trace.iterates[-2]]}: "
                   "the fixed-point theorems assume no periodic points of prime period 2")
        code = 1
    if args.json:
        if message:
            result["message"] = message
        _emit(_report(args, "picard", raw, result, started))
    else:
        print(f"iterates: {' -> '.join(result['iterates'])}")
        print(f"stop: {result['stop']} after {trace.steps} steps")
        if "certificate" in result:
            cd = result["certificate"]
            print(f"certificate: {cd['class']} constant {_fmt(cd['constant'])} rate {_fmt(cd['rate'])} "
                  f"{cd['initial_quantity']} = {_fmt(cd['initial'])}; bound checks {result['bound_checks']}")
        if message:
            print(message, file=sys.stderr)
    return code


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        cfg = GeneratorConfig(n=args.n, seed=args.seed, distance_range=(args.lo, args.hi),
                              map_style=args.style)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    space, T = random_instance(cfg)
    obj = instance_to_dict(space, T)
    # full precision: rounding generated distances could break the triangle inequality
    sys.stdout.write(json.dumps(obj) + "\n")
    return 0


def cmd_paper_examples(args: argparse.Namespace) -> int:
    try:
        overrides = dict(parse_override(o) for o in args.override or [])
        items = run_corpus(overrides)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    failed = [a for a in items if not a.passed]
    if args.json:
        _emit({"assertions": [a.to_dict() for a in items], "passed": len(items) - len(failed),
               "total": len(items)})
    else:
        print(f"{'assertion':<48} {'expected':<16} {'computed':<22} ok")
        for a in items:
            d = a.to_dict()
            print(f"{a.name:<48} {_fmt(d['expected']):<16} {_fmt(_round(d['computed'])):<22} "
                  f"{'yes' if a.passed else 'NO'}")
        print(f"{len(items) - len(failed)}/{len(items)} corpus assertions pass")
    if failed:
        print(f"FAILED: {failed[0].name}", file=sys.stderr)
        return 1
    return 0


def cmd_grid_check(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    if args.grid_size < 1:
        raise UsageError("--grid-size must be >= 1")
    extra = [0.25] if args.family == "remark4" else []
    try:
        system = SampledSystem.uniform(args.family, args.grid_size, extra=extra, tol=args.tol)
        kind = C.ContractionKind.parse(args.cls)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _check_caps(system.n, [kind])
    res = C.grid_falsify(system, kind, args.alpha, args.tol, workers=args.workers)
    if args.json:
        _emit(_report(args, "grid-check", None, {"grid_points": system.n, **res.to_dict()}, started))
    else:
        d = res.to_dict()
        print(f"{kind.value} on {system.n} sample points: max ratio {_fmt(d['max_ratio'])} "
              f"at {d['witness']} vs constant {_fmt(args.alpha)} -> {d['verdict']}")
        print(f"note: {res.note}")
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="comparison tolerance (default 1e-9 or $FPLAB_TOL)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--timing", action="store_true", help="include elapsed time in JSON reports")

    p = argparse.ArgumentParser(prog="fplab", description="Contraction classes and fixed points on finite metric spaces.")
    p.add_argument("--version", action="version", version=f"fplab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check the metric axioms of an instance")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("classify", parents=[common], help="minimal constants for the contraction classes")
    s.add_argument("file")
    s.add_argument("--classes", help="comma-separated class names (default: all eight)")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("fixed-points", parents=[common], help="fixed points, period-2 points and orbit limits")
    s.add_argument("file")
    s.set_defaults(func=cmd_fixed_points)

    s = sub.add_parser("picard", parents=[common], help="Picard iteration with certified bounds")
    s.add_argument("file")
    s.add_argument("--start", required=True, help="start point label")
    s.add_argument("--eps", type=float, default=1e-9)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--class", dest="cls", default="auto",
                   help="orbital class for the certificate, 'auto' (default) or 'none'")
    s.add_argument("--constant", type=float, default=None, help="class constant (default: the minimal one)")
    s.set_defaults(func=cmd_picard)

    s = sub.add_parser("generate", parents=[common], help="emit a seeded random instance")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--style", choices=MAP_STYLES, default="uniform")
    s.add_argument("--lo", type=float, default=1.0)
    s.add_argument("--hi", type=float, default=10.0)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("paper-examples", parents=[common], help="run the embedded worked-example corpus")
    s.add_argument("--override", action="append", metavar="NAME=VALUE",
                   help="replace an expected value (harness self-test)")
    s.set_defaults(func=cmd_paper_examples)

    s = sub.add_parser("grid-check", parents=[common], help="falsification check on a sampled interval map")
    s.add_argument("--family", default="remark4", choices=["remark4"])
    s.add_argument("--grid-size", type=int, default=1000)
    s.add_argument("--alpha", type=float, default=2 / 3)
    s.add_argument("--class", dest="cls", default="orbital_triangular")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_grid_check)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.tol is None:
            args.tol = default_tol()
        if args.tol < 0:
            raise UsageError("--tol must be non-negative")
        return args.func(args)
    except UsageError as exc:
        print(f"fplab: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"fplab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
