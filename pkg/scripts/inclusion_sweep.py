"""Sweep seeded random instances and tabulate class membership and inclusion slack.

    python scripts/inclusion_sweep.py --count 3000 --n-max 15
"""
from __future__ import annotations

import argparse
from collections import Counter

from fplab.classifiers import ALL_KINDS, ContractionKind as K, classify_all, constant_order_key as key
from fplab.dynamics import analyze
from fplab.generator import corpus_configs, random_instance


def main() -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--count", type=int, default=1200)
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=12)
    args = p.parse_args()

    members: Counter = Counter()
    vacuous: Counter = Counter()
    violations = Counter()
    no_p2 = 0
    for cfg in corpus_configs(args.count, args.n_min, args.n_max):
        space, T = random_instance(cfg)
        r = {x.kind: x for x in classify_all(space, T)}
        no_p2 += not analyze(space, T).period2_points
        for k in ALL_KINDS:
            members[k] += r[k].member and not r[k].vacuous
            vacuous[k] += r[k].vacuous
        violations["orbital<=banach"] += key(r[K.ORBITAL_TRIANGULAR]) > key(r[K.BANACH]) + 1e-9
        violations["strict<=perimeter"] += key(r[K.ORBITAL_TRIANGULAR_STRICT]) > key(r[K.PERIMETER_TRIANGLE]) + 1e-9
        violations["okannan<=2*kannan"] += key(r[K.ORBITAL_KANNAN]) > 2 * key(r[K.KANNAN]) + 1e-9
        violations["ochatterjea<=chatterjea"] += key(r[K.ORBITAL_CHATTERJEA]) > key(r[K.CHATTERJEA]) + 1e-9

    print(f"{args.count} instances, {no_p2} without period-2 points")
    print(f"{'class':<27} {'members':>8} {'vacuous':>8}")
    for k in ALL_KINDS:
        print(f"{k.value:<27} {members[k]:>8} {vacuous[k]:>8}")
    for name in ("orbital<=banach", "strict<=perimeter", "okannan<=2*kannan", "ochatterjea<=chatterjea"):
        print(f"inclusion {name:<26} violations: {violations[name]}")


if __name__ == "__main__":
    main()
