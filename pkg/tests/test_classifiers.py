import math

import pytest
from hypothesis import given, settings

from fplab.classifiers import (
    ALL_KINDS,
    THRESHOLDS,
    ContractionKind as K,
    InadmissibleTuple,
    classify_all,
    constant_order_key,
    grid_falsify,
    lhs_rhs,
    minimal_constant,
)
from fplab.corpus import CHATTERJEA4_TABLE, remark4_system
from fplab.metric_core import SelfMap, validate_metric

from conftest import instances, oracle_constant


def _idx(space, *names):
    return tuple(space.index(x) for x in names)


def test_lhs_rhs_paper_values(fig1, ch4):
    space, T = fig1
    assert lhs_rhs(K.ORBITAL_KANNAN, space, T, _idx(space, "A", "B")) == (2, 4)
    assert lhs_rhs(K.KANNAN, space, T, _idx(space, "B", "D")) == (2, 0)
    space, T = ch4
    assert lhs_rhs(K.ORBITAL_CHATTERJEA, space, T, (0, 3)) == (4, 10)
    assert lhs_rhs(K.ORBITAL_CHATTERJEA, space, T, (0, 1))[0] == 0


def test_chatterjea_table_against_oracle(ch4):
    # brute-force evaluation of both sides; R(0,1) comes out as 2
    from conftest import oracle_sides

    space, T = ch4
    d, t = space.dist.tolist(), list(T.image)
    for tup, (L, R) in CHATTERJEA4_TABLE.items():
        assert oracle_sides("orbital_chatterjea", d, t, tup) == (L, R)
        assert lhs_rhs(K.ORBITAL_CHATTERJEA, space, T, tup) == (L, R)


def test_inadmissible_tuple_rejected(ch4):
    space, T = ch4
    with pytest.raises(InadmissibleTuple):
        lhs_rhs(K.ORBITAL_CHATTERJEA, space, T, (1, 0))  # y == Tx
    with pytest.raises(InadmissibleTuple):
        lhs_rhs(K.BANACH, space, T, (2, 2))
    with pytest.raises(InadmissibleTuple):
        lhs_rhs(K.ORBITAL_KANNAN, space, T, (0, 1))  # x == Tx


def test_orbital_chatterjea_example(ch4):
    space, T = ch4
    r = minimal_constant(K.ORBITAL_CHATTERJEA, space, T)
    assert r.minimal_constant == pytest.approx(0.4, abs=1e-12)
    assert r.member and r.witness == (0, 3) and r.admissible_count == 9
    assert r.to_dict(space.labels) == {
        "class": "orbital_chatterjea", "member": True, "threshold": 0.5, "minimal_constant": 0.4,
        "vacuous": False, "witness": {"x": "0", "y": "3"}, "admissible_count": 9,
    }


def test_classical_chatterjea_fails(ch4):
    space, T = ch4
    r = minimal_constant(K.CHATTERJEA, space, T)
    assert not r.member and r.witness == (2, 3)
    assert r.minimal_constant == pytest.approx(2 / 3, abs=1e-12)


def test_fig1_banach_kannan(fig1):
    space, T = fig1
    b = minimal_constant(K.BANACH, space, T)
    assert b.minimal_constant == 1 and not b.member and b.witness == _idx(space, "B", "D")
    k = minimal_constant(K.KANNAN, space, T)
    assert k.infinite and not k.member and k.witness == _idx(space, "B", "D")
    assert k.to_dict(space.labels)["minimal_constant"] == "infinite"
    ok = minimal_constant(K.ORBITAL_KANNAN, space, T)
    assert ok.member and ok.minimal_constant == pytest.approx(0.5, abs=1e-12)


def test_constant_map_is_banach_zero(fig1):
    space, _ = fig1
    r = minimal_constant(K.BANACH, space, SelfMap.constant(space.n, 2))
    assert r.minimal_constant == 0 and r.member


def test_classify_all_order_and_fig1(fig1):
    space, T = fig1
    reps = classify_all(space, T)
    assert [r.kind for r in reps] == list(ALL_KINDS)
    by = {r.kind: r for r in reps}
    assert by[K.ORBITAL_KANNAN].member
    assert not by[K.KANNAN].member and not by[K.BANACH].member


def test_identity_strict_is_vacuous(ident):
    space, T = ident
    r = minimal_constant(K.ORBITAL_TRIANGULAR_STRICT, space, T)
    assert r.vacuous and r.member and r.witness is None and r.minimal_constant is None


def test_swap_orbital_is_vacuous(swap):
    space, T = swap
    r = minimal_constant(K.ORBITAL_TRIANGULAR, space, T)
    assert r.vacuous and r.member


def test_membership_is_strict_at_threshold():
    # d(Tx,Ty) = d(x,y) on an isometry: Banach constant exactly 1
    space = validate_metric("abc", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    r = minimal_constant(K.BANACH, space, SelfMap((2, 1, 0)))
    assert r.minimal_constant == 1 and not r.member


@settings(max_examples=300)
@given(instances)
def test_matches_brute_force_oracle(inst):
    space, T = inst
    for r in classify_all(space, T):
        const, count = oracle_constant(r.kind.value, space, T)
        assert r.admissible_count == count
        if const is None:
            assert r.vacuous
        elif math.isinf(const):
            assert r.infinite
        else:
            assert r.minimal_constant == pytest.approx(const, rel=1e-12, abs=1e-12)
        if r.witness is not None and not r.infinite and r.minimal_constant > 0:
            lhs, rhs = lhs_rhs(r.kind, space, T, r.witness)
            assert lhs / rhs == pytest.approx(r.minimal_constant, rel=1e-12)
        assert r.member == (r.vacuous or r.minimal_constant < THRESHOLDS[r.kind] - 1e-9)


@given(instances)
def test_sides_non_negative(inst):
    from conftest import oracle_tuples

    space, T = inst
    for kind in ALL_KINDS:
        for tup in oracle_tuples(kind.value, space.n, list(T.image)):
            lhs, rhs = lhs_rhs(kind, space, T, tup)
            assert lhs >= 0 and rhs >= 0


def _le(a, b, tol=1e-9):
    return constant_order_key(a) <= constant_order_key(b) + tol


@settings(max_examples=300)
@given(instances)
def test_inclusions(inst):
    space, T = inst
    r = {x.kind: x for x in classify_all(space, T)}
    assert _le(r[K.ORBITAL_TRIANGULAR], r[K.BANACH])
    assert _le(r[K.ORBITAL_TRIANGULAR_STRICT], r[K.PERIMETER_TRIANGLE])
    kan = constant_order_key(r[K.KANNAN])
    assert constant_order_key(r[K.ORBITAL_KANNAN]) <= 2 * kan + 1e-9
    assert _le(r[K.ORBITAL_CHATTERJEA], r[K.CHATTERJEA])


@given(instances)
def test_parallel_matches_serial(inst):
    space, T = inst
    serial = classify_all(space, T)
    assert classify_all(space, T, workers=3, block=1) == serial
    assert classify_all(space, T, block=2) == serial


def test_parallel_on_larger_instance():
    from fplab.generator import GeneratorConfig, random_instance

    space, T = random_instance(GeneratorConfig(n=120, seed=5, map_style="contractive-biased"))
    assert classify_all(space, T, workers=4) == classify_all(space, T)


def test_remark4_grid():
    s = remark4_system()
    g = grid_falsify(s, K.ORBITAL_TRIANGULAR, 2 / 3)
    assert g.passed and g.max_ratio == pytest.approx(1 / 3, abs=1e-9)
    assert g.witness[0] == 1.0 and 0.25 < g.witness[1] < 1.0
    assert grid_falsify(s, K.ORBITAL_TRIANGULAR, 1 / 3 + 1e-9).passed
    assert not grid_falsify(s, K.ORBITAL_TRIANGULAR, 0.3).passed


def test_remark4_not_banach():
    s = remark4_system()
    g = grid_falsify(s, K.BANACH, 0.99)
    assert not g.passed and g.max_ratio > 1
    # at y = 0.999 the ratio is (1/4) / (1 - y)
    space, T = s.to_finite()
    y = s.points.index(0.999)
    lhs, rhs = lhs_rhs(K.BANACH, space, T, (s.n - 1, y))
    assert lhs / rhs == pytest.approx(250, rel=1e-9)
