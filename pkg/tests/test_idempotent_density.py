from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import MismatchError, NotIdempotentError, StructuralError
from generators import random_clopen, random_measure, random_scott_fn
from idempotent_density import (
    DEPTH_BOUNDED,
    STABILISED,
    ScottContinuousFn,
    closed_from_cells,
    closed_from_measure,
    closed_set_ops,
    closed_to_measure,
    contained_in,
    density,
    density_preimage,
    eval_pointwise,
    galois_holds,
    in_box,
    in_diamond,
    integral,
    meets,
    pointwise_leq,
    same_closed_set,
    singleton,
    stable_level,
    to_measure,
    union,
)
from measures import FinSuppFn, equal_to_depth, eval_measure, integrate, zero_measure
from profinite_space import cantor_point, make_space, nat_point
from semiring import builtin

CANTOR = make_space("cantor", certified_depth=12)
B0 = CANTOR.clopen(1, ["0"])
TROP = builtin("trop_trunc", 2)
INF = TROP.index("inf")


def trop_measure():
    """mass 1 at 01000…, mass 2 at 11111…"""
    p, q = cantor_point("01"), cantor_point("11", 1)
    return integrate(FinSuppFn(CANTOR, TROP, ((p, 1), (q, 2))))


# ---------- density and integral ----------


def test_density_at_support_and_elsewhere() -> None:
    d = density(trop_measure())
    at_p = eval_pointwise(d, cantor_point("01"), 12)
    assert (at_p.value, at_p.flag, at_p.level) == (1, STABILISED, 1)
    at_q = eval_pointwise(d, cantor_point("11", 1), 12)
    assert TROP.name(at_q.value) == "2"
    off = eval_pointwise(d, cantor_point("0"), 12)
    assert off.value == INF
    assert off.stabilised and off.level == 2
    assert stable_level(d, cantor_point("0")) == 2


def test_integral_reads_the_stage() -> None:
    d = density(trop_measure())
    assert integral(d, CANTOR.top()) == 1
    assert integral(d, ~B0) == 2
    assert integral(d, CANTOR.clopen(2, ["00", "10"])) == INF
    with pytest.raises(MismatchError):
        integral(d, make_space("nat_infty").top())


def test_locally_constant_function() -> None:
    f = ScottContinuousFn.from_cells(CANTOR, TROP, 1, [1, 2])
    assert f.exact
    assert eval_pointwise(f, cantor_point("0"), 12) == eval_pointwise(f, cantor_point("01"), 12)
    assert eval_pointwise(f, cantor_point("0"), 12).value == 1
    assert eval_pointwise(f, cantor_point("1"), 12).value == 2
    assert integral(f, CANTOR.top()) == 1
    assert to_measure(f).stage_at(3).tolist() == f.stage_at(3).tolist()
    with pytest.raises(StructuralError):
        ScottContinuousFn.from_cells(CANTOR, TROP, 1, [1])


def test_density_needs_an_idempotent_semiring() -> None:
    with pytest.raises(NotIdempotentError):
        density(zero_measure(CANTOR, builtin("zmod", 2)))
    with pytest.raises(NotIdempotentError):
        ScottContinuousFn.from_cells(CANTOR, builtin("zmod", 3), 0, [1])


def test_pointwise_on_other_space() -> None:
    with pytest.raises(MismatchError):
        eval_pointwise(density(trop_measure()), nat_point(2), 5)


@settings(max_examples=40)
@given(st.sampled_from([("bool2",), ("trop_trunc", 2), ("nat_sat", 1)]), st.integers(0, 2**32 - 1))
def test_integral_of_density_is_the_measure(ref: tuple, seed: int) -> None:
    m = random_measure(CANTOR, builtin(*ref), np.random.default_rng(seed), 3)
    assert equal_to_depth(to_measure(density(m)), m, 4)


# ---------- Galois connection ----------


def test_galois_positive_and_negative() -> None:
    m = trop_measure()
    good = galois_holds(density(m), m, 3)
    assert good.integral_below and good.pointwise_below and good.agrees
    assert good.flag == STABILISED
    assert good.level >= 2

    f = ScottContinuousFn.from_cells(CANTOR, TROP, 1, [1, 2])
    bad = galois_holds(f, m, 3)
    assert not bad.integral_below and not bad.pointwise_below
    assert bad.agrees
    assert "clopen" in bad.witness and "point" in bad.witness

    nothing = ScottContinuousFn.from_cells(CANTOR, TROP, 0, [INF])
    assert galois_holds(nothing, m, 3).to_dict()["agrees"]


def test_galois_without_exact_reading_is_depth_bounded() -> None:
    f = ScottContinuousFn.from_cells(CANTOR, TROP, 1, [1, 2])
    result = galois_holds(f, f.measure, 4)
    assert result.flag == DEPTH_BOUNDED
    assert result.level == 4
    assert result.integral_below and result.pointwise_below


def test_galois_mismatch() -> None:
    with pytest.raises(MismatchError):
        galois_holds(density(trop_measure()), zero_measure(CANTOR, builtin("bool2")), 3)


@settings(max_examples=40)
@given(st.sampled_from([("bool2",), ("trop_trunc", 2)]), st.integers(0, 2**32 - 1))
def test_galois_sides_agree(ref: tuple, seed: int) -> None:
    s = builtin(*ref)
    rng = np.random.default_rng(seed)
    f = random_scott_fn(CANTOR, s, rng, 3)
    m = random_measure(CANTOR, s, rng, 3)
    assert galois_holds(f, m, 3).agrees


def test_pointwise_leq() -> None:
    low = ScottContinuousFn.from_cells(CANTOR, TROP, 1, [1, 2])
    high = ScottContinuousFn.from_cells(CANTOR, TROP, 0, [0])
    assert pointwise_leq(low, high, 3)
    assert not pointwise_leq(high, low, 3)
    assert pointwise_leq(low, low, 3)


def test_density_preimage() -> None:
    f = ScottContinuousFn.from_cells(CANTOR, TROP, 1, [1, 2])
    assert density_preimage(f, {INF, 2}, 2) == CANTOR.clopen(1, ["1"])
    assert density_preimage(f, {INF}, 3).is_empty
    with pytest.raises(StructuralError, match="down-set"):
        density_preimage(f, {1}, 2)


# ---------- closed sets ----------


def two_point_set():
    b2 = builtin("bool2")
    return integrate(FinSuppFn(CANTOR, b2, ((cantor_point("0"), 1), (cantor_point("1"), 1))))


def test_closed_set_from_measure() -> None:
    m = two_point_set()
    c = closed_from_measure(m)
    assert c.names(1) == ["0", "1"]
    assert c.names(2) == ["00", "10"]
    assert meets(c, B0) and in_diamond(c, B0)
    assert not in_box(c, B0)
    assert in_box(c, CANTOR.top())
    assert not in_diamond(c, CANTOR.clopen(2, ["01"]))
    assert contained_in(c, CANTOR.clopen(2, ["00", "10"]))
    assert equal_to_depth(closed_to_measure(c), m, 5)


def test_union_of_singletons() -> None:
    pair = union([singleton(cantor_point("0")), singleton(cantor_point("1"))])
    assert same_closed_set(pair, closed_from_measure(two_point_set()), 5)
    assert union([], CANTOR).is_empty()
    with pytest.raises(StructuralError):
        union([])
    with pytest.raises(MismatchError):
        union([singleton(cantor_point("0")), singleton(nat_point(1))])


def test_closed_set_ops_dispatch() -> None:
    z = cantor_point("0")
    assert same_closed_set(closed_set_ops("singleton", z), singleton(z), 4)
    assert closed_set_ops("union", [singleton(z)]).names(2) == ["00"]
    assert closed_set_ops("from_measure", two_point_set()).names(0) == ["ε"]
    with pytest.raises(StructuralError):
        closed_set_ops("intersection", z)
    with pytest.raises(StructuralError):
        closed_from_measure(zero_measure(CANTOR, builtin("zmod", 2)))


def test_clopen_as_closed_set() -> None:
    c = closed_from_cells(CANTOR, 2, [1])
    assert c.names(1) == ["0"]
    assert c.names(3) == ["010", "011"]


@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_box_and_diamond_are_subbasic(seed: int, level: int) -> None:
    rng = np.random.default_rng(seed)
    m = random_measure(CANTOR, builtin("bool2"), rng, 3)
    b = random_clopen(CANTOR, rng, level)
    c = closed_from_measure(m)
    assert in_diamond(c, b) == (eval_measure(m, b) == 1)
    assert in_box(c, b) == (eval_measure(m, ~b) == 0)
