from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import DepthExhaustedError, NotIdempotentError, StructuralError
from semiring import (
    FiniteSemimodule,
    FiniteSemiring,
    builtin,
    builtin_from_ref,
    check_action_joint_continuity,
    direct_sum,
    natural_order,
    nat_sat_chain,
    omega_jump_action,
    self_action,
    self_module,
    three_chain_module,
    trivial_action,
    trop_chain,
    validate_semimodule,
    validate_semiring,
)

BUILTIN_REFS = [("bool2",)] + [("zmod", n) for n in range(1, 6)] + [("trop_trunc", k) for k in range(1, 4)] + [
    ("nat_sat", n) for n in range(1, 5)
]
IDEMPOTENT_REFS = [("bool2",), ("trop_trunc", 1), ("trop_trunc", 2), ("trop_trunc", 3), ("nat_sat", 1)]


# ---------- construction ----------


@pytest.mark.parametrize("ref", BUILTIN_REFS, ids=lambda r: ":".join(map(str, r)))
def test_builtins_are_semirings(ref: tuple) -> None:
    report = validate_semiring(builtin(*ref))
    assert report.passed, report.to_dict()
    assert report.status == "pass"


def test_builtin_shapes() -> None:
    trop = builtin("trop_trunc", 2)
    assert trop.elements == ("0", "1", "2", "inf")
    assert trop.zero == 3 and trop.one == 0
    assert trop.plus(1, 2) == 1
    assert trop.times(1, 2) == 3  # 1 + 2 overflows the truncation
    assert trop.times(1, 1) == 2

    sat = builtin("nat_sat", 3)
    top = sat.index("top")
    assert sat.plus(2, 2) == top
    assert sat.times(2, 0) == 0
    assert all(sat.plus(x, top) == top for x in range(sat.size))
    assert builtin("nat_sat", 1).one == builtin("nat_sat", 1).index("top")


@pytest.mark.parametrize(
    "ref, expected",
    [("bool2", ("bool2",)), ("zmod:3", ("zmod", 3)), ("trop_trunc:2", ("trop_trunc", 2)), ("nat_sat(4)", ("nat_sat", 4))],
)
def test_builtin_from_ref(ref: str, expected: tuple) -> None:
    assert builtin_from_ref(ref) == builtin(*expected)


@pytest.mark.parametrize("ref", ["bogus", "zmod:0", "trop_trunc", "bool2:1", "zmod:x"])
def test_builtin_from_ref_rejects(ref: str) -> None:
    with pytest.raises(StructuralError):
        builtin_from_ref(ref)


def test_table_shape_and_range_are_structural() -> None:
    with pytest.raises(StructuralError, match="shape"):
        FiniteSemiring("bad", ("0", "1"), [[0, 1]], [[0, 0], [0, 1]], 0, 1)
    with pytest.raises(StructuralError, match="out of range"):
        FiniteSemiring("bad", ("0", "1"), [[0, 1], [1, 5]], [[0, 0], [0, 1]], 0, 1)
    with pytest.raises(StructuralError):
        FiniteSemiring("bad", ("0", "1"), [[0, 1], [1, 0]], [[0, 0], [0, 1]], 0, 2)


def test_from_mapping_missing_key() -> None:
    with pytest.raises(StructuralError, match="missing"):
        FiniteSemiring.from_mapping({"size": 2, "zero": 0, "one": 1, "add": [[0, 1], [1, 0]]})


def test_element_lookup() -> None:
    trop = builtin("trop_trunc", 2)
    assert trop.index("inf") == 3
    assert trop.index(2) == 2
    with pytest.raises(StructuralError):
        trop.index("7")


# ---------- axioms ----------


def test_broken_z2_descriptor_fails_distributivity(data_dir) -> None:
    with open(data_dir / "broken_z2.json", encoding="utf-8") as f:
        report = validate_semiring(json.load(f))
    assert not report.passed
    assert "left_distributive" in report.laws_failed()
    witness = next(v.witness for v in report.violations if v.law == "left_distributive")
    assert witness == {"a": "1", "b": "0", "c": "0", "lhs": "1", "rhs": "0"}


def test_witness_reports_both_sides_of_the_failing_law() -> None:
    z2 = builtin("zmod", 2)
    mul = z2.mul.copy()
    mul[0, 1] = 1
    report = validate_semiring(FiniteSemiring("zmod(2)/annihilation", z2.elements, z2.add, mul, z2.zero, z2.one))
    witness = next(v.witness for v in report.violations if v.law == "left_annihilation")
    assert witness == {"a": "1", "lhs": "1", "rhs": "0"}
    witness = next(v.witness for v in report.violations if v.law == "mul_right_identity")
    assert witness == {"a": "0", "lhs": "1", "rhs": "0"}


def test_identity_mutant_breaks_only_identity_laws() -> None:
    z2 = builtin("zmod", 2)
    mul = np.zeros((2, 2), dtype=np.int64)
    report = validate_semiring(FiniteSemiring("mutant", z2.elements, z2.add, mul, 0, 1))
    assert report.laws_failed() == ["mul_left_identity", "mul_right_identity"]


def test_zero_equal_one_needs_a_singleton() -> None:
    collapsed = FiniteSemiring("collapsed", ("0", "1"), [[0, 1], [1, 1]], [[0, 0], [0, 0]], 0, 0)
    assert "zero_ne_one" in validate_semiring(collapsed).laws_failed()
    assert validate_semiring(builtin("zmod", 1)).passed


@given(st.integers(0, 2), st.integers(0, 2), st.integers(1, 2))
def test_any_mul_entry_change_breaks_zmod3(a: int, b: int, delta: int) -> None:
    z3 = builtin("zmod", 3)
    mul = z3.mul.copy()
    mul[a, b] = (mul[a, b] + delta) % 3
    report = validate_semiring(FiniteSemiring("z3'", z3.elements, z3.add, mul, 0, 1))
    assert not report.passed


@given(st.sampled_from(BUILTIN_REFS), st.data())
def test_tables_agree_with_scalar_ops(ref: tuple, data: st.DataObject) -> None:
    s = builtin(*ref)
    values = data.draw(st.lists(st.integers(0, s.size - 1), max_size=6))
    acc = s.zero
    for v in values:
        acc = s.plus(acc, v)
    assert s.total(values) == acc
    assert int(s.reduce_add(np.array([values], dtype=np.int64).reshape(1, -1))[0]) == acc


# ---------- natural order ----------


def test_trop_natural_order_is_reversed() -> None:
    order = natural_order(builtin("trop_trunc", 2))
    assert order.bottom == 3
    assert order.top == 0
    assert order.leq(3, 1) and order.leq(1, 0)
    assert not order.leq(0, 1)
    assert order.join(1, 2) == 1
    assert order.meet(1, 2) == 2
    assert order.chain_description() == "inf <= 2 <= 1 <= 0"


def test_natural_order_needs_idempotency() -> None:
    with pytest.raises(NotIdempotentError) as info:
        natural_order(builtin("zmod", 2))
    assert info.value.witness == {"element": "1", "sum": "0", "law": "a+a=a"}
    assert not builtin("zmod", 2).is_idempotent
    assert builtin("bool2").is_idempotent


def test_bool2_down_sets() -> None:
    order = natural_order(builtin("bool2"))
    assert order.down_sets() == [frozenset(), frozenset({0}), frozenset({0, 1})]
    assert not order.is_down_set({1})


@given(st.sampled_from(IDEMPOTENT_REFS), st.data())
def test_join_and_meet_bound(ref: tuple, data: st.DataObject) -> None:
    s = builtin(*ref)
    order = natural_order(s)
    a, b = data.draw(st.integers(0, s.size - 1)), data.draw(st.integers(0, s.size - 1))
    j, m = order.join(a, b), order.meet(a, b)
    assert order.leq(a, j) and order.leq(b, j)
    assert order.leq(m, a) and order.leq(m, b)
    assert order.leq(order.bottom, a) and order.leq(a, order.top)
    assert order.meet_all([a, b]) == m


# ---------- modules ----------


@pytest.mark.parametrize("ref", BUILTIN_REFS, ids=lambda r: ":".join(map(str, r)))
def test_self_module_is_a_module(ref: tuple) -> None:
    assert validate_semimodule(self_module(builtin(*ref))).passed


def test_direct_sum() -> None:
    b2 = self_module(builtin("bool2"))
    both = direct_sum(b2, b2)
    assert both.size == 4
    assert both.carrier[3] == "(1,1)"
    assert validate_semimodule(both).passed
    with pytest.raises(StructuralError):
        direct_sum(b2, self_module(builtin("zmod", 2)))


def test_three_chain_module() -> None:
    assert validate_semimodule(three_chain_module(builtin("bool2"))).passed
    assert validate_semimodule(three_chain_module(builtin("nat_sat", 3))).passed
    assert "action_over_scalar_sum" in validate_semimodule(three_chain_module(builtin("zmod", 2))).laws_failed()
    shadow = three_chain_module(builtin("nat_sat", 2), top_acts_as_omega=True)
    assert "action_over_scalar_sum" in validate_semimodule(shadow).laws_failed()


def test_module_combination_length() -> None:
    m = self_module(builtin("zmod", 3))
    assert m.combination([1, 2, 0]) == 2  # 1·0 + 2·1 + 0·2
    with pytest.raises(StructuralError):
        m.combination([1])


def test_module_action_shape(bool2) -> None:
    with pytest.raises(StructuralError, match="shape"):
        FiniteSemimodule(bool2, ("0", "1"), [[0, 1], [1, 1]], 0, [[0, 0]])


# ---------- chains and joint continuity ----------


@pytest.mark.parametrize("chain", [nat_sat_chain(), trop_chain()], ids=lambda c: c.label)
def test_chain_quotients_are_homomorphisms(chain) -> None:
    assert chain.validate(6).passed


def test_chain_depth_is_certified() -> None:
    with pytest.raises(DepthExhaustedError):
        nat_sat_chain(exactness_depth=4).stage(5)


def test_omega_jump_is_not_jointly_continuous() -> None:
    report = check_action_joint_continuity(omega_jump_action(), 6)
    assert not report.passed
    assert report.certificate["element"] == "omega"
    assert report.certificate["module_element"] == "1"
    assert report.certificate["thread"] == "inf"
    assert report.to_dict()["status"] == "fail"


@pytest.mark.parametrize("action", [self_action(builtin("bool2")), self_action(builtin("trop_trunc", 2)), trivial_action()], ids=lambda a: a.label)
def test_continuous_actions_factor(action) -> None:
    report = check_action_joint_continuity(action, 4)
    assert report.passed
    assert report.factoring_level == 0


def test_continuity_depth_is_bounded() -> None:
    with pytest.raises(DepthExhaustedError):
        check_action_joint_continuity(omega_jump_action(exactness_depth=5), 6)
