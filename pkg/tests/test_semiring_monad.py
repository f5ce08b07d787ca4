from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import BudgetExceededError, MismatchError, StructuralError
from semiring import builtin, self_module, three_chain_module
from semiring_monad import (
    DoubleFinFn,
    FinFn,
    FinMap,
    all_functions,
    base_names,
    check_algebra_laws,
    check_monad_laws,
    encode,
    functor_map,
    mult,
    skip_coefficients,
    unit,
)

LAWS = {"left_unit", "right_unit", "associativity", "unit_naturality", "mult_naturality", "functor_identity", "functor_composition"}


# ---------- enumeration ----------


def test_all_functions_order() -> None:
    assert all_functions(2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert all_functions(3, 0).shape == (1, 0)
    assert encode(np.array([[1, 0], [1, 1]]), 2).tolist() == [2, 3]
    assert base_names(3) == ("x0", "x1", "x2")


# ---------- functor, unit, multiplication ----------


@pytest.mark.parametrize("ref, expected", [(("zmod", 2), "0"), (("bool2",), "1")])
def test_functor_map_sums_fibres(ref: tuple, expected: str) -> None:
    s = builtin(*ref)
    phi = FinMap.from_mapping(["a", "b"], ["c"], {"a": "c", "b": "c"})
    f = FinFn.from_mapping(s, ["a", "b"], {"a": "1", "b": "1"})
    assert functor_map(s, phi, f).to_dict() == {"c": expected}


def test_functor_map_identity_and_errors() -> None:
    s = builtin("zmod", 3)
    f = FinFn.from_mapping(s, ["a", "b"], {"a": "2"})
    ident = FinMap.from_mapping(["a", "b"], ["a", "b"], {"a": "a", "b": "b"})
    assert functor_map(s, ident, f) == f
    other = FinMap.from_mapping(["x"], ["a"], {"x": "a"})
    with pytest.raises(StructuralError):
        functor_map(s, other, f)
    with pytest.raises(MismatchError):
        functor_map(builtin("zmod", 2), ident, f)


def test_unit() -> None:
    assert unit(builtin("bool2"), ["a", "b"], "a").to_dict() == {"a": "1", "b": "0"}
    assert unit(builtin("trop_trunc", 2), ["a"], "a").to_dict() == {"a": "0"}
    assert unit(builtin("zmod", 2), ["a", "b"], "b").to_dict() == {"a": "0", "b": "1"}
    with pytest.raises(StructuralError):
        unit(builtin("bool2"), ["a"], "z")


def test_mult_examples() -> None:
    b2 = builtin("bool2")
    f1 = FinFn.from_mapping(b2, ["a"], {"a": "1"})
    assert mult(b2, DoubleFinFn.from_terms(b2, ["a"], [(f1, 1)])).to_dict() == {"a": "1"}

    z2 = builtin("zmod", 2)
    g1 = FinFn.from_mapping(z2, ["a"], {"a": "1"})
    g2 = FinFn.from_mapping(z2, ["a"], {"a": "0"})
    assert mult(z2, DoubleFinFn.from_terms(z2, ["a"], [(g1, 1), (g2, 1)])).to_dict() == {"a": "1"}


@given(st.sampled_from([("bool2",), ("zmod", 3), ("trop_trunc", 2), ("nat_sat", 3)]), st.data())
def test_mult_of_unit_is_identity(ref: tuple, data: st.DataObject) -> None:
    s = builtin(*ref)
    base = base_names(data.draw(st.integers(0, 3)))
    values = data.draw(st.lists(st.integers(0, s.size - 1), min_size=len(base), max_size=len(base)))
    f = FinFn(s, base, np.array(values, dtype=np.int64))
    assert mult(s, DoubleFinFn.from_terms(s, base, [(f, s.one)])) == f


def test_finfn_validation() -> None:
    s = builtin("bool2")
    with pytest.raises(StructuralError):
        FinFn(s, ("a",), np.array([2]))
    with pytest.raises(StructuralError):
        FinFn.from_mapping(s, ["a"], {"b": "1"})
    with pytest.raises(StructuralError):
        DoubleFinFn(s, ("a",), np.zeros(3, dtype=np.int64))


@st.composite
def composable_maps(draw) -> tuple[FinMap, FinMap]:
    sizes = [draw(st.integers(0, 3)) for _ in range(3)]
    x, y, z = (base_names(n) for n in sizes)
    if sizes[1] == 0 and sizes[0]:
        sizes[1] = 1
        y = base_names(1)
    if sizes[2] == 0 and sizes[1]:
        z = base_names(1)
    phi = tuple(draw(st.integers(0, len(y) - 1)) for _ in x)
    psi = tuple(draw(st.integers(0, len(z) - 1)) for _ in y)
    return FinMap(x, y, phi), FinMap(y, z, psi)


@given(composable_maps(), st.sampled_from([("bool2",), ("zmod", 4), ("trop_trunc", 1)]), st.data())
def test_functor_composition(maps: tuple[FinMap, FinMap], ref: tuple, data: st.DataObject) -> None:
    phi, psi = maps
    s = builtin(*ref)
    values = data.draw(st.lists(st.integers(0, s.size - 1), min_size=len(phi.source), max_size=len(phi.source)))
    f = FinFn(s, phi.source, np.array(values, dtype=np.int64))
    assert functor_map(s, phi.then(psi), f) == functor_map(s, psi, functor_map(s, phi, f))


@given(composable_maps(), st.data())
def test_bool2_functor_is_direct_image(maps: tuple[FinMap, FinMap], data: st.DataObject) -> None:
    phi, _ = maps
    b2 = builtin("bool2")
    subset = data.draw(st.sets(st.sampled_from(phi.source))) if phi.source else set()
    f = FinFn(b2, phi.source, np.array([1 if x in subset else 0 for x in phi.source], dtype=np.int64))
    image = {phi.target[phi.table[phi.source.index(x)]] for x in subset}
    pushed = functor_map(b2, phi, f)
    assert {y for y in phi.target if pushed(y) == 1} == image


# ---------- law checks ----------


@pytest.mark.parametrize("ref", [("bool2",), ("zmod", 2)], ids=lambda r: ":".join(map(str, r)))
def test_monad_laws_exhaustive(ref: tuple) -> None:
    results = check_monad_laws(builtin(*ref), 2, budget=200_000, samples=50, seed=7)
    assert {r.name for r in results} == LAWS
    assert all(r.status == "pass" for r in results), [r.to_dict() for r in results if r.status != "pass"]
    assert all(r.details["exhaustive"] for r in results)


def test_monad_laws_sampled_when_over_budget() -> None:
    results = {r.name: r for r in check_monad_laws(builtin("zmod", 3), 1, budget=200_000, samples=40, seed=3)}
    assert results["associativity"].status == "partial"
    assert not results["associativity"].details["exhaustive"]
    assert results["left_unit"].status == "pass"
    assert not any(r.failed for r in results.values())


def test_skipping_coefficients_is_caught() -> None:
    results = {r.name: r for r in check_monad_laws(builtin("zmod", 3), 1, samples=20, seed=1, multiplication=skip_coefficients)}
    assert results["left_unit"].failed
    witness = results["left_unit"].witness
    assert witness["base_size"] == 1
    assert witness["lhs"] != witness["rhs"]


def test_skipping_coefficients_is_harmless_over_bool2() -> None:
    results = check_monad_laws(builtin("bool2"), 1, samples=20, seed=1, multiplication=skip_coefficients)
    assert not any(r.failed for r in results)


def test_monad_law_budget() -> None:
    with pytest.raises(BudgetExceededError):
        check_monad_laws(builtin("zmod", 5), 3, budget=100)


@pytest.mark.parametrize(
    "module",
    [self_module(builtin("bool2")), self_module(builtin("zmod", 3)), three_chain_module(builtin("bool2")), three_chain_module(builtin("nat_sat", 2))],
    ids=lambda m: f"{m.label}/{m.semiring.label}",
)
def test_semimodules_are_algebras(module) -> None:
    results = check_algebra_laws(module, budget=200_000, samples=100, seed=7)
    assert [r.name for r in results] == ["algebra_unit", "algebra_associativity"]
    assert not any(r.failed for r in results)
