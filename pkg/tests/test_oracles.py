from __future__ import annotations

from itertools import combinations, product

import pytest

from measures import SubbasicConstraint, Unsatisfiable, density_witness, level_definable, satisfies
from oracles import SUITES, SuiteParams, broken_z2, density_witness_check, run_suites
from profinite_space import make_space
from semiring import builtin, validate_semiring


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_has_no_failures(name: str, small_params: SuiteParams) -> None:
    results = SUITES[name](small_params)
    assert results
    failed = [r.to_dict() for r in results if r.failed]
    assert not failed, failed


def test_mutants() -> None:
    assert "left_distributive" in validate_semiring(broken_z2("distributivity")).laws_failed()
    assert validate_semiring(broken_z2("identity")).laws_failed() == ["mul_left_identity", "mul_right_identity"]
    with pytest.raises(ValueError):
        broken_z2("commutativity")


def test_seeded_checks_are_reproducible(small_params: SuiteParams) -> None:
    first = [r.to_dict() for r in SUITES["tau"](small_params)]
    second = [r.to_dict() for r in SUITES["tau"](small_params)]
    assert first == second


def test_sampled_witness_lists_are_partial(small_params: SuiteParams) -> None:
    statuses = {r.name: r.status for r in SUITES["tau"](small_params)}
    assert statuses["density_witness:bool2"] == "partial"
    assert statuses["injective:bool2"] == "pass"


# ---------- density witness enumeration ----------


@pytest.mark.parametrize(
    "ref, level, pool, lists",
    [
        (("bool2",), 1, 16, 697),
        (("zmod", 3), 1, 32, 5489),
        (("bool2",), 2, 64, 43745),
    ],
)
def test_density_witness_covers_every_short_list(ref: tuple, level: int, pool: int, lists: int) -> None:
    space = make_space("cantor", certified_depth=4)
    result = density_witness_check(space, builtin(*ref), level, SuiteParams(depth=3, cases=5))
    assert result.status == "pass", result.to_dict()
    assert result.details["pool"] == pool
    assert result.details["lists"] == lists
    assert result.details["patterns"] == result.details["cases"] <= lists


def test_unsatisfiable_verdicts_match_brute_force() -> None:
    space = make_space("cantor", certified_depth=4)
    s = builtin("bool2")
    cells = [[], ["0"], ["1"], ["0", "1"]]
    values = [frozenset(u) for u in ([], [0], [1], [0, 1])]
    pool = [SubbasicConstraint(space.clopen(1, c), u) for c in cells for u in values]
    stages = [level_definable(space, s, 1, v) for v in product(range(s.size), repeat=2)]
    checked = 0
    for r in range(4):
        for combo in combinations(pool, r):
            found = density_witness(list(combo), space, s)
            expected = any(satisfies(m, combo) for m in stages)
            assert isinstance(found, Unsatisfiable) == (not expected), combo
            checked += 1
    assert checked == 697


def test_witness_enumeration_is_the_default(env) -> None:
    assert SuiteParams().exhaustive
    assert SuiteParams.from_settings().exhaustive


# ---------- running suites ----------


def test_run_suites_prefixes_names(small_params: SuiteParams) -> None:
    results = run_suites(["continuity", "duality"], small_params)
    assert all(r.name.startswith(("continuity:", "duality:")) for r in results)
    assert any(r.name == "duality:duality:bool2:|X|=2" for r in results)
    with pytest.raises(KeyError):
        run_suites(["astrology"], small_params)


def test_params_from_settings(env) -> None:
    env.setenv("PROFSEM_SEED", "11")
    env.setenv("PROFSEM_DEPTH", "not-a-number")
    params = SuiteParams.from_settings(cases=3, depth=None)
    assert (params.seed, params.cases, params.depth) == (11, 3, 5)
