"""
Named property suites: exhaustive where the instance is small, seeded otherwise.

Each suite takes SuiteParams and returns CheckResults. Seeded suites stop a
check at its first counterexample and put the seed and case index in the
witness so `generators.case_rng(seed, case)` replays it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from config import load_settings
from generators import case_rngs, random_finsupp_pair, random_measure, random_scott_fn
from idempotent_density import (
    ScottContinuousFn,
    closed_from_cells,
    closed_from_measure,
    closed_to_measure,
    contained_in,
    density,
    eval_pointwise,
    galois_holds,
    in_box,
    in_diamond,
    meets,
    pointwise_leq,
    representatives,
    same_closed_set,
    singleton,
    to_measure,
    union,
)
from measures import (
    SubbasicConstraint,
    Unsatisfiable,
    additivity_violation,
    check_compatibility,
    combine,
    density_witness,
    dirac,
    equal_to_depth,
    eval_measure,
    first_difference,
    free_extension,
    integrate,
    level_definable,
    satisfies,
    separating_clopen,
)
from profinite_space import Clopen, InverseSystem, cell_map, make_space, random_point
from reports import CheckResult
from semiring import (
    FiniteSemimodule,
    FiniteSemiring,
    builtin,
    check_action_joint_continuity,
    direct_sum,
    omega_jump_action,
    nat_sat_chain,
    self_action,
    self_module,
    three_chain_module,
    trivial_action,
    trop_chain,
    validate_semimodule,
    validate_semiring,
)
from semiring_monad import all_functions, check_algebra_laws, check_monad_laws, encode, skip_coefficients
from stone_duality import bijection_report

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteParams:
    depth: int = 5
    cases: int = 1000
    seed: int = 7
    budget: int = 200_000
    exhaustive: bool = True
    progress: bool = False

    @classmethod
    def from_settings(cls, **overrides: Any) -> "SuiteParams":
        settings = load_settings()
        base = {"depth": settings.depth, "cases": settings.cases, "seed": settings.seed, "budget": settings.budget}
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)


class _CaseRun:
    """First counterexample of one seeded check."""

    def __init__(self, name: str, params: SuiteParams, **details: Any) -> None:
        self.name = name
        self.params = params
        self.details = details
        self.cases = 0
        self.witness: Optional[Dict[str, Any]] = None
        self.sampled = False

    def record(self, ok: bool, case: Optional[int], detail: Optional[Dict[str, Any]] = None) -> None:
        self.cases += 1
        if ok or self.witness is not None:
            return
        self.witness = {"seed": self.params.seed, **({"case": case} if case is not None else {}), **(detail or {})}
        logger.warning("%s failed (seed=%d, case=%s): %s", self.name, self.params.seed, case, detail)

    def result(self) -> CheckResult:
        status = "fail" if self.witness is not None else ("partial" if self.sampled else "pass")
        return CheckResult(self.name, status, {"cases": self.cases, **self.details}, self.witness)


def _cases(params: SuiteParams, label: str) -> Iterable[tuple[int, np.random.Generator]]:
    return enumerate(tqdm(case_rngs(params.seed, params.cases), desc=label, disable=not params.progress, leave=False))


def _prefixed(prefix: str, results: Iterable[CheckResult]) -> List[CheckResult]:
    return [CheckResult(f"{prefix}:{r.name}", r.status, r.details, r.witness) for r in results]


def _cantor(params: SuiteParams) -> InverseSystem:
    return make_space("cantor", certified_depth=max(params.depth + 1, load_settings().max_depth))


def _subset_masks(cells: int) -> np.ndarray:
    return ((np.arange(2**cells)[:, None] >> np.arange(cells)[None, :]) & 1).astype(bool)


# --- semiring -------------------------------------------------------------------------


def broken_z2(mutation: str = "distributivity") -> FiniteSemiring:
    """Z/2 with one table entry changed: 1·0 := 1 breaks distributivity, 1·1 := 0 the identity laws."""
    z2 = builtin("zmod", 2)
    mul = z2.mul.copy()
    if mutation == "distributivity":
        mul[1, 0] = 1
    elif mutation == "identity":
        mul[1, 1] = 0
    else:
        raise ValueError(f"unknown mutation {mutation!r}")
    return FiniteSemiring(f"zmod(2)/{mutation}", z2.elements, z2.add, mul, z2.zero, z2.one)


def semiring_suite(params: SuiteParams) -> List[CheckResult]:
    candidates = [builtin("bool2")]
    candidates += [builtin("zmod", n) for n in range(2, 6)]
    candidates += [builtin("trop_trunc", k) for k in range(1, 4)]
    candidates += [builtin("nat_sat", n) for n in range(1, 5)]
    results = [CheckResult.from_validation(f"axioms:{s.label}", validate_semiring(s)) for s in candidates]

    for mutation, expected in (("distributivity", "distributive"), ("identity", "identity")):
        report = validate_semiring(broken_z2(mutation))
        caught = not report.passed and any(expected in law for law in report.laws_failed())
        witness = None if caught else {"laws_failed": report.laws_failed()}
        details = {"laws_failed": report.laws_failed()}
        results.append(CheckResult(f"mutant:{mutation}", "pass" if caught else "fail", details, witness))

    depth = min(params.depth, 12)
    for chain in (nat_sat_chain(), trop_chain()):
        results.append(CheckResult.from_validation(f"chain:{chain.label}", chain.validate(depth)))
    for s in (builtin("bool2"), builtin("nat_sat", 2), builtin("nat_sat", 3)):
        results.append(CheckResult.from_validation(f"module:A over {s.label}", validate_semimodule(three_chain_module(s))))
    return results


# --- monad ----------------------------------------------------------------------------


def monad_suite(params: SuiteParams) -> List[CheckResult]:
    semirings = [
        builtin("bool2"),
        builtin("zmod", 2),
        builtin("zmod", 3),
        builtin("zmod", 4),
        builtin("trop_trunc", 1),
        builtin("trop_trunc", 2),
        builtin("nat_sat", 2),
        builtin("nat_sat", 3),
    ]
    results: List[CheckResult] = []
    for s in tqdm(semirings, desc="monad", disable=not params.progress, leave=False):
        laws = check_monad_laws(s, 2, budget=params.budget, samples=params.cases, seed=params.seed)
        results += _prefixed(s.label, laws)
        results += _prefixed(s.label, check_algebra_laws(self_module(s), budget=params.budget, samples=params.cases, seed=params.seed))

    z3 = builtin("zmod", 3)
    mutant = check_monad_laws(z3, 1, budget=params.budget, samples=params.cases, seed=params.seed, multiplication=skip_coefficients)
    failed = [r for r in mutant if r.failed]
    witness = None if failed else {"laws_failed": []}
    details: Dict[str, Any] = {"laws_failed": [r.name for r in failed]}
    if failed:
        details["first_witness"] = failed[0].witness
    results.append(CheckResult("mutant:skip_coefficients", "pass" if failed else "fail", details, witness))
    return results


# --- measures -------------------------------------------------------------------------


def additivity_suite(params: SuiteParams) -> List[CheckResult]:
    space = _cantor(params)
    results = []
    top = min(3, params.depth)
    for s in (builtin("bool2"), builtin("zmod", 2), builtin("trop_trunc", 2)):
        run = _CaseRun(f"additivity:{s.label}", params, level=params.depth, clopen_levels=top)
        compat = _CaseRun(f"compatibility:{s.label}", params, depth=params.depth)
        for case, rng in _cases(params, f"additivity {s.label}"):
            m = random_measure(space, s, rng, params.depth)
            for level in range(top + 1):
                violation = additivity_violation(m, level, params.budget)
                if violation is not None:
                    run.record(False, case, {"level": level, **violation})
                    break
            else:
                run.record(True, case)
            bad = check_compatibility(m, params.depth)
            compat.record(bad is None, case, bad)
        results += [run.result(), compat.result()]
    return results


def _constraint_pool(space: InverseSystem, s: FiniteSemiring, level: int) -> List[SubbasicConstraint]:
    masks = _subset_masks(space.level_size(level))
    clopens = list(dict.fromkeys(Clopen(space, level, frozenset(np.flatnonzero(m).tolist())) for m in masks))
    values = _subset_masks(s.size)
    return [SubbasicConstraint(b, frozenset(np.flatnonzero(u).tolist())) for b in clopens for u in values]


def _satisfiable_table(space: InverseSystem, s: FiniteSemiring, pool: Sequence[SubbasicConstraint], level: int) -> np.ndarray:
    """ok[i, v]: stage vector v at `level` satisfies constraint i (stages at `level` realise every measure there)."""
    vectors = all_functions(s.size, space.level_size(level))
    ok = np.zeros((len(pool), vectors.shape[0]), dtype=bool)
    for i, c in enumerate(pool):
        mask = c.clopen.mask(level)
        values = s.reduce_add(np.where(mask[None, :], vectors, s.zero), axis=1)
        ok[i] = np.isin(values, list(c.allowed))
    return ok


def _list_patterns(table: np.ndarray, max_constraints: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct satisfiable sets over all lists of <= max_constraints pool rows.

    Returns (patterns, representatives, counts): patterns[j, v] says stage vector v
    satisfies every constraint of the lists in class j, representatives[j] is the first
    such list (pool indices padded with -1) and counts[j] the number of lists in it.
    """
    rows, width = table.shape
    packed = np.packbits(table, axis=1)
    patterns = [np.packbits(np.ones(width, dtype=bool))[None, :]]
    lists = [np.full((1, max_constraints), -1, dtype=np.intp)]
    for r in range(1, max_constraints + 1):
        combos = np.array(list(combinations(range(rows), r)), dtype=np.intp).reshape(-1, r)
        patterns.append(np.bitwise_and.reduce(packed[combos], axis=1))
        lists.append(np.pad(combos, ((0, 0), (0, max_constraints - r)), constant_values=-1))
    unique, first, counts = np.unique(np.concatenate(patterns), axis=0, return_index=True, return_counts=True)
    return np.unpackbits(unique, axis=1, count=width).astype(bool), np.concatenate(lists)[first], counts


def density_witness_check(
    space: InverseSystem, s: FiniteSemiring, level: int, params: SuiteParams, max_constraints: int = 3
) -> CheckResult:
    """density_witness against brute force over every list of <= max_constraints level-`level` constraints.

    Constraints at `level` only see the level-`level` stage vector, so lists with the same
    set of satisfying vectors share one density_witness call. Unsatisfiable must mean an
    empty set; a witness must land its stage vector inside the set.
    """
    pool = _constraint_pool(space, s, level)
    table = _satisfiable_table(space, s, pool, level)
    name = f"density_witness:{s.label}"

    def detail(combo: Sequence[int]) -> Dict[str, Any]:
        return {"constraints": [{"clopen": pool[i].clopen.to_dict(), "allowed": sorted(pool[i].allowed)} for i in combo]}

    if not params.exhaustive:
        run = _CaseRun(name, params, level=level, pool=len(pool))
        run.sampled = True
        for case, rng in enumerate(case_rngs(params.seed, params.cases)):
            combo = sorted(rng.choice(len(pool), size=int(rng.integers(0, max_constraints + 1)), replace=False).tolist())
            constraints = [pool[i] for i in combo]
            expected = bool(np.logical_and.reduce(table[combo], axis=0).any()) if combo else True
            found = density_witness(constraints, space, s, budget=params.budget)
            if isinstance(found, Unsatisfiable):
                run.record(not expected, case, {**detail(combo), "verdict": "unsatisfiable"})
            else:
                run.record(expected and satisfies(integrate(found), constraints), case, {**detail(combo), "witness": found.to_dict()})
        return run.result()

    patterns, representatives, counts = _list_patterns(table, max_constraints)
    logger.info("%s: %d lists in %d classes", name, int(counts.sum()), len(counts))
    run = _CaseRun(name, params, level=level, pool=len(pool), lists=int(counts.sum()), patterns=len(counts))
    classes = zip(patterns, representatives, counts)
    for pattern, rep, count in tqdm(classes, total=len(counts), desc=f"witness {s.label}", disable=not params.progress, leave=False):
        combo = [int(i) for i in rep if i >= 0]
        constraints = [pool[i] for i in combo]
        found = density_witness(constraints, space, s, budget=params.budget)
        if isinstance(found, Unsatisfiable):
            run.record(not pattern.any(), None, {**detail(combo), "verdict": "unsatisfiable", "lists": int(count)})
            continue
        m = integrate(found)
        vector = int(encode(m.stage_at(level), s.size))
        ok = bool(pattern[vector]) and satisfies(m, constraints)
        run.record(ok, None, {**detail(combo), "witness": found.to_dict(), "lists": int(count)})
    return run.result()


def tau_suite(params: SuiteParams) -> List[CheckResult]:
    space = _cantor(params)
    results = []
    for s in (builtin("bool2"), builtin("zmod", 3), builtin("trop_trunc", 2)):
        run = _CaseRun(f"injective:{s.label}", params, level=params.depth)
        for case, rng in _cases(params, f"tau {s.label}"):
            f, g = random_finsupp_pair(space, s, rng, params.depth)
            b = separating_clopen(f, g)
            if f == g:
                run.record(b is None, case, {"f": f.to_dict(), "note": "equal functions were separated"})
                continue
            ok = b is not None and eval_measure(integrate(f), b) != eval_measure(integrate(g), b)
            run.record(ok, case, {"f": f.to_dict(), "g": g.to_dict(), "clopen": b.to_dict() if b is not None else None})
        results.append(run.result())

    for s in (builtin("bool2"), builtin("zmod", 3), builtin("trop_trunc", 1)):
        results.append(density_witness_check(space, s, 2, params))
    return results


# --- duality --------------------------------------------------------------------------


def duality_suite(params: SuiteParams) -> List[CheckResult]:
    results = []
    for s in (builtin("bool2"), builtin("zmod", 2), builtin("zmod", 3), builtin("trop_trunc", 1)):
        for n in (1, 2):
            report = bijection_report(n, s, budget=params.budget, samples=params.cases, seed=params.seed)
            check = CheckResult.from_validation(f"duality:{s.label}:|X|={n}", report)
            if report.partial and check.status == "pass":
                check.status = "partial"
            results.append(check)
    return results


# --- idempotent -----------------------------------------------------------------------


_IDEMPOTENT = (("bool2",), ("trop_trunc", 2), ("trop_trunc", 3))


def _idempotent_cases(params: SuiteParams) -> List[tuple[FiniteSemiring, InverseSystem]]:
    spaces = [_cantor(params), make_space("nat_infty", certified_depth=max(params.depth + 1, load_settings().max_depth))]
    return [(builtin(*ref), space) for ref in _IDEMPOTENT for space in spaces]


def roundtrip_checks(s: FiniteSemiring, space: InverseSystem, params: SuiteParams) -> List[CheckResult]:
    """Both round trips on `params.cases` seeded measures and functions over one (S, space)."""
    tag = f"{s.label}@{space.label}"
    forward = _CaseRun(f"to_measure∘density:{tag}", params, depth=params.depth)
    backward = _CaseRun(f"density∘to_measure:{tag}", params, depth=params.depth)
    for case, rng in _cases(params, f"roundtrip {tag}"):
        m = random_measure(space, s, rng, params.depth)
        diff = first_difference(to_measure(density(m)), m, params.depth)
        forward.record(diff is None, case, {"measure": m.support.to_dict() if m.support else None, "difference": diff})

        g = random_scott_fn(space, s, rng, params.depth)
        if g.measure.support is not None:
            h = density(to_measure(g))
            ok = pointwise_leq(g, h, params.depth) and pointwise_leq(h, g, params.depth)
            backward.record(ok, case, {"function": g.measure.support.to_dict()})
        else:
            diff = first_difference(to_measure(g), g.measure, params.depth)
            backward.record(diff is None, case, {"locally_constant_from": g.constant_from, "difference": diff})
    return [forward.result(), backward.result()]


def roundtrip_suite(params: SuiteParams) -> List[CheckResult]:
    results = []
    for s, space in _idempotent_cases(params):
        results += roundtrip_checks(s, space, params)
    return results


def _pointwise_join_stage(f: ScottContinuousFn, level: int) -> np.ndarray:
    space = f.space
    out = np.empty(space.level_size(level), dtype=np.int64)
    for c in range(len(out)):
        reps = representatives(space, level, c, [f])
        out[c] = f.order.join_all(eval_pointwise(f, p, f.certified_depth).value for p in reps)
    return out


def clopen_join_suite(params: SuiteParams) -> List[CheckResult]:
    """μ(b) is the join of δ_μ over representatives of b's cells once the support is resolved."""
    results = []
    top = min(3, params.depth)
    for s, space in _idempotent_cases(params):
        tag = f"{s.label}@{space.label}"
        run = _CaseRun(f"clopen_value_is_join:{tag}", params, depth=params.depth, clopen_levels=top)
        masks = _subset_masks(space.level_size(top))
        lift = space.projection(params.depth, top)
        for case, rng in _cases(params, f"join {tag}"):
            m = random_measure(space, s, rng, params.depth)
            pointwise = _pointwise_join_stage(density(m), params.depth)
            lhs = s.reduce_add(np.where(masks, m.stage_at(top)[None, :], s.zero), axis=1)
            rhs = s.reduce_add(np.where(masks[:, lift], pointwise[None, :], s.zero), axis=1)
            bad = np.flatnonzero(lhs != rhs)
            detail = None
            if len(bad):
                i = int(bad[0])
                detail = {
                    "clopen": {"level": top, "cells": [space.cell_name(top, c) for c in np.flatnonzero(masks[i])]},
                    "measure": s.name(lhs[i]),
                    "join": s.name(rhs[i]),
                }
            run.record(not len(bad), case, detail)
        results.append(run.result())
    return results


def galois_suite(params: SuiteParams) -> List[CheckResult]:
    results = []
    for s, space in _idempotent_cases(params):
        tag = f"{s.label}@{space.label}"
        run = _CaseRun(f"adjunction:{tag}", params, depth=params.depth)
        below = 0
        for case, rng in _cases(params, f"galois {tag}"):
            f = random_scott_fn(space, s, rng, params.depth)
            m = random_measure(space, s, rng, params.depth)
            if rng.random() < 0.5:
                m = combine(f.measure, m)
            result = galois_holds(f, m, params.depth)
            below += result.integral_below
            run.record(result.agrees, case, result.to_dict())
        run.details["integral_below"] = below
        results.append(run.result())
    return results


# --- Vietoris -------------------------------------------------------------------------


def vietoris_suite(params: SuiteParams) -> List[CheckResult]:
    b2 = builtin("bool2")
    results = []
    spaces = [make_space("finite", k) for k in (1, 2, 3)] + [_cantor(params)]

    for space in spaces:
        run = _CaseRun(f"closed_sets_biject:{space.label}", params, levels=3)
        for level in range(4):
            for row in _subset_masks(space.level_size(level)):
                m = level_definable(space, b2, level, row.astype(np.int64))
                closed = closed_from_measure(m)
                cells = frozenset(np.flatnonzero(row).tolist())
                ok = closed.cells_at(level) == cells and equal_to_depth(closed_to_measure(closed), m, level)
                run.record(ok, None, {"level": level, "cells": sorted(cells)})
                clopen_set = closed_from_cells(space, level, cells)
                back = closed_from_measure(closed_to_measure(clopen_set))
                run.record(same_closed_set(back, clopen_set, level), None, {"level": level, "closed_cells": sorted(cells)})
        results.append(run.result())

    space = _cantor(params)
    run = _CaseRun("brackets_are_hit_and_miss", params, levels=2)
    for level in range(3):
        rows = _subset_masks(space.level_size(level))
        clopens = [Clopen(space, level, frozenset(np.flatnonzero(r).tolist())) for r in rows]
        for row in rows:
            m = level_definable(space, b2, level, row.astype(np.int64))
            closed = closed_from_measure(m)
            for b in clopens:
                value = eval_measure(m, b)
                ok = (value == 1) == meets(closed, b) == in_diamond(closed, b)
                ok = ok and (value == 0) == contained_in(closed, ~b) == in_box(closed, ~b)
                run.record(ok, None, {"measure": row.astype(int).tolist(), "clopen": b.to_dict(), "value": value})
    results.append(run.result())

    run = _CaseRun("union_is_monad_multiplication", params, depth=params.depth)
    for case, rng in _cases(params, "vietoris"):
        cells = space.level_size(params.depth)
        p, q, r = (random_point(space, params.depth, int(rng.integers(cells)), rng) for _ in range(3))
        a, b, c = singleton(p), union([singleton(q), singleton(r)]), closed_from_cells(space, 1, [int(rng.integers(2))])
        ok = same_closed_set(union([a]), a, params.depth)
        ok = ok and same_closed_set(union([union([a, b]), c]), union([a, union([b, c])]), params.depth)
        ok = ok and same_closed_set(closed_from_measure(dirac(p, b2)), a, params.depth)
        combined = combine(dirac(q, b2), dirac(r, b2))
        ok = ok and same_closed_set(closed_from_measure(combined), b, params.depth)
        ok = ok and same_closed_set(union([], space), closed_from_cells(space, 0, []), params.depth)
        run.record(ok, case, {"points": [p.describe(), q.describe(), r.describe()]})
    results.append(run.result())
    return results


# --- freeness -------------------------------------------------------------------------


def _target_modules(s: FiniteSemiring) -> List[FiniteSemimodule]:
    modules = [self_module(s), direct_sum(self_module(s), self_module(s))]
    chain = three_chain_module(s)
    if validate_semimodule(chain).passed:
        modules.append(chain)
    return modules


def freeness_suite(params: SuiteParams) -> List[CheckResult]:
    """The extension along the Dirac embedding is the unique semimodule map (stage 0 of finite spaces)."""
    results = []
    for s in (builtin("bool2"), builtin("zmod", 2)):
        for k in (1, 2):
            space = make_space("finite", k)
            vectors = all_functions(s.size, k)
            measures = [level_definable(space, s, 0, v) for v in vectors]
            sums = encode(s.add[vectors[:, None, :], vectors[None, :, :]], s.size)
            scaled = encode(s.mul[np.arange(s.size)[:, None, None], vectors[None, :, :]], s.size)
            zero_code = int(encode(np.full(k, s.zero), s.size))
            unit_codes = encode(np.where(np.eye(k, dtype=bool), s.one, s.zero), s.size)
            for y in _target_modules(s):
                run = _CaseRun(f"free_extension:{s.label}:X={k}:{y.label}", params, module_size=y.size)
                candidates = all_functions(y.size, vectors.shape[0])
                homs = (
                    (y.madd[candidates[:, :, None], candidates[:, None, :]] == candidates[:, sums]).all(axis=(1, 2))
                    & (y.action[np.arange(s.size)[None, :, None], candidates[:, None, :]] == candidates[:, scaled]).all(axis=(1, 2))
                    & (candidates[:, zero_code] == y.mzero)
                )
                for assignment in all_functions(y.size, k):
                    f = cell_map(space, 0, assignment, y.size, label="f")
                    g = np.array([free_extension(y, f, m) for m in measures])
                    detail = {"f": [y.carrier[v] for v in assignment], "extension": [y.carrier[v] for v in g]}
                    extends = np.array_equal(g[unit_codes], assignment)
                    is_hom = (
                        np.array_equal(y.madd[g[:, None], g[None, :]], g[sums])
                        and np.array_equal(y.action[np.arange(s.size)[:, None], g[None, :]], g[scaled])
                        and g[zero_code] == y.mzero
                    )
                    agreeing = candidates[homs & (candidates[:, unit_codes] == assignment[None, :]).all(axis=1)]
                    unique = len(agreeing) == 1 and np.array_equal(agreeing[0], g)
                    run.record(extends and is_hom and unique, None, {**detail, "homomorphisms_agreeing": len(agreeing)})
                results.append(run.result())
    return results


# --- continuity -----------------------------------------------------------------------


def continuity_suite(params: SuiteParams) -> List[CheckResult]:
    depth = min(max(params.depth, 6), 12)
    results = []
    report = check_action_joint_continuity(omega_jump_action(), depth)
    element = (report.certificate or {}).get("element")
    caught = not report.passed and element == "omega"
    results.append(
        CheckResult("N_inf on A fails at omega", "pass" if caught else "fail", report.to_dict(), None if caught else {"element": element})
    )
    for action in (self_action(builtin("trop_trunc", 2)), self_action(builtin("bool2")), trivial_action()):
        results.append(CheckResult.from_validation(f"continuous:{action.label}", check_action_joint_continuity(action, depth)))
    shadow = validate_semimodule(three_chain_module(builtin("nat_sat", 2), top_acts_as_omega=True))
    caught = "action_over_scalar_sum" in shadow.laws_failed()
    results.append(
        CheckResult(
            "stage shadow of N_inf on A is not a module",
            "pass" if caught else "fail",
            {"laws_failed": shadow.laws_failed()},
            None if caught else {"laws_failed": shadow.laws_failed()},
        )
    )
    return results


SUITES: Dict[str, Callable[[SuiteParams], List[CheckResult]]] = {
    "semiring": semiring_suite,
    "monad": monad_suite,
    "additivity": additivity_suite,
    "tau": tau_suite,
    "duality": duality_suite,
    "roundtrip": roundtrip_suite,
    "clopen_join": clopen_join_suite,
    "galois": galois_suite,
    "vietoris": vietoris_suite,
    "freeness": freeness_suite,
    "continuity": continuity_suite,
}


def run_suites(names: Sequence[str], params: SuiteParams) -> List[CheckResult]:
    results: List[CheckResult] = []
    for name in names:
        if name not in SUITES:
            raise KeyError(name)
        logger.info("suite %s: depth=%d cases=%d seed=%d", name, params.depth, params.cases, params.seed)
        results += _prefixed(name, SUITES[name](params))
    return results
