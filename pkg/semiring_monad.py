"""
The semiring monad on finite sets: S(X) = S^X with functor action, unit and
multiplication, and law checks that run over whole enumerations at once.

Functions X -> S are enumerated lexicographically in carrier indices (x0 is
the most significant digit), so a function is identified with its code.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import load_settings
from errors import BudgetExceededError, MismatchError, StructuralError
from reports import CheckResult
from semiring import FiniteSemiring, FiniteSemimodule

logger = logging.getLogger(__name__)

# (semiring, coefficients (B, F), functions (F, n)) -> (B, n)
Multiplication = Callable[[FiniteSemiring, np.ndarray, np.ndarray], np.ndarray]


def base_names(n: int) -> Tuple[str, ...]:
    return tuple(f"x{i}" for i in range(n))


@lru_cache(maxsize=64)
def all_functions(k: int, n: int) -> np.ndarray:
    """All functions {0..n-1} -> {0..k-1} as rows, in lexicographic order."""
    codes = np.arange(k**n)
    powers = k ** np.arange(n - 1, -1, -1)
    table = (codes[:, None] // powers[None, :]) % k
    table.setflags(write=False)
    return table


def encode(rows: np.ndarray, k: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    n = rows.shape[-1]
    return rows @ (k ** np.arange(n - 1, -1, -1))


@dataclass(frozen=True, eq=False)
class FinFn:
    semiring: FiniteSemiring
    base: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.int64)
        if values.shape != (len(self.base),):
            raise StructuralError(f"FinFn needs one value per base element ({len(self.base)}), got {values.shape}")
        if values.size and (values.min() < 0 or values.max() >= self.semiring.size):
            raise StructuralError("FinFn value outside the semiring carrier")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, s: FiniteSemiring, base: Sequence[str], values: Mapping[str, Any]) -> "FinFn":
        unknown = set(values) - set(base)
        if unknown:
            raise StructuralError(f"values given outside the base: {sorted(unknown)}")
        return cls(s, tuple(base), np.array([s.index(values[x]) if x in values else s.zero for x in base]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinFn):
            return NotImplemented
        return self.semiring == other.semiring and self.base == other.base and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.semiring, self.base, self.values.tobytes()))

    def __call__(self, x: str) -> int:
        return int(self.values[self.base.index(x)])

    @property
    def code(self) -> int:
        return int(encode(self.values, self.semiring.size))

    def to_dict(self) -> Dict[str, str]:
        return {x: self.semiring.name(v) for x, v in zip(self.base, self.values)}

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{x}↦{v}" for x, v in self.to_dict().items()) + "}"


@dataclass(frozen=True, eq=False)
class DoubleFinFn:
    """An element of S(S(X)): one coefficient per function X -> S, in code order."""

    semiring: FiniteSemiring
    inner_base: Tuple[str, ...]
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        expected = self.semiring.size ** len(self.inner_base)
        coeffs = np.asarray(self.coefficients, dtype=np.int64)
        if coeffs.shape != (expected,):
            raise StructuralError(f"double function over {len(self.inner_base)} points needs {expected} coefficients")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_terms(cls, s: FiniteSemiring, base: Sequence[str], terms: Sequence[Tuple[FinFn, int]]) -> "DoubleFinFn":
        coeffs = np.full(s.size ** len(base), s.zero, dtype=np.int64)
        for f, c in terms:
            if f.base != tuple(base):
                raise MismatchError("inner function on another base")
            coeffs[f.code] = s.plus(coeffs[f.code], c)
        return cls(s, tuple(base), coeffs)

    def inner(self, code: int) -> FinFn:
        return FinFn(self.semiring, self.inner_base, all_functions(self.semiring.size, len(self.inner_base))[code])


@dataclass(frozen=True)
class FinMap:
    """A function between finite sets given by its table."""

    source: Tuple[str, ...]
    target: Tuple[str, ...]
    table: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.table) != len(self.source):
            raise StructuralError("map table must cover the source")
        if any(not 0 <= t < len(self.target) for t in self.table):
            raise StructuralError("map table leaves the target")

    @classmethod
    def from_mapping(cls, source: Sequence[str], target: Sequence[str], mapping: Mapping[str, str]) -> "FinMap":
        return cls(tuple(source), tuple(target), tuple(list(target).index(mapping[x]) for x in source))

    def then(self, other: "FinMap") -> "FinMap":
        if self.target != other.source:
            raise MismatchError("maps do not compose")
        return FinMap(self.source, other.target, tuple(other.table[t] for t in self.table))


def pushforward_values(s: FiniteSemiring, table: np.ndarray, values: np.ndarray, target_size: int) -> np.ndarray:
    """Fibre sums along `table` for a batch of value rows (..., n) -> (..., target_size)."""
    values = np.asarray(values, dtype=np.int64)
    out = np.full(values.shape[:-1] + (target_size,), s.zero, dtype=np.int64)
    for x, y in enumerate(np.asarray(table, dtype=np.int64)):
        out[..., y] = s.add[out[..., y], values[..., x]]
    return out


def functor_map(s: FiniteSemiring, phi: FinMap, f: FinFn) -> FinFn:
    if f.semiring != s:
        raise MismatchError(f"function over {f.semiring.label}, expected {s.label}")
    if f.base != phi.source:
        raise StructuralError("function base does not match the map's source")
    return FinFn(s, phi.target, pushforward_values(s, np.array(phi.table), f.values, len(phi.target)))


def unit(s: FiniteSemiring, base: Sequence[str], x: str) -> FinFn:
    base = tuple(base)
    if x not in base:
        raise StructuralError(f"{x!r} is not in the base")
    values = np.full(len(base), s.zero, dtype=np.int64)
    values[base.index(x)] = s.one
    return FinFn(s, base, values)


def standard_multiplication(s: FiniteSemiring, coefficients: np.ndarray, functions: np.ndarray) -> np.ndarray:
    """Σ_f F(f)·f(x), batched over rows of `coefficients`."""
    coefficients = np.asarray(coefficients, dtype=np.int64)
    products = s.mul[coefficients[:, :, None], np.asarray(functions)[None, :, :]]
    return s.reduce_add(products, axis=1)


def mult(s: FiniteSemiring, F: DoubleFinFn, multiplication: Optional[Multiplication] = None) -> FinFn:
    if F.semiring != s:
        raise MismatchError(f"double function over {F.semiring.label}, expected {s.label}")
    multiplication = multiplication or standard_multiplication
    table = all_functions(s.size, len(F.inner_base))
    return FinFn(s, F.inner_base, multiplication(s, F.coefficients[None, :], table)[0])


def _capped_power(base: int, exponent: int, cap: int) -> int:
    """base**exponent, or cap+1 once it is clearly larger than cap."""
    if base <= 1:
        return base
    if exponent * math.log(base) > math.log(cap + 1) + 1:
        return cap + 1
    return base**exponent


class _LawRun:
    """Collects the first counterexample per law and the case counts."""

    def __init__(self, s: FiniteSemiring, law: str) -> None:
        self.s = s
        self.law = law
        self.cases = 0
        self.sampled = False
        self.witness: Optional[Dict[str, Any]] = None

    def compare(self, lhs: np.ndarray, rhs: np.ndarray, describe: Callable[[int], Dict[str, Any]]) -> None:
        lhs, rhs = np.asarray(lhs), np.asarray(rhs)
        self.cases += lhs.shape[0]
        if self.witness is not None:
            return
        bad = np.flatnonzero(np.any(lhs != rhs, axis=-1))
        if len(bad):
            i = int(bad[0])
            self.witness = describe(i)
            self.witness["lhs"] = self.s.names(lhs[i])
            self.witness["rhs"] = self.s.names(rhs[i])

    def result(self, **details: Any) -> CheckResult:
        if self.witness is not None:
            status = "fail"
        elif self.sampled:
            status = "partial"
        else:
            status = "pass"
        details = {"cases": self.cases, "exhaustive": not self.sampled, **details}
        return CheckResult(self.law, status, details, self.witness)


def _fn_text(s: FiniteSemiring, row: Sequence[int]) -> str:
    return "{" + ", ".join(f"x{i}↦{s.name(v)}" for i, v in enumerate(row)) + "}"


def _double_text(s: FiniteSemiring, coeffs: np.ndarray, functions: np.ndarray) -> Dict[str, str]:
    return {_fn_text(s, functions[j]): s.name(c) for j, c in enumerate(coeffs) if c != s.zero}


def check_monad_laws(
    s: FiniteSemiring,
    max_base_size: int,
    *,
    budget: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    multiplication: Optional[Multiplication] = None,
) -> List[CheckResult]:
    """Unit, associativity, naturality and functoriality laws for bases 0..max_base_size.

    A law whose enumeration exceeds `budget` is checked on `samples` seeded
    random inputs and reported as partial.
    """
    settings = load_settings()
    budget = settings.budget if budget is None else budget
    samples = settings.cases if samples is None else samples
    seed = settings.seed if seed is None else seed
    mu = multiplication or standard_multiplication
    k = s.size
    rng = np.random.default_rng(seed)

    if _capped_power(k, max_base_size, budget) > budget:
        raise BudgetExceededError(k**max_base_size, budget, f"S(X) for |X|={max_base_size}")

    runs = {
        name: _LawRun(s, name)
        for name in (
            "left_unit",
            "right_unit",
            "associativity",
            "unit_naturality",
            "mult_naturality",
            "functor_identity",
            "functor_composition",
        )
    }

    for n in range(max_base_size + 1):
        T1 = all_functions(k, n)
        m1 = T1.shape[0]
        eta_codes = encode(np.where(np.eye(n, dtype=bool), s.one, s.zero).reshape(n, n), k)

        # μ ∘ S(η) = id
        lifted = pushforward_values(s, eta_codes, T1, m1)
        runs["left_unit"].compare(mu(s, lifted, T1), T1, lambda i: {"base_size": n, "f": _fn_text(s, T1[i])})
        # μ ∘ η_S = id
        units = np.where(np.eye(m1, dtype=bool), s.one, s.zero)
        runs["right_unit"].compare(mu(s, units, T1), T1, lambda i: {"base_size": n, "f": _fn_text(s, T1[i])})

        _check_associativity(s, n, T1, mu, runs["associativity"], budget, samples, rng)

        for p in range(max_base_size + 1):
            maps = all_functions(p, n)  # every φ: X_n -> Y_p
            for phi in maps:
                pushed = pushforward_values(s, phi, T1, p)
                T1p = all_functions(k, p)
                eta_p = np.where(np.eye(p, dtype=bool), s.one, s.zero)
                # S(φ) ∘ η_X = η_Y ∘ φ
                if n:
                    runs["unit_naturality"].compare(
                        pushforward_values(s, phi, np.where(np.eye(n, dtype=bool), s.one, s.zero), p),
                        eta_p[phi],
                        lambda i, phi=phi: {"base_size": n, "phi": phi.tolist(), "x": f"x{i}"},
                    )
                _check_mult_naturality(s, n, p, phi, T1, T1p, pushed, mu, runs["mult_naturality"], budget, samples, rng)
                if p == n and np.array_equal(phi, np.arange(n)):
                    runs["functor_identity"].compare(pushed, T1, lambda i: {"base_size": n, "f": _fn_text(s, T1[i])})
                for q in range(max_base_size + 1):
                    for psi in all_functions(q, p):
                        runs["functor_composition"].compare(
                            pushforward_values(s, psi, pushed, q),
                            pushforward_values(s, psi[phi], T1, q),
                            lambda i, phi=phi, psi=psi: {"phi": phi.tolist(), "psi": psi.tolist(), "f": _fn_text(s, T1[i])},
                        )

    results = [run.result(semiring=s.label, max_base_size=max_base_size) for run in runs.values()]
    for r in results:
        if r.failed:
            logger.warning("%s: %s failed: %s", s.label, r.name, r.witness)
    return results


def _check_associativity(
    s: FiniteSemiring,
    n: int,
    T1: np.ndarray,
    mu: Multiplication,
    run: _LawRun,
    budget: int,
    samples: int,
    rng: np.random.Generator,
) -> None:
    """μ ∘ S(μ) = μ ∘ μ_S on S(S(S(X_n)))."""
    k, m1 = s.size, T1.shape[0]
    m2 = _capped_power(k, m1, budget)
    m3 = _capped_power(k, m2, budget) if m2 <= budget else budget + 1
    if m3 <= budget:
        T2 = all_functions(k, m1)
        mu_codes = encode(mu(s, T2, T1), k)
        T3 = all_functions(k, m2)
        for start in range(0, T3.shape[0], 4096):
            psi = T3[start : start + 4096]
            lhs = mu(s, pushforward_values(s, mu_codes, psi, m1), T1)
            rhs = mu(s, mu(s, psi, T2), T1)
            run.compare(lhs, rhs, lambda i, psi=psi: {"base_size": n, "psi": _double_text(s, psi[i], T2)})
        return

    # sparse samples: Ψ = Σ_j t_j·η(Φ_j) with distinct Φ_j
    run.sampled = True
    for _ in range(samples):
        phis = np.unique(rng.integers(0, k, size=(int(rng.integers(1, 4)), m1)), axis=0)
        t = rng.integers(0, k, size=(1, phis.shape[0]))
        inner = encode(mu(s, phis, T1), k)
        lhs = mu(s, pushforward_values(s, inner, t, m1), T1)
        rhs = mu(s, mu(s, t, phis), T1)
        run.compare(lhs, rhs, lambda i, phis=phis, t=t: {
            "base_size": n,
            "psi": [{"coefficient": s.name(t[0, j]), "Phi": _double_text(s, phis[j], T1)} for j in range(phis.shape[0])],
        })
        if run.witness is not None:
            return


def _check_mult_naturality(
    s: FiniteSemiring,
    n: int,
    p: int,
    phi: np.ndarray,
    T1: np.ndarray,
    T1p: np.ndarray,
    pushed: np.ndarray,
    mu: Multiplication,
    run: _LawRun,
    budget: int,
    samples: int,
    rng: np.random.Generator,
) -> None:
    """μ_Y ∘ SS(φ) = S(φ) ∘ μ_X on S(S(X_n))."""
    k, m1 = s.size, T1.shape[0]
    pushed_codes = encode(pushed, k)
    m2 = _capped_power(k, m1, budget)
    if m2 <= budget:
        phis = all_functions(k, m1)
    else:
        run.sampled = True
        phis = rng.integers(0, k, size=(samples, m1))
    lhs = mu(s, pushforward_values(s, pushed_codes, phis, T1p.shape[0]), T1p)
    rhs = pushforward_values(s, phi, mu(s, phis, T1), p)
    run.compare(lhs, rhs, lambda i: {"base_size": n, "phi": phi.tolist(), "Phi": _double_text(s, phis[i], T1)})


def skip_coefficients(s: FiniteSemiring, coefficients: np.ndarray, functions: np.ndarray) -> np.ndarray:
    """Broken multiplication Σ_{F(f)≠0} f(x); used to show the law checks bite."""
    coefficients = np.asarray(coefficients, dtype=np.int64)
    return standard_multiplication(s, np.where(coefficients != s.zero, s.one, s.zero), functions)


def structure_map(module: FiniteSemimodule, coefficients: np.ndarray) -> np.ndarray:
    """h(f) = Σ_m f(m)·m for a batch of f ∈ S(M), rows indexed by module elements."""
    coefficients = np.asarray(coefficients, dtype=np.int64)
    acted = module.action[coefficients, np.arange(module.size)[None, :]]
    acc = np.full(coefficients.shape[0], module.mzero, dtype=np.int64)
    for j in range(module.size):
        acc = module.madd[acc, acted[:, j]]
    return acc


def check_algebra_laws(
    module: FiniteSemimodule,
    *,
    budget: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> List[CheckResult]:
    """h ∘ η_M = id and h ∘ μ_M = h ∘ S(h): the evaluation map is a monad algebra."""
    settings = load_settings()
    budget = settings.budget if budget is None else budget
    samples = settings.cases if samples is None else samples
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    s, m = module.semiring, module.size

    unit_run = _LawRun(s, "algebra_unit")
    evaluated = structure_map(module, np.where(np.eye(m, dtype=bool), s.one, s.zero))
    unit_run.cases = m
    bad = np.flatnonzero(evaluated != np.arange(m))
    if len(bad):
        i = int(bad[0])
        unit_run.witness = {"m": module.carrier[i], "lhs": module.carrier[int(evaluated[i])], "rhs": module.carrier[i]}

    assoc = _LawRun(s, "algebra_associativity")
    m1 = _capped_power(s.size, m, budget)
    if m1 > budget:
        raise BudgetExceededError(m1, budget, f"S(M) for |M|={m}")
    T1 = all_functions(s.size, m)
    h_codes = structure_map(module, T1)
    m2 = _capped_power(s.size, m1, budget)
    if m2 <= budget:
        phis = all_functions(s.size, m1)
    else:
        assoc.sampled = True
        phis = rng.integers(0, s.size, size=(samples, m1))
    lhs = structure_map(module, standard_multiplication(s, phis, T1))
    rhs = structure_map(module, pushforward_values(s, h_codes, phis, m))
    bad = np.flatnonzero(lhs != rhs)
    assoc.cases = phis.shape[0]
    if len(bad):
        i = int(bad[0])
        assoc.witness = {
            "Phi": _double_text(s, phis[i], T1),
            "lhs": module.carrier[int(lhs[i])],
            "rhs": module.carrier[int(rhs[i])],
        }
    return [unit_run.result(module=module.label), assoc.result(module=module.label)]
