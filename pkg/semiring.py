"""
Finite semirings and semimodules as lookup-table algebras.

Carrier elements are indices 0..k-1; `zero` and `one` are given explicitly so
quotients and subalgebras never need renumbering. Law checks scan every
pair/triple at once with numpy broadcasting and report the first witness.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from errors import DepthExhaustedError, NotIdempotentError, StructuralError

logger = logging.getLogger(__name__)

BUILTIN_NAMES = ("bool2", "zmod", "trop_trunc", "nat_sat")

# limit elements of N∞-like chains; math.inf is the non-isolated point
LimitPoint = Hashable


def _frozen(table: Any, shape: Tuple[int, ...], what: str, bound: int) -> np.ndarray:
    try:
        arr = np.asarray(table, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise StructuralError(f"{what}: not an integer table ({exc})") from exc
    if arr.shape != shape:
        raise StructuralError(f"{what}: expected shape {shape}, got {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= bound):
        bad = tuple(int(i) for i in np.argwhere((arr < 0) | (arr >= bound))[0])
        raise StructuralError(f"{what}: entry at {bad} is out of range 0..{bound - 1}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _check_index(value: Any, bound: int, what: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or not 0 <= int(value) < bound:
        raise StructuralError(f"{what}: {value!r} is not an index in 0..{bound - 1}")
    return int(value)


@dataclass(frozen=True)
class LawViolation:
    law: str
    witness: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"law": self.law, "witness": self.witness}


@dataclass(frozen=True)
class ValidationReport:
    subject: str
    violations: Tuple[LawViolation, ...] = ()
    checked: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def laws_failed(self) -> List[str]:
        return [v.law for v in self.violations]

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"subject": self.subject, "status": self.status, "checked": list(self.checked)}
        if self.violations:
            out["witness"] = [v.to_dict() for v in self.violations]
        return out


@dataclass(frozen=True, eq=False)
class FiniteSemiring:
    label: str
    elements: Tuple[str, ...]
    add: np.ndarray
    mul: np.ndarray
    zero: int
    one: int

    def __post_init__(self) -> None:
        k = len(self.elements)
        if k < 1:
            raise StructuralError(f"{self.label}: empty carrier")
        object.__setattr__(self, "elements", tuple(str(e) for e in self.elements))
        object.__setattr__(self, "add", _frozen(self.add, (k, k), f"{self.label}.add", k))
        object.__setattr__(self, "mul", _frozen(self.mul, (k, k), f"{self.label}.mul", k))
        object.__setattr__(self, "zero", _check_index(self.zero, k, f"{self.label}.zero"))
        object.__setattr__(self, "one", _check_index(self.one, k, f"{self.label}.one"))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "FiniteSemiring":
        """Build from a descriptor dict: {label, size, zero, one, add, mul[, elements]}."""
        try:
            size = int(data["size"])
            elements = data.get("elements") or [str(i) for i in range(size)]
            if len(elements) != size:
                raise StructuralError(f"elements lists {len(elements)} names for size {size}")
            return cls(
                label=str(data.get("label", "semiring")),
                elements=tuple(elements),
                add=data["add"],
                mul=data["mul"],
                zero=data["zero"],
                one=data["one"],
            )
        except KeyError as exc:
            raise StructuralError(f"semiring descriptor is missing {exc}") from exc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSemiring):
            return NotImplemented
        return (
            self.elements == other.elements
            and self.zero == other.zero
            and self.one == other.one
            and np.array_equal(self.add, other.add)
            and np.array_equal(self.mul, other.mul)
        )

    def __hash__(self) -> int:
        return hash((self.elements, self.zero, self.one, self.add.tobytes(), self.mul.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteSemiring({self.label})"

    @property
    def size(self) -> int:
        return len(self.elements)

    def name(self, index: int) -> str:
        return self.elements[int(index)]

    def names(self, indices: Iterable[int]) -> List[str]:
        return [self.elements[int(i)] for i in indices]

    def index(self, name: Any) -> int:
        if isinstance(name, (int, np.integer)) and not isinstance(name, bool):
            return _check_index(name, self.size, self.label)
        try:
            return self.elements.index(str(name))
        except ValueError as exc:
            raise StructuralError(f"{self.label}: unknown element {name!r}") from exc

    def plus(self, a: int, b: int) -> int:
        return int(self.add[a, b])

    def times(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def total(self, values: Iterable[int]) -> int:
        acc = self.zero
        for v in values:
            acc = int(self.add[acc, v])
        return acc

    def reduce_add(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """Semiring sum along one axis of an index array (empty axis sums to zero)."""
        values = np.moveaxis(np.asarray(values, dtype=np.int64), axis, -1)
        acc = np.full(values.shape[:-1], self.zero, dtype=np.int64)
        for j in range(values.shape[-1]):
            acc = self.add[acc, values[..., j]]
        return acc

    @cached_property
    def is_idempotent(self) -> bool:
        idx = np.arange(self.size)
        return bool(np.all(self.add[idx, idx] == idx))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "size": self.size,
            "zero": self.zero,
            "one": self.one,
            "elements": list(self.elements),
            "add": self.add.tolist(),
            "mul": self.mul.tolist(),
        }


def _scan(law: str, lhs: np.ndarray, rhs: np.ndarray, variables: Sequence[str], names: Sequence[str]) -> Optional[LawViolation]:
    shape = np.broadcast_shapes(lhs.shape, rhs.shape)
    bad = np.argwhere(np.broadcast_to(lhs != rhs, shape))
    if not len(bad):
        return None
    pos = tuple(int(i) for i in bad[0])
    witness: Dict[str, Any] = {var: names[i] for var, i in zip(variables, pos)}
    witness["lhs"] = names[int(np.broadcast_to(lhs, shape)[pos])]
    witness["rhs"] = names[int(np.broadcast_to(rhs, shape)[pos])]
    return LawViolation(law, witness)


def validate_semiring(candidate: FiniteSemiring | Mapping[str, Any]) -> ValidationReport:
    """Exhaustive check of every semiring law; structural problems raise StructuralError."""
    s = candidate if isinstance(candidate, FiniteSemiring) else FiniteSemiring.from_mapping(candidate)
    k, add, mul, z, o = s.size, s.add, s.mul, s.zero, s.one
    idx = np.arange(k)
    a3, b3, c3 = np.ix_(idx, idx, idx)
    a2, b2 = np.ix_(idx, idx)
    names = s.elements

    checks: List[Tuple[str, np.ndarray, np.ndarray, Tuple[str, ...]]] = [
        ("add_associative", add[add[a3, b3], c3], add[a3, add[b3, c3]], ("a", "b", "c")),
        ("add_commutative", add[a2, b2], add[b2, a2], ("a", "b")),
        ("add_identity", add[z, idx], idx, ("a",)),
        ("mul_associative", mul[mul[a3, b3], c3], mul[a3, mul[b3, c3]], ("a", "b", "c")),
        ("mul_left_identity", mul[o, idx], idx, ("a",)),
        ("mul_right_identity", mul[idx, o], idx, ("a",)),
        ("left_distributive", mul[a3, add[b3, c3]], add[mul[a3, b3], mul[a3, c3]], ("a", "b", "c")),
        ("right_distributive", mul[add[b3, c3], a3], add[mul[b3, a3], mul[c3, a3]], ("a", "b", "c")),
        ("left_annihilation", mul[z, idx], np.full(k, z), ("a",)),
        ("right_annihilation", mul[idx, z], np.full(k, z), ("a",)),
    ]
    violations = [v for law, lhs, rhs, var in checks if (v := _scan(law, lhs, rhs, var, names))]
    checked = [law for law, *_ in checks]
    if k > 1:
        checked.append("zero_ne_one")
        if z == o:
            violations.append(LawViolation("zero_ne_one", {"zero": names[z], "one": names[o]}))
    if violations:
        logger.info("%s: %d law(s) violated", s.label, len(violations))
    return ValidationReport(s.label, tuple(violations), tuple(checked))


@lru_cache(maxsize=64)
def builtin(name: str, *params: int) -> FiniteSemiring:
    """bool2, zmod(n), trop_trunc(k) and nat_sat(n), validated on construction."""
    if name not in BUILTIN_NAMES:
        raise StructuralError(f"unknown builtin semiring {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    if name == "bool2":
        if params:
            raise StructuralError("bool2 takes no parameters")
        idx = np.arange(2)
        s = FiniteSemiring("bool2", ("0", "1"), idx[:, None] | idx[None, :], idx[:, None] & idx[None, :], 0, 1)
    else:
        if len(params) != 1:
            raise StructuralError(f"{name} takes exactly one integer parameter")
        n = int(params[0])
        if n < 1:
            raise StructuralError(f"{name} parameter must be >= 1, got {n}")
        s = _FAMILIES[name](n)
    report = validate_semiring(s)
    if not report.passed:  # pragma: no cover - the families are known semirings
        raise StructuralError(f"builtin {s.label} failed validation: {report.laws_failed()}")
    return s


def _zmod(n: int) -> FiniteSemiring:
    i, j = np.ix_(np.arange(n), np.arange(n))
    return FiniteSemiring(f"zmod({n})", tuple(str(v) for v in range(n)), (i + j) % n, (i * j) % n, 0, 1 % n)


def _trop_trunc(k: int) -> FiniteSemiring:
    # indices 0..k are the finite values, k+1 is ∞; index order is numeric order
    inf = k + 1
    i, j = np.ix_(np.arange(k + 2), np.arange(k + 2))
    add = np.minimum(i, j)
    mul = np.where((i == inf) | (j == inf) | (i + j > k), inf, i + j)
    return FiniteSemiring(f"trop_trunc({k})", tuple(str(v) for v in range(k + 1)) + ("inf",), add, mul, inf, 0)


def _nat_sat(n: int) -> FiniteSemiring:
    # indices 0..n-1 are values, n is ⊤ (everything >= n)
    top = n
    i, j = np.ix_(np.arange(n + 1), np.arange(n + 1))
    add = np.where((i == top) | (j == top) | (i + j >= n), top, i + j)
    mul = np.where((i == 0) | (j == 0), 0, np.where((i == top) | (j == top) | (i * j >= n), top, i * j))
    one = 1 if n > 1 else top
    return FiniteSemiring(f"nat_sat({n})", tuple(str(v) for v in range(n)) + ("top",), add, mul, 0, one)


_FAMILIES: Dict[str, Callable[[int], FiniteSemiring]] = {
    "zmod": _zmod,
    "trop_trunc": _trop_trunc,
    "nat_sat": _nat_sat,
}

_REF = re.compile(r"^\s*(?P<name>[a-z_0-9]+?)\s*(?:[:(]\s*(?P<param>-?\d+)\s*\)?)?\s*$")


def builtin_from_ref(ref: str) -> FiniteSemiring:
    """`bool2`, `zmod:3`, `trop_trunc:2` or a label such as `nat_sat(4)`."""
    match = _REF.match(ref)
    if not match:
        raise StructuralError(f"cannot parse semiring reference {ref!r}")
    param = match.group("param")
    return builtin(match.group("name"), *(() if param is None else (int(param),)))


@dataclass(frozen=True, eq=False)
class NaturalOrder:
    """a <= b iff a + b = b; a join-semilattice with bottom = zero, hence a lattice."""

    semiring: FiniteSemiring
    leq_table: np.ndarray

    def leq(self, a: int, b: int) -> bool:
        return bool(self.leq_table[a, b])

    def lt(self, a: int, b: int) -> bool:
        return a != b and self.leq(a, b)

    def join(self, a: int, b: int) -> int:
        return self.semiring.plus(a, b)

    @cached_property
    def meet_table(self) -> np.ndarray:
        k = self.semiring.size
        table = np.empty((k, k), dtype=np.int64)
        for a in range(k):
            for b in range(k):
                lower = np.flatnonzero(self.leq_table[:, a] & self.leq_table[:, b])
                greatest = [c for c in lower if self.leq_table[lower, c].all()]
                table[a, b] = greatest[0]
        table.setflags(write=False)
        return table

    def meet(self, a: int, b: int) -> int:
        return int(self.meet_table[a, b])

    def meet_all(self, values: Iterable[int]) -> int:
        acc = self.top
        for v in values:
            acc = int(self.meet_table[acc, v])
        return acc

    def join_all(self, values: Iterable[int]) -> int:
        return self.semiring.total(values)

    @property
    def bottom(self) -> int:
        return self.semiring.zero

    @cached_property
    def top(self) -> int:
        return self.semiring.total(range(self.semiring.size))

    def pairs(self) -> List[Tuple[str, str]]:
        names = self.semiring.elements
        return [(names[a], names[b]) for a, b in np.argwhere(self.leq_table) if a != b]

    def chain_description(self) -> str:
        """Elements listed bottom-up by the number of elements below them."""
        order = sorted(range(self.semiring.size), key=lambda a: (int(self.leq_table[:, a].sum()), a))
        return " <= ".join(self.semiring.names(order))

    def down_set(self, a: int) -> FrozenSet[int]:
        return frozenset(int(c) for c in np.flatnonzero(self.leq_table[:, a]))

    def is_down_set(self, subset: Iterable[int]) -> bool:
        members = set(subset)
        return all(self.down_set(a) <= members for a in members)

    def down_sets(self) -> List[FrozenSet[int]]:
        """Opens of the dual Scott topology, which for finite S is the down-set topology."""
        k = self.semiring.size
        found = []
        for r in range(k + 1):
            for combo in combinations(range(k), r):
                if self.is_down_set(combo):
                    found.append(frozenset(combo))
        return found

    def to_dict(self) -> Dict[str, Any]:
        return {
            "semiring": self.semiring.label,
            "bottom": self.semiring.name(self.bottom),
            "top": self.semiring.name(self.top),
            "order": self.chain_description(),
            "pairs": [list(p) for p in self.pairs()],
        }


def natural_order(s: FiniteSemiring) -> NaturalOrder:
    idx = np.arange(s.size)
    doubled = s.add[idx, idx]
    if not np.all(doubled == idx):
        a = int(np.flatnonzero(doubled != idx)[0])
        raise NotIdempotentError(s.label, {"element": s.name(a), "sum": s.name(doubled[a]), "law": "a+a=a"})
    # the general definition: a <= b iff some u has a + u = b
    exists = np.zeros((s.size, s.size), dtype=bool)
    for u in range(s.size):
        exists[idx, s.add[idx, u]] = True
    direct = s.add == idx[None, :]
    if not np.array_equal(exists, direct):  # pragma: no cover - implied by idempotency
        raise StructuralError(f"{s.label}: natural order disagrees with a+b=b")
    direct = direct.copy()
    direct.setflags(write=False)
    return NaturalOrder(s, direct)


@dataclass(frozen=True, eq=False)
class FiniteSemimodule:
    semiring: FiniteSemiring
    carrier: Tuple[str, ...]
    madd: np.ndarray
    mzero: int
    action: np.ndarray
    label: str = "module"

    def __post_init__(self) -> None:
        m, k = len(self.carrier), self.semiring.size
        if m < 1:
            raise StructuralError(f"{self.label}: empty carrier")
        object.__setattr__(self, "carrier", tuple(str(c) for c in self.carrier))
        object.__setattr__(self, "madd", _frozen(self.madd, (m, m), f"{self.label}.madd", m))
        object.__setattr__(self, "action", _frozen(self.action, (k, m), f"{self.label}.action", m))
        object.__setattr__(self, "mzero", _check_index(self.mzero, m, f"{self.label}.mzero"))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], semiring: FiniteSemiring) -> "FiniteSemimodule":
        try:
            madd = data["madd"]
            carrier = data.get("carrier") or [str(i) for i in range(len(madd))]
            return cls(semiring, tuple(carrier), madd, data["mzero"], data["action"], str(data.get("label", "module")))
        except KeyError as exc:
            raise StructuralError(f"semimodule descriptor is missing {exc}") from exc

    def __repr__(self) -> str:
        return f"FiniteSemimodule({self.label} over {self.semiring.label})"

    @property
    def size(self) -> int:
        return len(self.carrier)

    def plus(self, a: int, b: int) -> int:
        return int(self.madd[a, b])

    def act(self, s: int, m: int) -> int:
        return int(self.action[s, m])

    def total(self, values: Iterable[int]) -> int:
        acc = self.mzero
        for v in values:
            acc = int(self.madd[acc, v])
        return acc

    def combination(self, coefficients: Sequence[int]) -> int:
        """Σ_v coefficients[v]·v, the evaluation map S(M) -> M."""
        if len(coefficients) != self.size:
            raise StructuralError(f"{self.label}: expected {self.size} coefficients, got {len(coefficients)}")
        return self.total(self.act(c, v) for v, c in enumerate(coefficients))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "semiring": self.semiring.label,
            "carrier": list(self.carrier),
            "madd": self.madd.tolist(),
            "mzero": self.mzero,
            "action": self.action.tolist(),
        }


def validate_semimodule(m: FiniteSemimodule) -> ValidationReport:
    s = m.semiring
    madd, act, zm = m.madd, m.action, m.mzero
    mi, si = np.arange(m.size), np.arange(s.size)
    x3, y3, z3 = np.ix_(mi, mi, mi)
    x2, y2 = np.ix_(mi, mi)
    s_sm, n_sm = np.ix_(si, mi)
    s3, t3, n3 = np.ix_(si, si, mi)
    s_mm, a_mm, b_mm = np.ix_(si, mi, mi)
    carrier = m.carrier

    def named(law: str, lhs: np.ndarray, rhs: np.ndarray, variables: Tuple[Tuple[str, Sequence[str]], ...]) -> Optional[LawViolation]:
        full = np.broadcast_shapes(lhs.shape, rhs.shape)
        lhs_b, rhs_b = np.broadcast_to(lhs, full), np.broadcast_to(rhs, full)
        bad = np.argwhere(lhs_b != rhs_b)
        if not len(bad):
            return None
        pos = tuple(int(i) for i in bad[0])
        witness: Dict[str, Any] = {var: labels[i] for (var, labels), i in zip(variables, pos)}
        witness["lhs"] = carrier[int(lhs_b[pos])]
        witness["rhs"] = carrier[int(rhs_b[pos])]
        return LawViolation(law, witness)

    S, M = s.elements, carrier
    checks = [
        ("madd_associative", madd[madd[x3, y3], z3], madd[x3, madd[y3, z3]], (("m", M), ("n", M), ("p", M))),
        ("madd_commutative", madd[x2, y2], madd[y2, x2], (("m", M), ("n", M))),
        ("madd_identity", madd[zm, mi], mi, (("m", M),)),
        ("action_over_module_sum", act[s_mm, madd[a_mm, b_mm]], madd[act[s_mm, a_mm], act[s_mm, b_mm]], (("s", S), ("m", M), ("n", M))),
        ("action_over_scalar_sum", act[s.add[s3, t3], n3], madd[act[s3, n3], act[t3, n3]], (("s", S), ("t", S), ("m", M))),
        ("action_compatible", act[s.mul[s3, t3], n3], act[s3, act[t3, n3]], (("s", S), ("t", S), ("m", M))),
        ("action_unit", act[s.one, mi], mi, (("m", M),)),
        ("action_zero_scalar", act[s.zero, mi], np.full(m.size, zm), (("m", M),)),
        ("action_zero_module", act[si, zm], np.full(s.size, zm), (("s", S),)),
    ]
    violations = tuple(v for law, lhs, rhs, var in checks if (v := named(law, lhs, rhs, var)))
    return ValidationReport(f"{m.label} over {s.label}", violations, tuple(c[0] for c in checks))


def self_module(s: FiniteSemiring) -> FiniteSemimodule:
    return FiniteSemimodule(s, s.elements, s.add, s.zero, s.mul, label=s.label)


def three_chain_module(s: FiniteSemiring, *, top_acts_as_omega: bool = False) -> FiniteSemimodule:
    """A = {0 < 1 < ω} under join, nonzero scalars acting as the identity.

    Valid over zero-sum-free semirings without zero divisors (nat_sat, bool2).
    With `top_acts_as_omega` the last scalar sends 1 to ω, the stage shadow of
    the N∞ action, which breaks (s+t)m = sm+tm.
    """
    madd = np.maximum.outer(np.arange(3), np.arange(3))
    action = np.tile(np.arange(3), (s.size, 1))
    action[s.zero, :] = 0
    if top_acts_as_omega:
        action[s.size - 1, 1] = 2
    return FiniteSemimodule(s, ("0", "1", "omega"), madd, 0, action, label="A")


def direct_sum(a: FiniteSemimodule, b: FiniteSemimodule) -> FiniteSemimodule:
    """a ⊕ b with pairs (i, j) stored at index i * |b| + j."""
    if a.semiring != b.semiring:
        raise StructuralError(f"modules over {a.semiring.label} and {b.semiring.label}")
    i, j = np.divmod(np.arange(a.size * b.size), b.size)
    madd = a.madd[i[:, None], i[None, :]] * b.size + b.madd[j[:, None], j[None, :]]
    action = a.action[:, i] * b.size + b.action[:, j]
    carrier = tuple(f"({x},{y})" for x in a.carrier for y in b.carrier)
    return FiniteSemimodule(a.semiring, carrier, madd, a.mzero * b.size + b.mzero, action, label=f"{a.label}+{b.label}")


def limit_name(point: LimitPoint) -> str:
    return "inf" if point == math.inf else str(point)


@dataclass(frozen=True, eq=False)
class ProfiniteSemiringChain:
    """Inverse chain of finite semirings with surjective quotient maps.

    `locate(p, n)` sends a limit point to its stage-n cell; `samples(n, c)`
    lists limit points inside cell c, finite ones first, a non-isolated limit
    point (if any) last.
    """

    label: str
    stage_fn: Callable[[int], FiniteSemiring]
    quotient_fn: Callable[[int], np.ndarray]
    locate_fn: Callable[[LimitPoint, int], int]
    samples_fn: Callable[[int, int], Tuple[LimitPoint, ...]]
    exactness_depth: int

    def _check_depth(self, n: int) -> None:
        if n > self.exactness_depth:
            raise DepthExhaustedError(n, self.exactness_depth, self.label)

    def stage(self, n: int) -> FiniteSemiring:
        self._check_depth(n)
        return self.stage_fn(n)

    def quotient(self, n: int) -> np.ndarray:
        """stage(n+1) -> stage(n)."""
        self._check_depth(n + 1)
        return np.asarray(self.quotient_fn(n), dtype=np.int64)

    def locate(self, point: LimitPoint, n: int) -> int:
        self._check_depth(n)
        return self.locate_fn(point, n)

    def samples(self, n: int, cell: int) -> Tuple[LimitPoint, ...]:
        self._check_depth(n)
        return self.samples_fn(n, cell)

    def validate(self, depth: int) -> ValidationReport:
        """Each quotient is a surjective map preserving +, ·, 0 and 1."""
        self._check_depth(depth)
        violations: List[LawViolation] = []
        checked: List[str] = []
        for n in range(depth):
            lower, upper, q = self.stage(n), self.stage(n + 1), self.quotient(n)
            checked.append(f"quotient_{n}")
            if q.shape != (upper.size,):
                violations.append(LawViolation("quotient_shape", {"level": n, "shape": list(q.shape)}))
                continue
            missed = sorted(set(range(lower.size)) - set(q.tolist()))
            if missed:
                violations.append(LawViolation("quotient_surjective", {"level": n, "missed": lower.name(missed[0])}))
            i, j = np.ix_(np.arange(upper.size), np.arange(upper.size))
            for law, lhs, rhs in (
                ("quotient_preserves_add", q[upper.add[i, j]], lower.add[q[i], q[j]]),
                ("quotient_preserves_mul", q[upper.mul[i, j]], lower.mul[q[i], q[j]]),
            ):
                bad = np.argwhere(lhs != rhs)
                if len(bad):
                    x, y = (int(v) for v in bad[0])
                    violations.append(LawViolation(law, {"level": n, "x": upper.name(x), "y": upper.name(y)}))
            if q[upper.zero] != lower.zero or q[upper.one] != lower.one:
                violations.append(LawViolation("quotient_preserves_constants", {"level": n}))
        return ValidationReport(self.label, tuple(violations), tuple(checked))


def nat_sat_chain(exactness_depth: int = 12) -> ProfiniteSemiringChain:
    """N∞ = lim nat_sat(n+1); limit points are ints and math.inf."""

    def quotient(n: int) -> np.ndarray:
        # nat_sat(n+2) -> nat_sat(n+1): n+1 and ⊤ both collapse to ⊤ = n+1
        return np.array(list(range(n + 1)) + [n + 1, n + 1])

    def locate(point: LimitPoint, n: int) -> int:
        return int(point) if point != math.inf and point <= n else n + 1

    def samples(n: int, cell: int) -> Tuple[LimitPoint, ...]:
        return (cell,) if cell <= n else (n + 1, n + 2, math.inf)

    return ProfiniteSemiringChain("nat_sat_chain", lambda n: builtin("nat_sat", n + 1), quotient, locate, samples, exactness_depth)


def trop_chain(exactness_depth: int = 12) -> ProfiniteSemiringChain:
    """(N∞, min, +) = lim trop_trunc(n+1)."""

    def quotient(n: int) -> np.ndarray:
        return np.array(list(range(n + 2)) + [n + 2, n + 2])

    def locate(point: LimitPoint, n: int) -> int:
        return int(point) if point != math.inf and point <= n + 1 else n + 2

    def samples(n: int, cell: int) -> Tuple[LimitPoint, ...]:
        return (cell,) if cell <= n + 1 else (n + 2, n + 3, math.inf)

    return ProfiniteSemiringChain("trop_chain", lambda n: builtin("trop_trunc", n + 1), quotient, locate, samples, exactness_depth)


def constant_chain(s: FiniteSemiring, exactness_depth: int = 12) -> ProfiniteSemiringChain:
    ident = np.arange(s.size)
    return ProfiniteSemiringChain(
        f"constant({s.label})", lambda n: s, lambda n: ident, lambda p, n: int(p), lambda n, c: (c,), exactness_depth
    )


@dataclass(frozen=True, eq=False)
class StageAction:
    """Action of the limit semiring of `chain` on a finite discrete module."""

    chain: ProfiniteSemiringChain
    carrier: Tuple[str, ...]
    madd: np.ndarray
    act: Callable[[LimitPoint, int], int]
    label: str = "action"

    def action_at(self, n: int) -> List[List[FrozenSet[int]]]:
        """Per stage-n scalar cell and module element, the values taken on the cell."""
        stage = self.chain.stage(n)
        return [
            [frozenset(self.act(p, m) for p in self.chain.samples(n, cell)) for m in range(len(self.carrier))]
            for cell in range(stage.size)
        ]

    def factors_at(self, n: int) -> bool:
        return all(len(vals) == 1 for row in self.action_at(n) for vals in row)


@dataclass(frozen=True)
class ContinuityReport:
    subject: str
    depth: int
    passed: bool
    factoring_level: Optional[int] = None
    certificate: Optional[Dict[str, Any]] = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"subject": self.subject, "status": self.status, "depth": self.depth}
        if self.factoring_level is not None:
            out["factoring_level"] = self.factoring_level
        if self.certificate:
            out["witness"] = self.certificate
        return out


def check_action_joint_continuity(a: StageAction, depth: int) -> ContinuityReport:
    """Preimages of module elements must be unions of stage cells by `depth`."""
    if depth > a.chain.exactness_depth:
        raise DepthExhaustedError(depth, a.chain.exactness_depth, a.chain.label)
    first_factoring = next((n for n in range(depth + 1) if a.factors_at(n)), None)
    if first_factoring is not None:
        return ContinuityReport(a.label, depth, True, factoring_level=first_factoring)

    stage = a.chain.stage(depth)
    for cell in range(stage.size):
        pts = a.chain.samples(depth, cell)
        for m in range(len(a.carrier)):
            values = [a.act(p, m) for p in pts]
            if len(set(values)) == 1:
                continue
            thread, reached = pts[-1], values[-1]
            missed = [limit_name(p) for p, v in zip(pts, values) if v != reached]
            certificate = {
                "element": a.carrier[reached],
                "module_element": a.carrier[m],
                "thread": limit_name(thread),
                "level": depth,
                "cell": stage.name(cell),
                "contains": [limit_name(thread), a.carrier[m]],
                "misses": [[p, a.carrier[m]] for p in missed],
            }
            logger.info("%s: preimage of %s not clopen at level %d", a.label, certificate["element"], depth)
            return ContinuityReport(a.label, depth, False, certificate=certificate)
    return ContinuityReport(a.label, depth, False)  # pragma: no cover - factors_at(depth) was False


def omega_jump_action(exactness_depth: int = 12) -> StageAction:
    """N∞ acting on A = {0 < 1 < ω}: ∞ sends 1 to ω, finite nonzero scalars fix everything."""

    def act(p: LimitPoint, m: int) -> int:
        if p == 0 or m == 0:
            return 0
        return 2 if p == math.inf else m

    madd = np.maximum.outer(np.arange(3), np.arange(3))
    return StageAction(nat_sat_chain(exactness_depth), ("0", "1", "omega"), madd, act, label="N_inf on A")


def trivial_action(exactness_depth: int = 12) -> StageAction:
    madd = np.maximum.outer(np.arange(3), np.arange(3))
    return StageAction(nat_sat_chain(exactness_depth), ("0", "1", "omega"), madd, lambda p, m: m, label="trivial on A")


def self_action(s: FiniteSemiring, exactness_depth: int = 12) -> StageAction:
    return StageAction(constant_chain(s, exactness_depth), s.elements, s.add, lambda p, m: s.times(p, m), label=f"{s.label} on itself")
