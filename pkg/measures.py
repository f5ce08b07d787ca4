"""
Finitely additive S-valued measures on a profinite space.

A measure is a compatible family of stage functions level -> (cell -> S),
computed lazily and cached per measure. Measures built from finitely
supported functions keep their support so downstream code can tell exactly
where values stabilise.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import load_settings
from errors import BudgetExceededError, DepthExhaustedError, MismatchError, StructuralError
from profinite_space import (
    Clopen,
    ContinuousMap,
    InverseSystem,
    Point,
    apply_map,
    atoms,
    least_point,
    least_point_in,
    separation_level,
)
from semiring import FiniteSemiring, FiniteSemimodule
from semiring_monad import pushforward_values

logger = logging.getLogger(__name__)

PROVENANCES = ("dirac", "finsupp", "cells", "stages", "custom")


def _truncate(p: Point, depth: int) -> Point:
    return p if p.certified_depth == depth else Point(p.space, p.thread[: depth + 1])


def _merge(s: FiniteSemiring, pairs: Iterable[Tuple[Point, int]], depth: Optional[int] = None) -> List[Tuple[Point, int]]:
    """Sum values of equal points; threads are compared at their common depth."""
    pairs = list(pairs)
    if not pairs:
        return []
    if depth is None:
        depth = min(p.certified_depth for p, _ in pairs)
    merged: Dict[Point, int] = {}
    for p, v in pairs:
        key = _truncate(p, depth)
        merged[key] = s.plus(merged.get(key, s.zero), v)
    return sorted(merged.items(), key=lambda item: item[0].thread)


@dataclass(frozen=True, eq=False)
class FinSuppFn:
    space: InverseSystem
    semiring: FiniteSemiring
    support: Tuple[Tuple[Point, int], ...] = ()

    def __post_init__(self) -> None:
        support = tuple((p, int(v)) for p, v in self.support)
        for p, v in support:
            if p.space != self.space:
                raise MismatchError(f"support point on {p.space.label}, expected {self.space.label}")
            if not 0 <= v < self.semiring.size:
                raise StructuralError(f"value {v} outside {self.semiring.label}")
        if len(support) > 1:
            try:
                separation_level([p for p, _ in support])
            except DepthExhaustedError as exc:
                raise StructuralError("support points are not distinct at their certified depth") from exc
        object.__setattr__(self, "support", support)

    @classmethod
    def from_pairs(cls, space: InverseSystem, s: FiniteSemiring, pairs: Iterable[Tuple[Point, int]]) -> "FinSuppFn":
        """Merges repeated points by adding their values."""
        return cls(space, s, tuple(_merge(s, pairs)))

    def normalized(self) -> "FinSuppFn":
        return FinSuppFn(self.space, self.semiring, tuple((p, v) for p, v in self.support if v != self.semiring.zero))

    @property
    def points(self) -> List[Point]:
        return [p for p, _ in self.support]

    @property
    def certified_depth(self) -> int:
        return min((p.certified_depth for p in self.points), default=self.space.certified_depth)

    @property
    def separation(self) -> int:
        return separation_level(self.points)

    def value_at(self, p: Point) -> int:
        for q, v in self.support:
            if q.thread[: p.certified_depth + 1] == p.thread[: q.certified_depth + 1]:
                return v
        return self.semiring.zero

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinSuppFn):
            return NotImplemented
        if self.space != other.space or self.semiring != other.semiring:
            return False
        mine, theirs = self.normalized().support, other.normalized().support
        depth = min(self.certified_depth, other.certified_depth)
        return _merge(self.semiring, mine, depth) == _merge(self.semiring, theirs, depth)

    def __hash__(self) -> int:
        return hash((self.space, self.semiring, len(self.normalized().support)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "support": [{"point": p.describe(), "value": self.semiring.name(v)} for p, v in self.support],
        }


@dataclass(frozen=True, eq=False)
class SubbasicConstraint:
    """⟨b, U⟩: measures whose value on b lies in U."""

    clopen: Clopen
    allowed: FrozenSet[int]

    def holds(self, m: "Measure") -> bool:
        return eval_measure(m, self.clopen) in self.allowed


@dataclass(frozen=True, eq=False)
class Measure:
    space: InverseSystem
    semiring: FiniteSemiring
    stage_fn: Callable[[int], np.ndarray] = field(repr=False)
    provenance: str
    certified_depth: int
    support: Optional[FinSuppFn] = None
    _cache: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise StructuralError(f"unknown provenance {self.provenance!r}")

    def stage_at(self, n: int) -> np.ndarray:
        if n > self.certified_depth:
            raise DepthExhaustedError(n, self.certified_depth, f"{self.provenance} measure")
        with self._lock:
            cached = self._cache.get(n)
        if cached is not None:
            return cached
        arr = np.asarray(self.stage_fn(n), dtype=np.int64)
        if arr.shape != (self.space.level_size(n),):
            raise StructuralError(f"stage {n} has shape {arr.shape}, level has {self.space.level_size(n)} cells")
        arr.setflags(write=False)
        with self._lock:
            self._cache.setdefault(n, arr)
            return self._cache[n]

    @property
    def exact(self) -> bool:
        return self.support is not None

    def stage_dict(self, n: int) -> Dict[str, str]:
        return {self.space.cell_name(n, c): self.semiring.name(v) for c, v in enumerate(self.stage_at(n))}

    def __repr__(self) -> str:
        return f"Measure({self.provenance}, {self.semiring.label} on {self.space.label})"


def _same(a: Measure, b: Measure) -> None:
    if a.space != b.space:
        raise MismatchError(f"measures on different spaces: {a.space.label} vs {b.space.label}")
    if a.semiring != b.semiring:
        raise MismatchError(f"measures over different semirings: {a.semiring.label} vs {b.semiring.label}")


def _finsupp_stage(f: FinSuppFn, n: int) -> np.ndarray:
    s = f.semiring
    out = np.full(f.space.level_size(n), s.zero, dtype=np.int64)
    for p, v in f.support:
        c = p.at(n)
        out[c] = s.add[out[c], v]
    return out


def integrate(f: FinSuppFn, provenance: str = "finsupp") -> Measure:
    """τ(f): the measure b ↦ Σ_{x∈b} f(x)."""
    depth = min(f.certified_depth, f.space.certified_depth)
    return Measure(f.space, f.semiring, lambda n: _finsupp_stage(f, n), provenance, depth, support=f)


def dirac(p: Point, s: FiniteSemiring) -> Measure:
    return integrate(FinSuppFn(p.space, s, ((p, s.one),)), provenance="dirac")


def zero_measure(space: InverseSystem, s: FiniteSemiring) -> Measure:
    return integrate(FinSuppFn(space, s, ()))


def level_definable(space: InverseSystem, s: FiniteSemiring, level: int, values: Sequence[int], depth: Optional[int] = None) -> Measure:
    """The measure with the given level stage, all mass of a cell on its least point."""
    values = np.asarray(values, dtype=np.int64)
    if values.shape != (space.level_size(level),):
        raise StructuralError(f"level {level} has {space.level_size(level)} cells, got {values.shape}")
    pairs = [(least_point(space, level, c, depth), int(v)) for c, v in enumerate(values) if v != s.zero]
    return integrate(FinSuppFn(space, s, tuple(pairs)), provenance="cells")


def from_stages(space: InverseSystem, s: FiniteSemiring, stages: Sequence[Sequence[int]]) -> Measure:
    """Explicit stage arrays for levels 0..len-1; certified exactly that far."""
    arrays = [np.asarray(st, dtype=np.int64) for st in stages]
    if not arrays:
        raise StructuralError("at least the level-0 stage is needed")
    for n, arr in enumerate(arrays):
        if arr.shape != (space.level_size(n),):
            raise StructuralError(f"stage {n} needs {space.level_size(n)} values, got {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= s.size):
            raise StructuralError(f"stage {n} has a value outside {s.label}")
    for n in range(len(arrays) - 1):
        summed = pushforward_values(s, space.transition(n), arrays[n + 1], space.level_size(n))
        if not np.array_equal(summed, arrays[n]):
            bad = int(np.flatnonzero(summed != arrays[n])[0])
            raise StructuralError(f"stage {n} disagrees with the fibre sums of stage {n + 1} at cell {space.cell_name(n, bad)}")
    return Measure(space, s, lambda n: arrays[n], "stages", len(arrays) - 1)


def eval_measure(m: Measure, b: Clopen) -> int:
    if b.space != m.space:
        raise MismatchError(f"clopen on {b.space.label}, measure on {m.space.label}")
    stage = m.stage_at(b.level)
    return m.semiring.total(int(stage[c]) for c in sorted(b.cells))


def combine(m1: Measure, m2: Measure) -> Measure:
    _same(m1, m2)
    s = m1.semiring
    if m1.support is not None and m2.support is not None:
        return integrate(FinSuppFn.from_pairs(m1.space, s, m1.support.support + m2.support.support))
    return Measure(
        m1.space, s, lambda n: s.add[m1.stage_at(n), m2.stage_at(n)], "custom", min(m1.certified_depth, m2.certified_depth)
    )


def scale(value: int, m: Measure) -> Measure:
    s = m.semiring
    if not 0 <= value < s.size:
        raise StructuralError(f"scalar {value} outside {s.label}")
    if m.support is not None:
        return integrate(FinSuppFn(m.space, s, tuple((p, s.times(value, v)) for p, v in m.support.support)))
    return Measure(m.space, s, lambda n: s.mul[value, m.stage_at(n)], "custom", m.certified_depth)


def pushforward(m: Measure, h: ContinuousMap) -> Measure:
    """μ ∘ h⁻¹, stage m computed as fibre sums along the stage map."""
    if h.source != m.space:
        raise MismatchError(f"{h.label} starts at {h.source.label}, measure lives on {m.space.label}")
    s, target = m.semiring, h.target
    if m.support is not None:
        pushed = [(apply_map(h, p), v) for p, v in m.support.support]
        provenance = "dirac" if m.provenance == "dirac" else "finsupp"
        return integrate(FinSuppFn.from_pairs(target, s, pushed), provenance=provenance)
    depth = -1
    while depth < target.certified_depth and h.factor_level(depth + 1) <= m.certified_depth:
        depth += 1
    if depth < 0:
        raise DepthExhaustedError(h.factor_level(0), m.certified_depth, f"pushforward along {h.label}")
    return Measure(
        target,
        s,
        lambda n: pushforward_values(s, h.stage_map(n), m.stage_at(h.factor_level(n)), target.level_size(n)),
        "custom",
        depth,
    )


def equal_to_depth(m1: Measure, m2: Measure, d: int) -> bool:
    _same(m1, m2)
    return all(np.array_equal(m1.stage_at(n), m2.stage_at(n)) for n in range(d + 1))


def first_difference(m1: Measure, m2: Measure, d: int) -> Optional[Dict[str, Any]]:
    """Where two measures first disagree up to depth d, or None."""
    _same(m1, m2)
    s = m1.semiring
    for n in range(d + 1):
        a, b = m1.stage_at(n), m2.stage_at(n)
        bad = np.flatnonzero(a != b)
        if len(bad):
            c = int(bad[0])
            return {"level": n, "cell": m1.space.cell_name(n, c), "left": s.name(a[c]), "right": s.name(b[c])}
    return None


def check_compatibility(m: Measure, depth: int) -> Optional[Dict[str, Any]]:
    """stage_at(n) = fibre sums of stage_at(n+1) for n < depth; returns the first failure."""
    s = m.semiring
    for n in range(depth):
        summed = pushforward_values(s, m.space.transition(n), m.stage_at(n + 1), m.space.level_size(n))
        bad = np.flatnonzero(summed != m.stage_at(n))
        if len(bad):
            return {"level": n, "cell": m.space.cell_name(n, int(bad[0]))}
    return None


def separating_clopen(f: FinSuppFn, g: FinSuppFn) -> Optional[Clopen]:
    """A clopen on which τ(f) and τ(g) differ, or None when f = g."""
    if f.space != g.space or f.semiring != g.semiring:
        raise MismatchError("functions on different spaces or semirings")
    s = f.semiring
    merged = _merge(s, [(p, s.zero) for p in f.points + g.points])
    points = [p for p, _ in merged]
    if not points:
        return None
    level = separation_level(points)
    mf, mg = integrate(f).stage_at(level), integrate(g).stage_at(level)
    for p in points:
        c = p.at(level)
        if mf[c] != mg[c]:
            return Clopen(f.space, level, frozenset({c}))
    return None


def additivity_violation(m: Measure, level: int, budget: Optional[int] = None) -> Optional[Dict[str, Any]]:
    """Scan μ(∅)=0 and μ(a∨b)+μ(a∧b)=μ(a)+μ(b) over all clopen pairs at `level`."""
    budget = load_settings().budget if budget is None else budget
    s, cells = m.semiring, m.space.level_size(level)
    if 4**cells > budget:
        raise BudgetExceededError(4**cells, budget, f"clopen pairs at level {level}")
    stage = m.stage_at(level)
    masks = ((np.arange(2**cells)[:, None] >> np.arange(cells)[None, :]) & 1).astype(bool)
    mu = s.reduce_add(np.where(masks, stage[None, :], s.zero), axis=1)
    if mu[0] != s.zero:
        return {"law": "empty_is_zero", "value": s.name(mu[0])}
    a, b = np.meshgrid(np.arange(2**cells), np.arange(2**cells), indexing="ij")
    lhs = s.add[mu[a | b], mu[a & b]]
    rhs = s.add[mu[a], mu[b]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        i, j = (int(v) for v in bad[0])
        return {
            "law": "modular",
            "a": [c for c in range(cells) if i >> c & 1],
            "b": [c for c in range(cells) if j >> c & 1],
            "lhs": s.name(lhs[i, j]),
            "rhs": s.name(rhs[i, j]),
        }
    return None


def satisfies(m: Measure, constraints: Sequence[SubbasicConstraint]) -> bool:
    return all(c.holds(m) for c in constraints)


@dataclass(frozen=True)
class Unsatisfiable:
    level: int
    atom_count: int
    assignments_checked: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "unsatisfiable_at_level": self.level,
            "atoms": self.atom_count,
            "assignments_checked": self.assignments_checked,
        }


def _atom_membership(constraints: Sequence[SubbasicConstraint], atom_list: Sequence[Clopen]) -> np.ndarray:
    return np.array([[a <= c.clopen for a in atom_list] for c in constraints], dtype=bool).reshape(len(constraints), len(atom_list))


def density_witness(
    constraints: Sequence[SubbasicConstraint],
    space: InverseSystem,
    s: FiniteSemiring,
    *,
    budget: Optional[int] = None,
) -> Union[FinSuppFn, Unsatisfiable]:
    """A finitely supported f with τ(f) in every ⟨b, U⟩, on the least point of each atom; or why none exists."""
    budget = load_settings().budget if budget is None else budget
    for c in constraints:
        if c.clopen.space != space:
            raise MismatchError(f"constraint on {c.clopen.space.label}, expected {space.label}")
        if any(not 0 <= u < s.size for u in c.allowed):
            raise StructuralError(f"allowed value outside {s.label}")
    atom_list = atoms([c.clopen for c in constraints], space)
    count = s.size ** len(atom_list)
    if count > budget:
        raise BudgetExceededError(count, budget, "atom-value assignments")
    level = max((c.clopen.level for c in constraints), default=0)
    member = _atom_membership(constraints, atom_list)
    allowed = np.zeros((len(constraints), s.size), dtype=bool)
    for i, c in enumerate(constraints):
        allowed[i, list(c.allowed)] = True

    assignments = np.array(list(product(range(s.size), repeat=len(atom_list))), dtype=np.int64).reshape(count, len(atom_list))
    sums = s.reduce_add(np.where(member[None, :, :], assignments[:, None, :], s.zero), axis=2)
    ok = allowed[np.arange(len(constraints))[None, :], sums].all(axis=1) if constraints else np.ones(count, dtype=bool)
    hits = np.flatnonzero(ok)
    if not len(hits):
        logger.info("no assignment of %d atoms satisfies %d constraints", len(atom_list), len(constraints))
        return Unsatisfiable(level, len(atom_list), count)
    chosen = assignments[int(hits[0])]
    pairs = [
        (least_point_in(a), int(v))
        for a, v in zip(atom_list, chosen)
        if v != s.zero
    ]
    return FinSuppFn(space, s, tuple(pairs))


def free_extension(y: FiniteSemimodule, f: ContinuousMap, m: Measure) -> int:
    """Σ_v (f_*m)({v})·v in y: the semimodule map S(X) -> y extending f."""
    if y.semiring != m.semiring:
        raise MismatchError(f"module over {y.semiring.label}, measure over {m.semiring.label}")
    if f.target.kind != "finite" or f.target.params != (y.size,):
        raise StructuralError(f"{f.label} must target finite({y.size})")
    pushed = pushforward(m, f)
    return y.combination([int(v) for v in pushed.stage_at(0)])


def point_value(f: ContinuousMap, p: Point) -> int:
    """f(p) for a map into a finite discrete space."""
    return apply_map(f, p).thread[0]
