"""
Boolean (Stone) spaces as ω-indexed inverse chains of finite sets.

Level n has cells 0..size(n)-1 and `transition(n)` maps level n+1 onto level n.
Clopens are level-tagged cell sets compared through their canonical (least
level) form; points are finite certified threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import prod
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import load_settings
from errors import DepthExhaustedError, MismatchError, StructuralError
from semiring import LawViolation, ValidationReport

logger = logging.getLogger(__name__)

SPACE_KINDS = ("cantor", "nat_infty", "finite", "depth_product", "table")


@dataclass(frozen=True, eq=False)
class InverseSystem:
    kind: str
    params: Tuple[Any, ...]
    size_fn: Callable[[int], int] = field(repr=False)
    transition_fn: Callable[[int], np.ndarray] = field(repr=False)
    certified_depth: int
    _cache: Dict[Tuple[Any, ...], np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def label(self) -> str:
        if self.kind == "table":
            return f"table({len(self.params[0])} levels)"
        return f"{self.kind}({', '.join(map(str, self.params))})" if self.params else self.kind

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InverseSystem):
            return NotImplemented
        return self.kind == other.kind and self.params == other.params

    def __hash__(self) -> int:
        return hash((self.kind, self.params))

    def __repr__(self) -> str:
        return f"InverseSystem({self.label})"

    def _check(self, n: int) -> None:
        if n < 0:
            raise StructuralError(f"negative level {n}")
        if n > self.certified_depth:
            raise DepthExhaustedError(n, self.certified_depth, self.label)

    def level_size(self, n: int) -> int:
        self._check(n)
        return int(self.size_fn(n))

    def transition(self, n: int) -> np.ndarray:
        """level n+1 -> level n"""
        self._check(n + 1)
        key = ("t", n)
        if key not in self._cache:
            arr = np.asarray(self.transition_fn(n), dtype=np.int64)
            arr.setflags(write=False)
            self._cache[key] = arr
        return self._cache[key]

    def projection(self, upper: int, lower: int) -> np.ndarray:
        """Composite level `upper` -> level `lower` (upper >= lower)."""
        if upper < lower:
            raise StructuralError(f"cannot project level {upper} to deeper level {lower}")
        self._check(upper)
        key = ("p", upper, lower)
        if key not in self._cache:
            arr = np.arange(self.level_size(upper))
            for n in range(upper - 1, lower - 1, -1):
                arr = self.transition(n)[arr]
            arr.setflags(write=False)
            self._cache[key] = arr
        return self._cache[key]

    def project(self, cell: int, upper: int, lower: int) -> int:
        return int(self.projection(upper, lower)[cell])

    def fibre(self, n: int, cell: int) -> np.ndarray:
        """Cells of level n+1 over `cell`."""
        return np.flatnonzero(self.transition(n) == cell)

    def cell_name(self, n: int, cell: int) -> str:
        if self.kind == "cantor":
            return format(cell, f"0{n}b") if n else "ε"
        if self.kind == "nat_infty":
            return "*" if cell == n else str(cell)
        return str(cell)

    def parse_cell(self, n: int, token: Any) -> int:
        if isinstance(token, (int, np.integer)) and not isinstance(token, bool):
            cell = int(token)
        elif self.kind == "cantor" and isinstance(token, str) and len(token) == n and set(token) <= {"0", "1"}:
            cell = int(token, 2) if n else 0
        elif self.kind == "cantor" and n == 0 and token in ("ε", ""):
            cell = 0
        elif self.kind == "nat_infty" and token == "*":
            cell = n
        else:
            try:
                cell = int(token)
            except (TypeError, ValueError) as exc:
                raise StructuralError(f"{self.label}: cannot read cell {token!r} at level {n}") from exc
        if not 0 <= cell < self.level_size(n):
            raise StructuralError(f"{self.label}: cell {cell} out of range at level {n}")
        return cell

    def top(self) -> "Clopen":
        return Clopen(self, 0, frozenset(range(self.level_size(0))))

    def empty(self) -> "Clopen":
        return Clopen(self, 0, frozenset())

    def clopen(self, level: int, cells: Iterable[Any]) -> "Clopen":
        return Clopen(self, level, frozenset(self.parse_cell(level, c) for c in cells))


def make_space(kind: str, *params: int, certified_depth: Optional[int] = None) -> InverseSystem:
    """cantor, nat_infty, finite(k), depth_product(k1, k2, ...) cycling its factors."""
    depth = load_settings().max_depth if certified_depth is None else certified_depth
    if kind == "cantor":
        return InverseSystem("cantor", (), lambda n: 2**n, lambda n: np.arange(2 ** (n + 1)) >> 1, depth)
    if kind == "nat_infty":
        # level n = {0..n-1, *} with * at index n; n and * both fall to *
        return InverseSystem("nat_infty", (), lambda n: n + 1, lambda n: np.minimum(np.arange(n + 2), n), depth)
    if kind == "finite":
        if len(params) != 1 or int(params[0]) < 1:
            raise StructuralError("finite(k) needs one parameter k >= 1")
        k = int(params[0])
        return InverseSystem("finite", (k,), lambda n: k, lambda n: np.arange(k), depth)
    if kind == "depth_product":
        if not params or any(int(k) < 1 for k in params):
            raise StructuralError("depth_product needs a nonempty list of factors >= 1")
        ks = tuple(int(k) for k in params)

        def size(n: int) -> int:
            return prod(ks[i % len(ks)] for i in range(n))

        return InverseSystem("depth_product", ks, size, lambda n: np.arange(size(n + 1)) // ks[n % len(ks)], depth)
    raise StructuralError(f"unknown space kind {kind!r}; choose from {', '.join(SPACE_KINDS)}")


def table_space(sizes: Sequence[int], transitions: Sequence[Sequence[int]]) -> InverseSystem:
    """Explicit finite prefix; certified to the last listed level."""
    sizes = tuple(int(s) for s in sizes)
    if not sizes or min(sizes) < 1:
        raise StructuralError("table space needs level sizes >= 1")
    if len(transitions) != len(sizes) - 1:
        raise StructuralError(f"{len(sizes)} levels need {len(sizes) - 1} transitions, got {len(transitions)}")
    arrays = []
    for n, t in enumerate(transitions):
        arr = np.asarray(t, dtype=np.int64)
        if arr.shape != (sizes[n + 1],):
            raise StructuralError(f"transition {n + 1}->{n} must list {sizes[n + 1]} entries")
        if arr.size and (arr.min() < 0 or arr.max() >= sizes[n]):
            raise StructuralError(f"transition {n + 1}->{n} has an entry outside level {n}")
        arrays.append(tuple(arr.tolist()))
    params = (sizes, tuple(arrays))
    return InverseSystem("table", params, lambda n: sizes[n], lambda n: np.array(arrays[n]), len(sizes) - 1)


def validate_system(s: InverseSystem, depth: int) -> ValidationReport:
    if depth > s.certified_depth:
        raise DepthExhaustedError(depth, s.certified_depth, s.label)
    violations: List[LawViolation] = []
    checked = ["level_0_nonempty"]
    if s.level_size(0) < 1:
        violations.append(LawViolation("level_0_nonempty", {"size": s.level_size(0)}))
    for n in range(depth):
        checked.append(f"transition_{n + 1}_{n}_surjective")
        hit = np.zeros(s.level_size(n), dtype=bool)
        hit[s.transition(n)] = True
        if not hit.all():
            missed = int(np.flatnonzero(~hit)[0])
            violations.append(LawViolation("transition_surjective", {"level": n, "missed": s.cell_name(n, missed)}))
    return ValidationReport(s.label, tuple(violations), tuple(checked))


@dataclass(frozen=True, eq=False)
class Clopen:
    space: InverseSystem
    level: int
    cells: FrozenSet[int]

    def __post_init__(self) -> None:
        size = self.space.level_size(self.level)
        cells = frozenset(int(c) for c in self.cells)
        if any(not 0 <= c < size for c in cells):
            raise StructuralError(f"clopen cells out of range for level {self.level} of {self.space.label}")
        object.__setattr__(self, "cells", cells)

    def mask(self, level: Optional[int] = None) -> np.ndarray:
        """Boolean cell mask at `level` (>= own level)."""
        level = self.level if level is None else level
        base = np.zeros(self.space.level_size(self.level), dtype=bool)
        base[list(self.cells)] = True
        if level == self.level:
            return base
        return base[self.space.projection(level, self.level)]

    def lift(self, level: int) -> "Clopen":
        return Clopen(self.space, level, frozenset(np.flatnonzero(self.mask(level)).tolist()))

    def canonical(self) -> "Clopen":
        own = self.mask()
        for m in range(self.level + 1):
            proj = self.space.projection(self.level, m)
            image = np.unique(proj[own])
            if np.array_equal(np.isin(proj, image), own):
                return Clopen(self.space, m, frozenset(image.tolist()))
        return self  # pragma: no cover - m == level always matches

    def _key(self) -> Tuple[int, FrozenSet[int]]:
        c = self.canonical()
        return c.level, c.cells

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Clopen):
            return NotImplemented
        return self.space == other.space and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((self.space, self._key()))

    def __and__(self, other: "Clopen") -> "Clopen":
        return clopen_combine(self, other, "and")

    def __or__(self, other: "Clopen") -> "Clopen":
        return clopen_combine(self, other, "or")

    def __sub__(self, other: "Clopen") -> "Clopen":
        return clopen_combine(self, other, "diff")

    def __invert__(self) -> "Clopen":
        return clopen_not(self)

    def __le__(self, other: "Clopen") -> bool:
        return clopen_leq(self, other)

    @property
    def is_empty(self) -> bool:
        return not self.cells

    @property
    def is_top(self) -> bool:
        return len(self.cells) == self.space.level_size(self.level)

    def names(self) -> List[str]:
        return [self.space.cell_name(self.level, c) for c in sorted(self.cells)]

    def to_dict(self) -> Dict[str, Any]:
        return {"level": self.level, "cells": sorted(self.cells)}

    def __repr__(self) -> str:
        return f"Clopen({self.space.label}, level={self.level}, {{{', '.join(self.names())}}})"


def _same_space(a: Clopen, b: Clopen) -> None:
    if a.space != b.space:
        raise MismatchError(f"clopens on different spaces: {a.space.label} vs {b.space.label}")


_OPS: Dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "and": np.logical_and,
    "or": np.logical_or,
    "diff": lambda x, y: x & ~y,
}


def clopen_combine(a: Clopen, b: Clopen, op: str) -> Clopen:
    _same_space(a, b)
    if op not in _OPS:
        raise StructuralError(f"unknown clopen operation {op!r}")
    level = max(a.level, b.level)
    result = _OPS[op](a.mask(level), b.mask(level))
    return Clopen(a.space, level, frozenset(np.flatnonzero(result).tolist())).canonical()


def clopen_not(a: Clopen) -> Clopen:
    return Clopen(a.space, a.level, frozenset(np.flatnonzero(~a.mask()).tolist())).canonical()


def clopen_leq(a: Clopen, b: Clopen) -> bool:
    _same_space(a, b)
    level = max(a.level, b.level)
    return not np.any(a.mask(level) & ~b.mask(level))


def atoms(generators: Sequence[Clopen], space: Optional[InverseSystem] = None) -> List[Clopen]:
    """Atoms of the Boolean subalgebra generated by `generators`, ordered by least cell."""
    if space is None:
        if not generators:
            raise StructuralError("atoms() of no generators needs the space")
        space = generators[0].space
    for g in generators:
        if g.space != space:
            raise MismatchError(f"generator on {g.space.label}, expected {space.label}")
    level = max((g.level for g in generators), default=0)
    if not generators:
        return [space.top()]
    signs = np.stack([g.mask(level) for g in generators], axis=1)
    # one atom per distinct sign pattern; np.unique orders by pattern, re-sort by first cell
    _, first, inverse = np.unique(signs, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    order = np.argsort(first)
    return [Clopen(space, level, frozenset(np.flatnonzero(inverse == k).tolist())).canonical() for k in order]


@dataclass(frozen=True)
class Point:
    space: InverseSystem
    thread: Tuple[int, ...]

    def __post_init__(self) -> None:
        thread = tuple(int(c) for c in self.thread)
        if not thread:
            raise StructuralError("a point needs at least its level-0 cell")
        for n, c in enumerate(thread):
            if not 0 <= c < self.space.level_size(n):
                raise StructuralError(f"thread cell {c} out of range at level {n}")
            if n and self.space.transition(n - 1)[c] != thread[n - 1]:
                raise StructuralError(f"thread is not compatible between levels {n - 1} and {n}")
        object.__setattr__(self, "thread", thread)

    @property
    def certified_depth(self) -> int:
        return len(self.thread) - 1

    def at(self, n: int) -> int:
        if n > self.certified_depth:
            raise DepthExhaustedError(n, self.certified_depth, "point")
        return self.thread[n]

    def describe(self) -> str:
        if self.space.kind == "cantor":
            return self.space.cell_name(self.certified_depth, self.thread[-1]) + "…"
        if self.space.kind == "nat_infty":
            last = self.thread[-1]
            return "inf" if last == self.certified_depth else str(last)
        return "/".join(self.space.cell_name(n, c) for n, c in enumerate(self.thread))

    def to_dict(self) -> Dict[str, Any]:
        return {"thread": list(self.thread)}


def _extend(space: InverseSystem, prefix: List[int], depth: int, choose: Callable[[np.ndarray], int]) -> Point:
    thread = list(prefix)
    while len(thread) <= depth:
        n = len(thread) - 1
        fibre = space.fibre(n, thread[-1])
        if not len(fibre):
            raise StructuralError(f"{space.label}: cell {thread[-1]} at level {n} has an empty fibre")
        thread.append(choose(fibre))
    return Point(space, tuple(thread))


def point_from_thread(space: InverseSystem, cells: Sequence[Any], depth: Optional[int] = None) -> Point:
    """Given prefix, extended by least preimages to `depth` (default: certified depth)."""
    depth = space.certified_depth if depth is None else depth
    prefix = [space.parse_cell(n, c) for n, c in enumerate(cells)]
    if not prefix:
        prefix = [0]
    return _extend(space, prefix, depth, lambda fibre: int(fibre[0]))


def least_point(space: InverseSystem, level: int, cell: int, depth: Optional[int] = None) -> Point:
    """Lexicographically least thread through `cell` at `level`."""
    depth = space.certified_depth if depth is None else depth
    prefix = [space.project(cell, level, n) for n in range(level + 1)]
    return _extend(space, prefix, max(depth, level), lambda fibre: int(fibre[0]))


def greatest_point(space: InverseSystem, level: int, cell: int, depth: Optional[int] = None) -> Point:
    depth = space.certified_depth if depth is None else depth
    prefix = [space.project(cell, level, n) for n in range(level + 1)]
    return _extend(space, prefix, max(depth, level), lambda fibre: int(fibre[-1]))


def least_point_in(c: Clopen, depth: Optional[int] = None) -> Point:
    """Lexicographically least thread inside a nonempty clopen."""
    if not c.cells:
        raise StructuralError("the empty clopen has no points")
    space = c.space
    cell = min(c.cells, key=lambda x: tuple(space.project(x, c.level, n) for n in range(c.level + 1)))
    return least_point(space, c.level, cell, depth)


def random_point(space: InverseSystem, level: int, cell: int, rng: np.random.Generator, depth: Optional[int] = None) -> Point:
    depth = space.certified_depth if depth is None else depth
    prefix = [space.project(cell, level, n) for n in range(level + 1)]
    return _extend(space, prefix, max(depth, level), lambda fibre: int(rng.choice(fibre)))


def cantor_point(bits: str, tail: int = 0, depth: Optional[int] = None) -> Point:
    space = make_space("cantor")
    depth = space.certified_depth if depth is None else depth
    if set(bits) - {"0", "1"} or tail not in (0, 1):
        raise StructuralError(f"bad cantor point {bits!r}+{tail}^ω")
    stream = (bits + str(tail) * max(0, depth - len(bits)))[:depth]
    return Point(space, tuple(int(stream[:n], 2) if n else 0 for n in range(depth + 1)))


def nat_point(value: Optional[int], depth: Optional[int] = None) -> Point:
    """value None is the limit point *."""
    space = make_space("nat_infty")
    depth = space.certified_depth if depth is None else depth
    if value is not None and value < 0:
        raise StructuralError(f"nat_infty point must be >= 0, got {value}")
    return Point(space, tuple(n if value is None or value >= n else value for n in range(depth + 1)))


def point_in(p: Point, c: Clopen) -> bool:
    if p.space != c.space:
        raise MismatchError(f"point on {p.space.label}, clopen on {c.space.label}")
    return p.at(c.level) in c.cells


def separation_level(points: Sequence[Point]) -> int:
    """Least level at which the threads are pairwise distinct."""
    if len(points) < 2:
        return 0
    depth = min(p.certified_depth for p in points)
    for n in range(depth + 1):
        if len({p.thread[n] for p in points}) == len(points):
            return n
    raise DepthExhaustedError(depth + 1, depth, "point separation")


@dataclass(frozen=True, eq=False)
class ContinuousMap:
    source: InverseSystem
    target: InverseSystem
    factor_fn: Callable[[int], int] = field(repr=False)
    stage_fn: Callable[[int], np.ndarray] = field(repr=False)
    label: str = "map"
    _cache: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def factor_level(self, m: int) -> int:
        return int(self.factor_fn(m))

    def stage_map(self, m: int) -> np.ndarray:
        """source level factor_level(m) -> target level m"""
        if m not in self._cache:
            n = self.factor_level(m)
            arr = np.asarray(self.stage_fn(m), dtype=np.int64)
            if arr.shape != (self.source.level_size(n),):
                raise StructuralError(f"{self.label}: stage map {m} must cover level {n} of {self.source.label}")
            if arr.size and (arr.min() < 0 or arr.max() >= self.target.level_size(m)):
                raise StructuralError(f"{self.label}: stage map {m} leaves level {m} of {self.target.label}")
            arr.setflags(write=False)
            self._cache[m] = arr
        return self._cache[m]

    def __repr__(self) -> str:
        return f"ContinuousMap({self.label}: {self.source.label} -> {self.target.label})"


def validate_map(f: ContinuousMap, depth: int) -> ValidationReport:
    """Stage maps commute with transitions and factor levels are monotone."""
    violations: List[LawViolation] = []
    checked = []
    for m in range(depth):
        checked.append(f"square_{m}")
        lo, hi = f.factor_level(m), f.factor_level(m + 1)
        if hi < lo:
            violations.append(LawViolation("factor_monotone", {"level": m, "factor": [lo, hi]}))
            continue
        around = f.target.transition(m)[f.stage_map(m + 1)]
        down = f.stage_map(m)[f.source.projection(hi, lo)]
        bad = np.flatnonzero(around != down)
        if len(bad):
            violations.append(LawViolation("stage_maps_commute", {"level": m, "source_cell": f.source.cell_name(hi, int(bad[0]))}))
    return ValidationReport(f.label, tuple(violations), tuple(checked))


def apply_map(f: ContinuousMap, p: Point) -> Point:
    if p.space != f.source:
        raise MismatchError(f"{f.label} expects a point of {f.source.label}")
    thread = []
    for m in range(f.target.certified_depth + 1):
        n = f.factor_level(m)
        if n > p.certified_depth:
            break
        thread.append(int(f.stage_map(m)[p.at(n)]))
    if not thread:
        raise DepthExhaustedError(f.factor_level(0), p.certified_depth, f.label)
    return Point(f.target, tuple(thread))


def compose_maps(f: ContinuousMap, g: ContinuousMap) -> ContinuousMap:
    """g ∘ f"""
    if f.target != g.source:
        raise MismatchError(f"cannot compose {f.label} into {g.label}")
    return ContinuousMap(
        f.source,
        g.target,
        lambda m: f.factor_level(g.factor_level(m)),
        lambda m: g.stage_map(m)[f.stage_map(g.factor_level(m))],
        label=f"{g.label}∘{f.label}",
    )


def preimage(f: ContinuousMap, c: Clopen) -> Clopen:
    if c.space != f.target:
        raise MismatchError(f"clopen lives on {c.space.label}, {f.label} targets {f.target.label}")
    hits = np.isin(f.stage_map(c.level), list(c.cells))
    return Clopen(f.source, f.factor_level(c.level), frozenset(np.flatnonzero(hits).tolist())).canonical()


def identity_map(space: InverseSystem) -> ContinuousMap:
    return ContinuousMap(space, space, lambda m: m, lambda m: np.arange(space.level_size(m)), label="id")


def cell_map(space: InverseSystem, level: int, assignment: Sequence[int], k: int, label: str = "cells") -> ContinuousMap:
    """Locally constant map to finite(k) reading the level-`level` cell."""
    values = np.asarray(assignment, dtype=np.int64)
    if values.shape != (space.level_size(level),):
        raise StructuralError(f"{label}: need one value per cell at level {level}")
    target = make_space("finite", k, certified_depth=space.certified_depth)
    return ContinuousMap(space, target, lambda m: level, lambda m: values, label=label)


def first_bit_map(space: Optional[InverseSystem] = None) -> ContinuousMap:
    space = space or make_space("cantor")
    if space.kind != "cantor":
        raise StructuralError("first_bit needs the cantor space")
    return cell_map(space, 1, [0, 1], 2, label="first_bit")


def indicator_map(c: Clopen) -> ContinuousMap:
    return cell_map(c.space, c.level, c.mask().astype(np.int64), 2, label="indicator")


def level_projection(space: InverseSystem, n: int) -> ContinuousMap:
    return cell_map(space, n, np.arange(space.level_size(n)), space.level_size(n), label=f"proj_{n}")


def shift_map(space: Optional[InverseSystem] = None) -> ContinuousMap:
    """Drops the first bit: level m of the target reads level m+1 of the source."""
    space = space or make_space("cantor")
    if space.kind != "cantor":
        raise StructuralError("shift needs the cantor space")
    return ContinuousMap(space, space, lambda m: m + 1, lambda m: np.arange(2 ** (m + 1)) % (2**m), label="shift")


MAP_KINDS: Dict[str, Callable[..., ContinuousMap]] = {
    "identity": identity_map,
    "first_bit": first_bit_map,
    "shift": shift_map,
    "indicator": indicator_map,
    "level_projection": level_projection,
}
