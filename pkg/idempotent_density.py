"""
Density and integration for idempotent semirings.

A ScottContinuousFn shares the stage family of a measure; what changes is the
reading. As a measure a stage value is the mass of a cell; as a function the
value at a point is the natural-order meet of the stage values along its
thread. For finitely supported (or locally constant) data that meet is reached
at a known level and the answer is exact; otherwise it is flagged.

For S = bool2 measures are closed sets (the Vietoris hyperspace).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence

import numpy as np

from errors import DepthExhaustedError, MismatchError, StructuralError
from measures import Measure
from profinite_space import Clopen, InverseSystem, Point, greatest_point, least_point, separation_level
from semiring import FiniteSemiring, NaturalOrder, builtin, natural_order
from semiring_monad import pushforward_values

logger = logging.getLogger(__name__)

STABILISED = "stabilised"
DEPTH_BOUNDED = "depth-bounded"


@lru_cache(maxsize=8192)
def _extremes(space: InverseSystem, level: int, cell: int) -> List[Point]:
    lo, hi = least_point(space, level, cell), greatest_point(space, level, cell)
    return [lo] if lo == hi else [lo, hi]


@dataclass(frozen=True, eq=False)
class ScottContinuousFn:
    measure: Measure
    order: NaturalOrder
    # level from which the thread values no longer move (locally constant data)
    constant_from: Optional[int] = None

    @property
    def space(self) -> InverseSystem:
        return self.measure.space

    @property
    def semiring(self) -> FiniteSemiring:
        return self.measure.semiring

    @property
    def certified_depth(self) -> int:
        return self.measure.certified_depth

    @property
    def provenance(self) -> str:
        return self.measure.provenance

    def stage_at(self, n: int) -> np.ndarray:
        return self.measure.stage_at(n)

    @property
    def exact(self) -> bool:
        return self.measure.support is not None or self.constant_from is not None

    def support_points(self) -> List[Point]:
        return self.measure.support.points if self.measure.support is not None else []

    @classmethod
    def from_cells(cls, space: InverseSystem, s: FiniteSemiring, level: int, values: Sequence[int]) -> "ScottContinuousFn":
        """Locally constant function: values[c] on every point of cell c at `level`."""
        order = natural_order(s)
        values = np.asarray(values, dtype=np.int64)
        if values.shape != (space.level_size(level),):
            raise StructuralError(f"level {level} has {space.level_size(level)} cells")

        def stage(n: int) -> np.ndarray:
            if n >= level:
                return values[space.projection(n, level)]
            return pushforward_values(s, space.projection(level, n), values, space.level_size(n))

        return cls(Measure(space, s, stage, "custom", space.certified_depth), order, constant_from=level)

    def __repr__(self) -> str:
        return f"ScottContinuousFn({self.provenance}, {self.semiring.label} on {self.space.label})"


@dataclass(frozen=True)
class PointwiseValue:
    value: int
    flag: str
    level: int

    @property
    def stabilised(self) -> bool:
        return self.flag == STABILISED


def density(m: Measure) -> ScottContinuousFn:
    """δ_μ(x) = ⋀_{x∈b} μ(b), sharing μ's stage family."""
    return ScottContinuousFn(m, natural_order(m.semiring))


def _joint_resolution(fns: Sequence[ScottContinuousFn], extra: Sequence[Point] = ()) -> Optional[int]:
    """A level at which every function is exact on cells, or None if one is not exact."""
    if not all(f.exact for f in fns):
        return None
    base = max((f.constant_from for f in fns if f.constant_from is not None), default=0)
    points: List[Point] = list(extra)
    for f in fns:
        for p in f.support_points():
            if not any(_same_point(p, q) for q in points):
                points.append(p)
    return max(base, separation_level(points))


def _same_point(p: Point, q: Point) -> bool:
    depth = min(p.certified_depth, q.certified_depth)
    return p.thread[: depth + 1] == q.thread[: depth + 1]


def stable_level(f: ScottContinuousFn, p: Point) -> Optional[int]:
    if not f.exact:
        return None
    return _joint_resolution([f], [p])


def eval_pointwise(f: ScottContinuousFn, p: Point, depth: int) -> PointwiseValue:
    if p.space != f.space:
        raise MismatchError(f"point on {p.space.label}, function on {f.space.label}")
    limit = stable_level(f, p)
    top = depth if limit is None else min(depth, limit)
    value = f.order.meet_all(int(f.stage_at(n)[p.at(n)]) for n in range(top + 1))
    if limit is not None and limit <= depth:
        return PointwiseValue(value, STABILISED, limit)
    return PointwiseValue(value, DEPTH_BOUNDED, top)


def integral(f: ScottContinuousFn, b: Clopen) -> int:
    """⋁_{x∈b} f(x), read off the stage at b's level."""
    if b.space != f.space:
        raise MismatchError(f"clopen on {b.space.label}, function on {f.space.label}")
    stage = f.stage_at(b.level)
    return f.order.join_all(int(stage[c]) for c in sorted(b.cells))


def representatives(space: InverseSystem, level: int, cell: int, fns: Iterable[ScottContinuousFn]) -> List[Point]:
    """Least and greatest threads of the cell plus every support point inside it.

    A cell with more than one point always yields a representative off any
    single support point.
    """
    reps = list(_extremes(space, level, cell))
    for f in fns:
        for p in f.support_points():
            if p.at(level) == cell and not any(_same_point(p, q) for q in reps):
                reps.append(p)
    return reps


def _pointwise_stage(f: ScottContinuousFn, level: int) -> np.ndarray:
    """Join of pointwise values over the representatives of each cell at `level`."""
    out = np.empty(f.space.level_size(level), dtype=np.int64)
    for c in range(len(out)):
        out[c] = f.order.join_all(eval_pointwise(f, p, f.certified_depth).value for p in representatives(f.space, level, c, [f]))
    return out


def to_measure(f: ScottContinuousFn) -> Measure:
    """b ↦ ∫_b f, rebuilt from the pointwise values."""
    resolution = _joint_resolution([f])
    if resolution is None:
        # no exact pointwise reading; the stage family is already the integral
        return f.measure
    s = f.semiring

    def stage(n: int) -> np.ndarray:
        level = max(n, resolution)
        values = _pointwise_stage(f, level)
        if level == n:
            return values
        return pushforward_values(s, f.space.projection(level, n), values, f.space.level_size(n))

    depth = min(f.certified_depth, f.space.certified_depth)
    return Measure(f.space, s, stage, f.measure.provenance, depth, support=f.measure.support)


def _check_pair(f: ScottContinuousFn, m: Measure) -> None:
    if f.space != m.space or f.semiring != m.semiring:
        raise MismatchError("function and measure live on different spaces or semirings")


@dataclass(frozen=True)
class GaloisResult:
    integral_below: bool
    pointwise_below: bool
    level: int
    flag: str
    witness: Optional[Dict[str, Any]] = None

    @property
    def agrees(self) -> bool:
        return self.integral_below == self.pointwise_below

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "integral_below": self.integral_below,
            "pointwise_below": self.pointwise_below,
            "agrees": self.agrees,
            "level": self.level,
            "flag": self.flag,
        }
        if self.witness:
            out["witness"] = self.witness
        return out


def _comparison_level(fns: Sequence[ScottContinuousFn], depth: int) -> tuple[int, str]:
    """One level past the joint resolution, so every non-isolated cell has split once."""
    resolution = _joint_resolution(fns)
    if resolution is None:
        return depth, DEPTH_BOUNDED
    certified = min(f.certified_depth for f in fns)
    return min(max(depth, resolution + 1), certified), STABILISED


def galois_holds(f: ScottContinuousFn, m: Measure, depth: int) -> GaloisResult:
    """∫f ≤ m (on clopens) versus f ≤ δ_m (on points), both at a common resolution."""
    _check_pair(f, m)
    dm = density(m)
    level, flag = _comparison_level([f, dm], depth)
    order, space, s = f.order, f.space, f.semiring
    witness: Dict[str, Any] = {}

    integral_below = True
    for n in range(level + 1):
        fs, ms = f.stage_at(n), m.stage_at(n)
        bad = np.flatnonzero(~order.leq_table[fs, ms])
        if len(bad):
            c = int(bad[0])
            integral_below = False
            witness["clopen"] = {"level": n, "cells": [space.cell_name(n, c)], "integral": s.name(fs[c]), "measure": s.name(ms[c])}
            break

    pointwise_below = True
    for c in range(space.level_size(level)):
        for p in representatives(space, level, c, [f, dm]):
            fv = eval_pointwise(f, p, f.certified_depth).value
            dv = eval_pointwise(dm, p, dm.certified_depth).value
            if not order.leq(fv, dv):
                pointwise_below = False
                witness["point"] = {"point": p.describe(), "f": s.name(fv), "density": s.name(dv)}
                break
        if not pointwise_below:
            break

    result = GaloisResult(integral_below, pointwise_below, level, flag, witness or None)
    if not result.agrees:
        logger.warning("adjunction sides disagree at level %d: %s", level, witness)
    return result


def pointwise_leq(f: ScottContinuousFn, g: ScottContinuousFn, depth: int) -> bool:
    """f ≤ g at every representative of the joint resolution."""
    if f.space != g.space or f.semiring != g.semiring:
        raise MismatchError("functions live on different spaces or semirings")
    level, _ = _comparison_level([f, g], depth)
    for c in range(f.space.level_size(level)):
        for p in representatives(f.space, level, c, [f, g]):
            if not f.order.leq(eval_pointwise(f, p, f.certified_depth).value, eval_pointwise(g, p, g.certified_depth).value):
                return False
    return True


def density_preimage(f: ScottContinuousFn, down_set: Iterable[int], depth: int) -> Clopen:
    """Cells at `depth` lying inside f⁻¹(U) for a down-set U; grows with depth towards the open preimage."""
    members = frozenset(int(u) for u in down_set)
    if not f.order.is_down_set(members):
        raise StructuralError(f"{sorted(members)} is not a down-set of {f.semiring.label}")
    stage = f.stage_at(depth)
    return Clopen(f.space, depth, frozenset(c for c, v in enumerate(stage) if int(v) in members))


# --- Vietoris specialisation (S = bool2) ---------------------------------------------


def _bool2() -> FiniteSemiring:
    return builtin("bool2")


@dataclass(frozen=True, eq=False)
class ClosedSetFamily:
    """A closed set given by the cells it meets at each level."""

    space: InverseSystem
    cells_fn: Callable[[int], FrozenSet[int]] = field(repr=False)
    certified_depth: int
    _cache: Dict[int, FrozenSet[int]] = field(default_factory=dict, repr=False)

    def cells_at(self, n: int) -> FrozenSet[int]:
        if n not in self._cache:
            if n > self.certified_depth:
                raise DepthExhaustedError(n, self.certified_depth, "closed set")
            self._cache[n] = frozenset(int(c) for c in self.cells_fn(n))
        return self._cache[n]

    def is_empty(self) -> bool:
        return not self.cells_at(0)

    def names(self, n: int) -> List[str]:
        return [self.space.cell_name(n, c) for c in sorted(self.cells_at(n))]


def closed_from_measure(m: Measure) -> ClosedSetFamily:
    if m.semiring != _bool2():
        raise StructuralError(f"closed sets come from bool2 measures, not {m.semiring.label}")
    return ClosedSetFamily(m.space, lambda n: np.flatnonzero(m.stage_at(n)).tolist(), m.certified_depth)


def closed_to_measure(c: ClosedSetFamily) -> Measure:
    s = _bool2()

    def stage(n: int) -> np.ndarray:
        out = np.zeros(c.space.level_size(n), dtype=np.int64)
        out[list(c.cells_at(n))] = 1
        return out

    return Measure(c.space, s, stage, "custom", c.certified_depth)


def singleton(p: Point) -> ClosedSetFamily:
    return ClosedSetFamily(p.space, lambda n: {p.at(n)}, p.certified_depth)


def union(families: Sequence[ClosedSetFamily], space: Optional[InverseSystem] = None) -> ClosedSetFamily:
    if not families and space is None:
        raise StructuralError("the union of no closed sets needs the space")
    space = space or families[0].space
    if any(c.space != space for c in families):
        raise MismatchError("closed sets on different spaces")
    depth = min((c.certified_depth for c in families), default=space.certified_depth)
    return ClosedSetFamily(space, lambda n: frozenset().union(*(c.cells_at(n) for c in families)), depth)


def closed_from_cells(space: InverseSystem, level: int, cells: Iterable[int]) -> ClosedSetFamily:
    """The clopen union of the given cells, seen as a closed set."""
    base = np.zeros(space.level_size(level), dtype=bool)
    base[list(cells)] = True

    def at(n: int) -> List[int]:
        if n >= level:
            return np.flatnonzero(base[space.projection(n, level)]).tolist()
        return np.unique(space.projection(level, n)[base]).tolist()

    return ClosedSetFamily(space, at, space.certified_depth)


def closed_set_ops(kind: str, *args: Any) -> ClosedSetFamily:
    """from_measure(m) | singleton(p) | union([C...])"""
    ops: Dict[str, Callable[..., ClosedSetFamily]] = {
        "from_measure": closed_from_measure,
        "singleton": singleton,
        "union": union,
    }
    if kind not in ops:
        raise StructuralError(f"unknown closed-set operation {kind!r}")
    return ops[kind](*args)


def meets(c: ClosedSetFamily, b: Clopen) -> bool:
    return bool(c.cells_at(b.level) & b.cells)


def contained_in(c: ClosedSetFamily, b: Clopen) -> bool:
    return c.cells_at(b.level) <= b.cells


def in_diamond(c: ClosedSetFamily, b: Clopen) -> bool:
    """C ∈ ◊b, i.e. ⟨b,{1}⟩."""
    return meets(c, b)


def in_box(c: ClosedSetFamily, b: Clopen) -> bool:
    """C ∈ □b, i.e. ⟨¬b,{0}⟩."""
    return contained_in(c, b)


def same_closed_set(c1: ClosedSetFamily, c2: ClosedSetFamily, depth: int) -> bool:
    return c1.space == c2.space and all(c1.cells_at(n) == c2.cells_at(n) for n in range(depth + 1))
