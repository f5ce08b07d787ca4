"""
JSON descriptors for semirings, modules, spaces, clopens, points, measures and maps.

Descriptors are pydantic models; `build` turns them into library values.
Wherever a semiring is expected a builtin shorthand (`bool2`, `zmod:3`,
`trop_trunc:2`) or a path to a semiring descriptor may be given instead.
"""

from __future__ import annotations

import json
import logging
import os
from typing import Any, Literal, TypeVar

from pydantic import BaseModel, Field, ValidationError, model_validator

from config import load_settings
from errors import DescriptorError, StructuralError
from measures import FinSuppFn, Measure, SubbasicConstraint, dirac, from_stages, integrate, level_definable
from profinite_space import (
    MAP_KINDS,
    SPACE_KINDS,
    Clopen,
    ContinuousMap,
    InverseSystem,
    Point,
    cantor_point,
    cell_map,
    make_space,
    nat_point,
    point_from_thread,
    table_space,
)
from semiring import FiniteSemimodule, FiniteSemiring, builtin_from_ref

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


class SemiringDescriptor(BaseModel):
    label: str = Field("semiring", description="보고서에 쓰이는 이름")
    size: int = Field(..., ge=1, description="원소 개수 k (원소는 0..k-1)")
    zero: int = Field(..., ge=0, description="덧셈 항등원 인덱스")
    one: int = Field(..., ge=0, description="곱셈 항등원 인덱스")
    add: list[list[int]]
    mul: list[list[int]]
    elements: list[str] | None = None

    def build(self) -> FiniteSemiring:
        return FiniteSemiring.from_mapping(self.model_dump())


class SemimoduleDescriptor(BaseModel):
    label: str = "module"
    semiring: str | SemiringDescriptor = Field(..., description="builtin 이름(zmod:3) 또는 semiring descriptor 경로")
    carrier: list[str] | None = None
    madd: list[list[int]]
    mzero: int = Field(..., ge=0)
    action: list[list[int]] = Field(..., description="action[s][m] = s·m")

    def build(self, base_dir: str | None = None) -> FiniteSemimodule:
        s = resolve_semiring(self.semiring, base_dir)
        return FiniteSemimodule.from_mapping(self.model_dump(exclude={"semiring"}), s)


class SpaceDescriptor(BaseModel):
    kind: Literal["cantor", "nat_infty", "finite", "depth_product", "table"]
    params: list[int] = Field(default_factory=list, description="finite(k) / depth_product(k1, k2, ...)")
    k: int | None = Field(None, ge=1, description="finite 공간의 크기 (params 대신)")
    sizes: list[int] | None = Field(None, description="table: 레벨별 셀 개수")
    transitions: list[list[int]] | None = Field(None, description="table: 레벨 n+1 -> n 사상")
    certified_depth: int | None = Field(None, ge=1)

    @model_validator(mode="after")
    def _table_fields(self) -> "SpaceDescriptor":
        if self.kind == "table" and (self.sizes is None or self.transitions is None):
            raise ValueError("table spaces need both sizes and transitions")
        return self

    def build(self) -> InverseSystem:
        if self.kind == "table":
            return table_space(self.sizes or [], self.transitions or [])
        params = list(self.params)
        if self.kind == "finite" and not params and self.k is not None:
            params = [self.k]
        return make_space(self.kind, *params, certified_depth=self.certified_depth)


class ClopenDescriptor(BaseModel):
    level: int = Field(..., ge=0)
    cells: list[int | str] = Field(default_factory=list, description="셀 인덱스 또는 이름 (cantor: '01')")

    def build(self, space: InverseSystem) -> Clopen:
        return space.clopen(self.level, self.cells)


class PointDescriptor(BaseModel):
    bits: str | None = Field(None, description="cantor: 접두 비트열")
    tail: int = Field(0, ge=0, le=1, description="cantor: 이후 반복되는 비트")
    value: int | None = Field(None, ge=0, description="nat_infty: 자연수, null이면 극한점 *")
    thread: list[int | str] | None = Field(None, description="임의 공간: 레벨 0부터의 셀 목록")

    @model_validator(mode="after")
    def _one_form(self) -> "PointDescriptor":
        forms = [self.bits is not None, "value" in self.model_fields_set, self.thread is not None]
        if sum(forms) != 1:
            raise ValueError("a point is given by exactly one of bits, value or thread")
        return self

    def build(self, space: InverseSystem) -> Point:
        depth = min(space.certified_depth, load_settings().max_depth)
        if self.bits is not None:
            if space.kind != "cantor":
                raise StructuralError(f"bit points live on cantor, not {space.label}")
            return Point(space, cantor_point(self.bits, self.tail, depth).thread)
        if self.thread is not None:
            return point_from_thread(space, self.thread)
        if space.kind != "nat_infty":
            raise StructuralError(f"value points live on nat_infty, not {space.label}")
        return Point(space, nat_point(self.value, depth).thread)


class SupportEntry(BaseModel):
    point: PointDescriptor
    value: int | str = Field(..., description="semiring 원소 (인덱스 또는 이름)")


class MeasureDescriptor(BaseModel):
    space: str | SpaceDescriptor = "cantor"
    semiring: str | SemiringDescriptor
    provenance: Literal["dirac", "finsupp", "stages", "cells"] = "finsupp"
    support: list[SupportEntry] = Field(default_factory=list)
    stages: list[list[int | str]] | None = Field(None, description="레벨 0부터의 명시적 stage 배열")
    level: int | None = Field(None, ge=0, description="cells: 값을 주는 레벨")
    values: list[int | str] | None = Field(None, description="cells: 레벨의 셀별 값")

    @model_validator(mode="after")
    def _fields_for_provenance(self) -> "MeasureDescriptor":
        if self.provenance == "dirac" and len(self.support) != 1:
            raise ValueError("a dirac measure has exactly one support point")
        if self.provenance == "stages" and not self.stages:
            raise ValueError("provenance 'stages' needs the stages arrays")
        if self.provenance == "cells" and (self.level is None or self.values is None):
            raise ValueError("provenance 'cells' needs level and values")
        return self

    def build(self, base_dir: str | None = None) -> Measure:
        space = resolve_space(self.space, base_dir)
        s = resolve_semiring(self.semiring, base_dir)
        if self.provenance == "dirac":
            return dirac(self.support[0].point.build(space), s)
        if self.provenance == "stages":
            return from_stages(space, s, [[s.index(v) for v in row] for row in self.stages or []])
        if self.provenance == "cells":
            return level_definable(space, s, self.level or 0, [s.index(v) for v in self.values or []])
        pairs = [(e.point.build(space), s.index(e.value)) for e in self.support]
        return integrate(FinSuppFn.from_pairs(space, s, pairs))


class ContinuousMapDescriptor(BaseModel):
    kind: Literal["identity", "first_bit", "shift", "indicator", "level_projection", "cells"]
    clopen: ClopenDescriptor | None = Field(None, description="indicator: 대상 clopen")
    level: int | None = Field(None, ge=0, description="level_projection / cells: 읽는 레벨")
    values: list[int] | None = Field(None, description="cells: 셀별 목적지 (0..k-1)")
    k: int | None = Field(None, ge=1, description="cells: 목적 공간 finite(k)의 크기")

    @model_validator(mode="after")
    def _fields_for_kind(self) -> "ContinuousMapDescriptor":
        if self.kind == "indicator" and self.clopen is None:
            raise ValueError("indicator maps need a clopen")
        if self.kind == "level_projection" and self.level is None:
            raise ValueError("level_projection needs a level")
        if self.kind == "cells" and (self.level is None or self.values is None or self.k is None):
            raise ValueError("cells maps need level, values and k")
        return self

    def build(self, space: InverseSystem) -> ContinuousMap:
        if self.kind == "indicator":
            return MAP_KINDS["indicator"](self.clopen.build(space))  # type: ignore[union-attr]
        if self.kind == "level_projection":
            return MAP_KINDS["level_projection"](space, self.level)
        if self.kind == "cells":
            return cell_map(space, self.level or 0, self.values or [], self.k or 1)
        return MAP_KINDS[self.kind](space)


class ConstraintDescriptor(BaseModel):
    clopen: ClopenDescriptor
    allowed: list[int | str] = Field(..., description="허용되는 값 U")


class WitnessRequest(BaseModel):
    space: str | SpaceDescriptor = "cantor"
    semiring: str | SemiringDescriptor
    constraints: list[ConstraintDescriptor] = Field(default_factory=list)

    def build(self, base_dir: str | None = None) -> tuple[InverseSystem, FiniteSemiring, list[SubbasicConstraint]]:
        space = resolve_space(self.space, base_dir)
        s = resolve_semiring(self.semiring, base_dir)
        constraints = [
            SubbasicConstraint(c.clopen.build(space), frozenset(s.index(v) for v in c.allowed)) for c in self.constraints
        ]
        return space, s, constraints


def load_json(path: str, model: type[M]) -> M:
    """Read `path` into `model`; every failure becomes a DescriptorError naming file and field."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw: Any = json.load(f)
    except FileNotFoundError as exc:
        raise DescriptorError("file not found", location=path) from exc
    except json.JSONDecodeError as exc:
        raise DescriptorError(exc.msg, location=f"{path}:{exc.lineno}:{exc.colno}") from exc
    except OSError as exc:
        raise DescriptorError(str(exc), location=path) from exc
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        logger.debug("descriptor %s failed validation: %s", path, exc)
        raise DescriptorError(first["msg"], location=f"{path}:{field}" if field else path) from exc


def _find_file(ref: str, base_dir: str | None) -> str | None:
    candidates = [ref]
    if base_dir:
        candidates.append(os.path.join(base_dir, ref))
    candidates.append(os.path.join(load_settings().data_dir, ref))
    return next((c for c in candidates if os.path.isfile(c)), None)


def resolve_semiring(ref: str | SemiringDescriptor, base_dir: str | None = None) -> FiniteSemiring:
    """Descriptor, descriptor path or builtin shorthand."""
    if isinstance(ref, SemiringDescriptor):
        return ref.build()
    path = _find_file(ref, base_dir)
    if path is not None:
        return load_json(path, SemiringDescriptor).build()
    try:
        return builtin_from_ref(ref)
    except StructuralError as exc:
        raise DescriptorError(str(exc), location=ref) from exc


def resolve_space(ref: str | SpaceDescriptor, base_dir: str | None = None) -> InverseSystem:
    """Descriptor, descriptor path, or `kind[:p1,p2,...]` such as `finite:3`."""
    if isinstance(ref, SpaceDescriptor):
        return ref.build()
    path = _find_file(ref, base_dir)
    if path is not None:
        return load_json(path, SpaceDescriptor).build()
    kind, _, raw = ref.partition(":")
    kind = kind.strip()
    if kind not in SPACE_KINDS or kind == "table":
        raise DescriptorError(f"unknown space {kind!r}", location=ref)
    try:
        params = [int(p) for p in raw.split(",") if p.strip()]
    except ValueError as exc:
        raise DescriptorError("space parameters must be integers", location=ref) from exc
    return make_space(kind, *params)


def load_semiring(path: str) -> FiniteSemiring:
    return resolve_semiring(path)


def load_semimodule(path: str) -> FiniteSemimodule:
    return load_json(path, SemimoduleDescriptor).build(os.path.dirname(path))


def load_measure(path: str) -> Measure:
    return load_json(path, MeasureDescriptor).build(os.path.dirname(path))
