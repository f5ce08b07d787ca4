from __future__ import annotations

import json

import pytest
from pydantic import ValidationError

from descriptors import (
    ContinuousMapDescriptor,
    MeasureDescriptor,
    PointDescriptor,
    SemiringDescriptor,
    SpaceDescriptor,
    WitnessRequest,
    load_json,
    load_measure,
    load_semimodule,
    load_semiring,
    resolve_semiring,
    resolve_space,
)
from errors import DescriptorError, StructuralError
from measures import FinSuppFn, density_witness
from profinite_space import make_space
from semiring import builtin, validate_semimodule, validate_semiring


# ---------- load_json ----------


def test_malformed_json_names_file_and_line(data_dir) -> None:
    path = str(data_dir / "malformed.json")
    with pytest.raises(DescriptorError) as info:
        load_json(path, SemiringDescriptor)
    assert info.value.location.startswith(path + ":")
    assert path in str(info.value)


def test_missing_file(tmp_path) -> None:
    path = str(tmp_path / "nope.json")
    with pytest.raises(DescriptorError, match="file not found") as info:
        load_json(path, SemiringDescriptor)
    assert info.value.location == path


def test_validation_error_names_field(tmp_path) -> None:
    path = tmp_path / "partial.json"
    path.write_text(json.dumps({"size": 2, "zero": 0, "one": 1, "add": [[0, 1], [1, 0]]}), encoding="utf-8")
    with pytest.raises(DescriptorError) as info:
        load_json(str(path), SemiringDescriptor)
    assert info.value.location == f"{path}:mul"


def test_broken_descriptor_loads_but_fails_validation(data_dir) -> None:
    s = load_semiring(str(data_dir / "broken_z2.json"))
    assert s.label == "broken_z2"
    assert not validate_semiring(s).passed


# ---------- references ----------


def test_resolve_semiring() -> None:
    assert resolve_semiring("zmod:3") == builtin("zmod", 3)
    # found through PROFSEM_DATA_DIR
    assert resolve_semiring("trop_trunc2.json") == builtin("trop_trunc", 2)
    with pytest.raises(DescriptorError):
        resolve_semiring("quaternions")


def test_resolve_space() -> None:
    assert resolve_space("finite:3") == make_space("finite", 3)
    assert resolve_space("depth_product:2,3") == make_space("depth_product", 2, 3)
    assert resolve_space("space_table.json").level_size(2) == 4
    for bad in ("hilbert", "finite:x", "table"):
        with pytest.raises(DescriptorError):
            resolve_space(bad)


def test_space_descriptor() -> None:
    assert SpaceDescriptor(kind="finite", k=4).build() == make_space("finite", 4)
    assert SpaceDescriptor(kind="cantor", certified_depth=6).build().certified_depth == 6
    with pytest.raises(ValidationError):
        SpaceDescriptor(kind="table")
    with pytest.raises(ValidationError):
        SpaceDescriptor(kind="sphere")


# ---------- points ----------


def test_point_needs_exactly_one_form() -> None:
    with pytest.raises(ValidationError):
        PointDescriptor()
    with pytest.raises(ValidationError):
        PointDescriptor(bits="01", value=3)
    with pytest.raises(ValidationError):
        PointDescriptor(bits="0", tail=2)


def test_point_build() -> None:
    nat = make_space("nat_infty")
    assert PointDescriptor(value=None).build(nat).describe() == "inf"
    assert PointDescriptor(value=3).build(nat).describe() == "3"
    assert PointDescriptor(thread=["ε", "1"]).build(make_space("cantor")).thread[:3] == (0, 1, 2)
    with pytest.raises(StructuralError):
        PointDescriptor(bits="1").build(nat)
    with pytest.raises(StructuralError):
        PointDescriptor(value=1).build(make_space("cantor"))


# ---------- measures ----------


def test_stage_measure_file(data_dir) -> None:
    m = load_measure(str(data_dir / "measure_stages.json"))
    assert m.provenance == "stages"
    assert m.certified_depth == 2
    assert m.stage_at(2).tolist() == [1, 0, 0, 1]


def test_dirac_measure_file(data_dir) -> None:
    m = load_measure(str(data_dir / "measure_dirac_nat.json"))
    assert m.provenance == "dirac"
    star = m.space.clopen(2, ["*"])
    assert m.stage_at(2)[2] == 1
    assert m.space.cell_name(2, 2) == "*"
    assert sorted(star.cells) == [2]


def test_trop_measure_file(data_dir) -> None:
    m = load_measure(str(data_dir / "measure_trop.json"))
    assert m.stage_dict(1) == {"0": "1", "1": "2"}
    assert isinstance(m.support, FinSuppFn)
    assert len(m.support.support) == 2


def test_measure_descriptor_checks_provenance_fields() -> None:
    with pytest.raises(ValidationError):
        MeasureDescriptor(semiring="bool2", provenance="dirac")
    with pytest.raises(ValidationError):
        MeasureDescriptor(semiring="bool2", provenance="cells", level=1)
    with pytest.raises(ValidationError):
        MeasureDescriptor(semiring="bool2", provenance="stages")
    m = MeasureDescriptor(semiring="zmod:2", provenance="cells", level=1, values=[1, 0]).build()
    assert m.stage_at(0).tolist() == [1]
    assert m.stage_at(2).tolist() == [1, 0, 0, 0]


# ---------- modules, maps, witness requests ----------


def test_three_chain_file(data_dir) -> None:
    module = load_semimodule(str(data_dir / "three_chain_bool2.json"))
    assert module.size == 3
    assert module.carrier[2] == "omega"
    assert validate_semimodule(module).passed


def test_map_descriptors(data_dir) -> None:
    cantor = make_space("cantor")
    assert load_json(str(data_dir / "map_shift.json"), ContinuousMapDescriptor).build(cantor).label == "shift"
    cells = ContinuousMapDescriptor(kind="cells", level=1, values=[0, 2], k=3).build(cantor)
    assert cells.target == make_space("finite", 3)
    indicator = ContinuousMapDescriptor(kind="indicator", clopen={"level": 1, "cells": ["1"]}).build(cantor)
    assert indicator.stage_map(0).tolist() == [0, 1]
    with pytest.raises(ValidationError):
        ContinuousMapDescriptor(kind="indicator")
    with pytest.raises(ValidationError):
        ContinuousMapDescriptor(kind="cells", level=1)


def test_witness_request_file(data_dir) -> None:
    request = load_json(str(data_dir / "witness_request.json"), WitnessRequest)
    space, s, constraints = request.build(str(data_dir))
    assert s == builtin("zmod", 3)
    assert [c.clopen.level for c in constraints] == [1, 2, 0]
    assert constraints[2].clopen.is_top
    assert isinstance(density_witness(constraints, space, s), FinSuppFn)
