from __future__ import annotations

from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import DepthExhaustedError, MismatchError, StructuralError
from profinite_space import (
    Clopen,
    Point,
    apply_map,
    atoms,
    cantor_point,
    clopen_combine,
    clopen_leq,
    clopen_not,
    compose_maps,
    first_bit_map,
    greatest_point,
    identity_map,
    indicator_map,
    least_point_in,
    level_projection,
    make_space,
    nat_point,
    point_from_thread,
    point_in,
    preimage,
    separation_level,
    shift_map,
    table_space,
    validate_map,
    validate_system,
)

CANTOR = make_space("cantor", certified_depth=12)


# ---------- spaces ----------


def test_level_sizes() -> None:
    assert [CANTOR.level_size(n) for n in range(5)] == [1, 2, 4, 8, 16]
    nat = make_space("nat_infty")
    assert [nat.level_size(n) for n in range(4)] == [1, 2, 3, 4]
    assert [make_space("finite", 3).level_size(n) for n in range(3)] == [3, 3, 3]
    prod_space = make_space("depth_product", 2, 3)
    assert [prod_space.level_size(n) for n in range(5)] == [1, 2, 6, 12, 36]


def test_transitions() -> None:
    assert CANTOR.transition(1).tolist() == [0, 0, 1, 1]
    nat = make_space("nat_infty")
    # level 3 = {0, 1, 2, *}; the number 2 and * both fall to * at level 2
    assert nat.transition(2).tolist() == [0, 1, 2, 2]
    assert make_space("finite", 3).transition(4).tolist() == [0, 1, 2]


@pytest.mark.parametrize(
    "space",
    [make_space("cantor"), make_space("nat_infty"), make_space("finite", 2), make_space("depth_product", 2, 3)],
    ids=lambda s: s.label,
)
def test_builtin_systems_validate(space) -> None:
    assert validate_system(space, 6).passed


def test_non_surjective_table_is_reported() -> None:
    space = table_space([1, 2, 2], [[0, 0], [0, 0]])
    report = validate_system(space, 2)
    assert not report.passed
    assert report.violations[0].law == "transition_surjective"
    assert report.violations[0].witness == {"level": 1, "missed": "1"}


@pytest.mark.parametrize(
    "sizes, transitions",
    [([1, 2], []), ([1, 2], [[0, 1]]), ([1, 2], [[0, 0, 0]]), ([0], [])],
)
def test_table_space_rejects(sizes, transitions) -> None:
    with pytest.raises(StructuralError):
        table_space(sizes, transitions)


def test_space_errors() -> None:
    with pytest.raises(StructuralError):
        make_space("finite", 0)
    with pytest.raises(StructuralError):
        make_space("hilbert")
    with pytest.raises(DepthExhaustedError):
        make_space("cantor", certified_depth=3).level_size(4)


def test_equality_is_by_kind_and_params() -> None:
    assert make_space("cantor", certified_depth=4) == make_space("cantor", certified_depth=9)
    assert make_space("finite", 2) != make_space("finite", 3)


def test_cell_names() -> None:
    assert CANTOR.cell_name(0, 0) == "ε"
    assert CANTOR.cell_name(3, 5) == "101"
    assert make_space("nat_infty").cell_name(2, 2) == "*"
    assert CANTOR.parse_cell(0, "ε") == 0
    assert CANTOR.parse_cell(2, "10") == 2
    assert make_space("nat_infty").parse_cell(3, "*") == 3
    with pytest.raises(StructuralError):
        CANTOR.parse_cell(1, 5)


# ---------- clopens ----------


def test_clopen_boolean_laws() -> None:
    b0 = CANTOR.clopen(1, ["0"])
    assert (b0 & ~b0).is_empty
    assert (b0 | ~b0).is_top
    assert b0 | ~b0 == CANTOR.top()
    assert b0.lift(2).names() == ["00", "01"]
    reduced = CANTOR.clopen(2, ["00", "01"]).canonical()
    assert (reduced.level, reduced.names()) == (1, ["0"])
    assert clopen_combine(b0, CANTOR.clopen(2, ["01"]), "diff") == CANTOR.clopen(2, ["00"])
    assert clopen_not(CANTOR.empty()) == CANTOR.top()
    assert clopen_leq(CANTOR.clopen(3, ["010"]), b0)
    assert not clopen_leq(b0, CANTOR.clopen(3, ["010"]))


def test_clopen_space_mismatch() -> None:
    with pytest.raises(MismatchError):
        CANTOR.top() & make_space("nat_infty").top()
    with pytest.raises(StructuralError):
        clopen_combine(CANTOR.top(), CANTOR.top(), "xor")


@st.composite
def clopens(draw, max_level: int = 3) -> Clopen:
    level = draw(st.integers(0, max_level))
    cells = draw(st.sets(st.integers(0, 2**level - 1)))
    return Clopen(CANTOR, level, frozenset(cells))


@given(clopens(), clopens())
def test_canonical_form_respects_operations(a: Clopen, b: Clopen) -> None:
    c = a.canonical()
    assert c.canonical().level == c.level and c.canonical().cells == c.cells
    assert (a & b) == (a.canonical() & b.canonical())
    assert ~(a | b) == (~a & ~b)
    assert hash(a) == hash(a.lift(a.level + 2))


# ---------- atoms ----------


def test_atoms_examples() -> None:
    assert atoms([], CANTOR) == [CANTOR.top()]
    b0 = CANTOR.clopen(1, ["0"])
    assert atoms([b0]) == [b0, ~b0]
    c0 = CANTOR.clopen(2, ["00", "10"])
    found = atoms([b0, c0])
    assert len(found) == 4
    assert all(a.level == 2 and len(a.cells) == 1 for a in found)
    with pytest.raises(StructuralError):
        atoms([])


@settings(max_examples=60)
@given(st.lists(clopens(), max_size=4))
def test_atoms_partition_and_generate(generators: list) -> None:
    found = atoms(generators, CANTOR)
    assert all(not a.is_empty for a in found)
    for i, a in enumerate(found):
        for b in found[i + 1 :]:
            assert (a & b).is_empty
    assert reduce(lambda x, y: x | y, found) == CANTOR.top()
    for g in generators:
        below = [a for a in found if a <= g]
        assert reduce(lambda x, y: x | y, below, CANTOR.empty()) == g


# ---------- points ----------


def test_point_membership() -> None:
    b0 = CANTOR.clopen(1, ["0"])
    z, o = cantor_point("0"), cantor_point("1")
    assert point_in(z, b0)
    assert not point_in(o, b0)
    assert point_in(o, CANTOR.top())
    with pytest.raises(MismatchError):
        point_in(nat_point(1), b0)


def test_point_construction() -> None:
    p = point_from_thread(CANTOR, ["ε", "1", "10"], depth=4)
    assert p.thread == (0, 1, 2, 4, 8)
    assert greatest_point(CANTOR, 1, 0, depth=3).thread[3] == 3
    assert nat_point(None, depth=4).describe() == "inf"
    assert nat_point(3, depth=5).thread == (0, 1, 2, 3, 3, 3)
    assert nat_point(3, depth=5).describe() == "3"
    with pytest.raises(StructuralError):
        Point(CANTOR, (0, 1, 0))
    with pytest.raises(StructuralError):
        cantor_point("012")
    with pytest.raises(DepthExhaustedError):
        cantor_point("0", depth=3).at(4)


def test_least_point_in_follows_thread_order() -> None:
    # level-2 cell 0 sits over level-1 cell 1, so cell 1 starts the least thread
    space = table_space([1, 2, 3], [[0, 0], [1, 0, 1]])
    assert least_point_in(Clopen(space, 2, frozenset({0, 1}))).thread == (0, 0, 1)
    assert least_point_in(Clopen(space, 2, frozenset({0, 2}))).thread == (0, 1, 0)
    assert least_point_in(CANTOR.clopen(2, ["10", "01"]), depth=3).thread == (0, 0, 1, 2)
    with pytest.raises(StructuralError):
        least_point_in(CANTOR.empty())


def test_separation_level() -> None:
    assert separation_level([cantor_point("00"), cantor_point("01")]) == 2
    assert separation_level([cantor_point("0")]) == 0
    with pytest.raises(DepthExhaustedError):
        separation_level([cantor_point("0", depth=4), cantor_point("0", depth=4)])


# ---------- maps ----------


def test_first_bit_map() -> None:
    h = first_bit_map()
    image = apply_map(h, cantor_point("0"))
    assert set(image.thread) == {0}
    assert image.space == make_space("finite", 2)
    assert preimage(h, Clopen(h.target, 0, frozenset({1}))) == CANTOR.clopen(1, ["1"])


def test_composition() -> None:
    second_bit = compose_maps(shift_map(), first_bit_map())
    assert apply_map(second_bit, cantor_point("01")).thread[0] == 1
    assert apply_map(second_bit, cantor_point("10")).thread[0] == 0
    assert validate_map(second_bit, 5).passed
    with pytest.raises(MismatchError):
        compose_maps(first_bit_map(), shift_map())


@pytest.mark.parametrize(
    "h",
    [
        identity_map(CANTOR),
        shift_map(),
        first_bit_map(),
        indicator_map(CANTOR.clopen(2, ["01", "11"])),
        level_projection(CANTOR, 2),
    ],
    ids=lambda h: h.label,
)
def test_builtin_maps_commute(h) -> None:
    assert validate_map(h, 5).passed


@given(st.text(alphabet="01", min_size=0, max_size=8), st.integers(0, 1), clopens())
def test_apply_then_member_is_member_of_preimage(bits: str, tail: int, c: Clopen) -> None:
    p = cantor_point(bits, tail, depth=8)
    h = shift_map(CANTOR)
    assert point_in(apply_map(h, p), c) == point_in(p, preimage(h, c))


def test_shift_stage_map() -> None:
    np.testing.assert_array_equal(shift_map().stage_map(1), [0, 1, 0, 1])
