"""
Finite Stone duality by brute force.

The universe is S^X for a finite X, enumerated in code order; subsets are
Python int bitmasks over that enumeration. Atoms of the algebra generated by
the brackets [b,k] = {f : Σ_{x∈b} f(x) = k} are matched with functions X -> S.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import load_settings
from errors import BudgetExceededError, StructuralError
from semiring import FiniteSemiring
from semiring_monad import all_functions

logger = logging.getLogger(__name__)


def _mask(bits: np.ndarray) -> int:
    """Boolean vector -> int with bit i set for element i."""
    return int.from_bytes(np.packbits(np.asarray(bits, dtype=bool), bitorder="little").tobytes(), "little")


def _members(mask: int) -> List[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


@dataclass(frozen=True)
class FiniteBooleanAlgebra:
    universe_size: int
    atoms: Tuple[int, ...]
    generators: Tuple[int, ...] = ()

    @property
    def full(self) -> int:
        return (1 << self.universe_size) - 1

    def contains(self, subset: int) -> bool:
        """A subset is a member iff it is a union of atoms."""
        return all(subset & a in (0, a) for a in self.atoms)

    def atom_of(self, element: int) -> int:
        for a in self.atoms:
            if a >> element & 1:
                return a
        raise StructuralError(f"element {element} is outside the universe")

    def member_count(self) -> int:
        return 2 ** len(self.atoms)


def generated_algebra_masks(universe_size: int, generators: Sequence[int]) -> FiniteBooleanAlgebra:
    full = (1 << universe_size) - 1
    for g in generators:
        if g & ~full:
            raise StructuralError("generator is not a subset of the universe")
    blocks = [full] if universe_size else []
    for g in generators:
        split = []
        for a in blocks:
            for part in (a & g, a & ~g):
                if part:
                    split.append(part)
        blocks = split
    return FiniteBooleanAlgebra(universe_size, tuple(sorted(blocks, key=_lowest)), tuple(generators))


def generated_algebra(universe: Sequence[Hashable], generators: Iterable[Iterable[Hashable]]) -> Tuple[FiniteBooleanAlgebra, List[List[Hashable]]]:
    """Atoms of the Boolean subalgebra of P(universe) generated by the subsets; also returned as element lists."""
    index = {u: i for i, u in enumerate(universe)}
    masks = []
    for g in generators:
        members = list(g)
        unknown = [x for x in members if x not in index]
        if unknown:
            raise StructuralError(f"generator mentions {unknown!r} outside the universe")
        masks.append(sum(1 << index[x] for x in set(members)))
    algebra = generated_algebra_masks(len(universe), masks)
    return algebra, [[universe[i] for i in _members(a)] for a in algebra.atoms]


@dataclass(frozen=True)
class BracketSet:
    """[b, k] as a subset of S^X."""

    clopen: Tuple[int, ...]
    value: int
    mask: int

    def size(self) -> int:
        return bin(self.mask).count("1")


@dataclass
class BracketAlgebra:
    semiring: FiniteSemiring
    points: int
    functions: np.ndarray
    brackets: List[BracketSet]
    algebra: FiniteBooleanAlgebra
    # integral[code, b] for b enumerated as bitmasks over X
    integrals: np.ndarray = field(repr=False)

    def bracket(self, clopen: Iterable[int], value: int) -> BracketSet:
        key = tuple(sorted(clopen))
        for br in self.brackets:
            if br.clopen == key and br.value == value:
                return br
        raise StructuralError(f"no bracket [{list(key)}, {value}]")


def _subset_tuple(bmask: int, n: int) -> Tuple[int, ...]:
    return tuple(x for x in range(n) if bmask >> x & 1)


def bracket_generators(n: int, s: FiniteSemiring, budget: Optional[int] = None) -> BracketAlgebra:
    """All [b, k] for b ⊆ X = {x0..x(n-1)} and k ∈ S, with the algebra they generate."""
    budget = load_settings().budget if budget is None else budget
    size = s.size**n
    if size > budget:
        raise BudgetExceededError(size, budget, f"S^X for |S|={s.size}, |X|={n}")
    table = all_functions(s.size, n)
    subsets = ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    integrals = s.reduce_add(np.where(subsets[None, :, :], table[:, None, :], s.zero), axis=2)
    brackets = [
        BracketSet(_subset_tuple(b, n), k, _mask(integrals[:, b] == k))
        for b in range(2**n)
        for k in range(s.size)
    ]
    algebra = generated_algebra_masks(size, [br.mask for br in brackets])
    return BracketAlgebra(s, n, table, brackets, algebra, integrals)


def atom_to_measure(atom: int, ba: BracketAlgebra) -> Tuple[int, ...]:
    """Read μ_φ off the brackets containing the atom; singletons give the function."""
    if atom not in ba.algebra.atoms:
        raise StructuralError("input is not an atom of the bracket algebra")
    values = []
    for x in range(ba.points):
        hit = [br.value for br in ba.brackets if br.clopen == (x,) and atom & ~br.mask == 0]
        if len(hit) != 1:
            raise StructuralError(f"atom is not inside exactly one bracket [{{x{x}}}, k]")
        values.append(hit[0])
    return tuple(values)


def measure_on(fn: Sequence[int], b: Iterable[int], s: FiniteSemiring) -> int:
    return s.total(fn[x] for x in b)


def measure_to_ultrafilter(fn: Sequence[int], ba: BracketAlgebra) -> int:
    """Meet of the filter base {[b, μ(b)]}; returns the atom generating the ultrafilter."""
    s = ba.semiring
    if len(fn) != ba.points or any(not 0 <= v < s.size for v in fn):
        raise StructuralError("function does not match X and S")
    meet = ba.algebra.full
    for br in ba.brackets:
        if br.value == measure_on(fn, br.clopen, s):
            meet &= br.mask
    if meet not in ba.algebra.atoms:
        raise StructuralError("the filter base does not meet in a single atom")
    return meet


def ultrafilter_members(atom: int, algebra: FiniteBooleanAlgebra) -> int:
    """Number of algebra members above the atom."""
    if atom not in algebra.atoms:
        raise StructuralError("not an atom")
    return 2 ** (len(algebra.atoms) - 1)


@dataclass
class DualityReport:
    points: int
    semiring: str
    universe_size: int
    expected: int
    atom_count: Optional[int]
    partition: bool
    bijection: bool
    transport: bool
    partial: bool = False
    witness: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.partition and self.bijection and self.transport

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "universe_size": self.universe_size,
            "atom_count": self.atom_count,
            "expected": self.expected,
            "bijection": "pass" if self.bijection else "fail",
            "partition": "pass" if self.partition else "fail",
            "transport": "pass" if self.transport else "fail",
            "partial": self.partial,
        }
        if self.witness:
            out["witness"] = self.witness
        return out


def _fn_names(fn: Sequence[int], s: FiniteSemiring) -> Dict[str, str]:
    return {f"x{i}": s.name(v) for i, v in enumerate(fn)}


def bijection_report(
    n: int,
    s: FiniteSemiring,
    *,
    budget: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> DualityReport:
    settings = load_settings()
    budget = settings.budget if budget is None else budget
    expected = s.size**n
    if expected > budget:
        return _sampled_report(n, s, samples or settings.cases, settings.seed if seed is None else seed, budget)

    ba = bracket_generators(n, s, budget)
    witness: Dict[str, Any] = {}
    full = ba.algebra.full

    partition = True
    for b in range(2**n):
        masks = [br.mask for br in ba.brackets[b * s.size : (b + 1) * s.size]]
        union, overlap = 0, False
        for m in masks:
            overlap |= bool(union & m)
            union |= m
        if overlap or union != full:
            partition = False
            witness["partition"] = {"clopen": [f"x{x}" for x in _subset_tuple(b, n)]}
            break

    atom_count = len(ba.algebra.atoms)
    bijection = atom_count == expected
    for atom in ba.algebra.atoms:
        fn = atom_to_measure(atom, ba)
        back = measure_to_ultrafilter(fn, ba)
        if back != atom:
            bijection = False
            witness["bijection"] = {"function": _fn_names(fn, s), "atom_elements": _members(atom)}
            break
    if bijection:
        for row in ba.functions:
            fn = tuple(int(v) for v in row)
            if atom_to_measure(measure_to_ultrafilter(fn, ba), ba) != fn:
                bijection = False
                witness["bijection"] = {"function": _fn_names(fn, s)}
                break

    transport = bijection and _check_transport(ba, witness)
    report = DualityReport(n, s.label, expected, expected, atom_count, partition, bijection, transport, witness=witness or None)
    if not report.passed:
        logger.warning("duality check failed for |X|=%d over %s: %s", n, s.label, witness)
    return report


def _check_transport(ba: BracketAlgebra, witness: Dict[str, Any]) -> bool:
    """Sum and scalar action computed bracket-wise on atoms match the pointwise ones."""
    s, n = ba.semiring, ba.points
    atoms = ba.algebra.atoms
    fns = {a: atom_to_measure(a, ba) for a in atoms}

    def via_brackets(values: Dict[int, int]) -> int:
        meet = ba.algebra.full
        for b, k in values.items():
            meet &= ba.brackets[b * s.size + k].mask
        return meet

    def integral_of(fn: Sequence[int], b: int) -> int:
        return measure_on(fn, _subset_tuple(b, n), s)

    for a in atoms:
        for c in atoms:
            fa, fc = fns[a], fns[c]
            summed = via_brackets({b: s.plus(integral_of(fa, b), integral_of(fc, b)) for b in range(2**n)})
            pointwise = measure_to_ultrafilter(tuple(s.plus(x, y) for x, y in zip(fa, fc)), ba)
            if summed != pointwise:
                witness["transport"] = {"op": "sum", "left": _fn_names(fa, s), "right": _fn_names(fc, s)}
                return False
        for t in range(s.size):
            fa = fns[a]
            scaled = via_brackets({b: s.times(t, integral_of(fa, b)) for b in range(2**n)})
            pointwise = measure_to_ultrafilter(tuple(s.times(t, x) for x in fa), ba)
            if scaled != pointwise:
                witness["transport"] = {"op": "scale", "scalar": s.name(t), "function": _fn_names(fa, s)}
                return False
    return True


def _sampled_report(n: int, s: FiniteSemiring, samples: int, seed: int, budget: int) -> DualityReport:
    """Universe too large to materialise: check separation and linearity on sampled pairs."""
    logger.warning("S^X has more than %d elements; checking %d sampled pairs", budget, samples)
    rng = np.random.default_rng(seed)
    subsets = ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    witness: Dict[str, Any] = {}
    bijection = transport = True
    for _ in range(samples):
        f, g = rng.integers(0, s.size, size=(2, n))
        fi = s.reduce_add(np.where(subsets, f[None, :], s.zero), axis=1)
        gi = s.reduce_add(np.where(subsets, g[None, :], s.zero), axis=1)
        if not np.array_equal(f, g) and np.array_equal(fi, gi):
            bijection = False
            witness["bijection"] = {"left": _fn_names(f, s), "right": _fn_names(g, s)}
            break
        si = s.reduce_add(np.where(subsets, s.add[f, g][None, :], s.zero), axis=1)
        if not np.array_equal(si, s.add[fi, gi]):
            transport = False
            witness["transport"] = {"op": "sum", "left": _fn_names(f, s), "right": _fn_names(g, s)}
            break
    size = s.size**n
    return DualityReport(n, s.label, size, size, None, True, bijection, transport, partial=True, witness=witness or None)
