"""
Seeded random inputs for the property suites.

Every case gets its own generator spawned from one SeedSequence, so case i is
reproducible from (seed, i) alone regardless of how many cases ran before it.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from measures import FinSuppFn, Measure, SubbasicConstraint, integrate
from profinite_space import Clopen, InverseSystem, random_point
from semiring import FiniteSemiring
from idempotent_density import ScottContinuousFn, density


def case_rngs(seed: int, cases: int) -> List[np.random.Generator]:
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(cases)]


def case_rng(seed: int, index: int) -> np.random.Generator:
    """The generator `case_rngs(seed, n)[index]` would give, for replaying one case."""
    return case_rngs(seed, index + 1)[index]


def random_finsupp(
    space: InverseSystem,
    s: FiniteSemiring,
    rng: np.random.Generator,
    level: int,
    max_points: int = 4,
    depth: Optional[int] = None,
) -> FinSuppFn:
    """Support points in distinct level-`level` cells, so the support resolves by that level."""
    cells = space.level_size(level)
    count = int(rng.integers(0, min(max_points, cells) + 1))
    chosen = sorted(rng.choice(cells, size=count, replace=False).tolist())
    pairs = [(random_point(space, level, c, rng, depth), int(rng.integers(0, s.size))) for c in chosen]
    return FinSuppFn(space, s, tuple(pairs))


def random_measure(space: InverseSystem, s: FiniteSemiring, rng: np.random.Generator, level: int, max_points: int = 4) -> Measure:
    return integrate(random_finsupp(space, s, rng, level, max_points))


def random_finsupp_pair(
    space: InverseSystem, s: FiniteSemiring, rng: np.random.Generator, level: int, max_points: int = 4
) -> Tuple[FinSuppFn, FinSuppFn]:
    """Two functions that differ: the second perturbs one value of the first or moves its mass."""
    f = random_finsupp(space, s, rng, level, max_points)
    support = list(f.support)
    if support and rng.random() < 0.5:
        i = int(rng.integers(len(support)))
        p, v = support[i]
        support[i] = (p, (v + 1 + int(rng.integers(s.size - 1))) % s.size if s.size > 1 else v)
        g = FinSuppFn(space, s, tuple(support))
    else:
        g = random_finsupp(space, s, rng, level, max_points)
    return f, g


def random_clopen(space: InverseSystem, rng: np.random.Generator, level: int) -> Clopen:
    mask = rng.random(space.level_size(level)) < 0.5
    return Clopen(space, level, frozenset(np.flatnonzero(mask).tolist()))


def random_constraint(space: InverseSystem, s: FiniteSemiring, rng: np.random.Generator, level: int) -> SubbasicConstraint:
    allowed = np.flatnonzero(rng.random(s.size) < 0.5)
    return SubbasicConstraint(random_clopen(space, rng, level), frozenset(allowed.tolist()))


def random_scott_fn(space: InverseSystem, s: FiniteSemiring, rng: np.random.Generator, level: int) -> ScottContinuousFn:
    """Half the time the density of a random measure, otherwise a locally constant function."""
    if rng.random() < 0.5:
        return density(random_measure(space, s, rng, level))
    cells_level = int(rng.integers(0, level + 1))
    values = rng.integers(0, s.size, size=space.level_size(cells_level))
    return ScottContinuousFn.from_cells(space, s, cells_level, values)
