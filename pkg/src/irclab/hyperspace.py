"""Finite-level hyperspace: level sets of cells, the dyadic Hausdorff metric, tree profiles.

A compact subset Y of a Cantor space is seen through the set A_m(Y) of
level-m cells it meets.  Cells are labelled by their defining cylinder
words: length m for one-sided shifts, symmetric windows of length 2m+1
for two-sided shifts.
"""
from __future__ import annotations

import bisect
import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Iterable, Mapping, Sequence

import mpmath

from ._common import (
    CapExceeded,
    ResolutionError,
    ValidationError,
    check_cap,
    chunk_ranges,
    frac_str,
    parallel_map,
    substream,
)

SYMBOLS = "0123456789abcdefghijklmnopqrstuvwxyz"


@total_ordering
@dataclass(frozen=True)
class DyadicDistance:
    """A distance of the form 2^-exponent, or exactly zero (exponent None)."""

    exponent: int | None

    def __post_init__(self):
        if self.exponent is not None and self.exponent < 0:
            raise ValidationError("dyadic exponent must be >= 0")

    @classmethod
    def zero(cls) -> DyadicDistance:
        return cls(None)

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    @property
    def value(self) -> Fraction:
        return Fraction(0) if self.exponent is None else Fraction(1, 2**self.exponent)

    def __lt__(self, other):
        other_value = other.value if isinstance(other, DyadicDistance) else Fraction(other)
        return self.value < other_value

    def __eq__(self, other):
        if isinstance(other, DyadicDistance):
            return self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.exponent)

    def __str__(self):
        return "0" if self.exponent is None else f"2^-{self.exponent}"


def dyadic(eps) -> DyadicDistance:
    """Coerce an exponent-bearing threshold (DyadicDistance or power of two) to DyadicDistance."""
    if isinstance(eps, DyadicDistance):
        return eps
    value = Fraction(eps)
    if value <= 0:
        raise ValidationError("threshold must be positive")
    if value.numerator != 1 or value.denominator & (value.denominator - 1):
        raise ValidationError(f"threshold {value} is not of the form 2^-e")
    return DyadicDistance(value.denominator.bit_length() - 1)


def cell_length(level: int, two_sided: bool) -> int:
    return 2 * level + 1 if two_sided else level


def min_level(two_sided: bool) -> int:
    return 0 if two_sided else 1


@dataclass(frozen=True)
class LevelSet:
    """Nonempty set of level-m cells (the finite-resolution image of a compact set)."""

    level: int
    cells: frozenset
    two_sided: bool = False

    def __post_init__(self):
        cells = frozenset(self.cells)
        object.__setattr__(self, "cells", cells)
        if self.level < min_level(self.two_sided):
            raise ValidationError(f"level {self.level} below the first level")
        if not cells:
            raise ValidationError("a LevelSet must be nonempty")
        width = cell_length(self.level, self.two_sided)
        for c in cells:
            if not isinstance(c, str) or len(c) != width:
                raise ValidationError(f"cell {c!r} is not a word of length {width}")

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(sorted(self.cells))

    def sort_key(self):
        return (len(self.cells), sorted(self.cells))

    def to_json(self) -> dict:
        out = {"level": self.level, "cells": sorted(self.cells)}
        if self.two_sided:
            out["two_sided"] = True
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> LevelSet:
        return cls(int(data["level"]), frozenset(data["cells"]), bool(data.get("two_sided", False)))


def parent_cell(cell: str, two_sided: bool) -> str:
    return cell[1:-1] if two_sided else cell[:-1]


def project(A: LevelSet) -> LevelSet:
    """Parents of the cells of A, one level up."""
    if A.level <= min_level(A.two_sided):
        raise ValidationError(f"level {A.level} cells have no parent level")
    return LevelSet(A.level - 1, frozenset(parent_cell(c, A.two_sided) for c in A.cells), A.two_sided)


def project_to(A: LevelSet, level: int) -> LevelSet:
    if level > A.level:
        raise ValidationError("can only project to a coarser level")
    while A.level > level:
        A = project(A)
    return A


def agreement_key(cell: str, two_sided: bool) -> str:
    """Reorder a label so that common-prefix length measures closeness.

    For two-sided windows the symbols are read outward from the centre,
    alternating left and right.
    """
    if not two_sided:
        return cell
    c = len(cell) // 2
    out = [cell[c]]
    for d in range(1, c + 1):
        out.append(cell[c - d])
        out.append(cell[c + d])
    return "".join(out)


def _lcp(a: str, b: str) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def _exponent_from_lcp(p: int, two_sided: bool) -> int:
    # one-sided: first disagreement at index p+1; two-sided: at radius ceil(p/2)
    return (p + 1) // 2 if two_sided else p + 1


def cell_distance(u: str, v: str, two_sided: bool = False) -> DyadicDistance:
    """Distance between any point of cell u and any point of a different cell v."""
    if u == v:
        raise ValidationError("cell_distance needs two different cells")
    p = _lcp(agreement_key(u, two_sided), agreement_key(v, two_sided))
    return DyadicDistance(_exponent_from_lcp(p, two_sided))


def _directed_exponent(A: LevelSet, B: LevelSet) -> int | None:
    """Smallest exponent of sup_{x in uA} d(x, uB); None if uA is inside uB."""
    keys = sorted(agreement_key(c, B.two_sided) for c in B.cells)
    worst = None
    for u in A.cells:
        if u in B.cells:
            continue
        k = agreement_key(u, A.two_sided)
        pos = bisect.bisect_left(keys, k)
        best = 0
        if pos < len(keys):
            best = max(best, _lcp(k, keys[pos]))
        if pos > 0:
            best = max(best, _lcp(k, keys[pos - 1]))
        e = _exponent_from_lcp(best, A.two_sided)
        worst = e if worst is None else min(worst, e)
    return worst


def _check_same_level(A: LevelSet, B: LevelSet) -> None:
    if A.level != B.level or A.two_sided != B.two_sided:
        raise ValidationError(
            f"level mismatch: {A.level}{'/two-sided' if A.two_sided else ''} vs "
            f"{B.level}{'/two-sided' if B.two_sided else ''}"
        )


def hausdorff_at_level(A: LevelSet, B: LevelSet) -> DyadicDistance:
    """Exact Hausdorff distance between the cylinder unions of A and B."""
    _check_same_level(A, B)
    if A.cells == B.cells:
        return DyadicDistance.zero()
    exps = [e for e in (_directed_exponent(A, B), _directed_exponent(B, A)) if e is not None]
    return DyadicDistance(min(exps))


def projection_counts(A: LevelSet) -> dict[int, int]:
    """Number of distinct projections of A at every level from the root down to A.level.

    The root (level 0 one-sided, level -1 two-sided) always has one cell.
    """
    keys = sorted(agreement_key(c, A.two_sided) for c in A.cells)
    lcps = [_lcp(a, b) for a, b in zip(keys, keys[1:])]
    counts = {}
    root = min_level(A.two_sided) - 1
    for level in range(root, A.level + 1):
        width = cell_length(level, A.two_sided) if level >= min_level(A.two_sided) else 0
        counts[level] = 1 + sum(1 for p in lcps if p < width)
    return counts


def dist_to_finite(A: LevelSet, r: int) -> DyadicDistance:
    """Distance from the cylinder union of A to the sets of at most r points.

    Exact whenever A has more than r cells; otherwise the result is the
    finest scale of the level (an upper bound).
    """
    if r < 1:
        raise ValidationError("r must be a positive integer")
    counts = projection_counts(A)
    best = max(level for level, c in counts.items() if c <= r)
    return DyadicDistance(best + 1)


def check_resolution(eps: DyadicDistance, level: int) -> None:
    """Thresholds below 2^-(level+1) cannot be decided from level-m cells."""
    if eps.is_zero or eps.exponent > level + 1:
        raise ResolutionError(f"threshold {eps} is finer than level {level} can resolve; raise the level")


# ----------------------------------------------------------------------------
# tree profiles


class TreeProfile:
    """Refining sequence of partitions with labelled cells."""

    two_sided: bool = False

    @property
    def first_level(self) -> int:
        return min_level(self.two_sided)

    def cells(self, level: int) -> list[str]:
        raise NotImplementedError

    def kappa(self, level: int) -> int:
        return len(self.cells(level))

    def children(self, cell: str) -> list[str]:
        raise NotImplementedError

    def level_of(self, cell: str) -> int:
        return (len(cell) - 1) // 2 if self.two_sided else len(cell)

    def parent(self, cell: str) -> str:
        return parent_cell(cell, self.two_sided)

    def descendant_count(self, cell: str, i: int) -> int:
        frontier = [cell]
        for _ in range(i):
            frontier = [c for p in frontier for c in self.children(p)]
        return len(frontier)

    def lower_bound(self, k: int) -> Fraction:
        """Positive lower bound on (descendants of a level-k cell)/(cells at that deeper level)."""
        raise ValidationError("this profile has no branching lower bound")

    def full_levelset(self, level: int) -> LevelSet:
        return LevelSet(level, frozenset(self.cells(level)), self.two_sided)

    def describe(self) -> dict:
        return {"kind": type(self).__name__}


class FullShiftProfile(TreeProfile):
    def __init__(self, n: int, two_sided: bool = False):
        if n < 2 or n > len(SYMBOLS):
            raise ValidationError(f"alphabet size must be in 2..{len(SYMBOLS)}")
        self.n = n
        self.two_sided = two_sided
        self.alphabet = SYMBOLS[:n]

    def kappa(self, level: int) -> int:
        return self.n ** cell_length(level, self.two_sided)

    def cells(self, level: int) -> list[str]:
        check_cap("enumeration", self.kappa(level), "full-shift cell table")
        width = cell_length(level, self.two_sided)
        return ["".join(w) for w in itertools.product(self.alphabet, repeat=width)]

    def children(self, cell: str) -> list[str]:
        if self.two_sided:
            return [a + cell + b for a in self.alphabet for b in self.alphabet]
        return [cell + a for a in self.alphabet]

    def descendant_count(self, cell: str, i: int) -> int:
        return self.n ** (2 * i if self.two_sided else i)

    def lower_bound(self, k: int) -> Fraction:
        return Fraction(1, self.kappa(k))

    def describe(self) -> dict:
        return {"kind": "full_shift", "n": self.n, "two_sided": self.two_sided}


class BranchingProfile(TreeProfile):
    """One-sided tree given by a per-cell child count.

    Cells are paths of child indices.  A positive lower bound L_k on the
    descendant proportions is required and is checked on every level up to
    `depth`.
    """

    def __init__(
        self,
        child_count: Callable[[str], int],
        depth: int,
        lower_bound: Callable[[int], Fraction] | Fraction,
    ):
        self.child_count = child_count
        self.depth = depth
        self._lower = lower_bound if callable(lower_bound) else (lambda k, v=Fraction(lower_bound): v)
        self._levels: dict[int, list[str]] = {0: [""]}
        for level in range(1, depth + 1):
            prev = self._levels[level - 1]
            nxt = [c for p in prev for c in self._children(p)]
            check_cap("enumeration", len(nxt), "custom profile cell table")
            self._levels[level] = nxt
        self._validate()

    @classmethod
    def uniform(cls, branching: Sequence[int]) -> BranchingProfile:
        """Every level-(t) cell has branching[t] children."""
        b = list(branching)
        return cls(lambda cell: b[len(cell)], len(b), lambda k: Fraction(1, math.prod(b[:k])))

    def _children(self, cell: str) -> list[str]:
        c = self.child_count(cell)
        if c < 1 or c > len(SYMBOLS):
            raise ValidationError(f"child count {c} out of range")
        return [cell + SYMBOLS[t] for t in range(c)]

    def _validate(self):
        for k in range(1, self.depth + 1):
            bound = self._lower(k)
            if bound <= 0:
                raise ValidationError("branching lower bound must be positive")
            for i in range(0, self.depth - k + 1):
                total = len(self._levels[k + i])
                for cell in self._levels[k]:
                    if Fraction(self.descendant_count(cell, i), total) < bound:
                        raise ValidationError(f"lower bound {bound} fails at level {k}, offset {i}")

    def cells(self, level: int) -> list[str]:
        if level not in self._levels:
            raise ValidationError(f"profile defined only to depth {self.depth}")
        return list(self._levels[level])

    def children(self, cell: str) -> list[str]:
        if len(cell) >= self.depth:
            raise ValidationError(f"profile defined only to depth {self.depth}")
        return self._children(cell)

    def lower_bound(self, k: int) -> Fraction:
        return Fraction(self._lower(k))

    def describe(self) -> dict:
        return {"kind": "branching", "depth": self.depth, "kappa": [len(self._levels[t]) for t in range(1, self.depth + 1)]}


class LanguageProfile(TreeProfile):
    """Cells are the allowed words of a subshift, given by a word-set oracle."""

    def __init__(self, words: Callable[[int], Iterable[str]], two_sided: bool = True, name: str = "language"):
        self._words = words
        self.two_sided = two_sided
        self.name = name
        self._cache: dict[int, list[str]] = {}

    def cells(self, level: int) -> list[str]:
        if level not in self._cache:
            self._cache[level] = sorted(set(self._words(cell_length(level, self.two_sided))))
        return list(self._cache[level])

    def children(self, cell: str) -> list[str]:
        level = self.level_of(cell)
        return [c for c in self.cells(level + 1) if parent_cell(c, self.two_sided) == cell]

    def describe(self) -> dict:
        return {"kind": self.name, "two_sided": self.two_sided}


def tree_measure(profile: TreeProfile, cell: str) -> Fraction:
    """Uniform tree measure: each cell's mass is split equally among its children."""
    level = profile.level_of(cell)
    if level == profile.first_level:
        cells = profile.cells(level)
        if cell not in cells:
            raise ValidationError(f"{cell!r} is not a cell")
        return Fraction(1, len(cells))
    parent = profile.parent(cell)
    siblings = profile.children(parent)
    if cell not in siblings:
        raise ValidationError(f"{cell!r} is not a cell")
    return tree_measure(profile, parent) / len(siblings)


def level_masses(profile: TreeProfile, level: int) -> dict[str, Fraction]:
    masses = {c: Fraction(1, profile.kappa(profile.first_level)) for c in profile.cells(profile.first_level)}
    for _ in range(profile.first_level, level):
        nxt = {}
        for c, w in masses.items():
            kids = profile.children(c)
            for k in kids:
                nxt[k] = w / len(kids)
        masses = nxt
    return masses


# ----------------------------------------------------------------------------
# covering counts


def count_covering_subsets(profile: TreeProfile, k: int, i: int, r: int) -> int:
    """Number of r-sets of level-(k+i) cells that meet every level-k cell (inclusion-exclusion)."""
    if i < 0 or r < 0:
        raise ValidationError("offset and size must be nonnegative")
    total = profile.kappa(k + i)
    if r > total:
        warnings.warn(f"r={r} exceeds the {total} cells at level {k + i}; count is 0", stacklevel=2)
        return 0
    if isinstance(profile, FullShiftProfile):
        ck = profile.kappa(k)
        e = profile.descendant_count("", i)
        return sum(
            (-1) ** s * math.comb(ck, s) * math.comb(total - s * e, r)
            for s in range(ck + 1)
            if total - s * e >= 0
        )
    # product over level-k cells of (1 - x^e_C) gives the signed weight of every missed mass t
    poly = {0: 1}
    for cell in profile.cells(k):
        e = profile.descendant_count(cell, i)
        nxt = dict(poly)
        for t, c in poly.items():
            nxt[t + e] = nxt.get(t + e, 0) - c
        poly = {t: c for t, c in nxt.items() if c}
    return sum(c * math.comb(total - t, r) for t, c in poly.items())


def covering_fraction(profile: TreeProfile, k: int, i: int, r: int) -> Fraction:
    total = profile.kappa(k + i)
    if r > total:
        return Fraction(0)
    return Fraction(count_covering_subsets(profile, k, i, r), math.comb(total, r))


def _raw_to_fraction(raw) -> Fraction:
    """Exact value of an mpmath raw float tuple (sign, mantissa, exponent, bitcount)."""
    sign, man, exp, _ = raw
    value = Fraction(int(man)) * Fraction(2) ** exp
    return -value if sign else value


def covering_fraction_bound(profile: TreeProfile, k: int, i: int, r: int, dps: int = 60) -> Fraction:
    """Certified lower bound 1 - kappa(k) exp(-r L_k), rounded down."""
    lk = profile.lower_bound(k)
    iv = mpmath.iv
    saved = iv.dps
    iv.dps = dps
    try:
        e = iv.exp(-iv.mpf(r) * iv.mpf(lk.numerator) / iv.mpf(lk.denominator))
        lower = (1 - iv.mpf(profile.kappa(k)) * e)._mpi_[0]
    finally:
        iv.dps = saved
    return _raw_to_fraction(lower)


# ----------------------------------------------------------------------------
# occupancy laws


def _check_occupancy(profile: TreeProfile, k: int, m: int) -> None:
    if k < 1:
        raise ValidationError("need at least one point")
    if m < profile.first_level:
        raise ValidationError(f"level {m} below the first level")


def finitary_occupancy_law(profile: TreeProfile, k: int, m: int) -> dict[LevelSet, Fraction]:
    """Exact law of the set of level-m cells hit by k i.i.d. points of the uniform tree measure."""
    _check_occupancy(profile, k, m)
    kap = profile.kappa(m)
    check_cap("enumeration", kap**k, "exact occupancy law; use Monte Carlo mode")
    masses = level_masses(profile, m)
    cells = sorted(masses)
    law: dict[LevelSet, Fraction] = {}
    # P(hit set = S) = sum over T subset of S of (-1)^{|S|-|T|} mu(T)^k
    for size in range(1, min(k, len(cells)) + 1):
        for S in itertools.combinations(cells, size):
            p = Fraction(0)
            for t in range(1, size + 1):
                sign = (-1) ** (size - t)
                for T in itertools.combinations(S, t):
                    p += sign * sum(masses[c] for c in T) ** k
            if p:
                law[LevelSet(m, frozenset(S), profile.two_sided)] = p
    return dict(sorted(law.items(), key=lambda kv: kv[0].sort_key()))


MC_CHUNK = 4096


def sample_occupancy(profile: TreeProfile, k: int, m: int, samples: int, seed: int, workers: int = 1):
    """Monte Carlo occupancy law as an EmpiricalIRC.

    Samples are drawn in fixed chunks, each from its own (seed, chunk) substream,
    so the result does not depend on how chunks are spread over workers.
    """
    from .estimator import EmpiricalIRC

    _check_occupancy(profile, k, m)
    if samples < 1:
        raise ValidationError("samples must be positive")
    masses = level_masses(profile, m)
    cells = sorted(masses)
    probs = [float(masses[c]) for c in cells]
    uniform = len(set(masses.values())) == 1

    def run(chunk):
        index, (lo, hi) = chunk
        rng = substream(seed, index)
        if uniform:
            draws = rng.integers(0, len(cells), size=(hi - lo, k))
        else:
            draws = rng.choice(len(cells), size=(hi - lo, k), p=probs)
        counts: dict[frozenset, int] = {}
        for row in draws.tolist():
            key = frozenset(cells[t] for t in row)
            counts[key] = counts.get(key, 0) + 1
        return counts

    chunks = list(enumerate(chunk_ranges(samples, MC_CHUNK)))
    merged: dict[frozenset, int] = {}
    for counts in parallel_map(run, chunks, workers):
        for key, c in counts.items():
            merged[key] = merged.get(key, 0) + c
    atoms = {LevelSet(m, key, profile.two_sided): Fraction(c, samples) for key, c in merged.items()}
    return EmpiricalIRC(
        level=m,
        atoms=atoms,
        provenance={"source": "occupancy_mc", "k": k, "samples": samples, "seed": seed, "profile": profile.describe()},
    )


# ----------------------------------------------------------------------------
# cylinder unions


def cylinder_union(profile: TreeProfile, A: LevelSet, level: int) -> LevelSet:
    """The union of the cells of A written as a union of cells at a finer level."""
    if level < A.level:
        raise ValidationError("target level must not be coarser than A")
    cells = set(A.cells)
    for _ in range(A.level, level):
        cells = {c for p in cells for c in profile.children(p)}
    return LevelSet(level, frozenset(cells), A.two_sided)


def approximate(Y: LevelSet, level: int) -> LevelSet:
    """A_level(Y) for Y given as a union of cells at a finer level."""
    return project_to(Y, level)


def distribution_to_json(law: Mapping[LevelSet, Fraction]) -> list[dict]:
    return [{"levelset": A.to_json(), "mass": frac_str(w)} for A, w in sorted(law.items(), key=lambda kv: kv[0].sort_key())]


__all__ = [
    "DyadicDistance",
    "LevelSet",
    "TreeProfile",
    "FullShiftProfile",
    "BranchingProfile",
    "LanguageProfile",
    "CapExceeded",
    "dyadic",
    "project",
    "project_to",
    "hausdorff_at_level",
    "cell_distance",
    "dist_to_finite",
    "projection_counts",
    "check_resolution",
    "tree_measure",
    "level_masses",
    "count_covering_subsets",
    "covering_fraction",
    "covering_fraction_bound",
    "finitary_occupancy_law",
    "sample_occupancy",
    "cylinder_union",
    "approximate",
    "distribution_to_json",
]
