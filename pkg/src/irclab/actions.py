"""Permutation actions on shift spaces, transitivity by orbit search, orbit statistics.

Two families of finite groups act on cells:

* prefix mode: a permutation of the length-k words rewrites the first k
  symbols of a one-sided sequence and leaves the tail alone;
* block-code mode: a permutation of the length-(2k+1) words is applied to
  every block of a two-sided sequence on the grid of blocks centred at
  multiples of 2k+1 (phase 0).

Orbit statistics count the group elements g in a window for which g.Y is
far from the whole space (mode "D"), far from every set of at most r points
(mode "E"), or close to the whole space (mode "Z").
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._common import (
    ValidationError,
    check_cap,
    chunk_ranges,
    frac_str,
    parallel_map,
    substream,
    wilson_interval,
)
from .hyperspace import (
    SYMBOLS,
    DyadicDistance,
    FullShiftProfile,
    LevelSet,
    check_resolution,
    dist_to_finite,
    dyadic,
    project_to,
)
from .symbolic import chacon_language, chacon_window_set

MODES = ("prefix", "block-code")


def word_of_index(index: int, length: int, n: int) -> str:
    out = []
    for _ in range(length):
        index, d = divmod(index, n)
        out.append(SYMBOLS[d])
    return "".join(reversed(out))


def index_of_word(word: str, n: int) -> int:
    return int(word, n) if word else 0


@dataclass(frozen=True)
class BlockPermutation:
    """A permutation of the words of one length, stored as an index table.

    table[i] is the index of the image of the i-th word in lexicographic order.
    """

    k: int
    table: tuple[int, ...]
    mode: str = "prefix"
    n: int = 2

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if self.k < 1 and self.mode == "prefix" or self.k < 0:
            raise ValidationError("block parameter out of range")
        size = self.n**self.word_length
        if len(self.table) != size or sorted(self.table) != list(range(size)):
            raise ValidationError("table is not a bijection on the word set")

    @property
    def word_length(self) -> int:
        return self.k if self.mode == "prefix" else 2 * self.k + 1

    @classmethod
    def identity(cls, k: int, mode: str = "prefix", n: int = 2) -> BlockPermutation:
        length = k if mode == "prefix" else 2 * k + 1
        return cls(k, tuple(range(n**length)), mode, n)

    @classmethod
    def from_mapping(cls, k: int, mapping: dict[str, str], mode: str = "prefix", n: int = 2) -> BlockPermutation:
        """Words not mentioned are fixed."""
        length = k if mode == "prefix" else 2 * k + 1
        table = list(range(n**length))
        for a, b in mapping.items():
            if len(a) != length or len(b) != length:
                raise ValidationError(f"mapping words must have length {length}")
            table[index_of_word(a, n)] = index_of_word(b, n)
        return cls(k, tuple(table), mode, n)

    def image(self, word: str) -> str:
        return word_of_index(self.table[index_of_word(word, self.n)], self.word_length, self.n)

    def inverse(self) -> BlockPermutation:
        inv = [0] * len(self.table)
        for i, t in enumerate(self.table):
            inv[t] = i
        return BlockPermutation(self.k, tuple(inv), self.mode, self.n)

    def to_json(self) -> dict:
        return {"k": self.k, "mode": self.mode, "n": self.n, "table": list(self.table)}


def apply_permutation(g: BlockPermutation, A: LevelSet) -> LevelSet:
    if g.mode == "prefix":
        if A.two_sided or A.level < g.k:
            raise ValidationError(f"prefix mode needs a one-sided LevelSet of level >= {g.k}")
        return LevelSet(A.level, frozenset(g.image(c[: g.k]) + c[g.k :] for c in A.cells))
    width = 2 * g.k + 1
    if not A.two_sided or (A.level - g.k) % width:
        raise ValidationError(f"block-code mode needs a two-sided level congruent to {g.k} mod {width}")
    cells = frozenset("".join(g.image(c[t : t + width]) for t in range(0, len(c), width)) for c in A.cells)
    return LevelSet(A.level, cells, True)


def random_symmetric_element(k: int, mode: str = "prefix", seed: int = 0, n: int = 2, index: int = 0) -> BlockPermutation:
    """Uniform element of the symmetric group on the words (seeded Fisher-Yates shuffle)."""
    length = k if mode == "prefix" else 2 * k + 1
    size = n**length
    check_cap("word_table", size, "permutation table")
    table = substream(seed, index).permutation(size)
    return BlockPermutation(k, tuple(int(t) for t in table), mode, n)


def induced_cell_permutation(g: BlockPermutation, level: int) -> list[int]:
    """The permutation g induces on level-`level` cells, as an index table."""
    two_sided = g.mode == "block-code"
    profile = FullShiftProfile(g.n, two_sided)
    cells = profile.cells(level)
    pos = {c: i for i, c in enumerate(cells)}
    return [pos[next(iter(apply_permutation(g, LevelSet(level, {c}, two_sided)).cells))] for c in cells]


# ----------------------------------------------------------------------------
# transitivity


def cycle_generator(size: int) -> list[int]:
    return [(i + 1) % size for i in range(size)]


def sym_generators(size: int) -> list[list[int]]:
    """A transposition and a full cycle, which generate the symmetric group."""
    if size < 2:
        return [list(range(size))]
    swap = list(range(size))
    swap[0], swap[1] = 1, 0
    return [swap, cycle_generator(size)]


def alt_generators(size: int) -> list[list[int]]:
    """3-cycles (0 1 j), which generate the alternating group."""
    if size < 3:
        return [list(range(size))]
    gens = []
    for j in range(2, size):
        g = list(range(size))
        g[0], g[1], g[j] = 1, j, 0
        gens.append(g)
    return gens


def orbit_space_size(size: int, r: int, mode: str) -> int:
    return math.comb(size, r) if mode == "set" else math.perm(size, r)


def transitivity_check(generators: Sequence[Sequence[int]], r: int, mode: str = "set") -> bool:
    """True iff the generated group has a single orbit on r-sets (or ordered r-tuples) of cells."""
    if mode not in ("set", "tuple"):
        raise ValidationError("mode must be 'set' or 'tuple'")
    if not generators:
        raise ValidationError("need at least one generator")
    size = len(generators[0])
    gens = [tuple(g) for g in generators]
    for g in gens:
        if len(g) != size or sorted(g) != list(range(size)):
            raise ValidationError("generators must be permutations of the same cell set")
    if not 1 <= r <= size:
        raise ValidationError(f"r must be in 1..{size}")
    total = orbit_space_size(size, r, mode)
    check_cap("orbit_space", total, "transitivity orbit search")

    def canon(t):
        return tuple(sorted(t)) if mode == "set" else tuple(t)

    start = tuple(range(r))
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for g in gens:
            nxt = canon(g[x] for x in state)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == total


# ----------------------------------------------------------------------------
# systems


def within(A: LevelSet, B: LevelSet, eps: DyadicDistance) -> bool:
    """Whether the cylinder unions of A and B are at Hausdorff distance < eps.

    Distances at level m are 0 or 2^-a with a <= m, so d < 2^-e holds
    exactly when the level-e projections coincide (A = B when e = m + 1).
    """
    e = eps.exponent
    if e >= A.level + 1:
        return A.cells == B.cells
    first = 0 if A.two_sided else 1
    if e < first:
        return True
    return project_to(A, e).cells == project_to(B, e).cells


class ChaconShiftSystem:
    """The shift acting on sets of Chacon translates, seen at a fixed level."""

    two_sided = True

    def __init__(self, level: int, N: int | None = None, two_sided_point: bool = False):
        self.level = level
        self.N = N
        self.two_sided_point = two_sided_point

    def apply(self, j: int, Y: Sequence[int]) -> LevelSet:
        """Y is a list of offsets l standing for the points T^l x_C."""
        return chacon_window_set(self.level, Y, j, self.N, self.two_sided_point)

    def full_levelset(self, level: int | None = None) -> LevelSet:
        level = self.level if level is None else level
        return LevelSet(level, frozenset(chacon_language(2 * level + 1)), True)

    def describe(self) -> dict:
        return {"system": "chacon_shift", "level": self.level, "two_sided_point": self.two_sided_point}


class PrefixGroupSystem:
    """Sym(n^k) acting on one-sided sequences by rewriting the first k symbols."""

    two_sided = False

    def __init__(self, n: int, k: int):
        if k < 1:
            raise ValidationError("k must be >= 1")
        self.n = n
        self.k = k
        self.profile = FullShiftProfile(n)

    def apply(self, g: BlockPermutation, Y: LevelSet) -> LevelSet:
        return apply_permutation(g, Y)

    def full_levelset(self, level: int) -> LevelSet:
        return self.profile.full_levelset(level)

    def group_size(self) -> int:
        return math.factorial(self.n**self.k)

    def exhaustive(self) -> Iterable[BlockPermutation]:
        size = self.n**self.k
        check_cap("enumeration", math.factorial(size), "exhaustive Sym window; use samples")
        for t in itertools.permutations(range(size)):
            yield BlockPermutation(self.k, t, "prefix", self.n)

    def sample(self, seed: int, index: int) -> BlockPermutation:
        return random_symmetric_element(self.k, "prefix", seed, self.n, index)

    def describe(self) -> dict:
        return {"system": "prefix_group", "n": self.n, "k": self.k}


def sunny_side_up(level: int) -> LevelSet:
    """Level set of the one-sided sequences with at most one symbol 1."""
    cells = {"0" * level} | {"0" * j + "1" + "0" * (level - j - 1) for j in range(level)}
    return LevelSet(level, frozenset(cells))


# ----------------------------------------------------------------------------
# orbit statistics


@dataclass(frozen=True)
class OrbitStat:
    window: str
    mode: str
    epsilon: DyadicDistance
    r: int | None
    successes: int
    samples: int
    exact: bool
    seed: int | None = None
    ci_lo: float | Fraction = 0.0
    ci_hi: float | Fraction = 1.0
    details: dict = field(default_factory=dict, compare=False)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.successes, self.samples)

    def to_json(self) -> dict:
        ci = [frac_str(self.ci_lo), frac_str(self.ci_hi)] if self.exact else [self.ci_lo, self.ci_hi]
        out = {
            "window": self.window,
            "mode": self.mode,
            "eps": str(self.epsilon),
            "r": self.r,
            "fraction": frac_str(self.fraction),
            "ci": ci,
            "successes": self.successes,
            "samples": self.samples,
            "exact": self.exact,
            "seed": self.seed,
        }
        if self.details:
            out["details"] = self.details
        return out

    def csv_row(self) -> dict:
        lo, hi = (frac_str(self.ci_lo), frac_str(self.ci_hi)) if self.exact else (repr(self.ci_lo), repr(self.ci_hi))
        return {
            "window": self.window,
            "mode": self.mode,
            "eps": str(self.epsilon),
            "r": "" if self.r is None else self.r,
            "fraction": frac_str(self.fraction),
            "ci_lo": lo,
            "ci_hi": hi,
            "samples": self.samples,
            "seed": "" if self.seed is None else self.seed,
        }


def _full_lookup(system):
    cache: dict[int, frozenset] = {}

    def full(level: int) -> frozenset:
        if level not in cache:
            cache[level] = system.full_levelset(level).cells
        return cache[level]

    return full


def close_to_full(A: LevelSet, full_cells, eps: DyadicDistance) -> bool:
    """d_H(uA, X) < eps, reading only the level that eps resolves (see `within`)."""
    e = eps.exponent
    if e >= A.level + 1:
        return A.cells == full_cells(A.level)
    if e < (0 if A.two_sided else 1):
        return True
    return project_to(A, e).cells == full_cells(e)


def orbit_stat(
    system,
    Y,
    window,
    epsilon,
    mode: str = "D",
    r: int | None = None,
    samples: int | None = None,
    seed: int = 0,
    workers: int = 1,
    chunk: int = 1024,
) -> OrbitStat:
    """Fraction of the window for which the event holds for g.Y.

    `window` is a range or list of group elements (exact statistic), or the
    string "sample" together with `samples` for a Monte Carlo estimate.
    Events: "D" d(gY, X) >= eps, "E" d(gY, K_r) >= eps, "Z" d(gY, X) < eps.
    """
    eps = dyadic(epsilon)
    if mode not in ("D", "E", "Z"):
        raise ValidationError("mode must be D, E or Z")
    if mode == "E" and (r is None or r < 1):
        raise ValidationError("mode E needs a positive r")
    probe = system.apply(_first_element(system, window, seed), Y)
    check_resolution(eps, probe.level)
    full_cells = _full_lookup(system)

    def compare(A: LevelSet) -> bool:
        if mode == "E":
            return dist_to_finite(A, r) >= eps
        near = close_to_full(A, full_cells, eps)
        return near if mode == "Z" else not near

    if isinstance(window, str):
        if window != "sample" or not samples:
            raise ValidationError("Monte Carlo windows need window='sample' and samples > 0")

        def run(span):
            lo, hi = span
            return sum(1 for i in range(lo, hi) if compare(system.apply(system.sample(seed, i), Y)))

        hits = sum(parallel_map(run, chunk_ranges(samples, chunk), workers))
        lo, hi = wilson_interval(hits, samples)
        desc = f"sample:{samples}"
        return OrbitStat(desc, mode, eps, r, hits, samples, False, seed, lo, hi, {"system": system.describe()})

    elements = list(window)
    if not elements:
        raise ValidationError("window must be nonempty")
    flags = parallel_map(lambda g: compare(system.apply(g, Y)), elements, workers)
    hits = sum(flags)
    frac = Fraction(hits, len(elements))
    desc = _describe_window(window, elements)
    return OrbitStat(desc, mode, eps, r, hits, len(elements), True, None, frac, frac, {"system": system.describe()})


def _first_element(system, window, seed):
    if isinstance(window, str):
        return system.sample(seed, 0)
    if isinstance(window, range):
        if len(window) == 0:
            raise ValidationError("window must be nonempty")
        return window[0]
    if isinstance(window, (list, tuple)):
        if not window:
            raise ValidationError("window must be nonempty")
        return window[0]
    raise ValidationError("pass the window as a range, list or 'sample'")


def _describe_window(window, elements) -> str:
    if isinstance(window, range):
        return f"[{window.start},{window.stop})"
    return f"exhaustive:{len(elements)}"


# ----------------------------------------------------------------------------
# r-blocks


@dataclass(frozen=True)
class RBlockResult:
    mode: str
    probability: Fraction | float | None
    count_bound: Fraction | None
    envelope: Fraction | None
    gamma: Fraction
    vacuous: bool
    stderr: float | None = None
    samples: int | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        def fmt(x):
            if x is None:
                return None
            return frac_str(x) if isinstance(x, (Fraction, int)) else x

        return {
            "mode": self.mode,
            "probability": fmt(self.probability),
            "count_bound": fmt(self.count_bound),
            "envelope": fmt(self.envelope),
            "gamma": frac_str(self.gamma),
            "vacuous": self.vacuous,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
        }


def _rblock_params(n: int, m: int, k: int, alpha: int, r: int) -> tuple[int, int]:
    if n < 2 or m < 1 or not 1 <= k <= m:
        raise ValidationError("need n >= 2 and 1 <= k <= m")
    N = n**m
    if not 0 <= alpha <= N:
        raise ValidationError(f"alpha must be in 0..{N}")
    if r < 1:
        raise ValidationError("r must be positive")
    return N, n ** (m - k)


def blocks_needed(points: Sequence[int], N: int, length: int) -> int:
    """Fewest intervals [j, j+length) inside {1..N} covering the sorted points (greedy)."""
    count = 0
    covered = 0
    last_start = N - length + 1
    for p in points:
        if p > covered:
            start = min(p, last_start)
            covered = start + length - 1
            count += 1
    return count


def rblock_count(N: int, length: int, alpha: int, r: int) -> int:
    """Number of alpha-subsets of {1..N} covered by at most r intervals (greedy dynamic program)."""
    last_start = N - length + 1
    # state: (picked, blocks, covered_until) -> number of ways
    states = {(0, 0, 0): 1}
    for p in range(1, N + 1):
        nxt: dict[tuple[int, int, int], int] = {}
        for (picked, blocks, covered), ways in states.items():
            key = (picked, blocks, covered)
            nxt[key] = nxt.get(key, 0) + ways
            if picked == alpha:
                continue
            if p <= covered:
                key = (picked + 1, blocks, covered)
            else:
                if blocks == r:
                    continue
                key = (picked + 1, blocks + 1, min(p, last_start) + length - 1)
            nxt[key] = nxt.get(key, 0) + ways
        states = nxt
    return sum(w for (picked, _, _), w in states.items() if picked == alpha)


def rblock_bounds(n: int, m: int, k: int, alpha: int, r: int) -> tuple[Fraction, Fraction | None, bool]:
    """Counting bound and the closed-form envelope; the envelope is None when gamma >= 1."""
    N, length = _rblock_params(n, m, k, alpha, r)
    gamma = Fraction(r, n**k)
    if alpha <= r:
        count_bound = Fraction(1)
    else:
        count_bound = Fraction(math.comb(alpha, r) * N**r * math.comb(r * length, alpha - r), math.comb(N, alpha))
    if gamma >= 1:
        return count_bound, None, True
    envelope = Fraction(alpha ** (2 * r)) * gamma ** (alpha - r) / (1 - gamma) ** r
    return count_bound, envelope, False


def rblock_containment(
    n: int,
    m: int,
    k: int,
    alpha: int,
    r: int,
    mode: str = "exact",
    samples: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> RBlockResult:
    """Probability that a uniform alpha-subset of {1..n^m} lies in some r-block."""
    N, length = _rblock_params(n, m, k, alpha, r)
    count_bound, envelope, vacuous = rblock_bounds(n, m, k, alpha, r)
    gamma = Fraction(r, n**k)
    if mode == "bound":
        return RBlockResult(mode, None, count_bound, envelope, gamma, vacuous)
    if mode == "exact":
        check_cap("enumeration", N * (alpha + 1) * (r + 1) * (N + 1), "r-block dynamic program")
        p = Fraction(rblock_count(N, length, alpha, r), math.comb(N, alpha))
        return RBlockResult(mode, p, count_bound, envelope, gamma, vacuous)
    if mode != "mc":
        raise ValidationError("mode must be exact, mc or bound")
    if samples < 1:
        raise ValidationError("samples must be positive")

    def run(span):
        index, (lo, hi) = span
        rng = substream(seed, index)
        return int(_mc_rblock_hits(rng, hi - lo, N, length, alpha, r))

    spans = list(enumerate(chunk_ranges(samples, 4096)))
    hits = sum(parallel_map(run, spans, workers))
    p = hits / samples
    return RBlockResult(mode, p, count_bound, envelope, gamma, vacuous, math.sqrt(max(p * (1 - p), 0.0) / samples), samples, seed)


def _mc_rblock_hits(rng: np.random.Generator, count: int, N: int, length: int, alpha: int, r: int) -> int:
    if alpha == 0:
        return count
    keys = rng.random((count, N))
    chosen = np.sort(np.argpartition(keys, alpha - 1, axis=1)[:, :alpha] + 1, axis=1)
    blocks = np.zeros(count, dtype=np.int64)
    covered = np.zeros(count, dtype=np.int64)
    last_start = N - length + 1
    for t in range(alpha):
        p = chosen[:, t]
        new = p > covered
        blocks += new
        covered = np.where(new, np.minimum(p, last_start) + length - 1, covered)
    return int(np.count_nonzero(blocks <= r))
