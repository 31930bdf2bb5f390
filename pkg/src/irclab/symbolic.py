"""Words, Chacon blocks and occurrence spacing.

The Chacon point is represented by the right-infinite limit of the blocks
b_1 = 0010, b_{n+1} = b_n b_n 1 b_n; every window query uses nonnegative
coordinates inside some finite block.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from ._common import CapExceeded, ValidationError, cap
from .hyperspace import LanguageProfile, LevelSet

CHACON_SEED = "0010"


@dataclass(frozen=True)
class Word:
    """A finite word over the alphabet {0, ..., base-1}, stored as a digit string."""

    symbols: str
    base: int = 2

    def __post_init__(self):
        if not 2 <= self.base <= 10:
            raise ValidationError("digit-string words support alphabets of size 2..10")
        allowed = set("0123456789"[: self.base])
        if not set(self.symbols) <= allowed:
            raise ValidationError(f"symbols outside 0..{self.base - 1}")

    @classmethod
    def of(cls, symbols: Sequence[int] | str | Word, base: int = 2) -> Word:
        if isinstance(symbols, Word):
            return symbols
        if isinstance(symbols, str):
            return cls(symbols, base)
        return cls("".join(str(s) for s in symbols), base)

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.symbols[item], self.base)
        return int(self.symbols[item])

    def __str__(self):
        return self.symbols

    def digits(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.symbols)


@dataclass(frozen=True)
class OccurrenceReport:
    pattern: Word
    starts: tuple[int, ...]
    gaps: tuple[int, ...]
    forbidden_hits: tuple[tuple[int, int, int], ...] = ()
    pattern_too_long: bool = False

    def gap_values(self) -> set[int]:
        return set(self.gaps)

    def to_json(self) -> dict:
        return {
            "pattern": str(self.pattern),
            "starts": list(self.starts),
            "gaps": list(self.gaps),
            "forbidden_hits": [list(h) for h in self.forbidden_hits],
        }


def chacon_length(n: int) -> int:
    """|b_n| = (9 * 3^(n-1) - 1) / 2, from |b_1| = 4 and |b_{n+1}| = 3|b_n| + 1."""
    if n < 1:
        raise ValidationError("block index must be >= 1")
    return (9 * 3 ** (n - 1) - 1) // 2


@lru_cache(maxsize=16)
def _block_text(n: int) -> str:
    if n == 1:
        return CHACON_SEED
    prev = _block_text(n - 1)
    return prev + prev + "1" + prev


def chacon_block(n: int) -> Word:
    length = chacon_length(n)
    limit = cap("block_length")
    if length > limit:
        raise CapExceeded(f"b_{n} has {length} symbols, above the block-length cap {limit}")
    return Word(_block_text(n))


def chacon_text(n: int) -> str:
    """b_n as a plain string (same checks as chacon_block, no validation pass)."""
    length = chacon_length(n)
    limit = cap("block_length")
    if length > limit:
        raise CapExceeded(f"b_{n} has {length} symbols, above the block-length cap {limit}")
    return _block_text(n)


def chacon_L(n_max: int) -> list[int]:
    return [chacon_length(n) - 1 for n in range(2, n_max + 1)]


def block_index_covering(index: int) -> int:
    """Smallest N with index < |b_N|."""
    n = 1
    while chacon_length(n) <= index:
        n += 1
    return n


def occurrences(text: Word | str, pattern: Word | str) -> OccurrenceReport:
    """All (possibly overlapping) starts of pattern in text."""
    t = str(text)
    p = Word.of(pattern)
    ps = str(p)
    if len(ps) > len(t):
        warnings.warn("pattern longer than text", stacklevel=2)
        return OccurrenceReport(p, (), (), (), pattern_too_long=True)
    if not ps:
        raise ValidationError("empty pattern")
    starts = []
    i = t.find(ps)
    while i != -1:
        starts.append(i)
        i = t.find(ps, i + 1)
    gaps = tuple(b - a for a, b in zip(starts, starts[1:]))
    return OccurrenceReport(p, tuple(starts), gaps)


def forbidden_distance_check(
    N: int, pattern: Word | str = CHACON_SEED, distances: Iterable[int] | None = None
) -> OccurrenceReport:
    """Pairs of pattern starts in b_N whose difference lies in `distances`."""
    text = chacon_text(N)
    report = occurrences(text, pattern)
    length = len(text)
    if distances is None:
        distances = [d for d in chacon_L(N + 1) if d < length]
    dist = sorted(set(int(d) for d in distances))
    start_set = set(report.starts)
    hits = tuple((s, s + d, d) for s in report.starts for d in dist if s + d in start_set)
    return OccurrenceReport(report.pattern, report.starts, report.gaps, hits, report.pattern_too_long)


def two_sided_origin(N: int) -> int:
    """Index inside b_N of coordinate 0 of the two-sided Chacon point.

    Each b_n is nested as the middle copy of b_{n+1} = b_n b_n 1 b_n, so the
    origin sits at |b_1| + ... + |b_{N-1}| and both halves grow with N.
    """
    return sum(chacon_length(k) for k in range(1, N))


def _fits(N: int, lo: int, hi: int, two_sided: bool) -> bool:
    o = two_sided_origin(N) if two_sided else 0
    return lo + o >= 0 and hi + o <= chacon_length(N)


def chacon_orbit_window(j: int, radius: int, N: int | None = None, two_sided: bool = False) -> Word:
    """The length-(2 radius + 1) word of the Chacon point centred at j.

    By default the point is the right-infinite limit of the blocks and
    coordinates must be nonnegative; two_sided=True uses the nested two-sided
    point of two_sided_origin instead.
    """
    if radius < 0:
        raise ValidationError("radius must be nonnegative")
    lo, hi = j - radius, j + radius + 1
    if lo < 0 and not two_sided:
        raise ValidationError(f"window [{lo}, {hi}) reaches negative coordinates")
    if N is None:
        N = 1
        while not _fits(N, lo, hi, two_sided):
            N += 1
    if not _fits(N, lo, hi, two_sided):
        raise ValidationError(f"window [{lo}, {hi}) does not fit in b_{N} (length {chacon_length(N)}); raise N")
    o = two_sided_origin(N) if two_sided else 0
    return Word(chacon_text(N)[lo + o : hi + o])


def chacon_offsets(L_count: int, first_block: int = 2) -> list[int]:
    """The first L_count elements |b_n| - 1 of the distance set, starting at n = first_block."""
    if first_block < 2:
        raise ValidationError("distance set starts at block 2")
    return [chacon_length(n) - 1 for n in range(first_block, first_block + L_count)]


def chacon_window_set(
    level: int, offsets: Sequence[int], shift: int = 0, N: int | None = None, two_sided: bool = False
) -> LevelSet:
    """Level set of {T^(shift + l) x_C : l in offsets}: their centre windows of radius `level`."""
    if not offsets:
        raise ValidationError("empty offset list: the empty set is not a LevelSet")
    if N is None:
        lo, hi = shift + min(offsets) - level, shift + max(offsets) + level + 1
        N = 1 if two_sided or lo >= 0 else None
        if N is None:
            raise ValidationError(f"window [{lo}, {hi}) reaches negative coordinates")
        while not _fits(N, lo, hi, two_sided):
            N += 1
    cells = frozenset(str(chacon_orbit_window(shift + l, level, N, two_sided)) for l in offsets)
    return LevelSet(level, cells, two_sided=True)


def chacon_Y_levelset(m: int, L_count: int, N: int | None = None) -> LevelSet:
    """Level-m approximation of {T^l x_C : l among the first L_count distances}."""
    if L_count < 1:
        raise ValidationError("L_count must be >= 1: the empty set is not a LevelSet")
    return chacon_window_set(m, chacon_offsets(L_count), 0, N)


def chacon_language(length: int) -> set[str]:
    """All words of the given length occurring in the Chacon blocks."""
    if length < 1:
        raise ValidationError("length must be positive")
    n = block_index_covering(length)
    words: set[str] = set()
    stable = 0
    while stable < 2:
        text = chacon_text(n)
        new = {text[i : i + length] for i in range(len(text) - length + 1)}
        stable = stable + 1 if new == words else 0
        words = new
        n += 1
    return words


def chacon_profile() -> LanguageProfile:
    """Two-sided tree of Chacon language windows (level m: words of length 2m+1)."""
    return LanguageProfile(chacon_language, two_sided=True, name="chacon")
