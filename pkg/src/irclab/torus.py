"""Exact circle arithmetic: digit sets, dilations, gaps, multiplicative Folner sets.

Points of the circle are Fractions in [0, 1).  Arcs are closed and stored
as pairs (a, b) with 0 <= a <= b <= 1; an arc crossing 0 is stored as two
pieces [a, 1] and [0, b].
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from ._common import (
    CapExceeded,
    ValidationError,
    cap,
    check_cap,
    first_primes,
    frac_str,
    parallel_map,
)


def circle_point(x) -> Fraction:
    x = Fraction(x)
    return x - math.floor(x)


def circle_distance(x, y=0) -> Fraction:
    d = circle_point(Fraction(x) - Fraction(y))
    return min(d, 1 - d)


# ----------------------------------------------------------------------------
# digit sets


@dataclass(frozen=True)
class DigitSet:
    """Points whose base-p digits use only `digits` and avoid the `forbidden` words."""

    base: int
    digits: tuple[int, ...] | None = None
    forbidden: tuple[str, ...] = ()

    def __post_init__(self):
        if self.base < 2:
            raise ValidationError("base must be >= 2")
        digits = tuple(range(self.base)) if self.digits is None else tuple(sorted(set(self.digits)))
        if not digits or any(not 0 <= d < self.base for d in digits):
            raise ValidationError(f"digits must lie in 0..{self.base - 1}")
        object.__setattr__(self, "digits", digits)
        for w in self.forbidden:
            if not w or any(int(c, 36) >= self.base for c in w):
                raise ValidationError(f"forbidden word {w!r} is not over the digit alphabet")
        object.__setattr__(self, "forbidden", tuple(self.forbidden))
        if not self._live_states():
            raise ValidationError("no infinite admissible sequence exists")

    @property
    def memory(self) -> int:
        return max((len(w) for w in self.forbidden), default=1) - 1

    def is_full(self) -> bool:
        return len(self.digits) == self.base and not self.forbidden

    def describe(self) -> dict:
        return {"base": self.base, "digits": list(self.digits), "forbidden": list(self.forbidden)}

    def _forbidden_codes(self) -> list[tuple[int, int]]:
        return [(len(w), int(w, self.base) if self.base <= 36 else 0) for w in self.forbidden]

    def _extend(self, vals: np.ndarray, length: int) -> np.ndarray:
        """All admissible one-digit extensions of admissible words of the given length."""
        p = self.base
        parts = []
        for d in self.digits:
            new = vals * p + d
            ok = np.ones(len(new), dtype=bool)
            for flen, code in self._forbidden_codes():
                if length + 1 >= flen:
                    ok &= (new % p**flen) != code
            parts.append(new[ok])
        return np.sort(np.concatenate(parts)) if parts else vals[:0]

    def _raw_words(self, m: int) -> np.ndarray:
        vals = np.zeros(1, dtype=object if self.base**m >= 2**62 else np.int64)
        for t in range(m):
            vals = self._extend(vals, t)
            check_cap("admissible_words", len(vals), f"admissible words at level {t + 1}")
        return vals

    def _live_states(self) -> frozenset:
        s = self.memory
        states = set(int(v) for v in self._raw_words(s))
        p = self.base
        while True:
            live = set()
            for u in states:
                nxt = self._extend(np.array([u], dtype=np.int64), s)
                if any(int(v) % p**s in states for v in nxt):
                    live.add(u)
            if live == states:
                return frozenset(live)
            states = live

    def word_values(self, m: int) -> np.ndarray:
        """Sorted integers e(w) of the admissible, infinitely extendable words of length m."""
        if m < 0:
            raise ValidationError("level must be nonnegative")
        vals = self._raw_words(m)
        s = self.memory
        if s == 0:
            return vals
        live = self._live_states()
        p = self.base
        if m >= s:
            keep = [int(v) % p**s in live for v in vals]
        else:
            heads = {u // p ** (s - m) for u in live}
            keep = [int(v) in heads for v in vals]
        return vals[np.array(keep, dtype=bool)]

    def words(self, m: int) -> list[str]:
        digits = "0123456789abcdefghijklmnopqrstuvwxyz"
        out = []
        for v in self.word_values(m):
            v = int(v)
            w = []
            for _ in range(m):
                v, d = divmod(v, self.base)
                w.append(digits[d])
            out.append("".join(reversed(w)))
        return out

    def maps_onto_itself(self) -> bool:
        """Whether x -> p x mod 1 maps the set onto itself (every sequence has an admissible predecessor)."""
        s = self.memory + 1
        return set(self.words(s)) <= {w[1:] for w in self.words(s + 1)}

    def is_shift_invariant(self, m: int) -> bool:
        """Every admissible length-m word drops its first digit into an admissible word."""
        if m < 1:
            return True
        shorter = set(self.words(m - 1))
        return all(w[1:] in shorter for w in self.words(m))


CANTOR = DigitSet(3, (0, 2))
GOLDEN_MEAN = DigitSet(2, None, ("11",))


# ----------------------------------------------------------------------------
# interval unions


@dataclass(frozen=True)
class IntervalUnion:
    arcs: tuple[tuple[Fraction, Fraction], ...]

    @classmethod
    def from_arcs(cls, arcs: Iterable[tuple]) -> IntervalUnion:
        """Normalise arcs given as (start, end) with start <= end; ends past 1 wrap around."""
        pieces = []
        for a, b in arcs:
            a, b = Fraction(a), Fraction(b)
            if b < a:
                raise ValidationError("arc end before start")
            if b - a >= 1:
                return cls(((Fraction(0), Fraction(1)),))
            s = circle_point(a)
            e = s + (b - a)
            if e <= 1:
                pieces.append((s, e))
            else:
                pieces.append((s, Fraction(1)))
                pieces.append((Fraction(0), e - 1))
        if not pieces:
            raise ValidationError("an IntervalUnion must be nonempty")
        pieces.sort()
        merged = [list(pieces[0])]
        for a, b in pieces[1:]:
            if a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    @classmethod
    def full(cls) -> IntervalUnion:
        return cls(((Fraction(0), Fraction(1)),))

    def is_full(self) -> bool:
        return self.arcs == ((0, 1),)

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.arcs), Fraction(0))

    def max_gap(self) -> Fraction:
        if self.is_full():
            return Fraction(0)
        gaps = [self.arcs[t + 1][0] - self.arcs[t][1] for t in range(len(self.arcs) - 1)]
        gaps.append(self.arcs[0][0] + 1 - self.arcs[-1][1])
        return max(Fraction(0), max(gaps))

    def contains(self, x) -> bool:
        x = circle_point(x)
        return any(a <= x <= b for a, b in self.arcs) or (x == 0 and self.arcs[-1][1] == 1)

    def to_json(self) -> list[list[str]]:
        return [[frac_str(a), frac_str(b)] for a, b in self.arcs]


def cover(Y: DigitSet, m: int) -> IntervalUnion:
    """Union of the closed arcs [e(w)/p^m, (e(w)+1)/p^m] over admissible words w of length m."""
    P = Y.base**m
    return IntervalUnion.from_arcs((Fraction(int(v), P), Fraction(int(v) + 1, P)) for v in Y.word_values(m))


def dilate(U: IntervalUnion, n: int) -> IntervalUnion:
    """Exact image of U under x -> n x mod 1."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    return IntervalUnion.from_arcs((n * a, n * b) for a, b in U.arcs)


def eps_dense(U: IntervalUnion, eps) -> tuple[bool, Fraction]:
    """Every point of the circle lies strictly within eps of U iff the largest gap is < 2 eps."""
    g = U.max_gap()
    return g < 2 * Fraction(eps), g


# ----------------------------------------------------------------------------
# multiplicative Folner sets


@dataclass(frozen=True)
class FolnerSet:
    m: int
    primes: tuple[int, ...]
    elements: tuple[int, ...]

    def __len__(self):
        return len(self.elements)


def folner_mult(m: int, primes: Sequence[int] | None = None) -> FolnerSet:
    """{p_1^i_1 ... p_m^i_m : 0 <= i_j <= m}, first exponent varying fastest."""
    if m < 1:
        raise ValidationError("m must be >= 1")
    check_cap("folner", (m + 1) ** m, f"Folner set F_{m}")
    ps = tuple(first_primes(m) if primes is None else primes)
    if len(ps) != m:
        raise ValidationError(f"need exactly {m} primes")
    powers = [[p**e for e in range(m + 1)] for p in ps]
    elements = tuple(math.prod(c) for c in (tuple(reversed(t)) for t in itertools.product(*reversed(powers))))
    return FolnerSet(m, ps, elements)


def max_folner(m: int) -> int:
    """Largest element of F_m: prod p_j^(m)."""
    return math.prod(p**m for p in first_primes(m))


# ----------------------------------------------------------------------------
# dilation density


def ceil_log(n: int, p: int) -> int:
    """Smallest t with p^t >= n."""
    t, power = 0, 1
    while power < n:
        power *= p
        t += 1
    return t


def cover_gap_after_dilation(values: np.ndarray, P: int, n: int) -> int:
    """Largest gap, in units of 1/P, of the union of arcs [n v, n v + n] mod P."""
    if n >= P:
        return 0
    if len(values) and n * P < 2**62 and values.dtype != object:
        starts = np.unique((values.astype(np.int64) * n) % P)
    else:
        starts = np.array(sorted({(int(v) * n) % P for v in values}), dtype=object)
    gaps = np.diff(starts) - n
    wrap = int(starts[0]) + P - (int(starts[-1]) + n)
    best = max(wrap, int(gaps.max()) if len(gaps) else wrap)
    return max(best, 0)


@dataclass(frozen=True)
class DilationRow:
    n: int
    reduced: int
    level: int
    max_gap: Fraction
    slack: Fraction
    verdict: str

    @property
    def ambiguous(self) -> bool:
        return self.verdict == "ambiguous"

    @property
    def gap_upper(self) -> Fraction:
        return self.max_gap + 2 * self.slack

    def csv_row(self) -> dict:
        return {
            "n": self.n,
            "reduced_n": self.reduced,
            "m'": self.level,
            "max_gap": frac_str(self.max_gap),
            "verdict": self.verdict,
            "ambiguous": int(self.ambiguous),
        }


@dataclass
class DilationDensity:
    m: int
    eps: Fraction
    margin: int
    rows: list[DilationRow]

    @property
    def dense(self) -> int:
        return sum(1 for r in self.rows if r.verdict == "dense")

    @property
    def ambiguous(self) -> int:
        return sum(1 for r in self.rows if r.ambiguous)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.dense, len(self.rows))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "eps": frac_str(self.eps),
            "margin": self.margin,
            "size": len(self.rows),
            "dense": self.dense,
            "ambiguous": self.ambiguous,
            "fraction": frac_str(self.fraction),
        }


class GapTable:
    """Certified gap intervals for nY, computed from covers at adaptive resolution.

    When x -> p x maps Y onto itself, nY = (n / p^a) Y for every power p^a
    dividing n, so factors of p are stripped before choosing the resolution.
    """

    def __init__(self, Y: DigitSet, margin: int = 6):
        if margin < 0:
            raise ValidationError("margin must be nonnegative")
        self.Y = Y
        self.margin = margin
        self.strip = Y.maps_onto_itself()
        self._values: dict[int, np.ndarray] = {}
        self._rows: dict[int, tuple[int, Fraction, Fraction]] = {}

    def reduce(self, n: int) -> int:
        if n < 1:
            raise ValidationError("n must be >= 1")
        if self.strip:
            while n % self.Y.base == 0:
                n //= self.Y.base
        return n

    def level_for(self, n: int) -> int:
        return ceil_log(self.reduce(n), self.Y.base) + self.margin

    def _words(self, level: int) -> np.ndarray:
        if level not in self._values:
            self._values[level] = self.Y.word_values(level)
        return self._values[level]

    def _compute(self, reduced: int) -> tuple[int, Fraction, Fraction]:
        level = ceil_log(reduced, self.Y.base) + self.margin
        P = self.Y.base**level
        g = cover_gap_after_dilation(self._words(level), P, reduced)
        slack = Fraction(0) if self.Y.is_full() else Fraction(reduced, P)
        return (level, Fraction(g, P), slack)

    def gap(self, n: int) -> tuple[int, Fraction, Fraction]:
        """(level, cover gap, slack): the largest gap of nY lies in [gap, gap + 2 slack]."""
        key = self.reduce(n)
        if key not in self._rows:
            self._rows[key] = self._compute(key)
        return self._rows[key]

    def prefetch(self, ns: Iterable[int], workers: int = 1) -> None:
        todo = sorted({self.reduce(n) for n in ns} - set(self._rows))
        by_level: dict[int, list[int]] = {}
        for n in todo:
            by_level.setdefault(ceil_log(n, self.Y.base) + self.margin, []).append(n)
        for level in sorted(by_level):
            self._words(level)
            for n, row in zip(by_level[level], parallel_map(self._compute, by_level[level], workers)):
                self._rows[n] = row
            if level > 16:
                # the big word tables are only needed for the few largest n
                del self._values[level]


def dilation_density(
    Y: DigitSet, m: int, eps, margin: int = 6, workers: int = 1, table: GapTable | None = None
) -> DilationDensity:
    """Fraction of n in F_m for which nY is eps-dense, with ambiguous verdicts kept apart."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    table = table or GapTable(Y, margin)
    F = folner_mult(m)
    table.prefetch(F.elements, workers)
    rows = []
    for n in F.elements:
        level, g, slack = table.gap(n)
        if slack > eps / 10:
            raise ValidationError(f"resolution margin too small for n={n}: slack {slack} > eps/10")
        if g + 2 * slack < 2 * eps:
            verdict = "dense"
        elif g >= 2 * eps:
            verdict = "not-dense"
        else:
            verdict = "ambiguous"
        rows.append(DilationRow(n, table.reduce(n), level, g, slack, verdict))
    return DilationDensity(m, eps, table.margin, rows)


# ----------------------------------------------------------------------------
# J extraction


@dataclass
class JExtraction:
    horizon: int
    r_max: int
    thresholds: dict[int, int]
    r_of_m: dict[int, int | None]
    members: dict[int, tuple[int, ...]]
    trace: dict[int, Fraction]
    sup_gap: dict[int, Fraction | None]

    @property
    def J(self) -> tuple[int, ...]:
        return tuple(sorted(set().union(*self.members.values()))) if self.members else ()

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "r_max": self.r_max,
            "thresholds": {str(r): m for r, m in self.thresholds.items()},
            "r_of_m": {str(m): r for m, r in self.r_of_m.items()},
            "trace": {str(m): frac_str(f) for m, f in self.trace.items()},
            "sup_gap": {str(m): (None if g is None else frac_str(g)) for m, g in self.sup_gap.items()},
            "J_size": len(self.J),
        }


def extract_J(Y: DigitSet, horizon: int, r_max: int = 64, margin: int = 6, workers: int = 1, table: GapTable | None = None) -> JExtraction:
    """Build J = union of J_m, J_m = E_{r(m)} cap F_m, from certified gap bounds.

    Membership n in E_r uses the certified upper bound on the largest gap,
    so every member really has gap < 1/r.
    """
    if horizon < 1 or r_max < 1:
        raise ValidationError("horizon and r_max must be positive")
    table = table or GapTable(Y, margin)
    folner = {m: folner_mult(m).elements for m in range(1, horizon + 1)}
    table.prefetch({n for els in folner.values() for n in els}, workers)
    upper = {n: table.gap(n)[1] + 2 * table.gap(n)[2] for els in folner.values() for n in els}

    def in_E(n, r):
        return upper[n] < Fraction(1, r)

    thresholds: dict[int, int] = {}
    previous = 1
    for r in range(1, r_max + 1):
        need = 1 - Fraction(1, 2**r)
        good = [Fraction(sum(1 for n in folner[m] if in_E(n, r)), len(folner[m])) > need for m in range(1, horizon + 1)]
        start = None
        for m0 in range(horizon, 0, -1):
            if good[m0 - 1]:
                start = m0
            else:
                break
        if start is None:
            break
        thresholds[r] = max(start, previous)
        previous = thresholds[r]
    if not thresholds:
        warnings.warn("horizon too small: no threshold I_r is reached", stacklevel=2)

    r_of_m: dict[int, int | None] = {}
    members: dict[int, tuple[int, ...]] = {}
    sup_gap: dict[int, Fraction | None] = {}
    for m in range(1, horizon + 1):
        rs = [r for r, I in thresholds.items() if I <= m]
        r_of_m[m] = max(rs) if rs else None
        if r_of_m[m] is None:
            members[m] = ()
            sup_gap[m] = None
            continue
        members[m] = tuple(n for n in folner[m] if in_E(n, r_of_m[m]))
        sup_gap[m] = max((upper[n] for n in members[m]), default=None)
    J = set().union(*members.values())
    trace = {m: Fraction(sum(1 for n in folner[m] if n in J), len(folner[m])) for m in range(1, horizon + 1)}
    return JExtraction(horizon, r_max, thresholds, r_of_m, members, trace, sup_gap)


# ----------------------------------------------------------------------------
# condensation construction


@dataclass
class CondensationSet:
    """Y = {sum eps_l / Q(l)} with Q(i) the product of the first m_i primes."""

    rule: str
    m_seq: tuple[int, ...]
    Q: tuple[int, ...]
    scaled: bool

    def M(self, k: int) -> int:
        return max_folner(k)

    def points(self, t: int | None = None) -> list[Fraction]:
        t = len(self.Q) if t is None else t
        if not 0 <= t <= len(self.Q):
            raise ValidationError(f"truncation must be in 0..{len(self.Q)}")
        check_cap("enumeration", 2**t, "truncated point set")
        pts = []
        for bits in itertools.product((0, 1), repeat=t):
            pts.append(circle_point(sum((Fraction(b, q) for b, q in zip(bits, self.Q)), Fraction(0))))
        return sorted(set(pts))

    def spread(self, n: int, t: int | None = None) -> Fraction:
        """d_H(n Y_t, {0}) = max over points of the distance of n y to 0."""
        return max(circle_distance(n * y) for y in self.points(t))

    def condensation_stat(self, m: int, delta, t: int | None = None) -> Fraction:
        F = folner_mult(m)
        pts = self.points(t)
        delta = Fraction(delta)
        hits = sum(1 for n in F.elements if max(circle_distance(n * y) for y in pts) < delta)
        return Fraction(hits, len(F))

    def implication_failures(self, i: int, m: int, t: int | None = None) -> list[int]:
        """n in F_m with Q(i) | n and n <= M_(2 m_i) whose image spreads 2^-i or more."""
        q = self.Q[i - 1]
        limit = max_folner(2 * self.m_seq[i - 1])
        pts = self.points(t)
        bad = []
        for n in folner_mult(m).elements:
            if n % q == 0 and n <= limit:
                if max(circle_distance(n * y) for y in pts) >= Fraction(1, 2**i):
                    bad.append(n)
        return bad

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "scaled": self.scaled,
            "m": list(self.m_seq),
            "Q": [str(q) for q in self.Q],
        }


def _digits_ok(x: int) -> None:
    limit = cap("integer_digits")
    if x.bit_length() * 0.30103 > limit:
        raise CapExceeded(f"integer with more than {limit} digits; use the scaled growth rule")


def berend_peres(i_max: int, rule: str = "true") -> CondensationSet:
    """Q(1) = 2 and, under the true rule, m_(i+1) the least m with
    prod_{j<=m} p_j > max(4 M_(2 m_i) Q(i), 2^(i+2) M_(2 m_i)).

    The scaled rule Q(i+1) = 4 Q(i) p_(m_i + 1) is only a qualitative stand-in.
    """
    if i_max < 1:
        raise ValidationError("i_max must be >= 1")
    if rule not in ("true", "scaled"):
        raise ValidationError("rule must be 'true' or 'scaled'")
    m_seq = [1]
    Q = [2]
    while len(Q) < i_max:
        i = len(Q)
        mi, qi = m_seq[-1], Q[-1]
        if rule == "scaled":
            p = first_primes(mi + 1)[-1]
            m_seq.append(mi + 1)
            Q.append(4 * qi * p)
            continue
        big = max_folner(2 * mi)
        _digits_ok(big)
        target = max(4 * big * qi, 2 ** (i + 2) * big)
        m, prod = mi, qi
        primes = first_primes(mi)
        while prod <= target:
            m += 1
            if len(primes) < m:
                primes = first_primes(max(m, 2 * len(primes)))
            prod *= primes[m - 1]
            _digits_ok(prod)
        m_seq.append(m)
        Q.append(prod)
    return CondensationSet(rule, tuple(m_seq), tuple(Q), rule == "scaled")


def divisibility_fraction(m: int, s: int) -> tuple[Fraction, Fraction]:
    """(direct count, closed form (m/(m+1))^s) for n in F_m divisible by p_1...p_s."""
    if not 0 <= s <= m:
        raise ValidationError("need 0 <= s <= m")
    F = folner_mult(m)
    q = math.prod(first_primes(s))
    direct = Fraction(sum(1 for n in F.elements if n % q == 0), len(F))
    return direct, Fraction(m, m + 1) ** s


# ----------------------------------------------------------------------------
# discrepancy


@dataclass(frozen=True)
class WeylResult:
    N: int
    discrepancy: float
    per_coordinate: tuple[float, ...]
    box_estimate: float | None
    rational_alpha: bool
    slack: float = 1e-9

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "discrepancy": self.discrepancy,
            "per_coordinate": list(self.per_coordinate),
            "box_estimate": self.box_estimate,
            "rational_alpha": self.rational_alpha,
            "slack": self.slack,
        }


NAMED_CONSTANTS = {
    "golden": lambda: (mpmath.sqrt(5) - 1) / 2,
    "phi": lambda: (1 + mpmath.sqrt(5)) / 2,
    "pi": lambda: +mpmath.pi,
    "e": lambda: +mpmath.e,
}


def parse_alpha(alpha) -> tuple[mpmath.mpf, bool]:
    """High-precision value of alpha and whether it is (given as) rational."""
    if isinstance(alpha, (int, Fraction)):
        a = Fraction(alpha)
        return mpmath.mpf(a.numerator) / a.denominator, True
    if isinstance(alpha, str):
        text = alpha.strip()
        try:
            a = Fraction(text)
        except ValueError:
            pass
        else:
            return mpmath.mpf(a.numerator) / a.denominator, True
        if text in NAMED_CONSTANTS:
            return NAMED_CONSTANTS[text](), False
        if text.startswith("sqrt(") and text.endswith(")"):
            inner = Fraction(text[5:-1])
            root = mpmath.sqrt(mpmath.mpf(inner.numerator) / inner.denominator)
            exact = math.isqrt(inner.numerator) ** 2 == inner.numerator and math.isqrt(inner.denominator) ** 2 == inner.denominator
            return root, exact
        raise ValidationError(f"cannot parse alpha {alpha!r}")
    return mpmath.mpf(alpha), False


def sequence_values(S, N: int) -> list[int]:
    if S == "naturals":
        return list(range(1, N + 1))
    if S == "squares":
        return [i * i for i in range(1, N + 1)]
    if callable(S):
        return [int(S(i)) for i in range(1, N + 1)]
    vals = [int(v) for v in S]
    if len(vals) < N:
        raise ValidationError("custom sequence shorter than N")
    return vals[:N]


def fractional_parts(values: Sequence[int], alpha) -> tuple[np.ndarray, bool]:
    """{s alpha} for each s, via a fixed-point expansion of alpha with ample guard bits."""
    top = max((abs(v) for v in values), default=1)
    bits = 64 + max(top, 1).bit_length() + 32
    with mpmath.workprec(bits + 16):
        value, rational = parse_alpha(alpha)
        A = int(mpmath.floor(value * mpmath.mpf(2) ** bits))
    mask = (1 << bits) - 1
    shift = bits - 53
    out = np.fromiter((((s * A) & mask) >> shift for s in values), dtype=np.float64, count=len(values))
    return out / float(1 << 53), rational


def star_discrepancy(points: np.ndarray) -> float:
    """max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted points."""
    x = np.sort(np.asarray(points, dtype=np.float64))
    N = len(x)
    if N == 0:
        raise ValidationError("need at least one point")
    i = np.arange(1, N + 1, dtype=np.float64)
    return float(max(np.max(i / N - x), np.max(x - (i - 1) / N)))


def box_discrepancy_estimate(points: np.ndarray, grid: int = 48) -> float:
    """Lower estimate of the star discrepancy of points in [0,1)^d over anchored boxes.

    Box corners are taken from quantiles of each coordinate.
    """
    N, d = points.shape
    per_axis = max(2, int(round(grid ** (1 / d)))) if d > 1 else grid
    axes = [np.unique(np.concatenate([np.quantile(points[:, j], np.linspace(0, 1, per_axis)), [1.0]])) for j in range(d)]
    best = 0.0
    for corner in itertools.product(*axes):
        c = np.asarray(corner)
        vol = float(np.prod(c))
        open_count = np.count_nonzero(np.all(points < c, axis=1))
        closed_count = np.count_nonzero(np.all(points <= c, axis=1))
        best = max(best, abs(open_count / N - vol), abs(closed_count / N - vol))
    return best


def weyl_discrepancy(S, alpha, N: int) -> WeylResult:
    """Star discrepancy of {s_i alpha mod 1 : i <= N}; vector alpha gives per-coordinate values
    plus an anchored-box estimate."""
    if N < 1:
        raise ValidationError("N must be positive")
    check_cap("discrepancy_points", N, "discrepancy sample")
    values = sequence_values(S, N)
    alphas = list(alpha) if isinstance(alpha, (list, tuple)) else [alpha]
    coords = []
    rational = False
    for a in alphas:
        x, rat = fractional_parts(values, a)
        coords.append(x)
        rational = rational or rat
    if rational:
        warnings.warn("rational alpha: the sequence does not equidistribute", stacklevel=2)
    per = tuple(star_discrepancy(x) for x in coords)
    if len(coords) == 1:
        return WeylResult(N, per[0], per, None, rational)
    box = box_discrepancy_estimate(np.stack(coords, axis=1))
    return WeylResult(N, max(max(per), box), per, box, rational)
