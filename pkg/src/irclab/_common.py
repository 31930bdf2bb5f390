"""Shared plumbing: error types, size caps, seeded substreams, small numeric helpers."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

CAP_ENV = "IRC_LAB_CAP_OVERRIDE"

DEFAULT_CAPS = {
    "block_length": 10**7,
    "enumeration": 10**7,
    "word_table": 10**6,
    "orbit_space": 10**7,
    "admissible_words": 10**6,
    "folner": 10**7,
    "discrepancy_points": 10**7,
    "integer_digits": 10**5,
}


class IrcLabError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(IrcLabError, ValueError):
    """Bad input: wrong level, empty set, out-of-range parameter."""


class ResolutionError(ValidationError):
    """A threshold is finer than what the current level can resolve."""


class CapExceeded(IrcLabError):
    """A computation would exceed one of the configured size caps."""


def _parse_overrides(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValidationError(f"{CAP_ENV}: expected name=value, got {part!r}")
        name, _, value = part.partition("=")
        name = name.strip()
        if name not in DEFAULT_CAPS:
            raise ValidationError(f"{CAP_ENV}: unknown cap {name!r}")
        try:
            v = int(float(value))
        except ValueError:
            raise ValidationError(f"{CAP_ENV}: cap {name!r} is not a number") from None
        if v <= 0:
            raise ValidationError(f"{CAP_ENV}: cap {name!r} must be positive")
        out[name] = v
    return out


_runtime_overrides: dict[str, int] = {}


def set_cap_overrides(overrides: dict[str, int]) -> None:
    """Install process-wide cap overrides (used by the CLI config layer)."""
    for name, v in overrides.items():
        if name not in DEFAULT_CAPS:
            raise ValidationError(f"unknown cap {name!r}")
        if int(v) <= 0:
            raise ValidationError(f"cap {name!r} must be positive")
    _runtime_overrides.clear()
    _runtime_overrides.update({k: int(v) for k, v in overrides.items()})


def resolved_caps() -> dict[str, int]:
    caps = dict(DEFAULT_CAPS)
    caps.update(_parse_overrides(os.environ.get(CAP_ENV, "")))
    caps.update(_runtime_overrides)
    return caps


def cap(name: str) -> int:
    return resolved_caps()[name]


def check_cap(name: str, size: int, hint: str = "") -> None:
    limit = cap(name)
    if size > limit:
        msg = f"{name} cap exceeded: {size} > {limit}"
        if hint:
            msg += f" ({hint})"
        raise CapExceeded(msg)


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for element `index` of a seeded run.

    The stream depends only on (seed, index), so any split of the work
    across workers sees exactly the same random numbers.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), index])))


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """Order-preserving map; the worker count never changes the result."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def chunk_ranges(total: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(total, s + size)) for s in range(0, total, size)]


Z95 = 1.959963984540054


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n <= 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def first_primes(m: int) -> list[int]:
    primes: list[int] = []
    candidate = 2
    while len(primes) < m:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


def frac_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str | int | Fraction) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"not a rational number: {text!r}") from None


