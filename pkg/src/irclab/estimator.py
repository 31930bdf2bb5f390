"""Empirical measures on one hyperspace level, built from orbit data."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from ._common import ValidationError, frac_str, parallel_map
from .hyperspace import (
    LevelSet,
    check_resolution,
    dist_to_finite,
    dyadic,
    hausdorff_at_level,
    project,
)


@dataclass
class EmpiricalIRC:
    """Finitely supported probability measure on level-m LevelSets."""

    level: int
    atoms: dict[LevelSet, Fraction]
    provenance: dict[str, Any] = field(default_factory=dict)
    full: LevelSet | None = None

    def __post_init__(self):
        if not self.atoms:
            raise ValidationError("an empirical measure needs at least one atom")
        for A, w in self.atoms.items():
            if A.level != self.level:
                raise ValidationError("all atoms must sit at the same level")
            if w <= 0:
                raise ValidationError("atom weights must be positive")
        if sum(self.atoms.values()) != 1:
            raise ValidationError("atom weights must sum to 1")
        self.atoms = dict(sorted(self.atoms.items(), key=lambda kv: kv[0].sort_key()))

    def weight(self, A: LevelSet) -> Fraction:
        return self.atoms.get(A, Fraction(0))

    def mass_where(self, predicate) -> Fraction:
        return sum((w for A, w in self.atoms.items() if predicate(A)), Fraction(0))

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "atoms": [{"cells": sorted(A.cells), "weight": frac_str(w)} for A, w in self.atoms.items()],
            "provenance": self.provenance,
        }


def accumulate(system, Y, window: Sequence, workers: int = 1, provenance: Mapping | None = None) -> EmpiricalIRC:
    """Uniform average of point masses at g.Y over a finite window of group elements."""
    elements = list(window)
    if not elements:
        raise ValidationError("window must be nonempty")
    images = parallel_map(lambda g: system.apply(g, Y), elements, workers)
    counts: dict[LevelSet, int] = {}
    for A in images:
        counts[A] = counts.get(A, 0) + 1
    W = len(elements)
    level = images[0].level
    prov = {"window_size": W}
    prov.update(provenance or {})
    return EmpiricalIRC(
        level=level,
        atoms={A: Fraction(c, W) for A, c in counts.items()},
        provenance=prov,
        full=system.full_levelset(level),
    )


def project_irc(E: EmpiricalIRC) -> EmpiricalIRC:
    """Push the measure one level up by projecting every atom."""
    atoms: dict[LevelSet, Fraction] = {}
    for A, w in E.atoms.items():
        P = project(A)
        atoms[P] = atoms.get(P, Fraction(0)) + w
    full = project(E.full) if E.full is not None else None
    return EmpiricalIRC(E.level - 1, atoms, dict(E.provenance), full)


def mass_near_full(E: EmpiricalIRC, eps, full: LevelSet | None = None) -> Fraction:
    """Weight of atoms strictly within eps of the whole space."""
    eps = dyadic(eps)
    check_resolution(eps, E.level)
    full = full if full is not None else E.full
    if full is None:
        raise ValidationError("the full LevelSet of the ambient space is needed")
    return E.mass_where(lambda A: hausdorff_at_level(A, full) < eps)


def mass_near_finite(E: EmpiricalIRC, r: int, eps) -> Fraction:
    """Weight of atoms strictly within eps of some set of at most r points."""
    eps = dyadic(eps)
    check_resolution(eps, E.level)
    return E.mass_where(lambda A: dist_to_finite(A, r) < eps)


def tv_distance(E1: EmpiricalIRC, E2: EmpiricalIRC) -> Fraction:
    if E1.level != E2.level:
        raise ValidationError(f"level mismatch: {E1.level} vs {E2.level}")
    keys = set(E1.atoms) | set(E2.atoms)
    return sum((abs(E1.weight(A) - E2.weight(A)) for A in keys), Fraction(0)) / 2


def from_law(law: Mapping[LevelSet, Fraction], provenance: Mapping | None = None) -> EmpiricalIRC:
    """Wrap an exact law (e.g. an occupancy law) as an EmpiricalIRC for comparisons."""
    atoms = {A: Fraction(w) for A, w in law.items() if w}
    level = next(iter(atoms)).level
    return EmpiricalIRC(level, atoms, dict(provenance or {"source": "exact"}))
