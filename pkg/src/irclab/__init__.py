"""Finite-resolution experiments on invariant random compact sets.

Modules: symbolic (Chacon blocks), hyperspace (level sets and trees),
actions (group actions and orbit statistics), torus (circle dilations),
estimator (empirical measures) and cli.
"""
from ._common import (
    CAP_ENV,
    CapExceeded,
    IrcLabError,
    ResolutionError,
    ValidationError,
    resolved_caps,
    set_cap_overrides,
)
from .hyperspace import (
    BranchingProfile,
    DyadicDistance,
    FullShiftProfile,
    LevelSet,
    count_covering_subsets,
    covering_fraction_bound,
    dist_to_finite,
    finitary_occupancy_law,
    hausdorff_at_level,
    project,
    tree_measure,
)
from .symbolic import Word, chacon_block, chacon_L, chacon_orbit_window, chacon_Y_levelset, occurrences
from .actions import BlockPermutation, apply_permutation, orbit_stat, rblock_containment, transitivity_check
from .torus import DigitSet, IntervalUnion, cover, dilate, dilation_density, eps_dense, extract_J, weyl_discrepancy
from .estimator import EmpiricalIRC, accumulate, mass_near_finite, mass_near_full, tv_distance

__version__ = "0.1.0"

__all__ = [
    "CAP_ENV",
    "CapExceeded",
    "IrcLabError",
    "ResolutionError",
    "ValidationError",
    "resolved_caps",
    "set_cap_overrides",
    "BranchingProfile",
    "DyadicDistance",
    "FullShiftProfile",
    "LevelSet",
    "count_covering_subsets",
    "covering_fraction_bound",
    "dist_to_finite",
    "finitary_occupancy_law",
    "hausdorff_at_level",
    "project",
    "tree_measure",
    "Word",
    "chacon_block",
    "chacon_L",
    "chacon_orbit_window",
    "chacon_Y_levelset",
    "occurrences",
    "BlockPermutation",
    "apply_permutation",
    "orbit_stat",
    "rblock_containment",
    "transitivity_check",
    "DigitSet",
    "IntervalUnion",
    "cover",
    "dilate",
    "dilation_density",
    "eps_dense",
    "extract_J",
    "weyl_discrepancy",
    "EmpiricalIRC",
    "accumulate",
    "mass_near_finite",
    "mass_near_full",
    "tv_distance",
]
