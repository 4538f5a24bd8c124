"""Weyl-invariant Calogero potentials built from root enumeration and Coxeter orbits."""

from .base import BasePotential
from .closed_forms import (
    AffineInvariantPotential,
    PartialSumPotential,
    affine_invariant_potential,
    coxeter_orbit_potential,
    partial_sum_potential,
)
from .matching import MatchTable, find_orbit_representatives, match_terms
from .terms import OrbitGenerator, PotentialTerm, TermSumPotential, kinetic

__all__ = [
    "BasePotential",
    "AffineInvariantPotential",
    "PartialSumPotential",
    "TermSumPotential",
    "affine_invariant_potential",
    "coxeter_orbit_potential",
    "partial_sum_potential",
    "MatchTable",
    "find_orbit_representatives",
    "match_terms",
    "OrbitGenerator",
    "PotentialTerm",
    "kinetic",
]
