"""kmweyl - Exact Weyl groups and Calogero potentials for extended A-series algebras."""

__version__ = "0.1.0"
