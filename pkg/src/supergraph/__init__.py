"""Graph homology and the relative Lie superalgebra homology of Hamiltonian vector fields."""

__version__ = "0.1.0"
