"""Free-field realization of the loop-like toroidal Lie superalgebra of type B(0,n)."""

__version__ = "0.1.0"
