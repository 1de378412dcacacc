"""Nonparametric density estimation on the rotation group SO(3).

Kernel-type estimators built from Fourier expansions over the irreducible
representations, exact mean integrated squared error (MISE) expressions in the
Fourier domain, and sampling / Monte-Carlo machinery for validating both.
"""

__version__ = "0.1.0"

from .rotations import Rotation  # noqa: F401
