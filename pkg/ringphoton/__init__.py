"""
Collective photon emission from atomic states on a ring lattice.

Lengths are measured in units of the laser wavelength (k_L = 2π) and rates
in units of the single-atom decay rate Γ.
"""

__version__ = "1.0.0"

UNITS = "lengths in lambda_L, rates in Gamma"
