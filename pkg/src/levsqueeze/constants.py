"""Physical constants (CODATA 2018), SI units."""

HBAR = 1.054571817e-34  # J s
C = 299792458.0  # m / s
EPS0 = 8.8541878128e-12  # F / m
