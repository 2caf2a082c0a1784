"""Physical constants (SI, CODATA 2018 exact or recommended values)."""

HBAR = 1.054571817e-34  # J s
C = 299792458.0  # m/s
KB = 1.380649e-23  # J/K
G = 9.80665  # m/s^2
