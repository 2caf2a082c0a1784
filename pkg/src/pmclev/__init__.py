"""Casimir-Polder levitation of dipolar nanoparticles above PMC-like surfaces."""
from ._backend import BACKEND
from .errors import ConfigError, ConvergenceError, DomainError, NoLevitationError, PmclevError
from .force import (Conductor, ForceBreakdown, MatsubaraForce, NonEquilibriumForce, PMCForce,
                    PowerLawForce, ThermalState, WindowedForce, force_equilibrium_matsubara,
                    force_nonequilibrium, force_zero_t_pmc, force_zero_t_powerlaw,
                    force_zero_t_windowed)
from .levitation import LevitationSolution, Trajectory, find_equilibrium, harmonic_frequency, potential, simulate_trajectory
from .materials import AU, SI, SIC, Constant, Drude, Lorentz, NanoparticleSpec, nanoparticle
from .surface import GradientIndex, IdealPEC, IdealPMC, MagneticComposite, WindowedPMC, reflectance_map, reflection

__version__ = "0.1.0"
