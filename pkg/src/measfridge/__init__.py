"""Continuously monitored, adiabatically driven three-level quantum refrigerators."""

from .baths import BathSpec, RateSet, occupation, rates, rates_linear, rates_nonlinear, spectral_density
from .generators import (
    COHERENT,
    DIAGONAL,
    Device,
    bath_generator,
    measurement_generator,
    measurement_stochastic_increment,
    total_generator,
    unitary_generator,
)
from .solvers import (
    adiabatic_correction,
    evolve_deterministic,
    evolve_ensemble,
    evolve_stochastic,
    steady_state,
    steady_state_derivative,
)
from .system import DriveProtocol, EigenBasis, Harmonic, SystemParams, diagonalize, drive_at
from .thermo import (
    CycleSummary,
    ThermoRecord,
    cop,
    cycle_average,
    geometric_work,
    heat_current,
    interplay_current,
    kappa,
    measurement_power,
    static_observables,
)

__version__ = "0.1.0"
