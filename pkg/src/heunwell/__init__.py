"""Exact bound states of the x^(2/3) well with a fixed centrifugal barrier.

Also ships an independent shooting check and a nonlinear two-state
conversion model."""

from .potential import REFERENCE_PRESET, DomainError, PhysicalParams, energy_from_a, potential_value, spectral_params
from .specfun import EvalResult, gamma, hermite_nu, kummer_1f1, rgamma
from .closedform import Branch, GeneralSolution, SolutionContext, fundamental_solution, ode_residual
from .spectrum import EnergyLevel, bound_state_wavefunction, solve_levels_exact
from .oracle import OracleConfig, numerov_eigenvalues
from .twostate import PulseConfig, TwoStateAmplitudes, simulate_linear, simulate_nonlinear

__version__ = "0.1.0"
