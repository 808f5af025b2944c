"""Nonequilibrium thermodynamics of pure decoherence on a fermionic ring.

A qubit coupled through one site of a tight-binding ring dephases without
exchanging energy with the qubit Hamiltonian; all dissipated heat is
counting statistics of the bath alone.  This package computes the
decoherence function and the heat characteristic function exactly, two
independent ways:

* `dephasing` solves the many-body problem in the full Fock space (the
  oracle, exponential cost, small rings only);
* `determinant` reduces both quantities to single-particle functional
  determinants (polynomial cost, thousands of sites).

`heat` turns characteristic functions into moments, densities and entropy
ledgers, `validation` cross-checks the two solvers, and `cli` sweeps the
standard experiments to CSV.
"""

from .config import EXPERIMENTS, RunConfig, config_pairs, load_config, \
    parse_config, validate_config
from .dephasing import AtomicDistribution, ConditionedHamiltonian, \
    DephasingModel, bath_map_evolve, coherence_overlap, \
    conditional_work_distribution, direct_characteristic_branch, \
    direct_characteristic_function, mixture_heat_distribution, \
    reduced_coherence, static_noise_overlap, thermal_bath_state
from .determinant import ComplexSeries, DeterminantValue, \
    characteristic_evaluator, characteristic_series, conditioned_propagator, \
    decoherence_function, decoherence_series, full_characteristic_function, \
    heat_characteristic_branch
from .errors import CapacityError, NumericsError, OutputError, RangeError, \
    ResolutionError, ValidationError
from .fock import fock_dimension, many_body_bilinear, site_number_operator, \
    total_number_operator
from .heat import EntropyLedger, HeatDensity, LongTimeHeat, entropy_ledger, \
    first_moment_trace, first_two_moments, fluctuation_residual, heat_moment, \
    invert_to_density, long_time_mean_heat
from .lattice import LatticeSpec, SpectralCache, build_perturbed, \
    build_ring_hamiltonian, build_spectral_cache, fermi_occupations, \
    occupation_operator, solve_chemical_potential
from .models import PLUS_STATE, angular_momentum_counterexample, \
    lattice_dephasing_model
from .validation import Check, run_fluctuation_suite, run_oracle_equivalence

__version__ = "0.1.0"

__all__ = [
    "AtomicDistribution", "CapacityError", "Check", "ComplexSeries",
    "ConditionedHamiltonian", "DephasingModel", "DeterminantValue",
    "EXPERIMENTS", "EntropyLedger", "HeatDensity", "LatticeSpec",
    "LongTimeHeat", "NumericsError", "OutputError", "PLUS_STATE",
    "RangeError", "ResolutionError", "RunConfig", "SpectralCache",
    "ValidationError", "angular_momentum_counterexample", "bath_map_evolve",
    "build_perturbed", "build_ring_hamiltonian", "build_spectral_cache",
    "characteristic_evaluator", "characteristic_series", "coherence_overlap",
    "conditional_work_distribution",
    "conditioned_propagator", "config_pairs", "decoherence_function",
    "decoherence_series", "direct_characteristic_branch",
    "direct_characteristic_function", "entropy_ledger", "fermi_occupations",
    "first_moment_trace", "first_two_moments", "fluctuation_residual",
    "fock_dimension", "full_characteristic_function",
    "heat_characteristic_branch", "heat_moment", "invert_to_density",
    "lattice_dephasing_model", "load_config", "long_time_mean_heat",
    "many_body_bilinear", "mixture_heat_distribution", "occupation_operator",
    "parse_config", "reduced_coherence", "run_fluctuation_suite",
    "run_oracle_equivalence", "site_number_operator",
    "solve_chemical_potential", "static_noise_overlap", "thermal_bath_state",
    "total_number_operator", "validate_config",
]
