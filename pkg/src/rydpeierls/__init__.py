"""Chiral excitation hopping between three-level sites: exact and effective
Hamiltonians, perturbative Peierls fluxes, the anyon mapping of the
density-dependent ring, and a Monte Carlo model of the measurement."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .anyon import ModeAlgebra, anyon_transform, build_hardcore_modes, hamiltonian_equivalence, verify_algebra
from .dynamics import MeasuredProbabilities, center_of_mass, detection_patterns, imbalance, residual_frequency
from .experiment import ExperimentConfig, MonteCarloResult, NoiseModel, run_monte_carlo, simulate_ideal
from .geometry import SiteLayout, bond, equilateral, honeycomb, isosceles, jitter, square
from .hilbert import enumerate_basis, evolve, excitation_number
from .model import (
    MEASURED_PARAMS,
    EffectiveParams,
    VModelParams,
    effective_single_hamiltonian,
    full_v_hamiltonian,
    many_body_effective,
)
from .peierls import honeycomb_couplings, isosceles_fluxes, square_couplings, triangle_hop, two_excitation_hop
