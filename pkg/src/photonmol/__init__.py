"""Photon-photon interactions in atom chains coupled to photonic-crystal waveguides."""

from .dynamics import (DriveProfile, G2Curve, ObservableSet, SolverError, Trajectory, evolve,
                       g2, mean_separation, observables, output_correlation_map, output_field,
                       prepare_spin_wave, steady_state)
from .model import (AtomChain, FewExcitationState, HamiltonianBlocks, LevelParams, assemble_blocks,
                    build_chain, waveguide_matrix)
from .polariton import (BoundState, PolaritonParams, bound_states, design_budget,
                        oscillation_frequency, oscillation_length, oscillation_period,
                        polariton_params,
                        propagate_effective, relative_grid)
from .potentials import (BandEdgeParams, InteractionPotential, attenuation_length,
                         band_edge_loss, cooperativity_at_range, evaluate, interaction_strength,
                         load_tabulated, loss_rate, potential_extremum)
from .transfer import (ScattererCoefficients, chain_response, chain_transmission, optical_depth,
                       three_level_coefficients, two_level_coefficients)

__version__ = "0.1.0"
