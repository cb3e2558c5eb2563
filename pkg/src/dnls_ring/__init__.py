"""Standing waves, stability thresholds and traveling-wave bifurcation
branches of the n-site periodic discrete nonlinear Schrodinger lattice."""

from .bifurcation import (BifurcationPoint, DegeneracyReport, ResonanceRecord,
                          ResonanceReport, Thresholds, amplitude_thresholds,
                          check_nondegenerate, check_nonresonant,
                          classify_mode, enumerate_bifurcations)
from .continuation import (Branch, BranchPoint, ContinuationOptions,
                           ReducedSystem, continue_branch, extrapolate_onset,
                           loop_vector_field, onset_kernel, refine_point)
from .errors import (ConfigError, ConvergenceError, DegenerateAmplitudeError,
                     DnlsRingError, DomainError, ResonanceError)
from .lattice import (LatticeConfig, Potential, StandingWave, gradient,
                      hamiltonian, hessian, hessian_at_equilibrium,
                      make_standing_wave, potential_derivatives, rotating_rhs)
from .spectral import (BlockData, StabilityVerdict, alpha_beta, block_basis,
                       block_data, classify_stability, expected_spectrum,
                       full_spectrum, matching_distance)
from .symmetry import (GroupElement, LatticeLoop, ReducedProfile, act,
                       embed_reduced, project_reduced)
from .verify import (Trajectory, closure_error, integrate, invariant_drift,
                     spatial_period_error, traveling_wave_error)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
