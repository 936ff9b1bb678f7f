"""Stability radius of interconnected exponentially stable LTI systems.

Compute the largest static coupling-perturbation norm under which a
network of exponentially stable state-space blocks stays exponentially
stable, construct the marginally destabilizing perturbation attaining that
bound, and verify both directions numerically.
"""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DegenerateError, InputError,
                     SingularityError, StabradError, VerificationError)
from .interconnect import (BlockPerturbation, CompositeSystem,
                           InterconnectionMatrix, ValidationReport,
                           apply_hadamard, closed_loop_matrix, delta_norm_2inf,
                           delta_opnorm, validate)
from .linalg import (PerronData, eigenvalues, hadamard_square, operator_norm,
                     spectral_abscissa, spectral_radius_nonneg)
from .radius import (RadiusReport, SweepOptions, compute_theta, mu_objective,
                     stability_radius, write_trace_csv)
from .system import (StateSpaceBlock, block_gain, hinf_norm, is_exp_stable,
                     tail_bound_frequency, transfer_eval)
from .verify import (MonteCarloReport, brute_force_radius,
                     monte_carlo_stability, sample_delta, scaling_check)
from .worstcase import (WorstCaseCertificate, certify, construct_delta,
                        perron_data_at)

__all__ = [
    "__version__",
    "BlockPerturbation", "CompositeSystem", "InterconnectionMatrix",
    "MonteCarloReport", "PerronData", "RadiusReport", "StateSpaceBlock",
    "SweepOptions", "ValidationReport", "WorstCaseCertificate",
    "StabradError", "InputError", "SingularityError", "DegenerateError",
    "VerificationError", "ConvergenceError",
    "apply_hadamard", "block_gain", "brute_force_radius", "certify",
    "closed_loop_matrix", "compute_theta", "construct_delta",
    "delta_norm_2inf", "delta_opnorm", "eigenvalues", "hadamard_square",
    "hinf_norm", "is_exp_stable", "monte_carlo_stability", "mu_objective",
    "operator_norm", "perron_data_at", "sample_delta", "scaling_check",
    "spectral_abscissa", "spectral_radius_nonneg", "stability_radius",
    "tail_bound_frequency", "transfer_eval", "validate", "write_trace_csv",
]
