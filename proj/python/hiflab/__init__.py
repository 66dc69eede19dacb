"""Elliptic internal-data laboratory: forward solves, coefficient
reconstructions, and stability experiments on the unit square.

Scalar fields are (ny, nx) float64 arrays; symmetric matrix coefficients are
(3, ny, nx) arrays holding the a11, a12, a22 planes. A 2-D diffusion argument
is treated as isotropic.
"""

from ._hiflab import (
    ConfigurationError,
    FieldFileError,
    ReconstructionFailure,
    SolverFailure,
    __version__,
    add_noise,
    dirichlet_eigenvalue_closed_form,
    divergence_a_grad,
    estimate_delta,
    estimate_operator_norm_inverse,
    first_dirichlet_eigenvalue,
    gradient,
    laplacian,
    manufactured_case,
    norms,
    quotient_transform,
    read_field,
    recover_a_scalar,
    recover_aq_two_loads,
    recover_q_direct,
    recover_q_from_qu,
    recover_q_from_qu2,
    run_experiment,
    sample_coefficient,
    solve,
    synthesize,
    write_field,
)

__all__ = [
    "ConfigurationError",
    "FieldFileError",
    "ReconstructionFailure",
    "SolverFailure",
    "__version__",
    "add_noise",
    "dirichlet_eigenvalue_closed_form",
    "divergence_a_grad",
    "estimate_delta",
    "estimate_operator_norm_inverse",
    "first_dirichlet_eigenvalue",
    "gradient",
    "laplacian",
    "manufactured_case",
    "norms",
    "quotient_transform",
    "read_field",
    "recover_a_scalar",
    "recover_aq_two_loads",
    "recover_q_direct",
    "recover_q_from_qu",
    "recover_q_from_qu2",
    "run_experiment",
    "sample_coefficient",
    "solve",
    "synthesize",
    "write_field",
]
