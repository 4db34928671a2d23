"""Arimoto-Blahut solvers for finite rate-distortion and information-bottleneck
problems, with spectral diagnostics of the fixed-point iteration: residual
Jacobian, kernel bookkeeping across topological transitions, convergence-rate
prediction from the eigenvalue gap, and annealing sweep tooling that exposes
critical slowing down near transitions.
"""

from .ib import (
    IbProblem,
    IbSolution,
    decoder_classes,
    dirichlet_encoder_init,
    effective_cardinality,
    ib_decoder,
    ib_distortion,
    ib_functional,
    ib_solve,
    ib_step,
    identity_encoder_init,
    relevant_information,
    tangent_rd,
    uniform_encoder_init,
)
from .probability import (
    NumericalError,
    as_channel,
    as_distribution,
    entropy,
    kl_divergence,
    mutual_information,
    normalize,
    support,
)
from .problems import (
    BUILTIN_PROBLEMS,
    binary_hamming,
    binary_hamming_distortion,
    binary_hamming_rate,
    bottleneck_four_symbol,
    builtin_problem,
    dump_problem,
    load_problem,
    planar_four_point,
)
from .rd import (
    RdProblem,
    RdSolution,
    SolverConfig,
    ab_step,
    boltzmann_factors,
    dirichlet_init,
    encoder_from_marginal,
    expected_distortion,
    lagrangian,
    marginal_from_encoder,
    residual,
    solve,
    uniform_init,
)
from .reports import CSV_HEADER, emit_reports, write_sweep_csv, write_sweep_json
from .spectral import (
    FixedPointJacobian,
    SpectralReport,
    eigen_spectrum,
    eigenvalues_nonsymmetric,
    jacobian,
    jacobian_finite_difference,
    jacobian_product_form,
    kernel_dimension_check,
    predicted_iterations,
    symmetrized_support_block,
)
from .sweeps import (
    RateStudyPoint,
    SweepConfig,
    SweepRecord,
    TransitionReport,
    detect_transitions,
    rate_study,
    sweep,
)

__version__ = "0.1.0"
