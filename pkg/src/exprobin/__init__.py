"""Picard iteration for the Laplace equation on the unit disk with an
exponential Robin boundary condition, plus the explicit constants that
certify its convergence."""

from .constants import (
    ConstantsReport,
    R_entire,
    check_admissible,
    compute_Lambda,
    compute_M0,
    constants_report,
    lambda_p,
    majorant_C,
    q_coeff,
    tilde_R,
)
from .geometry import AngularArc, ArcPartition, ArcQuadrature, PartitionError, build_quadrature, locate, validate_partition
from .linear_step import GalerkinSystem, ProblemInstance, assemble, boundary_residuals, solve_step
from .nonlinearity import Alpha, f_alpha, p2_bound, p3_bound, taylor_coeff_b
from .picard import NonConvergenceError, SolverReport, ball_check, contraction_report, run_picard
from .spectral import TrigPoly, dtn_apply, hs_norm, lp_norm_periodic, v_norm

__all__ = [
    "Alpha", "AngularArc", "ArcPartition", "ArcQuadrature", "ConstantsReport", "GalerkinSystem",
    "NonConvergenceError", "PartitionError", "ProblemInstance", "R_entire", "SolverReport", "TrigPoly",
    "assemble", "ball_check", "boundary_residuals", "build_quadrature", "check_admissible", "compute_Lambda",
    "compute_M0", "constants_report", "contraction_report", "dtn_apply", "f_alpha", "hs_norm", "lambda_p",
    "locate", "lp_norm_periodic", "majorant_C", "p2_bound", "p3_bound", "q_coeff", "run_picard", "solve_step",
    "taylor_coeff_b", "tilde_R", "v_norm", "validate_partition",
]
