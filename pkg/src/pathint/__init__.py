"""Path integration over Gaussian measures.

Truncate the eigenexpansion of the measure, sum the integrand over a
product quantile grid, and either enumerate the grid classically, sample
it (Monte Carlo) or hand it to a simulated quantum summation routine with
exact query and qubit accounting.
"""

from .errors import (BoundViolationError, CapExceededError, DomainError, GridOverflowError,
                     PathIntError)
from .grid import CurberaGrid, build_grid, classical_sum, select_m, worst_case_error_bound
from .integrate import Method, PipelineConfig, PipelineReport, integrate
from .measure import EigenSpectrum, eigenvalue, partial_trace, tail_bound
from .oracle import Integrand, SummandOracle, exact_gaussian_value, make_oracle
from .probit import gauss_quantile, psi, psi_inv
from .qae import QaeMode, QaeResult, qsum, qsum_bounded
from .truncate import SmoothnessClass, dimension_by_tail, dimension_upper

__version__ = "0.1.0"

__all__ = [
    "BoundViolationError", "CapExceededError", "CurberaGrid", "DomainError", "EigenSpectrum",
    "GridOverflowError", "Integrand", "Method", "PathIntError", "PipelineConfig",
    "PipelineReport", "QaeMode", "QaeResult", "SmoothnessClass", "SummandOracle",
    "build_grid", "classical_sum", "dimension_by_tail", "dimension_upper", "eigenvalue",
    "exact_gaussian_value", "gauss_quantile", "integrate", "make_oracle", "partial_trace",
    "psi", "psi_inv", "qsum", "qsum_bounded", "select_m", "tail_bound",
    "worst_case_error_bound",
]
