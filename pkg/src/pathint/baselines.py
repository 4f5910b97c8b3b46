"""Classical comparators: Monte Carlo summation and resource predictions.

``predict_resources`` sizes the whole pipeline for a target ``eps`` with
the published conventions. A fraction ``split`` of ``eps`` goes to the
deterministic part: the closed-form truncation dimension and the grid
(each at ``split * eps``, i.e. each contributing at most half of it). The
rest, ``(1 - split) * eps``, goes to summation. Quantum and Monte Carlo
costs are then the costs of summing at that accuracy.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .grid import decimal_digits, select_m
from .measure import EigenSpectrum
from .oracle import SummandOracle
from .qae import SHARP_QUERY_CONSTANT, phase_grid_size, qubit_count, queries_per_run
from .truncate import SmoothnessClass, dimension_theorem2, dimension_upper

# n = m**d is kept as an exact integer up to this many decimal digits
EXACT_DIGITS_LIMIT = 100_000


def monte_carlo(oracle: SummandOracle, N: int, rng: np.random.Generator) -> float:
    """Mean of ``N`` uniform i.i.d. draws from the summands (exactly ``N`` queries)."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N!r}")
    return math.fsum(oracle.sample(rng, int(N)).tolist()) / N


def mc_sample_size(K0: float, eps_sum: float) -> int:
    """Chebyshev sizing ``ceil((2 K0 / eps_sum)**2)``: error <= eps_sum w.p. >= 3/4."""
    if not eps_sum > 0:
        raise DomainError("eps_sum must be positive")
    return math.ceil((2.0 * K0 / eps_sum) ** 2)


def grid_size(m: int, d: int) -> tuple[int | None, int]:
    """``(m**d or None, decimal digits)``; None when the integer would be astronomical."""
    if d * math.log10(m) > EXACT_DIGITS_LIMIT:
        return None, math.floor(d * math.log10(m)) + 1
    n = m ** d
    return n, decimal_digits(n)


def _index_qubits_symbolic(m: int, d: int, n: int | None) -> int:
    if n is not None:
        return (n - 1).bit_length()
    return math.ceil(d * math.log2(m))


@dataclass(frozen=True)
class ComplexityRow:
    eps: float
    split: float
    d: int
    m: int
    n_worst: int | None
    n_digits: int
    mc_samples: int
    quantum_queries: int
    qubits: int
    M: int
    d_up: int | None
    headline_queries: float
    headline_qubits: float | None
    sharp_queries: float

    def to_json(self) -> dict:
        out = asdict(self)
        out["n_worst"] = None if self.n_worst is None or self.n_digits > 4000 else str(self.n_worst)
        return out


def predict_resources(spec: EigenSpectrum, cls: SmoothnessClass, K0: float, eps: float,
                      split: float = 0.5) -> ComplexityRow:
    if not eps > 0:
        raise DomainError("eps must be positive")
    if not 0 < split < 1:
        raise DomainError(f"split must lie in (0, 1), got {split!r}")
    det = split * eps
    eps_sum = (1.0 - split) * eps
    d = dimension_upper(spec, cls, det)
    m = select_m(spec, d, cls.K1, det)
    n, digits = grid_size(m, d)
    delta = eps_sum / K0
    M = phase_grid_size(delta)
    if n is not None:
        qubits = qubit_count(n, M)
    else:
        qubits = _index_qubits_symbolic(m, d, None) + (M.bit_length() - 1) + 1
    if spec.is_wiener:
        d_up = dimension_theorem2(cls, K0, eps)
        t2_qubits = d_up * math.log2(16.0 * K0 * cls.K1 / eps)
    else:
        d_up, t2_qubits = None, None
    return ComplexityRow(
        eps=eps, split=split, d=d, m=m, n_worst=n, n_digits=digits,
        mc_samples=mc_sample_size(K0, eps_sum), quantum_queries=queries_per_run(M),
        qubits=qubits, M=M, d_up=d_up, headline_queries=2.0 * K0 / eps,
        headline_qubits=t2_qubits, sharp_queries=SHARP_QUERY_CONSTANT * K0 / eps_sum)


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
