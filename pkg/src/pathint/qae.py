"""Simulated quantum summation: amplitude estimation of the mean of n numbers in [-1, 1].

State preparation ``A`` loads the summands as

    A|0>|0> = n^{-1/2} sum_i |i> (cos th_i |0> + sin th_i |1>),   sin^2 th_i = (y_i + 1)/2,

so the probability of the ancilla reading 1 is ``a = (S_n + 1)/2``. Phase
estimation on the Grover iterate ``Q = -A S_0 A^dagger S_chi`` with ``M``
grid points yields ``j``; ``a~ = sin^2(pi j / M)`` and ``S~ = 2 a~ - 1``.

Query convention: the initial ``A`` costs one query and each application of
``Q`` costs two (``A`` and ``A^dagger``). Phase estimation applies ``Q`` a
total of ``M - 1`` times, so one run costs ``2(M - 1) + 1`` queries.

The index register is padded to a power of two; padded slots get zero
amplitude from the state preparation, so ``a`` is the mean over the true
``n`` summands.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import BoundViolationError, CapExceededError, DomainError
from .grid import DEFAULT_ENUMERATION_CAP
from .oracle import SummandOracle

DEFAULT_MEMORY_CAP = 1 << 23  # amplitudes held by the statevector simulator
QUERY_CONVENTION = "2 per Grover iterate (A and A^dagger) + 1 for the initial preparation"
SHARP_QUERY_CONSTANT = 2.11


class QaeMode(str, Enum):
    STATEVECTOR = "statevector"
    ANALYTIC = "analytic"


def phase_grid_size(delta: float) -> int:
    """``M = 2**ceil(log2(4 pi / delta))`` (at least 2)."""
    if not 0 < delta:
        raise DomainError(f"delta must be positive, got {delta!r}")
    t = max(1, math.ceil(math.log2(4.0 * math.pi / delta)))
    return 1 << t


def queries_per_run(M: int) -> int:
    return 2 * (M - 1) + 1


def index_qubits(n: int) -> int:
    return (int(n) - 1).bit_length()


def qubit_count(n: int, M: int) -> int:
    return index_qubits(n) + (M.bit_length() - 1) + 1


def rep_rng(seed: int, repetition: int) -> np.random.Generator:
    """Generator for one repetition; a pure function of ``(seed, repetition)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(repetition),)))


# -- analytic outcome law -------------------------------------------------

def fejer(x: np.ndarray, M: int) -> np.ndarray:
    """``sin^2(M pi x) / (M^2 sin^2(pi x))``, equal to 1 at integer ``x``."""
    x = np.asarray(x, dtype=float)
    r = x - np.round(x)
    den = M * np.sin(np.pi * r)
    safe = np.abs(r) > 1e-13
    out = np.ones_like(r)
    out[safe] = (np.sin(M * np.pi * r[safe]) / den[safe]) ** 2
    return out


def analytic_distribution(a: float, M: int) -> np.ndarray:
    """Law of the measured phase index for good-state probability ``a``."""
    a = min(1.0, max(0.0, a))
    omega = math.asin(math.sqrt(a)) / math.pi
    j = np.arange(M) / M
    p = 0.5 * (fejer(j - omega, M) + fejer(j + omega, M))
    return p / p.sum()


# -- statevector simulation -----------------------------------------------

class GroverSimulator:
    """Dense real statevector for the index register plus one ancilla.

    ``queries`` counts every application of ``A`` or ``A^dagger``.
    """

    def __init__(self, values: np.ndarray):
        y = np.asarray(values, dtype=float)
        if y.ndim != 1 or len(y) == 0:
            raise DomainError("need a non-empty 1-d array of summands")
        bad = np.flatnonzero(~(np.abs(y) <= 1.0))
        if bad.size:
            raise BoundViolationError(f"summand {y[bad[0]]} at {int(bad[0])} outside [-1, 1]",
                                      int(bad[0]), float(y[bad[0]]))
        self.n = len(y)
        self.size = 1 << index_qubits(self.n)
        theta = np.zeros(self.size)
        theta[:self.n] = np.arcsin(np.sqrt(np.clip((y + 1.0) / 2.0, 0.0, 1.0)))
        self._cos, self._sin = np.cos(theta), np.sin(theta)
        v = np.zeros(self.size)
        v[:self.n] = 1.0 / math.sqrt(self.n)
        u = -v
        u[0] += 1.0
        uu = float(u @ u)
        # Householder reflection sending e_0 to v; identity when v == e_0
        self._u, self._uu = (u, uu) if uu > 1e-30 else (None, 1.0)
        self.queries = 0

    def zero_state(self) -> np.ndarray:
        psi = np.zeros((self.size, 2))
        psi[0, 0] = 1.0
        return psi

    def _householder(self, psi: np.ndarray) -> np.ndarray:
        if self._u is None:
            return psi
        return psi - np.outer(self._u, (2.0 / self._uu) * (self._u @ psi))

    def _rotate(self, psi: np.ndarray, sign: float) -> np.ndarray:
        c, s = self._cos, sign * self._sin
        return np.stack([c * psi[:, 0] - s * psi[:, 1], s * psi[:, 0] + c * psi[:, 1]], axis=1)

    def prepare(self, psi: np.ndarray) -> np.ndarray:
        self.queries += 1
        return self._rotate(self._householder(psi), 1.0)

    def unprepare(self, psi: np.ndarray) -> np.ndarray:
        self.queries += 1
        return self._householder(self._rotate(psi, -1.0))

    def grover(self, psi: np.ndarray) -> np.ndarray:
        psi = psi.copy()
        psi[:, 1] *= -1.0                      # S_chi
        psi = self.unprepare(psi)
        psi[0, 0] *= -1.0                      # S_0
        return -self.prepare(psi)

    def good_probability(self, psi: np.ndarray) -> float:
        return float(np.sum(psi[:, 1] ** 2))

    def phase_distribution(self, M: int) -> np.ndarray:
        """Outcome law of phase estimation with ``M`` grid points.

        The pre-QFT state is ``M^{-1/2} sum_k |k> Q^k A|0>``; the inverse QFT
        on the first register is an FFT over ``k``.
        """
        stack = np.empty((M, self.size, 2))
        psi = self.prepare(self.zero_state())
        stack[0] = psi
        for k in range(1, M):
            psi = self.grover(psi)
            stack[k] = psi
        amp = np.fft.fft(stack.reshape(M, -1), axis=0) / M
        p = np.sum(amp.real ** 2 + amp.imag ** 2, axis=1)
        return p / p.sum()


def statevector_distribution(values: Sequence[float], M: int,
                             memory_cap: int = DEFAULT_MEMORY_CAP) -> tuple[np.ndarray, int]:
    """Exact outcome law and the query tally for one phase-estimation run."""
    values = np.asarray(values, dtype=float)
    size = 1 << index_qubits(len(values))
    if M * 2 * size > memory_cap:
        raise CapExceededError(
            f"statevector needs {M * 2 * size} amplitudes (cap {memory_cap}); "
            f"use mode='analytic'", M * 2 * size, memory_cap)
    sim = GroverSimulator(values)
    p = sim.phase_distribution(M)
    return p, sim.queries


def _sample(p: np.ndarray, rng: np.random.Generator) -> int:
    return int(rng.choice(len(p), p=p))


def run_statevector(oracle: SummandOracle, M: int, rng: np.random.Generator,
                    memory_cap: int = DEFAULT_MEMORY_CAP,
                    enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[int, int]:
    values = oracle.all_values(enumeration_cap)
    p, queries = statevector_distribution(values, M, memory_cap)
    return _sample(p, rng), queries


def run_analytic(S_true: float, M: int, rng: np.random.Generator) -> tuple[int, int]:
    if not -1.0 <= S_true <= 1.0:
        raise BoundViolationError(f"mean {S_true} outside [-1, 1]", None, S_true)
    p = analytic_distribution((S_true + 1.0) / 2.0, M)
    return _sample(p, rng), queries_per_run(M)


def amplitude_from_outcome(j: int, M: int) -> float:
    return math.sin(math.pi * j / M) ** 2


@dataclass(frozen=True)
class QaeResult:
    estimate: float
    queries: int
    qubits: int
    outcomes: list[int]
    amplitude_estimates: list[float]
    M: int
    repetitions: int
    mode: str
    delta: float
    seed: int
    n: int
    target_mean: float | None = None
    scale: float = 1.0
    query_convention: str = field(default=QUERY_CONVENTION)

    @property
    def queries_per_run(self) -> int:
        return self.queries // self.repetitions

    def to_json(self) -> dict:
        out = asdict(self)
        out["queries_times_delta"] = self.queries_per_run * self.delta
        out["sharp_constant_reference"] = SHARP_QUERY_CONSTANT
        return out


def qsum(source: SummandOracle | float, delta: float, *, repetitions: int = 1,
         mode: QaeMode | str = QaeMode.ANALYTIC, seed: int = 0, n: int | None = None,
         memory_cap: int = DEFAULT_MEMORY_CAP,
         enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> QaeResult:
    """Estimate ``S_n`` to within ``delta`` with probability at least 3/4 per run.

    ``source`` is an oracle, or (analytic mode only) the exact mean itself, in
    which case ``n`` sets the register size used for the qubit count.
    The result is the median over ``repetitions`` (odd) independent runs.
    """
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    if repetitions < 1 or repetitions % 2 == 0:
        raise DomainError(f"repetitions must be odd and positive, got {repetitions!r}")
    mode = QaeMode(mode)
    M = phase_grid_size(delta)

    if isinstance(source, SummandOracle):
        n = source.n
        if mode is QaeMode.STATEVECTOR:
            values = source.all_values(enumeration_cap)
            target = math.fsum(values.tolist()) / n
            p, per_run = statevector_distribution(values, M, memory_cap)
        else:
            target = source.target_mean(enumeration_cap)
    else:
        if mode is QaeMode.STATEVECTOR:
            raise DomainError("statevector mode needs an oracle, not a bare mean")
        target = float(source)
        n = 1 if n is None else int(n)
    if mode is QaeMode.ANALYTIC:
        if not -1.0 <= target <= 1.0:
            raise BoundViolationError(f"mean {target} outside [-1, 1]", None, target)
        p, per_run = analytic_distribution((target + 1.0) / 2.0, M), queries_per_run(M)

    outcomes = [_sample(p, rep_rng(seed, r)) for r in range(repetitions)]
    amps = [amplitude_from_outcome(j, M) for j in outcomes]
    estimate = float(np.median([2.0 * a - 1.0 for a in amps]))
    return QaeResult(estimate=estimate, queries=repetitions * per_run,
                     qubits=qubit_count(n, M), outcomes=outcomes,
                     amplitude_estimates=amps, M=M, repetitions=repetitions,
                     mode=mode.value, delta=delta, seed=seed, n=n, target_mean=target)


def rescale_bounds(source: Sequence[float] | Callable[[int], float], B: float,
                   n: int | None = None) -> tuple[SummandOracle, float]:
    """Wrap summands in ``[-B, B]`` as an oracle in ``[-1, 1]``; returns ``(oracle, B)``."""
    if not B > 0:
        raise DomainError(f"B must be positive, got {B!r}")
    if callable(source):
        if n is None:
            raise DomainError("n is required for a callable source")
        fn = source
    else:
        arr = np.asarray(source, dtype=float)
        n, fn = len(arr), (lambda i: arr[i])

    def scaled(i: int) -> float:
        v = float(fn(i))
        if not abs(v) <= B:
            raise BoundViolationError(f"|y_{i}| = {abs(v)} exceeds B = {B}", i, v)
        return v / B

    return SummandOracle(n, scaled), B


def qsum_bounded(source, B: float, delta: float, *, n: int | None = None, **kwargs) -> QaeResult:
    """``B * qsum(y / B, delta / B)``: the same error contract for summands in ``[-B, B]``."""
    oracle, mult = rescale_bounds(source, B, n)
    res = qsum(oracle, delta / mult, **kwargs)
    target = None if res.target_mean is None else res.target_mean * mult
    return replace(res, estimate=res.estimate * mult, scale=mult, target_mean=target)
