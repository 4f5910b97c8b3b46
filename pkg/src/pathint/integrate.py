"""End-to-end path integration: truncate, build the grid, sum.

The error budget ``eps`` is split three ways, ``eps_trunc + eps_grid +
eps_sum`` (default ``eps/4, eps/4, eps/2``):

1. ``d = dimension_by_tail(spec, cls, eps_trunc)``;
2. ``m = select_m(spec, d, K1, 2 eps_grid)`` so the grid bound is ``<= eps_grid``;
3. the grid mean of ``f / K0`` is summed to ``eps_sum / K0`` by the chosen
   method, and the result is multiplied back by ``K0``.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .baselines import grid_size, mc_sample_size, monte_carlo
from .errors import CapExceededError, DomainError
from .grid import DEFAULT_ENUMERATION_CAP, build_grid, select_m, worst_case_error_bound
from .measure import EigenSpectrum
from .oracle import Integrand, exact_gaussian_value, make_oracle
from .qae import (DEFAULT_MEMORY_CAP, QUERY_CONVENTION, SHARP_QUERY_CONSTANT, QaeMode,
                  qsum)
from .truncate import (SmoothnessClass, dimension_by_tail, dimension_theorem2,
                       truncation_error_bound)

REPORT_SCHEMA_VERSION = 1


class Method(str, Enum):
    WORST_CASE_CLASSICAL = "worst_case_classical"
    MONTE_CARLO = "monte_carlo"
    QUANTUM_STATEVECTOR = "quantum_statevector"
    QUANTUM_ANALYTIC = "quantum_analytic"

    @property
    def is_quantum(self) -> bool:
        return self in (Method.QUANTUM_STATEVECTOR, Method.QUANTUM_ANALYTIC)


@dataclass(frozen=True)
class PipelineConfig:
    eps: float
    splits: tuple[float, float, float] | None = None
    method: Method | str = Method.QUANTUM_ANALYTIC
    repetitions: int = 1
    seed: int = 0
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    memory_cap: int = DEFAULT_MEMORY_CAP
    mc_samples: int | None = None
    unit_query_cost: float = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps!r}")
        splits = self.splits
        if splits is None:
            splits = (self.eps / 4, self.eps / 4, self.eps / 2)
        splits = tuple(float(s) for s in splits)
        if len(splits) != 3 or not all(s > 0 for s in splits):
            raise DomainError(f"splits must be three positive numbers, got {splits!r}")
        if abs(math.fsum(splits) - self.eps) > 1e-12 * max(1.0, self.eps):
            raise DomainError(f"splits {splits} do not sum to eps = {self.eps}")
        object.__setattr__(self, "splits", splits)
        object.__setattr__(self, "method", Method(self.method))
        if self.repetitions < 1 or self.repetitions % 2 == 0:
            raise DomainError("repetitions must be odd and positive")

    @property
    def eps_trunc(self) -> float:
        return self.splits[0]

    @property
    def eps_grid(self) -> float:
        return self.splits[1]

    @property
    def eps_sum(self) -> float:
        return self.splits[2]

    def to_json(self) -> dict[str, Any]:
        out = asdict(self)
        out["splits"] = list(self.splits)
        out["method"] = self.method.value
        return out


@dataclass
class PipelineReport:
    estimate: float
    method: str
    seed: int
    eps: float
    splits: list[float]
    d: int
    m: int
    n: int | None
    n_digits: int
    queries: int
    qubits: int | None
    delta: float | None = None
    M: int | None = None
    exact_value: float | None = None
    exact_truncated: float | None = None
    grid_value: float | None = None
    observed_error: float | None = None
    stage_errors: dict[str, float | None] = field(default_factory=dict)
    bounds: dict[str, float] = field(default_factory=dict)
    predicted: dict[str, Any] = field(default_factory=dict)
    query_convention: str | None = None
    short_circuit: bool = False
    timing: float | None = None

    def to_json(self, include_timing: bool = False) -> dict[str, Any]:
        out = asdict(self)
        out["schema_version"] = REPORT_SCHEMA_VERSION
        out["n"] = None if self.n is None or self.n_digits > 4000 else str(self.n)
        if not include_timing:
            out.pop("timing")
        return out


def report_cost(config: PipelineConfig, spec: EigenSpectrum, cls: SmoothnessClass,
                K0: float, unit_query_cost: float) -> float:
    """Wiener cost ``(2 K0 d_up / eps) (c + 2 log2(16 K0 K1 / eps))``."""
    if not spec.is_wiener:
        raise DomainError("the closed-form cost applies to the Wiener measure only")
    eps = config.eps
    d_up = dimension_theorem2(cls, K0, eps)
    return (2.0 * K0 * d_up / eps) * (unit_query_cost + 2.0 * math.log2(16.0 * K0 * cls.K1 / eps))


def _headline_prediction(config: PipelineConfig, spec: EigenSpectrum,
                         cls: SmoothnessClass) -> dict[str, Any]:
    if not spec.is_wiener:
        return {}
    K0, eps = cls.K0, config.eps
    d_up = dimension_theorem2(cls, K0, eps)
    log_term = math.log2(16.0 * K0 * cls.K1 / eps)
    return {
        "d_up": d_up,
        "queries": 2.0 * K0 / eps,
        "operations": 2.0 * K0 / eps * d_up * log_term,
        "qubits": d_up * log_term,
        "cost": report_cost(config, spec, cls, K0, config.unit_query_cost),
        "sharp_queries": SHARP_QUERY_CONSTANT * K0 / config.eps_sum,
    }


def _check_consistent(cls: SmoothnessClass, f: Integrand) -> None:
    tol = 1 + 1e-12
    if f.K0 > cls.K0 * tol or f.K1 > cls.K1 * tol:
        raise DomainError(f"integrand constants (K0={f.K0}, K1={f.K1}) exceed the class's")
    if cls.r >= 2 and f.K2 is not None and f.K2 > cls.K2 * tol:
        raise DomainError(f"integrand K2={f.K2} exceeds the class's K2={cls.K2}")


def _exact(f: Integrand, spec: EigenSpectrum, d: int | None) -> float | None:
    if f.kind == "custom" or (f.kind == "cosine_path_integral" and not spec.is_wiener):
        return None
    return exact_gaussian_value(f, spec, d)


def integrate(config: PipelineConfig, spec: EigenSpectrum, cls: SmoothnessClass,
              f: Integrand) -> PipelineReport:
    started = time.perf_counter()
    _check_consistent(cls, f)
    K0 = cls.K0
    method = config.method
    exact = _exact(f, spec, None)
    common = dict(method=method.value, seed=config.seed, eps=config.eps,
                  splits=list(config.splits), exact_value=exact,
                  predicted=_headline_prediction(config, spec, cls))

    if config.eps >= 2.0 * K0:
        # |I(f)| <= K0, so 0 is already within eps
        return PipelineReport(
            estimate=0.0, d=0, m=1, n=1, n_digits=1, queries=0,
            qubits=0 if method.is_quantum else None,
            observed_error=None if exact is None else abs(exact),
            short_circuit=True, timing=time.perf_counter() - started, **common)

    d = dimension_by_tail(spec, cls, config.eps_trunc)
    m = select_m(spec, d, cls.K1, 2.0 * config.eps_grid)
    grid = build_grid(spec, d, m)
    n, n_digits = grid_size(m, d)
    oracle = make_oracle(grid, f, K0)

    qubits = delta = M = convention = None
    if method is Method.WORST_CASE_CLASSICAL:
        if n is None or n > config.enumeration_cap:
            raise CapExceededError(
                f"worst-case grid has n = {m}**{d} ({n_digits} digits) points, "
                f"above enumeration cap {config.enumeration_cap}", n, config.enumeration_cap)
        scaled = oracle.mean(config.enumeration_cap)
        queries = oracle.queries
    elif method is Method.MONTE_CARLO:
        N = config.mc_samples or mc_sample_size(K0, config.eps_sum)
        scaled = monte_carlo(oracle, N, np.random.default_rng(np.random.SeedSequence(config.seed)))
        queries = N
    else:
        delta = min(config.eps_sum / K0, 0.5)
        mode = QaeMode.STATEVECTOR if method is Method.QUANTUM_STATEVECTOR else QaeMode.ANALYTIC
        res = qsum(oracle, delta, repetitions=config.repetitions, mode=mode, seed=config.seed,
                   memory_cap=config.memory_cap, enumeration_cap=config.enumeration_cap)
        scaled, queries, qubits, M = res.estimate, res.queries, res.qubits, res.M
        convention = QUERY_CONVENTION
    estimate = K0 * scaled

    exact_d = _exact(f, spec, d)
    grid_value = None if oracle.exact_mean is None else K0 * oracle.exact_mean
    if grid_value is None and method is Method.WORST_CASE_CLASSICAL:
        grid_value = estimate

    def gap(a, b):
        return None if a is None or b is None else abs(a - b)

    predicted = common.pop("predicted")
    if method.is_quantum:
        predicted["per_query_cost"] = config.unit_query_cost * d + qubits
    return PipelineReport(
        estimate=estimate, d=d, m=m, n=n, n_digits=n_digits, queries=queries,
        qubits=qubits, delta=delta, M=M, exact_truncated=exact_d, grid_value=grid_value,
        observed_error=gap(estimate, exact),
        stage_errors={"truncation": gap(exact, exact_d), "grid": gap(grid_value, exact_d),
                      "summation": gap(estimate, grid_value)},
        bounds={"truncation": truncation_error_bound(spec, cls, d),
                "grid": worst_case_error_bound(grid, cls.K1)},
        predicted=predicted, query_convention=convention,
        timing=time.perf_counter() - started, **common)


def load_config(obj: dict[str, Any]) -> tuple[PipelineConfig, EigenSpectrum, SmoothnessClass, Integrand]:
    """Parse the ``integrate`` config JSON (see ``docs/config.schema.json``)."""
    spec = EigenSpectrum.from_json(obj["spectrum"])
    cls = SmoothnessClass.from_json(obj["class"])
    f = Integrand.from_json(obj["integrand"])
    keys = ("eps", "splits", "method", "repetitions", "seed", "enumeration_cap",
            "memory_cap", "mc_samples", "unit_query_cost")
    kwargs = {k: obj[k] for k in keys if k in obj}
    if kwargs.get("splits") is not None:
        kwargs["splits"] = tuple(kwargs["splits"])
    return PipelineConfig(**kwargs), spec, cls, f


BENCH_COLUMNS = ("eps", "d", "m", "n_digits", "mc_samples", "q_queries", "q_qubits",
                 "method", "observed_error", "seed")


def bench_rows(spec: EigenSpectrum, cls: SmoothnessClass, f: Integrand, eps_values,
               methods=(Method.QUANTUM_ANALYTIC, Method.MONTE_CARLO, Method.WORST_CASE_CLASSICAL),
               seeds=(0,), enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
               skipped: list | None = None) -> list[dict[str, Any]]:
    """One row per (eps, method, seed); classical runs above the cap are skipped.

    ``mc_samples``, ``q_queries`` and ``q_qubits`` are the resources the
    pipeline plans for that ``eps`` (default splits), so every row of one
    ``eps`` carries the same values whatever method produced it.
    """
    from .qae import phase_grid_size, qubit_count, queries_per_run

    rows = []
    for eps in eps_values:
        plan = PipelineConfig(eps)
        d = dimension_by_tail(spec, cls, plan.eps_trunc)
        m = select_m(spec, d, cls.K1, 2.0 * plan.eps_grid)
        n, n_digits = grid_size(m, d)
        M = phase_grid_size(min(plan.eps_sum / cls.K0, 0.5))
        q_qubits = qubit_count(n, M) if n is not None else math.ceil(d * math.log2(m)) + M.bit_length()
        planned = {"mc_samples": mc_sample_size(cls.K0, plan.eps_sum),
                   "q_queries": queries_per_run(M), "q_qubits": q_qubits}
        for method in map(Method, methods):
            if method is Method.WORST_CASE_CLASSICAL and (n is None or n > enumeration_cap):
                if skipped is not None:
                    skipped.append((eps, method.value, n_digits))
                continue
            for seed in seeds:
                cfg = PipelineConfig(eps, method=method, seed=seed, enumeration_cap=enumeration_cap)
                rep = integrate(cfg, spec, cls, f)
                rows.append({"eps": eps, "d": rep.d, "m": rep.m, "n_digits": rep.n_digits,
                             **planned, "method": method.value,
                             "observed_error": rep.observed_error, "seed": seed})
    return rows
