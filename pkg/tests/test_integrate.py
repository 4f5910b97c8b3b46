import json
import math

import numpy as np
import pytest

from pathint.errors import CapExceededError, DomainError
from pathint.integrate import (BENCH_COLUMNS, Method, PipelineConfig, bench_rows, integrate,
                               load_config, report_cost)
from pathint.measure import EigenSpectrum
from pathint.oracle import Integrand, exact_gaussian_value
from pathint.truncate import SmoothnessClass, dimension_theorem2

WIENER = EigenSpectrum.wiener()
R2 = SmoothnessClass(2, [1.0, 1.0, 1.0])
R1 = SmoothnessClass(1, [1.0, 1.0])
COS = Integrand.cosine_path_integral()
EXACT = math.exp(-1 / 6)
SPLITS = (0.05, 0.05, 0.1)


def cfg(method, seed=0, **kw):
    return PipelineConfig(0.2, SPLITS, method=method, seed=seed, **kw)


def test_default_splits():
    c = PipelineConfig(0.4)
    assert c.splits == (0.1, 0.1, 0.2)
    assert c.method is Method.QUANTUM_ANALYTIC


@pytest.mark.parametrize("kw", [{"eps": 0.0}, {"eps": 0.2, "splits": (0.1, 0.1, 0.1)},
                                {"eps": 0.2, "splits": (0.1, 0.1, 0.0)},
                                {"eps": 0.2, "repetitions": 2},
                                {"eps": 0.2, "method": "exhaustive"}])
def test_invalid_configs(kw):
    with pytest.raises((DomainError, ValueError)):
        PipelineConfig(**kw)


@pytest.mark.parametrize("method", list(Method))
def test_constant_integrand_exact_for_every_method(method):
    cls = SmoothnessClass(2, [0.5, 1.0, 1.0])
    rep = integrate(PipelineConfig(0.4, method=method), WIENER, cls, Integrand.constant(0.5))
    assert rep.estimate == pytest.approx(0.5, abs=1e-12)


def test_worst_case_classical_example():
    rep = integrate(cfg("worst_case_classical"), WIENER, R2, COS)
    assert (rep.d, rep.m, rep.n) == (2, 49, 2401)
    assert rep.queries == 2401
    assert abs(rep.estimate - EXACT) <= 0.1
    assert rep.stage_errors["truncation"] <= 0.05
    assert rep.stage_errors["grid"] <= 0.05
    assert rep.stage_errors["summation"] == pytest.approx(0.0, abs=1e-14)


def test_quantum_modes_agree_on_small_grid():
    a = integrate(cfg("quantum_analytic", seed=3), WIENER, R2, COS)
    b = integrate(cfg("quantum_statevector", seed=3), WIENER, R2, COS)
    assert a.estimate == b.estimate
    assert a.queries == b.queries == 2 * (128 - 1) + 1
    assert a.qubits == b.qubits == 12 + 7 + 1


def test_three_term_budget_frequency():
    hits = 0
    for seed in range(200):
        rep = integrate(cfg("quantum_analytic", seed=seed), WIENER, R2, COS)
        assert rep.stage_errors["truncation"] <= SPLITS[0]
        assert rep.stage_errors["grid"] <= SPLITS[1]
        hits += rep.stage_errors["summation"] <= SPLITS[2]
    assert hits / 200 >= 0.70


def test_method_agreement_frequency():
    classical = integrate(cfg("worst_case_classical"), WIENER, R2, COS).estimate
    hits = sum(abs(integrate(cfg("quantum_analytic", seed=s), WIENER, R2, COS).estimate
                   - classical) <= 0.2 for s in range(200))
    assert hits / 200 >= 0.70


def test_monte_carlo_method():
    rep = integrate(cfg("monte_carlo", seed=1), WIENER, R2, COS)
    assert rep.queries == 400
    assert rep.qubits is None


def test_classical_refuses_large_grid():
    with pytest.raises(CapExceededError):
        integrate(PipelineConfig(0.05, method="worst_case_classical"), WIENER, R2, COS)


def test_quantum_runs_past_the_classical_cap():
    rep = integrate(PipelineConfig(0.05, seed=2), WIENER, R2, COS)
    assert rep.n > 10 ** 7
    assert rep.grid_value is not None
    assert rep.stage_errors["grid"] <= 0.0125


def test_short_circuit():
    rep = integrate(PipelineConfig(2.5), WIENER, R2, COS)
    assert rep.short_circuit
    assert rep.estimate == 0.0 and rep.queries == 0 and rep.d == 0


def test_inconsistent_class_rejected():
    with pytest.raises(DomainError):
        integrate(PipelineConfig(0.2), WIENER, SmoothnessClass(2, [0.5, 1.0, 1.0]), COS)


def test_report_cost_examples():
    c = PipelineConfig(0.1, unit_query_cost=0.0)
    assert dimension_theorem2(R2, 1.0, 0.1) == 2
    assert report_cost(c, WIENER, R2, 1.0, 0.0) == pytest.approx(20 * 2 * 2 * math.log2(160))
    assert report_cost(c, WIENER, R2, 1.0, 0.0) == pytest.approx(585.8, abs=0.05)
    costs = [report_cost(PipelineConfig(e), WIENER, R2, 1.0, 1.0) for e in (0.05, 0.1, 0.2, 0.4)]
    assert all(a > b for a, b in zip(costs, costs[1:]))
    base = report_cost(c, WIENER, R1, 1.0, 0.0)
    assert report_cost(c, WIENER, R1, 2.0, 0.0) > 2 * base
    with pytest.raises(DomainError):
        report_cost(c, EigenSpectrum.power_law(1.0, 2.0), R2, 1.0, 0.0)


def test_report_json_is_deterministic_and_serialisable():
    a = integrate(cfg("quantum_analytic", seed=5), WIENER, R2, COS).to_json()
    b = integrate(cfg("quantum_analytic", seed=5), WIENER, R2, COS).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["schema_version"] == 1 and a["n"] == "2401" and "timing" not in a


def test_power_law_pipeline():
    spec = EigenSpectrum.power_law(0.5, 2.0)
    f = Integrand.cosine_linear([1.0, 0.5, 0.25])
    cls = SmoothnessClass(2, [1.0, f.K1, f.K2])
    rep = integrate(PipelineConfig(0.4, method="worst_case_classical"), spec, cls, f)
    assert abs(rep.estimate - exact_gaussian_value(f, spec)) <= 0.2
    assert rep.predicted == {}


def test_load_config():
    config, spec, cls, f = load_config({
        "spectrum": {"kind": "wiener"}, "class": {"r": 2, "K": [1, 1, 1]},
        "integrand": {"kind": "cosine_path_integral"}, "eps": 0.2, "splits": [0.05, 0.05, 0.1],
        "method": "monte_carlo", "seed": 9})
    assert config.splits == SPLITS and config.method is Method.MONTE_CARLO and config.seed == 9
    assert spec == WIENER and cls == R2 and f == COS


def test_bench_rows_shape():
    skipped = []
    rows = bench_rows(WIENER, R2, COS, [0.2, 0.05], skipped=skipped)
    assert all(tuple(r) == BENCH_COLUMNS for r in rows)
    assert [r["method"] for r in rows] == ["quantum_analytic", "monte_carlo",
                                           "worst_case_classical", "quantum_analytic",
                                           "monte_carlo"]
    assert skipped == [(0.05, "worst_case_classical", 12)]
