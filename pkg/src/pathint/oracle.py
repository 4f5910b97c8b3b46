"""Test integrands with closed-form Gaussian integrals, and the summand oracle.

An integrand here is a functional of the eigencoordinates ``t_j`` of a path.
The analytic families are

* ``constant``: ``f = c``;
* ``linear``: ``f = sum_j w_j t_j`` (bounded only on a bounded grid, so the
  caller must declare ``K0``);
* ``cosine_linear``: ``f = A cos(sum_j w_j t_j)`` with
  ``E f = A exp(-1/2 sum_j w_j**2 lambda_j)``;
* ``cosine_path_integral``: ``cos(int_0^1 x(t) dt)`` under the Wiener
  measure, i.e. ``cosine_linear`` with ``w_j = <eta_j, 1> = 2 sqrt(2) / ((2j - 1) pi)``.

Their grid means factor over axes, which is what lets the quantum pipeline
run on grids far too large to enumerate.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import BoundViolationError, CapExceededError, DomainError
from .grid import (CurberaGrid, DEFAULT_ENUMERATION_CAP, evaluate_block,
                   iter_point_blocks, point, points_from_digits)
from .measure import EigenSpectrum, eigenvalues

KINDS = ("constant", "linear", "cosine_linear", "cosine_path_integral", "custom")


def path_integral_coefficients(start: int, stop: int) -> np.ndarray:
    """``<eta_j, 1>`` for the Wiener eigenfunctions, ``start <= j < stop``."""
    j = np.arange(start, stop, dtype=float)
    return 2.0 * math.sqrt(2.0) / ((2.0 * j - 1.0) * math.pi)


@dataclass(frozen=True)
class Integrand:
    kind: str
    K0: float
    K1: float
    K2: float | None = None
    c: float = 0.0
    w: tuple[float, ...] = ()
    amplitude: float = 1.0
    fn: Callable[[np.ndarray], float] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown integrand kind {self.kind!r}")
        if not self.K0 > 0 or not self.K1 > 0:
            raise DomainError("integrand must declare positive K0 and K1")
        if self.kind == "custom" and self.fn is None:
            raise DomainError("custom integrand needs fn")
        if self.kind == "constant" and abs(self.c) > self.K0:
            raise DomainError(f"|c| = {abs(self.c)} exceeds K0 = {self.K0}")
        if self.kind in ("cosine_linear", "cosine_path_integral"):
            if abs(self.amplitude) > self.K0:
                raise DomainError("cosine amplitude exceeds K0")
            norm = self.w_norm()
            if self.K1 < abs(self.amplitude) * norm * (1 - 1e-12):
                raise DomainError(f"K1 = {self.K1} below Lipschitz constant {norm}")
            if self.K2 is not None and self.K2 < abs(self.amplitude) * norm ** 2 * (1 - 1e-12):
                raise DomainError(f"K2 = {self.K2} below {norm ** 2}")

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c: float, K0: float | None = None) -> "Integrand":
        K0 = abs(c) if K0 is None else K0
        return cls("constant", K0=K0 or 1.0, K1=1.0, K2=1.0, c=float(c))

    @classmethod
    def linear(cls, w: Sequence[float], K0: float) -> "Integrand":
        w = tuple(float(x) for x in w)
        norm = math.sqrt(sum(x * x for x in w))
        return cls("linear", K0=K0, K1=norm or 1.0, K2=1.0, w=w)

    @classmethod
    def cosine_linear(cls, w: Sequence[float], amplitude: float = 1.0,
                      K0: float | None = None, K1: float | None = None,
                      K2: float | None = None) -> "Integrand":
        w = tuple(float(x) for x in w)
        norm = math.sqrt(sum(x * x for x in w))
        a = abs(amplitude)
        return cls("cosine_linear", K0=K0 if K0 is not None else (a or 1.0),
                   K1=K1 if K1 is not None else (a * norm or 1.0),
                   K2=K2 if K2 is not None else (a * norm ** 2 or 1.0),
                   w=w, amplitude=float(amplitude))

    @classmethod
    def cosine_path_integral(cls) -> "Integrand":
        """``cos(int_0^1 x(t) dt)``; K0 = K1 = K2 = 1 since ``||1||_L2 = 1``."""
        return cls("cosine_path_integral", K0=1.0, K1=1.0, K2=1.0)

    @classmethod
    def custom(cls, fn: Callable[[np.ndarray], float], K0: float, K1: float,
               K2: float | None = None) -> "Integrand":
        return cls("custom", K0=K0, K1=K1, K2=K2, fn=fn)

    # coefficients -------------------------------------------------------
    def coefficients(self, d: int) -> np.ndarray:
        """First ``d`` linear-functional coefficients (zero beyond a finite ``w``)."""
        if self.kind == "cosine_path_integral":
            return path_integral_coefficients(1, d + 1)
        out = np.zeros(d)
        k = min(d, len(self.w))
        out[:k] = self.w[:k]
        return out

    def w_norm(self) -> float:
        if self.kind == "cosine_path_integral":
            return 1.0
        return math.sqrt(math.fsum(x * x for x in self.w))

    # evaluation ---------------------------------------------------------
    def __call__(self, t) -> float:
        t = np.asarray(t, dtype=float)
        return float(self.evaluate_batch(t[None, :])[0])

    def evaluate_batch(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.kind == "constant":
            return np.full(len(pts), self.c)
        if self.kind == "custom":
            return np.array([float(self.fn(row)) for row in pts])
        s = pts @ self.coefficients(pts.shape[1])
        if self.kind == "linear":
            return s
        return self.amplitude * np.cos(s)

    def grid_mean(self, grid: CurberaGrid) -> float | None:
        """Equal-weight grid mean from the per-axis factorisation, or None."""
        if self.kind == "constant":
            return self.c
        if self.kind == "custom":
            return None
        w = self.coefficients(grid.d)
        if self.kind == "linear":
            return math.fsum(wi * math.fsum(ax) / grid.m for wi, ax in zip(w, grid.nodes))
        # the nodes are symmetric, so each axis factor of E exp(i w t) is real
        prod = 1.0
        for wi, ax in zip(w, grid.nodes):
            prod *= math.fsum(np.cos(wi * ax)) / grid.m
        return self.amplitude * prod

    def to_json(self) -> dict[str, Any]:
        if self.kind == "custom":
            raise DomainError("custom integrands are not serialisable")
        out: dict[str, Any] = {"kind": self.kind, "K0": self.K0, "K1": self.K1}
        if self.K2 is not None:
            out["K2"] = self.K2
        if self.kind == "constant":
            out["c"] = self.c
        if self.kind in ("linear", "cosine_linear"):
            out["w"] = list(self.w)
        if self.kind == "cosine_linear":
            out["amplitude"] = self.amplitude
        return out

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "Integrand":
        kind = obj.get("kind")
        if kind == "constant":
            return cls("constant", K0=obj.get("K0", abs(obj["c"]) or 1.0),
                       K1=obj.get("K1", 1.0), K2=obj.get("K2", 1.0), c=float(obj["c"]))
        if kind == "linear":
            w = obj["w"]
            lin = cls.linear(w, K0=obj["K0"])
            return lin if "K1" not in obj else cls("linear", K0=obj["K0"], K1=obj["K1"],
                                                  K2=obj.get("K2", 1.0), w=lin.w)
        if kind == "cosine_linear":
            return cls.cosine_linear(obj["w"], obj.get("amplitude", 1.0),
                                     obj.get("K0"), obj.get("K1"), obj.get("K2"))
        if kind == "cosine_path_integral":
            return cls.cosine_path_integral()
        raise DomainError(f"unknown integrand kind {kind!r}")


def _quadratic_form(f: Integrand, spec: EigenSpectrum, d: int | None) -> float:
    if f.kind == "cosine_linear" and (d is None or d > len(f.w)):
        d = len(f.w)
    if d is not None:
        if d == 0:
            return 0.0
        return math.fsum(f.coefficients(d) ** 2 * eigenvalues(spec, 1, d + 1))
    # infinite coefficient sequence: sum blocks until a block is negligible
    total, start, block = [], 1, 1 << 12
    while True:
        w = path_integral_coefficients(start, start + block)
        chunk = math.fsum(w ** 2 * eigenvalues(spec, start, start + block))
        total.append(chunk)
        start += block
        if chunk < 1e-17:
            break
    return math.fsum(total)


def exact_gaussian_value(f: Integrand, spec: EigenSpectrum, d: int | None = None) -> float:
    """Exact ``I_d(f)`` (or ``I(f)`` for ``d=None``) for the analytic families."""
    if f.kind == "constant":
        return f.c
    if f.kind == "linear":
        return 0.0
    if f.kind == "custom":
        raise DomainError("no closed form for custom integrands")
    if f.kind == "cosine_path_integral" and not spec.is_wiener:
        raise DomainError("cosine_path_integral is defined for the Wiener measure only")
    return f.amplitude * math.exp(-0.5 * _quadratic_form(f, spec, d))


class SummandOracle:
    """Deterministic map ``i -> y_i in [-1, 1]`` with a thread-safe call counter."""

    def __init__(self, n: int, value_fn: Callable[[int], float], *,
                 batch_fn: Callable[[np.ndarray], np.ndarray] | None = None,
                 exact_mean: float | None = None,
                 sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None,
                 enumerator: Callable[[], Any] | None = None):
        if n < 1:
            raise DomainError("oracle size must be positive")
        self.n = int(n)
        self._fn = value_fn
        self._batch = batch_fn
        self._exact_mean = exact_mean
        self._sampler = sampler
        self._enumerator = enumerator
        self._lock = threading.Lock()
        self._calls = 0

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "SummandOracle":
        arr = np.asarray(values, dtype=float)
        arr.setflags(write=False)
        return cls(len(arr), lambda i: float(arr[i]), batch_fn=lambda idx: arr[idx])

    @property
    def queries(self) -> int:
        return self._calls

    def reset_counter(self) -> None:
        with self._lock:
            self._calls = 0

    def _tally(self, k: int) -> None:
        with self._lock:
            self._calls += k

    @staticmethod
    def _check(v, where) -> None:
        if not abs(v) <= 1.0:
            raise BoundViolationError(f"summand {v!r} at {where} outside [-1, 1]", where, v)

    def value(self, i: int) -> float:
        if not 0 <= i < self.n:
            raise IndexError(f"index {i} outside [0, {self.n})")
        self._tally(1)
        v = float(self._fn(i))
        self._check(v, i)
        return v

    def values(self, indices) -> np.ndarray:
        """Batch evaluation; the counter advances by ``len(indices)``."""
        if self._batch is None:
            return np.array([self.value(int(i)) for i in indices])
        idx = np.asarray(indices)
        self._tally(len(idx))
        out = np.asarray(self._batch(idx), dtype=float)
        bad = np.flatnonzero(~(np.abs(out) <= 1.0))
        if bad.size:
            k = bad[0]
            self._check(out[k], int(idx[k]))
        return out

    def all_values(self, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
        """Every summand in index order; counts ``n`` calls."""
        if self.n > cap:
            raise CapExceededError(f"oracle of size {self.n} above enumeration cap {cap}", self.n, cap)
        if self._enumerator is not None:
            parts = []
            for block in self._enumerator():
                block = np.asarray(block, dtype=float)
                self._tally(len(block))
                bad = np.flatnonzero(~(np.abs(block) <= 1.0))
                if bad.size:
                    self._check(block[bad[0]], f"block offset {int(bad[0])}")
                parts.append(block)
            return np.concatenate(parts)
        return self.values(np.arange(self.n))

    def mean(self, cap: int = DEFAULT_ENUMERATION_CAP) -> float:
        """Exact ``S_n(y)`` by full enumeration (counts ``n`` calls)."""
        return math.fsum(self.all_values(cap).tolist()) / self.n

    @property
    def exact_mean(self) -> float | None:
        """Closed-form ``S_n(y)`` when the oracle knows it (no calls counted)."""
        return self._exact_mean

    def target_mean(self, cap: int = DEFAULT_ENUMERATION_CAP) -> float:
        if self._exact_mean is not None:
            return self._exact_mean
        return self.mean(cap)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Values at ``size`` i.i.d. uniform indices; counts ``size`` calls."""
        if self._sampler is not None:
            out = np.asarray(self._sampler(rng, size), dtype=float)
            self._tally(size)
            bad = np.flatnonzero(~(np.abs(out) <= 1.0))
            if bad.size:
                self._check(out[bad[0]], "sampled point")
            return out
        return self.values(uniform_indices(rng, self.n, size))


def uniform_indices(rng: np.random.Generator, n: int, size: int):
    """``size`` uniform draws from ``[0, n)``; big-integer safe."""
    if n <= 1 << 62:
        return rng.integers(0, n, size=size)
    bits = n.bit_length()
    words = (bits + 61) // 62
    out = []
    while len(out) < size:
        x = 0
        for w in rng.integers(0, 1 << 62, size=words):
            x = (x << 62) | int(w)
        x >>= words * 62 - bits
        if x < n:
            out.append(x)
    return out


def make_oracle(grid: CurberaGrid, f: Integrand, K0: float) -> SummandOracle:
    """Summands ``y_i = f_d(point(grid, i)) / K0``."""
    if not K0 > 0:
        raise DomainError("K0 must be positive")
    if K0 < f.K0 * (1 - 1e-12):
        raise DomainError(f"K0 = {K0} below the integrand's declared K0 = {f.K0}")

    def scaled(vals: np.ndarray, where) -> np.ndarray:
        bad = np.flatnonzero(~(np.abs(vals) <= K0))
        if bad.size:
            k = int(bad[0])
            loc = where(k)
            raise BoundViolationError(f"|f| = {abs(vals[k])} > K0 = {K0} at {loc}", loc, float(vals[k]))
        return vals / K0

    def value_fn(i: int) -> float:
        x = point(grid, i)
        return float(scaled(np.array([f(x)]), lambda _: x.tolist())[0])

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        dig = rng.integers(0, grid.m, size=(size, grid.d))
        pts = points_from_digits(grid, dig)
        return scaled(evaluate_block(f, pts), lambda k: pts[k].tolist())

    def enumerator():
        for pts in iter_point_blocks(grid):
            yield scaled(evaluate_block(f, pts), lambda k, p=pts: p[k].tolist())

    batch_fn = None
    if grid.n <= 1 << 62:
        powers = np.array([grid.m ** i for i in range(grid.d)], dtype=np.int64)

        def batch_fn(idx: np.ndarray) -> np.ndarray:
            dig = (np.asarray(idx, dtype=np.int64)[:, None] // powers[None, :]) % grid.m
            pts = points_from_digits(grid, dig)
            return scaled(evaluate_block(f, pts), lambda k: pts[k].tolist())

    gm = f.grid_mean(grid)
    return SummandOracle(grid.n, value_fn, batch_fn=batch_fn,
                         exact_mean=None if gm is None else gm / K0,
                         sampler=sampler, enumerator=enumerator)
