"""Gaussian measures described by the spectrum of their covariance operator.

Two eigenvalue families are supported:

* ``wiener``: the classical Wiener measure on C([0, 1]) with
  ``lambda_j = 4 / (pi**2 (2j - 1)**2)`` and eigenfunctions
  ``sqrt(2) sin((2j - 1) pi t / 2)``.
* ``power_law``: ``lambda_j = a * j**(-k)`` with ``a > 0`` and ``k > 1``.

Eigenvalues are computed on demand; nothing is tabulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError

WIENER_TRACE = 0.5

# Block size for streamed partial traces; keeps memory flat for huge d.
_TRACE_BLOCK = 1 << 20


@dataclass(frozen=True)
class EigenSpectrum:
    """Eigenvalue model of a covariance operator.

    Use :meth:`wiener` or :meth:`power_law` rather than the raw constructor.
    """

    kind: str
    a: float = 1.0
    k: float = 2.0

    def __post_init__(self):
        if self.kind == "wiener":
            return
        if self.kind != "power_law":
            raise DomainError(f"unknown spectrum kind {self.kind!r}")
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError(f"power_law requires a > 0, got {self.a}")
        if not (self.k > 1 and math.isfinite(self.k)):
            raise DomainError(f"power_law requires k > 1, got {self.k}")

    @classmethod
    def wiener(cls) -> "EigenSpectrum":
        return cls("wiener")

    @classmethod
    def power_law(cls, a: float, k: float) -> "EigenSpectrum":
        return cls("power_law", float(a), float(k))

    @property
    def is_wiener(self) -> bool:
        return self.kind == "wiener"

    @property
    def trace(self) -> float:
        """Total trace; closed form for Wiener, zeta-function value otherwise."""
        if self.is_wiener:
            return WIENER_TRACE
        return self.a * _zeta(self.k)

    def to_json(self) -> dict[str, Any]:
        if self.is_wiener:
            return {"kind": "wiener"}
        return {"kind": "power_law", "a": self.a, "k": self.k}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "EigenSpectrum":
        kind = obj.get("kind")
        if kind == "wiener":
            return cls.wiener()
        if kind == "power_law":
            return cls.power_law(obj["a"], obj["k"])
        raise DomainError(f"unknown spectrum kind {kind!r}")


def _zeta(s: float) -> float:
    # Euler-Maclaurin with 64 explicit terms; plenty for s > 1 at double precision.
    n = 64
    j = np.arange(1, n, dtype=float)
    head = math.fsum(j ** -s)
    tail = n ** (1 - s) / (s - 1) + 0.5 * n ** -s + s * n ** (-s - 1) / 12.0
    tail -= s * (s + 1) * (s + 2) * n ** (-s - 3) / 720.0
    return head + tail


def _check_index(j: int, name: str = "j") -> None:
    if isinstance(j, bool) or int(j) != j or j < 1:
        raise DomainError(f"{name} must be a positive integer, got {j!r}")


def eigenvalues(spec: EigenSpectrum, start: int, stop: int) -> np.ndarray:
    """Vector of ``lambda_j`` for ``start <= j < stop`` (1-based)."""
    if start < 1 or stop < start:
        raise DomainError(f"bad eigenvalue range [{start}, {stop})")
    j = np.arange(start, stop, dtype=float)
    if spec.is_wiener:
        return 4.0 / (math.pi ** 2 * (2.0 * j - 1.0) ** 2)
    return spec.a * j ** (-spec.k)


def eigenvalue(spec: EigenSpectrum, j: int) -> float:
    _check_index(j)
    if spec.is_wiener:
        return 4.0 / (math.pi ** 2 * (2 * j - 1) ** 2)
    return spec.a * float(j) ** (-spec.k)


def partial_trace(spec: EigenSpectrum, d: int) -> float:
    """Sum of the first ``d`` eigenvalues, correctly rounded (``math.fsum``)."""
    if d < 0 or int(d) != d:
        raise DomainError(f"d must be a nonnegative integer, got {d!r}")
    d = int(d)
    if d == 0:
        return 0.0
    if d <= _TRACE_BLOCK:
        return math.fsum(eigenvalues(spec, 1, d + 1))
    blocks = (eigenvalues(spec, s, min(s + _TRACE_BLOCK, d + 1))
              for s in range(1, d + 1, _TRACE_BLOCK))
    return math.fsum(x for b in blocks for x in b)


def tail_bound(spec: EigenSpectrum, d: int) -> float:
    """Upper bound on ``sum_{j > d} lambda_j``.

    Wiener: ``1 / (pi**2 (d - 1/2))``. Power law: the integral estimate
    ``a / ((k - 1) d**(k - 1))``.
    """
    _check_index(d, "d")
    if spec.is_wiener:
        return 1.0 / (math.pi ** 2 * (d - 0.5))
    return spec.a / ((spec.k - 1.0) * float(d) ** (spec.k - 1.0))


def wiener_eigenfunction(i: int, t):
    """``sqrt(2) sin((2i - 1) pi t / 2)``; ``t`` may be a scalar or array in [0, 1]."""
    _check_index(i, "i")
    arr = np.asarray(t, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise DomainError("t must lie in [0, 1]")
    out = math.sqrt(2.0) * np.sin((2 * i - 1) * math.pi * arr / 2.0)
    return float(out) if out.ndim == 0 else out
