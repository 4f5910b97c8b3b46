"""How many eigencoordinates are needed before the tail of the measure stops mattering.

Three routes to a truncation dimension ``d``:

``dimension_upper``
    the published closed forms (Wiener and exact power-law spectra);
``dimension_theorem2``
    the Wiener ``d_up`` variant that folds the ``K0`` scaling into ``eps``;
``dimension_by_tail``
    a direct search for the smallest ``d`` meeting the tail condition with
    :func:`pathint.measure.tail_bound`. This is the one the pipeline uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

from .errors import DomainError
from .measure import EigenSpectrum, tail_bound


@dataclass(frozen=True)
class SmoothnessClass:
    """The class F_r: ``r`` and derivative bounds ``K = (K0, ..., K_r)``."""

    r: int
    K: tuple[float, ...]

    def __init__(self, r: int, K: Sequence[float]):
        object.__setattr__(self, "r", int(r))
        object.__setattr__(self, "K", tuple(float(x) for x in K))
        if self.r < 1 or self.r != r:
            raise DomainError(f"r must be a positive integer, got {r!r}")
        if len(self.K) != self.r + 1:
            raise DomainError(f"need {self.r + 1} constants K0..K{self.r}, got {len(self.K)}")
        if not all(k > 0 and math.isfinite(k) for k in self.K):
            raise DomainError(f"all K_i must be positive and finite, got {self.K}")

    @property
    def K0(self) -> float:
        return self.K[0]

    @property
    def K1(self) -> float:
        return self.K[1]

    @property
    def K2(self) -> float:
        if self.r < 2:
            raise DomainError("K2 is only defined for r >= 2")
        return self.K[2]

    @property
    def gamma(self) -> int:
        return 1 if self.r == 1 else 0

    @property
    def beta(self) -> float:
        return 2.0 * self.K1 if self.r == 1 else self.K2

    def to_json(self) -> dict[str, Any]:
        return {"r": self.r, "K": list(self.K)}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "SmoothnessClass":
        return cls(obj["r"], obj["K"])


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps!r}")


def _ceil_dim(x: float) -> int:
    return max(1, math.ceil(x))


def dimension_upper(spec: EigenSpectrum, cls: SmoothnessClass, eps: float) -> int:
    _check_eps(eps)
    if spec.is_wiener:
        if cls.r == 1:
            return _ceil_dim((2.0 * cls.K1 / (math.pi ** 2 * eps)) ** 2 + 0.5)
        return _ceil_dim(cls.K2 / (math.pi ** 2 * eps) + 0.5)
    a, k = spec.a, spec.k
    if cls.r == 1:
        expr = (4.0 * a * cls.K1 ** 2 / (k - 1.0)) ** (1.0 / (k - 1.0)) * eps ** (-2.0 / (k - 1.0))
    else:
        expr = (a * cls.K2 / (k - 1.0)) ** (1.0 / (k - 1.0)) * eps ** (-1.0 / (k - 1.0))
    return _ceil_dim(1.0 + expr)


def dimension_theorem2(cls: SmoothnessClass, K0: float, eps: float) -> int:
    """Wiener-only ``d_up = ceil((K0 beta / (pi**2 eps))**(1 + gamma) + 1/2)``."""
    _check_eps(eps)
    if not K0 > 0:
        raise DomainError(f"K0 must be positive, got {K0!r}")
    base = K0 * cls.beta / (math.pi ** 2 * eps)
    return _ceil_dim(base ** (1 + cls.gamma) + 0.5)


def tail_threshold(cls: SmoothnessClass, eps: float) -> float:
    """Largest admissible tail sum for accuracy ``eps``.

    r = 1 asks ``tail <= eps**2 / (2 K1)**2``; r >= 2 asks
    ``(K2 / 2) tail <= eps``.
    """
    _check_eps(eps)
    if cls.r == 1:
        return eps ** 2 / (2.0 * cls.K1) ** 2
    return 2.0 * eps / cls.K2


def dimension_by_tail(spec: EigenSpectrum, cls: SmoothnessClass, eps: float) -> int:
    """Smallest ``d >= 1`` whose tail bound meets :func:`tail_threshold`."""
    limit = tail_threshold(cls, eps)
    if tail_bound(spec, 1) <= limit:
        return 1
    lo, hi = 1, 2
    while tail_bound(spec, hi) > limit:
        lo, hi = hi, hi * 2
        if hi > 1 << 62:
            raise DomainError(f"no truncation dimension below 2**62 for eps={eps}")
    # invariant: bound(lo) > limit >= bound(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(spec, mid) > limit:
            lo = mid
        else:
            hi = mid
    return hi


def truncation_error_bound(spec: EigenSpectrum, cls: SmoothnessClass, d: int) -> float:
    """Worst-case ``|I(f) - I_d(f)|`` over F_r implied by the tail bound at ``d``."""
    tail = tail_bound(spec, d)
    if cls.r == 1:
        return cls.K1 * math.sqrt(tail)
    return 0.5 * cls.K2 * tail
