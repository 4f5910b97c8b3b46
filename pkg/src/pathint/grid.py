"""Product quantile grids for finite-dimensional Gaussian integration.

Axis ``i`` gets ``m`` nodes (``m`` odd) at the equal-mass midpoint quantiles
of ``N(0, lambda_i)``::

    t_ij = sqrt(lambda_i) * Phi^-1((j - 1/2) / m),   j = 1..m

and the grid is the full product of the axes, ``n = m**d`` points, averaged
with equal weights. Two historical knobs are kept for reproduction work:
``variance_factor`` (3.0 gives the ``sqrt(3 lambda_i)`` scaling) and
``inner_selection`` (replace each node by whichever of ``t_ij, t_i,j+1`` is
closer to zero, with an ``+inf`` sentinel after the last node). Neither is
consistent for the Gaussian integral; the defaults leave both off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .errors import CapExceededError, DomainError, GridOverflowError
from .measure import EigenSpectrum, eigenvalue, partial_trace
from .probit import psi_inv

DEFAULT_ENUMERATION_CAP = 10 ** 7
MAX_GRID_BITS = 1 << 24
_BLOCK = 1 << 15


@dataclass(frozen=True)
class CurberaGrid:
    spec: EigenSpectrum
    d: int
    m: int
    nodes: tuple[np.ndarray, ...] = field(repr=False)
    n: int = field(repr=False)

    @property
    def n_digits(self) -> int:
        return decimal_digits(self.n)

    @property
    def trace(self) -> float:
        return partial_trace(self.spec, self.d)


def decimal_digits(n: int) -> int:
    """Exact number of decimal digits of a positive integer, without ``str()``."""
    if n < 1:
        raise DomainError("decimal_digits needs n >= 1")
    guess = int((n.bit_length() - 1) * math.log10(2)) + 1
    if n >= 10 ** guess:
        return guess + 1
    if n < 10 ** (guess - 1):
        return guess - 1
    return guess


def select_m(spec: EigenSpectrum, d: int, K1: float, eps_grid: float) -> int:
    """Smallest odd ``m >= 4 K1 sqrt(pi * sum_{i<=d} lambda_i) / eps_grid``."""
    if not eps_grid > 0:
        raise DomainError(f"eps_grid must be positive, got {eps_grid!r}")
    bound = 4.0 * K1 * math.sqrt(math.pi * partial_trace(spec, d)) / eps_grid
    m = max(1, math.ceil(bound))
    return m if m % 2 else m + 1


def axis_quantiles(m: int) -> np.ndarray:
    """Standard normal midpoint quantiles ``Phi^-1((j - 1/2)/m)``, exactly antisymmetric."""
    q = np.empty(m)
    for j in range(1, m + 1):
        s = (2 * j - 1 - m) / m
        x = psi_inv(abs(s)) if s else 0.0
        q[j - 1] = x if s >= 0 else -x
    return q


def _inner_select(t: np.ndarray) -> np.ndarray:
    ext = np.append(t, np.inf)
    return np.where(np.abs(t) <= np.abs(ext[1:]), t, ext[1:])


def build_grid(spec: EigenSpectrum, d: int, m: int, *,
               variance_factor: float = 1.0,
               inner_selection: bool = False) -> CurberaGrid:
    if d < 1 or int(d) != d:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    if m < 1 or m % 2 == 0 or int(m) != m:
        raise DomainError(f"m must be an odd positive integer, got {m!r}")
    d, m = int(d), int(m)
    if d * math.log2(m) > MAX_GRID_BITS:
        raise GridOverflowError(f"m**d = {m}**{d} exceeds {MAX_GRID_BITS} bits")
    base = axis_quantiles(m)
    if inner_selection:
        base = _inner_select(base)
    nodes = []
    for i in range(1, d + 1):
        axis = math.sqrt(variance_factor * eigenvalue(spec, i)) * base
        axis.setflags(write=False)
        nodes.append(axis)
    return CurberaGrid(spec, d, m, tuple(nodes), m ** d)


def digits(grid: CurberaGrid, linear_index: int) -> list[int]:
    """Zero-based base-``m`` digits of ``linear_index``, axis 1 least significant."""
    if not 0 <= linear_index < grid.n:
        raise IndexError(f"index {linear_index} outside [0, {grid.n})")
    out = []
    idx = int(linear_index)
    for _ in range(grid.d):
        idx, r = divmod(idx, grid.m)
        out.append(r)
    return out


def linear_index(grid: CurberaGrid, digit_seq) -> int:
    idx = 0
    for r in reversed(list(digit_seq)):
        if not 0 <= r < grid.m:
            raise IndexError(f"digit {r} outside [0, {grid.m})")
        idx = idx * grid.m + int(r)
    return idx


def point(grid: CurberaGrid, linear_index: int) -> np.ndarray:
    ds = digits(grid, linear_index)
    return np.array([grid.nodes[i][r] for i, r in enumerate(ds)])


def points_from_digits(grid: CurberaGrid, digit_block: np.ndarray) -> np.ndarray:
    """Map a ``(k, d)`` array of zero-based digits to grid points."""
    out = np.empty(digit_block.shape, dtype=float)
    for i in range(grid.d):
        out[:, i] = grid.nodes[i][digit_block[:, i]]
    return out


def iter_point_blocks(grid: CurberaGrid, block: int = _BLOCK) -> Iterator[np.ndarray]:
    """Yield all grid points in linear-index order as ``(k, d)`` arrays."""
    if grid.n >= 1 << 62:
        raise CapExceededError(f"grid of {grid.n_digits} digits cannot be enumerated", grid.n)
    powers = np.array([grid.m ** i for i in range(grid.d)], dtype=np.int64)
    for start in range(0, grid.n, block):
        idx = np.arange(start, min(start + block, grid.n), dtype=np.int64)
        dig = (idx[:, None] // powers[None, :]) % grid.m
        yield points_from_digits(grid, dig)


def evaluate_block(f, pts: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on each row; uses ``f.evaluate_batch`` when offered."""
    batch = getattr(f, "evaluate_batch", None)
    if batch is not None:
        return np.asarray(batch(pts), dtype=float)
    return np.array([float(f(row)) for row in pts])


def classical_sum(grid: CurberaGrid, f_d: Callable[[np.ndarray], float],
                  enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """Equal-weight mean of ``f_d`` over every grid point.

    The running sum is exact-rounded (Shewchuk partials via ``math.fsum``), so
    the result does not depend on how the index range is blocked.
    """
    if grid.n > enumeration_cap:
        raise CapExceededError(
            f"grid has n = {grid.m}**{grid.d} ({grid.n_digits} digits) points, "
            f"above enumeration cap {enumeration_cap}", grid.n, enumeration_cap)
    total = math.fsum(v for pts in iter_point_blocks(grid)
                      for v in evaluate_block(f_d, pts).tolist())
    return total / grid.n


def worst_case_error_bound(grid: CurberaGrid, K1: float) -> float:
    return 2.0 * K1 * math.sqrt(math.pi * grid.trace) / grid.m


def grid_info(grid: CurberaGrid, K1: float | None = None) -> dict:
    info = {
        "d": grid.d,
        "m": grid.m,
        "n": str(grid.n) if grid.n_digits <= 4000 else None,
        "n_digits": grid.n_digits,
        "spectrum": grid.spec.to_json(),
        "axis_min": [float(a[0]) for a in grid.nodes],
        "axis_max": [float(a[-1]) for a in grid.nodes],
    }
    if K1 is not None:
        info["worst_case_error_bound"] = worst_case_error_bound(grid, K1)
    return info
