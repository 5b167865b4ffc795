"""Log-domain combinatorics shared by the operator builders and fidelity series.

Binomials such as C(1000, 500) overflow every native float, so everything is
expressed through a precomputed table of ln(k!) and only exponentiated at the
very end.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import gammaln

LN2 = math.log(2.0)


class CapacityError(ValueError):
    """Raised when a request needs more ln(k!) entries than a table holds."""

    def __init__(self, required: int, capacity: int):
        self.required = required
        self.capacity = capacity
        super().__init__(
            f"log-factorial table too small: need capacity >= {required}, "
            f"table holds {capacity} entries; rebuild with larger (n_max, l_max)"
        )


def required_capacity(n_max: int, l_max: int) -> int:
    """Table length needed for blocks of dimension ``n_max`` and |L| <= ``l_max``."""
    return 2 * n_max + l_max + 2


class LogFactorialTable:
    """Immutable table with ``values[k] = ln(k!)`` for ``0 <= k < capacity``.

    Parameters
    ----------
    capacity : int
        Number of entries. Use :meth:`for_dims` to size it from the largest
        block dimension and photon-number difference that will be requested.
    """

    def __init__(self, capacity: int):
        if capacity < 2:
            raise ValueError("capacity must be at least 2")
        values = gammaln(np.arange(capacity, dtype=float) + 1.0)
        values[:2] = 0.0
        values.setflags(write=False)
        self._values = values

    @classmethod
    def for_dims(cls, n_max: int, l_max: int) -> "LogFactorialTable":
        return cls(required_capacity(n_max, l_max))

    @property
    def capacity(self) -> int:
        return self._values.shape[0]

    @property
    def values(self) -> np.ndarray:
        return self._values

    def _check(self, k_max: int) -> None:
        if k_max >= self.capacity:
            raise CapacityError(k_max + 1, self.capacity)

    def log_factorial(self, k: int) -> float:
        if k < 0:
            raise ValueError("k must be nonnegative")
        self._check(k)
        return float(self._values[k])

    def sqrt_binom_product(self, n: int, m: int, L: int) -> float:
        """sqrt(C(n+m+L, n) C(n+m+L, m)) / 2**(L+n+m+1), evaluated in log domain."""
        if min(n, m, L) < 0:
            raise ValueError("n, m and L must be nonnegative")
        K = n + m + L
        self._check(K)
        lf = self._values
        # a(n) + a(m) is commutative in floating point, so the result is exactly symmetric
        a_n = lf[n] + lf[n + L]
        a_m = lf[m] + lf[m + L]
        return math.exp(lf[K] - 0.5 * (a_n + a_m) - (K + 1) * LN2)

    def sqrt_binom_matrix(self, dim: int, L: int) -> np.ndarray:
        """Dense ``dim x dim`` array of :meth:`sqrt_binom_product` for fixed ``L``."""
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if L < 0:
            raise ValueError("L must be nonnegative")
        self._check(2 * (dim - 1) + L)
        lf = self._values
        idx = np.arange(dim)
        a = lf[idx] + lf[idx + L]
        K = idx[:, None] + idx[None, :] + L
        return np.exp(lf[K] - 0.5 * (a[:, None] + a[None, :]) - (K + 1) * LN2)


@functools.lru_cache(maxsize=256)
def table_for(n_max: int, l_max: int) -> LogFactorialTable:
    """Shared table sized for the given dimensions (cached, safe to share)."""
    return LogFactorialTable.for_dims(n_max, l_max)


def log_factorial(k: int, table: LogFactorialTable | None = None) -> float:
    if table is None:
        table = table_for(max(k, 1), 0)
    return table.log_factorial(k)


def sqrt_binom_product(n: int, m: int, L: int, table: LogFactorialTable | None = None) -> float:
    """Matrix element (n, m) of the output-fidelity block with difference L."""
    if table is None:
        table = table_for(max(n, m, 1), L)
    return table.sqrt_binom_product(n, m, L)
