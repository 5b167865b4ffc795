"""Photon-number-correlated two-mode pure states sum_n c_n |n, n>.

The coefficients are the Schmidt amplitudes of the resource state shared in
the teleportation-based measurement; they also form the dominant eigenvector
of the L = 0 trade-off block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .numerics import table_for

NORM_TOL = 1e-12
FILE_NORM_TOL = 1e-6


class DomainError(ValueError):
    """A parameter lies outside the domain where a formula is defined."""


class StateFormatError(ValueError):
    """A state file could not be parsed; ``line`` is 1-based (0 for whole-file issues)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        where = f"line {line}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class SchmidtState:
    """Unit-norm, nonnegative Schmidt amplitudes truncated to ``dim`` terms.

    ``leakage`` is the squared norm dropped by truncation before
    renormalization (zero for states that are finite by construction).
    ``meta`` holds generating parameters and is written to file headers.
    """

    coeffs: np.ndarray
    leakage: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            raise ValueError("a state needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if np.any(c < 0):
            raise ValueError("Schmidt coefficients must be nonnegative")
        norm2 = math.fsum(c * c)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"coefficients not unit norm (sum c_n^2 = {norm2!r})")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def from_amplitudes(cls, amplitudes, leakage: float = 0.0, meta: dict | None = None) -> "SchmidtState":
        """Normalize arbitrary nonnegative amplitudes into a state."""
        a = np.asarray(amplitudes, dtype=float).ravel()
        norm = math.sqrt(math.fsum(a * a))
        if norm == 0.0:
            raise ValueError("amplitudes are all zero")
        return cls(a / norm, leakage=leakage, meta=dict(meta or {}))

    def padded(self, dim: int) -> "SchmidtState":
        """Same state with zero coefficients appended up to ``dim``."""
        if dim < self.dim:
            raise ValueError("padding cannot shrink a state")
        c = np.zeros(dim)
        c[: self.dim] = self.coeffs
        return SchmidtState(c, leakage=self.leakage, meta=self.meta)


def vacuum(dim: int = 1) -> SchmidtState:
    c = np.zeros(dim)
    c[0] = 1.0
    return SchmidtState(c)


def tmsv(lam: float, dim: int) -> SchmidtState:
    """Two-mode squeezed vacuum with c_n proportional to lam**n, truncated and renormalized.

    The squared norm lost to truncation, ``lam**(2*dim)``, is kept in
    ``leakage``.
    """
    if not 0.0 <= lam < 1.0:
        raise DomainError(f"TMSV parameter must satisfy 0 <= lambda < 1, got {lam!r}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    n = np.arange(dim)
    c = math.sqrt(1.0 - lam * lam) * lam**n
    leakage = lam ** (2 * dim)
    return SchmidtState.from_amplitudes(c, leakage=leakage, meta={"kind": "tmsv", "lambda": lam})


def photon_subtracted(x: float, dim: int) -> SchmidtState:
    """TMSV with one photon removed from each mode; ``x`` is transmittance times lambda."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"photon-subtraction parameter must satisfy 0 <= x < 1, got {x!r}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    y = x * x
    n = np.arange(dim)
    c = math.sqrt((1.0 - y) ** 3 / (1.0 + y)) * (n + 1) * x**n
    # tail of sum (n+1)^2 y^n, whose full value is (1+y)/(1-y)^3
    kept = math.fsum(c * c)
    leakage = max(0.0, 1.0 - kept)
    return SchmidtState.from_amplitudes(c, leakage=leakage, meta={"kind": "photon_subtracted", "x": x})


def fidelity_output(state: SchmidtState) -> float:
    """Teleportation (output) fidelity F = sum_{m,n} C(m+n, n) c_m c_n / 2**(m+n+1).

    Terms are grouped by m + n and the groups are added in increasing order
    with an exactly rounded sum, so the result does not depend on the
    truncation padding.
    """
    c = state.coeffs
    N = state.dim
    weights = table_for(N, 0).sqrt_binom_matrix(N, 0)
    terms = weights * np.outer(c, c)
    idx = np.arange(N)
    diag = (idx[:, None] + idx[None, :]).ravel()
    per_diagonal = np.bincount(diag, weights=terms.ravel(), minlength=2 * N - 1)
    return math.fsum(per_diagonal)


def fidelity_estimation(state: SchmidtState) -> float:
    """Estimation fidelity G = sum_n c_n**2 / 2**(n+1)."""
    c = state.coeffs
    return math.fsum(c * c * 0.5 ** (np.arange(state.dim) + 1.0))


def save_state(state: SchmidtState, path) -> None:
    """Write ``state`` as '#' header lines followed by "n c_n" rows (17 significant digits)."""
    lines = [f"# dim={state.dim}", f"# leakage={state.leakage:.17g}"]
    for key, value in state.meta.items():
        if isinstance(value, float):
            value = f"{value:.17g}"
        lines.append(f"# {key}={value}")
    lines.extend(f"{n} {c:.17g}" for n, c in enumerate(state.coeffs))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_state(path) -> SchmidtState:
    """Parse a state file written by :func:`save_state` (or by hand)."""
    text = Path(path).read_text(encoding="utf-8")
    coeffs: list[float] = []
    meta: dict = {}
    leakage = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                key = key.strip()
                value = value.strip()
                if key == "leakage":
                    leakage = float(value)
                elif key != "dim":
                    meta[key] = _header_value(value)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise StateFormatError(f"expected 'n c_n', got {raw!r}", lineno)
        try:
            n = int(parts[0])
            value = float(parts[1])
        except ValueError:
            raise StateFormatError(f"cannot parse {raw!r}", lineno) from None
        if n != len(coeffs):
            raise StateFormatError(f"index {n} out of order, expected {len(coeffs)}", lineno)
        if not math.isfinite(value):
            raise StateFormatError(f"non-finite coefficient {parts[1]!r}", lineno)
        if value < 0:
            raise StateFormatError(f"negative coefficient c_{n} = {value!r}", lineno)
        coeffs.append(value)
    if not coeffs:
        raise StateFormatError("no coefficient lines found")
    c = np.array(coeffs)
    norm2 = math.fsum(c * c)
    if abs(norm2 - 1.0) > FILE_NORM_TOL:
        raise StateFormatError(f"sum of c_n^2 is {norm2!r}, deviates from 1 by more than {FILE_NORM_TOL}")
    if abs(norm2 - 1.0) > NORM_TOL:
        c = c / math.sqrt(norm2)
    return SchmidtState(c, leakage=leakage, meta=meta)


def _header_value(value: str):
    try:
        return float(value)
    except ValueError:
        return value
