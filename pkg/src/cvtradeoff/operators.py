"""Truncated blocks of the fidelity operators R_F, R_G and R(p) = p R_F + (1-p) R_G.

Both operators commute with the photon-number difference n_in - n_out, so
they split into blocks labelled by that difference. Block -L is spanned by
|n, n+L> and block +L by |n+L, n>, with n = 0 .. dim-1.
"""

from __future__ import annotations

import csv
import functools
from dataclasses import dataclass

import numpy as np

from .numerics import CapacityError, LogFactorialTable, required_capacity, table_for
from .schmidt import DomainError


@dataclass(frozen=True)
class RBlock:
    """Dense symmetric block of one of the fidelity operators.

    ``kind`` is "F", "G" or "combined"; ``p`` is set only for combined blocks.
    """

    L: int
    entries: np.ndarray
    kind: str
    p: float | None = None

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@functools.lru_cache(maxsize=128)
def _rf_entries(absL: int, dim: int) -> np.ndarray:
    a = table_for(dim, absL).sqrt_binom_matrix(dim, absL)
    a.setflags(write=False)
    return a


@functools.lru_cache(maxsize=128)
def _rg_diagonal(L: int, dim: int) -> np.ndarray:
    shift = L if L > 0 else 0
    d = 0.5 ** (np.arange(dim, dtype=float) + shift + 1.0)
    d.setflags(write=False)
    return d


def _check(L: int, dim: int, table: LogFactorialTable | None) -> None:
    if dim < 1:
        raise ValueError("block dimension must be >= 1")
    if table is not None:
        need = required_capacity(dim, abs(L))
        if table.capacity < need:
            raise CapacityError(need, table.capacity)


def build_rf(L: int, dim: int, table: LogFactorialTable | None = None) -> RBlock:
    """Output-fidelity block; the same matrix serves +L and -L."""
    _check(L, dim, table)
    if table is None:
        entries = _rf_entries(abs(L), dim)
    else:
        entries = table.sqrt_binom_matrix(dim, abs(L))
        entries.setflags(write=False)
    return RBlock(L=L, entries=entries, kind="F")


def build_rg(L: int, dim: int, table: LogFactorialTable | None = None) -> RBlock:
    """Estimation-fidelity block, diagonal; the only sign-sensitive constructor.

    +L has entries 1/2**(n+L+1), -L (and 0) has 1/2**(n+1).
    """
    _check(L, dim, table)
    entries = np.diag(_rg_diagonal(L, dim))
    entries.setflags(write=False)
    return RBlock(L=L, entries=entries, kind="G")


def build_r(p: float, L: int, dim: int, table: LogFactorialTable | None = None) -> RBlock:
    """Weighted block p R_F + (1 - p) R_G."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"weight p must lie in [0, 1], got {p!r}")
    rf = build_rf(L, dim, table).entries
    entries = p * rf
    idx = np.arange(dim)
    entries[idx, idx] += (1.0 - p) * _rg_diagonal(L, dim)
    entries.setflags(write=False)
    return RBlock(L=L, entries=entries, kind="combined", p=p)


def dump_block_csv(block: RBlock, path) -> None:
    """Write block entries one matrix row per line (debugging aid for external tools)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in block.entries:
            writer.writerow(f"{x:.17g}" for x in row)
