"""Dominant eigenpairs of trade-off blocks and the scan over photon-number differences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import table_for
from .operators import RBlock, build_r
from .schmidt import DomainError, SchmidtState

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
RETRY_FACTOR = 10


class ConvergenceError(RuntimeError):
    """Power iteration hit ``max_iter``; carries the last iterate's diagnostics."""

    def __init__(self, eigenvalue, residual, iterations, p=None, L=None):
        self.eigenvalue = eigenvalue
        self.residual = residual
        self.iterations = iterations
        self.p = p
        self.L = L
        tag = "" if p is None else f" (p={p!r}, L={L})"
        super().__init__(
            f"power iteration did not converge in {iterations} iterations{tag}: "
            f"last eigenvalue {eigenvalue!r}, residual {residual:.3e}"
        )

    def tagged(self, p, L) -> "ConvergenceError":
        return ConvergenceError(self.eigenvalue, self.residual, self.iterations, p=p, L=L)


@dataclass(frozen=True)
class EigResult:
    eigenvalue: float
    eigenvector: np.ndarray
    iterations: int
    residual: float


def dominant_eig(block, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> EigResult:
    """Largest eigenvalue and Perron vector of a symmetric nonnegative matrix.

    Power iteration from the uniform positive vector. Stops once the Rayleigh
    quotient changes by at most ``tol`` relative and the max-norm residual
    ``|A v - lam v|`` is at most ``10 * tol``. The returned vector has unit
    norm and its largest-magnitude entry positive.

    Parameters
    ----------
    block : RBlock or array_like
        Square symmetric matrix.
    tol : float
        Relative eigenvalue tolerance.
    max_iter : int
        Iteration budget; exceeding it raises :class:`ConvergenceError`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = block.entries if isinstance(block, RBlock) else np.asarray(block, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    n = A.shape[0]
    v = np.full(n, 1.0 / math.sqrt(n))
    lam_prev = math.nan
    lam = math.nan
    resid = math.inf
    for k in range(1, max_iter + 1):
        w = A @ v
        lam = float(v @ w)
        # the residual is only needed once the eigenvalue has settled
        if abs(lam - lam_prev) <= tol * abs(lam) or k == max_iter:
            resid = float(np.max(np.abs(w - lam * v)))
            if resid <= 10.0 * tol and abs(lam - lam_prev) <= tol * abs(lam):
                return EigResult(lam, _canonical(v), k, resid)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            # v sits in the null space; only possible for a zero matrix given a positive start
            return EigResult(0.0, _canonical(v), k, 0.0)
        v = w / norm
        lam_prev = lam
    raise ConvergenceError(lam, resid, max_iter)


def _canonical(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class BlockScanResult:
    """Outcome of diagonalizing every scanned block at one weight ``p``.

    ``eigenvalues`` maps block label L to its dominant eigenvalue;
    ``optimal_state`` is only set when the L = 0 block wins.
    """

    p: float
    dim: int
    eigenvalues: dict
    L_star: int
    lambda_max: float
    eigenvector: np.ndarray
    iterations: int
    degeneracy: float
    optimal_state: SchmidtState | None = field(default=None, compare=False)


def scan_labels(l_max: int, include_positive: bool = False) -> list[int]:
    labels = [0]
    for L in range(1, l_max + 1):
        labels.append(-L)
        if include_positive:
            labels.append(L)
    return labels


def _rank_key(L: int, lam: float):
    # larger eigenvalue first, then smaller |L|, then the negative label
    return (lam, -abs(L), L <= 0)


def block_scan(
    p: float,
    dim: int,
    l_max: int,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    include_positive: bool = False,
    retry_factor: int = RETRY_FACTOR,
) -> BlockScanResult:
    """Dominant eigenvalue of R(p) over blocks L = 0, -1, ..., -l_max.

    A block that misses convergence within ``max_iter`` is retried once with
    ``retry_factor * max_iter`` iterations. Off-centre blocks can have nearly
    degenerate top pairs (ratio above 0.9999) at isolated weights, where the
    eigenvalue settles long before the residual does.

    With ``include_positive`` the +L blocks are diagonalized too; by
    entrywise domination they never beat their -L partners, which the test
    suite checks rather than assumes. The winner is chosen by strict
    comparison with ties going to L = 0, then smaller |L|, so the result does
    not depend on the order in which blocks are evaluated.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"weight p must lie in [0, 1], got {p!r}")
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    table = table_for(dim, l_max)
    results: dict[int, EigResult] = {}
    for L in scan_labels(l_max, include_positive):
        block = build_r(p, L, dim, table)
        try:
            results[L] = dominant_eig(block, tol=tol, max_iter=max_iter)
        except ConvergenceError:
            try:
                results[L] = dominant_eig(block, tol=tol, max_iter=retry_factor * max_iter)
            except ConvergenceError as exc:
                raise exc.tagged(p, L) from exc
    L_star = max(results, key=lambda L: _rank_key(L, results[L].eigenvalue))
    best = results[L_star]
    others = [r.eigenvalue for L, r in results.items() if L != L_star]
    runner_up = max(others) if others else 0.0
    degeneracy = runner_up / best.eigenvalue if best.eigenvalue > 0 else 1.0
    state = None
    if L_star == 0:
        state = SchmidtState.from_amplitudes(
            np.clip(best.eigenvector, 0.0, None), meta={"kind": "optimal", "p": p}
        )
    return BlockScanResult(
        p=p,
        dim=dim,
        eigenvalues={L: r.eigenvalue for L, r in results.items()},
        L_star=L_star,
        lambda_max=best.eigenvalue,
        eigenvector=best.eigenvector,
        iterations=sum(r.iterations for r in results.values()),
        degeneracy=degeneracy,
        optimal_state=state,
    )


def full_space_operator(p: float, dim: int) -> np.ndarray:
    """R(p) on the product space |n_in, n_out>, n_in, n_out < dim, index n_in * dim + n_out.

    Built term by term from the double-sum representation of R_F over the
    total photon number K, without using the block formulas.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"weight p must lie in [0, 1], got {p!r}")
    size = dim * dim
    R = np.zeros((size, size))
    for K in range(2 * dim - 1):
        prefactor = math.factorial(K) / 2 ** (K + 1)
        for n in range(K + 1):
            for m in range(K + 1):
                # |n>_in <K-m| (x) |m>_out <K-n|
                bra_in, bra_out = K - m, K - n
                if max(n, m, bra_in, bra_out) >= dim:
                    continue
                denom = math.sqrt(
                    math.factorial(n) * math.factorial(bra_in) * math.factorial(m) * math.factorial(bra_out)
                )
                R[n * dim + m, bra_in * dim + bra_out] += p * prefactor / denom
    for n_in in range(dim):
        for n_out in range(dim):
            i = n_in * dim + n_out
            R[i, i] += (1.0 - p) / 2 ** (n_in + 1)
    return R


def small_n_crosscheck(p: float, dim: int) -> float:
    """Largest eigenvalue of the full two-mode R(p) at small truncation.

    Uses LAPACK's symmetric eigensolver on the ``dim**2``-dimensional
    product space, independently of the block decomposition and power
    iteration.
    """
    if dim * dim > 36:
        raise ValueError("cross-check limited to dim**2 <= 36")
    R = full_space_operator(p, dim)
    return float(np.linalg.eigvalsh(R)[-1])
