"""Independent check of the fidelity series through one-dimensional integrals.

For the teleporter with resource sum_n c_n |n, n>, averaging over Bell
outcomes beta leaves only t = |beta|**2:

    F = int_0^inf exp(-2t) g(t)**2 dt,   g(t) = sum_n c_n t**n / n!
    G = int_0^inf exp(-2t) h(t) dt,      h(t) = sum_n c_n**2 t**n / n!

Neither the binomial weights nor the powers of two of the series appear here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial.laguerre import laggauss
from numpy.polynomial.polynomial import polyval
from scipy.special import gammaln, logsumexp

from .schmidt import SchmidtState

DEFAULT_ORDER = 64
# t**k / k! stays far from overflow for the t range the proposals reach
MC_MAX_DIM = 80


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for int_0^inf exp(-2t) f(t) dt, exact for polynomials of degree < 2*order."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.shape[0]

    def integrate(self, values) -> float:
        return math.fsum(self.weights * np.asarray(values))


def laguerre_rule(order: int) -> QuadratureRule:
    """Gauss-Laguerre rule rescaled from weight exp(-x) to exp(-2t) via t = x/2."""
    if order < 1:
        raise ValueError("order must be >= 1")
    x, w = laggauss(order)
    return QuadratureRule(nodes=x / 2.0, weights=w / 2.0)


class OracleResult(NamedTuple):
    F: float
    G: float
    order: int
    warning: str | None


def _log_terms(state: SchmidtState, t: np.ndarray, squared: bool):
    """log of c_n t**n / n! (or c_n**2 t**n / n!) on the support of c, shape (len(t), support)."""
    c = state.coeffs
    n = np.nonzero(c > 0)[0]
    logc = np.log(c[n]) * (2.0 if squared else 1.0)
    return logc[None, :] + n[None, :] * np.log(t)[:, None] - gammaln(n + 1.0)[None, :]


def oracle_fidelities(state: SchmidtState, order: int = DEFAULT_ORDER) -> OracleResult:
    """(F, G) by Gauss quadrature; exact when ``order >= state.dim``.

    A smaller order still returns values but carries a precision warning.
    """
    warning = None
    if order < state.dim:
        warning = f"quadrature order {order} below state dimension {state.dim}; F integrand not integrated exactly"
    rule = laguerre_rule(order)
    t = rule.nodes
    g = np.exp(logsumexp(_log_terms(state, t, squared=False), axis=1))
    h = np.exp(logsumexp(_log_terms(state, t, squared=True), axis=1))
    return OracleResult(rule.integrate(g * g), rule.integrate(h), order, warning)


class MCResult(NamedTuple):
    F: float
    F_err: float
    G: float
    G_err: float
    samples: int


def mc_fidelities(state: SchmidtState, samples: int = 1_000_000, seed: int = 0, chunk: int = 200_000) -> MCResult:
    """Importance-sampled Monte Carlo estimates of F and G with standard errors.

    For F, t is drawn from the mixture sum_n c_n**2 Gamma(2n+1, rate 2); for
    G from sum_n c_n**2 Gamma(n+1, rate 2). Both reduce to the exponential
    density 2 exp(-2t) for the vacuum and keep the weight bounded for any
    state, which plain exponential sampling does not once high photon numbers
    carry weight. Streams come from a counter-based generator spawned from
    ``seed``, so results are reproducible bit for bit.
    """
    if samples < 10_000:
        raise ValueError("use at least 1e4 samples")
    if state.dim > MC_MAX_DIM:
        raise ValueError(f"Monte Carlo check supports dim <= {MC_MAX_DIM} (plain polynomial evaluation)")
    c = state.coeffs
    probs = c * c
    probs = probs / probs.sum()
    seq_f, seq_g = np.random.SeedSequence(seed).spawn(2)
    rng_f = np.random.Generator(np.random.Philox(seq_f))
    rng_g = np.random.Generator(np.random.Philox(seq_g))

    n = np.arange(len(c))
    lf = gammaln(np.arange(2 * len(c)) + 1.0)
    # polynomial coefficients of g, h and of the two proposal densities (exp(-2t) removed)
    g_coef = c * np.exp(-lf[: len(c)])
    h_coef = probs * np.exp(-lf[: len(c)])
    qf_coef = np.zeros(2 * len(c) - 1)
    qf_coef[2 * n] = probs * np.exp((2 * n + 1) * math.log(2.0) - lf[2 * n])
    qg_coef = probs * np.exp((n + 1) * math.log(2.0) - lf[: len(c)])

    def weights_f(t):
        g = polyval(t, g_coef)
        return g * g / polyval(t, qf_coef)

    def weights_g(t):
        return polyval(t, h_coef) / polyval(t, qg_coef)

    def estimate(rng, shape_of, weight_fn):
        total = 0.0
        total_sq = 0.0
        done = 0
        while done < samples:
            m = min(chunk, samples - done)
            comp = rng.choice(len(c), size=m, p=probs)
            t = rng.gamma(shape_of(comp), 0.5)
            w = weight_fn(t)
            total += math.fsum(w)
            total_sq += math.fsum(w * w)
            done += m
        mean = total / samples
        var = max(total_sq / samples - mean * mean, 0.0)
        return mean, math.sqrt(var / (samples - 1))

    F, F_err = estimate(rng_f, lambda n: 2.0 * n + 1.0, weights_f)
    G, G_err = estimate(rng_g, lambda n: n + 1.0, weights_g)
    return MCResult(F, F_err, G, G_err, samples)
