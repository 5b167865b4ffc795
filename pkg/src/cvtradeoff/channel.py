"""Lossy channel that transmits a coherent state with probability p and absorbs it otherwise.

Sending the state directly gives average fidelity p. Placing a covariant
measurement in front of the channel gives p*F + (1-p)*G, which is exactly
the weighted objective whose maximum is lambda_max(p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.optimize import minimize_scalar

from .eigensolver import DEFAULT_TOL
from .schmidt import DomainError
from .tradeoff import TradeoffPoint, scan_p, tradeoff_point

R_CAP = 25.0
R_XTOL = 1e-8
ARTIFACT_FLOOR = 1e-9


class GaussChannelResult(NamedTuple):
    f_gauss: float
    r_star: float
    capped: bool


def _gain_over_direct(r: float, p: float) -> float:
    """p*F_BK(r) + (1-p)*G_BK(r) - p, written so it keeps relative precision at large r."""
    u = math.exp(-2.0 * r)
    # 1 + cosh(r)**2 == (1/u + 6 + u) / 4
    return -p * u / (1.0 + u) + (1.0 - p) * 4.0 * u / (1.0 + 6.0 * u + u * u)


def gauss_channel_fidelity(p: float, r_cap: float = R_CAP) -> GaussChannelResult:
    """Teleportation-assisted transmission fidelity maximized over squeezing r in [0, r_cap].

    ``capped`` is set when the optimum sits at the cap, i.e. the supremum is
    only approached as r grows without bound (p >= 4/5).
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"transmission probability must lie in [0, 1], got {p!r}")
    res = minimize_scalar(
        lambda r: -_gain_over_direct(r, p), bounds=(0.0, r_cap), method="bounded", options={"xatol": R_XTOL}
    )
    # bounded Brent never evaluates the end points themselves
    candidates = [0.0, float(res.x), r_cap]
    gains = [_gain_over_direct(r, p) for r in candidates]
    best = max(range(3), key=lambda i: (gains[i], -i))
    r_star = candidates[best]
    capped = r_star >= r_cap - 1e-3
    return GaussChannelResult(p + gains[best], r_star, capped)


@dataclass(frozen=True)
class ChannelPoint:
    p: float
    f_av: float
    f_gauss: float
    r_star: float
    capped: bool
    f_opt: float
    delta_f: float
    error: str | None = None

    @property
    def artifact(self) -> bool:
        """Negative gain over the Gaussian scheme, which only truncation can cause."""
        return self.delta_f < -ARTIFACT_FLOOR

    @property
    def failed(self) -> bool:
        return self.error is not None


def channel_point(point: TradeoffPoint) -> ChannelPoint:
    """Channel figures for an already-computed trade-off point."""
    g = gauss_channel_fidelity(point.p)
    f_opt = point.lambda_max
    return ChannelPoint(
        p=point.p,
        f_av=point.p,
        f_gauss=g.f_gauss,
        r_star=g.r_star,
        capped=g.capped,
        f_opt=f_opt,
        delta_f=f_opt - g.f_gauss,
        error=point.error,
    )


def channel_scan(p_grid, N: int, l_max: int, tol: float = DEFAULT_TOL) -> list[ChannelPoint]:
    return [channel_point(pt) for pt in scan_p(p_grid, N, l_max, tol=tol)]


STRATEGIES = ("direct", "gaussian_mdm", "nongaussian_mdm")


def best_strategy(p: float, N: int, l_max: int, tol: float = DEFAULT_TOL) -> str:
    """Best of direct transmission, Gaussian and optimized non-Gaussian measurement.

    Ties go to the simpler strategy.
    """
    return strategy_for(channel_point(tradeoff_point(p, N, l_max, tol=tol)))


def strategy_for(point: ChannelPoint) -> str:
    values = (point.f_av, point.f_gauss, point.f_opt)
    best = max(range(3), key=lambda i: (values[i], -i))
    return STRATEGIES[best]
