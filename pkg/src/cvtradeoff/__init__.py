"""Output/estimation fidelity trade-off for covariant measurements on coherent states.

All optimal values are computed on truncated Fock spaces and are therefore
lower bounds on the true optimum; they grow monotonically with the block
dimension and with the number of scanned photon-number differences.
"""

__version__ = "0.1.0"

from .channel import ChannelPoint, best_strategy, channel_scan, gauss_channel_fidelity
from .eigensolver import BlockScanResult, ConvergenceError, EigResult, block_scan, dominant_eig, small_n_crosscheck
from .gaussianity import GaussianityReport, gaussianity_witness, variance_params
from .numerics import CapacityError, LogFactorialTable, log_factorial, sqrt_binom_product
from .operators import RBlock, build_r, build_rf, build_rg
from .oracle import QuadratureRule, laguerre_rule, mc_fidelities, oracle_fidelities
from .schmidt import (
    DomainError,
    SchmidtState,
    StateFormatError,
    fidelity_estimation,
    fidelity_output,
    load_state,
    photon_subtracted,
    save_state,
    tmsv,
    vacuum,
)
from .tradeoff import (
    TargetUnreachableError,
    TradeoffPoint,
    bk_fidelities,
    delta_g_curve,
    find_p_for_f,
    gaussian_tradeoff_g,
    photon_subtracted_fidelities,
    scan_p,
    schmidt_delta,
)
