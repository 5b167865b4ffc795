"""Command-line front end producing the CSV data behind the trade-off figures.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 partial results
written (some grid points failed).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .channel import channel_point
from .eigensolver import DEFAULT_TOL, block_scan, dominant_eig, small_n_crosscheck
from .gaussianity import gaussianity_witness
from .operators import build_r, build_rf, build_rg, dump_block_csv
from .oracle import mc_fidelities, oracle_fidelities
from .schmidt import DomainError, SchmidtState, fidelity_estimation, fidelity_output, save_state, tmsv, vacuum
from .tradeoff import (
    TargetUnreachableError,
    bk_fidelities,
    delta_g,
    find_p_for_f,
    photon_subtracted_fidelities,
    scan_p,
    schmidt_delta,
    tmsv_lambda_for_f,
)

log = logging.getLogger("cvtradeoff")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_PARTIAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


def parse_grid(text: str) -> Grid:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like START:STOP:COUNT, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    if count < 0 or not (math.isfinite(start) and math.isfinite(stop)) or stop < start:
        raise UsageError(f"invalid grid {text!r}")
    return Grid(start, stop, count)


@dataclass(frozen=True)
class RunConfig:
    dim: int = 500
    l_max: int = 30
    tol: float = DEFAULT_TOL
    p_grid: Grid = Grid(0.0, 0.999, 101)
    target_f: float | None = None
    out: Path = Path(".")
    seed: int = 0
    verify_blocks: bool = False
    mc_samples: int = 100_000

    def __post_init__(self):
        if self.dim < 1:
            raise UsageError("--dim must be >= 1")
        if self.l_max < 0:
            raise UsageError("--lmax must be >= 0")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.p_grid.count and (self.p_grid.start < 0.0 or self.p_grid.stop > 1.0):
            raise UsageError("--p-grid must lie within [0, 1]")
        if self.target_f is not None and not 0.5 <= self.target_f < 1.0:
            raise UsageError("--target-f must lie within [0.5, 1)")
        if self.mc_samples < 10_000:
            raise UsageError("--mc-samples must be >= 10000")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _outdir(config: RunConfig) -> Path:
    config.out.mkdir(parents=True, exist_ok=True)
    return config.out


def _scan_exit(points) -> int:
    failed = [pt for pt in points if pt.failed]
    for pt in failed:
        log.error("p=%s failed: %s", pt.p, pt.error)
    if points and len(failed) == len(points):
        return EXIT_NUMERIC
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_tradeoff(config: RunConfig, dump_matrices: bool = False) -> int:
    out = _outdir(config)
    points = scan_p(config.p_grid.values(), config.dim, config.l_max, tol=config.tol, include_positive=config.verify_blocks)
    header = ["p", "lambda_max", "F", "G", "L_star", "N", "iterations", "G_bk_at_F", "delta_G", "degeneracy", "status"]
    rows = []
    for pt in points:
        if pt.failed:
            rows.append([pt.p, math.nan, math.nan, math.nan, "", pt.N, 0, math.nan, math.nan, math.nan, "failed"])
            continue
        dG = delta_g(pt.F, pt.G)
        rows.append([pt.p, pt.lambda_max, pt.F, pt.G, pt.L_star, pt.N, pt.iterations, pt.G - dG, dG, pt.degeneracy, "ok"])
    write_csv(out / "tradeoff.csv", header, rows)
    if dump_matrices:
        dump_block_csv(build_rf(0, config.dim), out / "rf_block_L0.csv")
        dump_block_csv(build_rg(0, config.dim), out / "rg_block_L0.csv")
    return _scan_exit(points)


def cmd_baselines(config: RunConfig, r_grid: Grid, x_grid: Grid) -> int:
    out = _outdir(config)
    if r_grid.count and r_grid.start < 0:
        raise UsageError("--r-grid must be nonnegative")
    if x_grid.count and (x_grid.start < 0 or x_grid.stop >= 1):
        raise UsageError("--x-grid must lie within [0, 1)")
    rows = []
    for r in r_grid.values():
        rows.append(["bk", r, *bk_fidelities(float(r))])
    for x in x_grid.values():
        rows.append(["subtracted", x, *photon_subtracted_fidelities(float(x))])
    write_csv(out / "baselines.csv", ["kind", "parameter", "F", "G"], rows)
    return EXIT_OK


def cmd_state(config: RunConfig) -> int:
    if config.target_f is None:
        raise UsageError("state requires --target-f")
    out = _outdir(config)
    try:
        point = find_p_for_f(config.target_f, config.dim, config.l_max, tol=config.tol)
    except TargetUnreachableError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if point.state is None:
        log.error("optimal eigenvector at p=%s lies in block L=%s, not a Schmidt state", point.p, point.L_star)
        return EXIT_NUMERIC
    state = point.state
    save_state(state, out / "state.txt")
    report = gaussianity_witness(state)
    header = f"# p={fmt(point.p)}\n# F={fmt(point.F)}\n# G={fmt(point.G)}\n# N={point.N}\n"
    (out / "gaussianity.txt").write_text(header + report.as_text(), encoding="utf-8")
    F_match = min(max(point.F, 0.5), math.nextafter(1.0, 0.0))
    ref = tmsv(tmsv_lambda_for_f(F_match), state.dim)
    rows = [[n, state.coeffs[n], ref.coeffs[n], dc] for n, dc in schmidt_delta(state, F_match)]
    write_csv(out / "delta_c.csv", ["n", "c_n", "c_tilde_n", "delta_c_n"], rows)
    print(report.as_text(), end="")
    return EXIT_OK


def cmd_channel(config: RunConfig) -> int:
    out = _outdir(config)
    points = scan_p(config.p_grid.values(), config.dim, config.l_max, tol=config.tol)
    header = ["p", "f_av", "f_gauss", "r_star", "cap_flag", "f_opt", "delta_f", "artifact_flag"]
    rows = []
    for pt in points:
        cp = channel_point(pt)
        rows.append([cp.p, cp.f_av, cp.f_gauss, cp.r_star, cp.capped, cp.f_opt, cp.delta_f, cp.artifact])
    write_csv(out / "channel.csv", header, rows)
    return _scan_exit(points)


def run_checks(config: RunConfig, inject_fault: bool = False) -> list[tuple[str, bool, str]]:
    """Oracle equivalence, small-N cross-check, block domination and Perron checks."""
    results = []
    rng = np.random.default_rng(config.seed)

    worst = 0.0
    for _ in range(20):
        dim = int(rng.integers(1, 51))
        state = SchmidtState.from_amplitudes(rng.random(dim))
        q = oracle_fidelities(state, order=max(64, dim))
        worst = max(worst, abs(q.F - fidelity_output(state)), abs(q.G - fidelity_estimation(state)))
    results.append(("oracle-quadrature", worst < 1e-10, f"max deviation {worst:.3e}"))

    worst = 0.0
    for dim in (1, 2, 3, 4):
        for p in np.linspace(0.0, 1.0, 6):
            full = small_n_crosscheck(float(p), dim)
            blocks = [build_r(float(p), L, dim - abs(L)).entries for L in range(-(dim - 1), dim)]
            if inject_fault:
                blocks[0] = blocks[0].copy()
                blocks[0][0, 0] += 0.1
            lam = max(dominant_eig(b, tol=config.tol).eigenvalue for b in blocks)
            worst = max(worst, abs(full - lam))
    results.append(("small-n-crosscheck", worst < 1e-10, f"max deviation {worst:.3e}"))

    dim = min(config.dim, 50)
    ok = True
    for p in np.linspace(0.05, 0.95, 7):
        scan = block_scan(float(p), dim, 3, tol=config.tol, include_positive=True)
        for L in (1, 2, 3):
            ok &= scan.eigenvalues[-L] >= scan.eigenvalues[L] - 1e-12
        ok &= bool(np.all(scan.eigenvector >= -1e-12))
        ok &= scan.L_star == 0
    results.append(("block-domination-and-perron", ok, f"dim={dim}, L<=3"))

    state = tmsv(0.5, 40)
    mc = mc_fidelities(state, samples=config.mc_samples, seed=config.seed)
    again = mc_fidelities(state, samples=config.mc_samples, seed=config.seed)
    F, G = fidelity_output(state), fidelity_estimation(state)
    ok = abs(mc.F - F) <= 3 * mc.F_err and abs(mc.G - G) <= 3 * mc.G_err and mc == again
    results.append(("monte-carlo", ok, f"F {mc.F:.6f}+-{mc.F_err:.1e} vs {F:.6f}; G {mc.G:.6f}+-{mc.G_err:.1e} vs {G:.6f}"))

    vac = gaussianity_witness(vacuum(4))
    results.append(("witness-vacuum", abs(vac.witness) < 1e-12, f"witness {vac.witness:.3e}"))
    return results


def cmd_verify(config: RunConfig, inject_fault: bool = False) -> int:
    results = run_checks(config, inject_fault=inject_fault)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERIC


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=500, help="truncation dimension N per block")
    common.add_argument("--lmax", type=int, default=30, help="largest photon-number difference scanned")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="power-iteration tolerance")
    common.add_argument("--p-grid", default="0:0.999:101", help="weight grid START:STOP:COUNT")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--verify-blocks", action="store_true", help="also diagonalize the +L blocks")
    common.add_argument("--mc-samples", type=int, default=100_000)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="cvtradeoff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tradeoff", parents=[common], help="optimal F-G curve (tradeoff.csv)")
    p.add_argument("--dump-matrices", action="store_true", help="also write the L=0 R_F and R_G blocks as CSV")
    p = sub.add_parser("baselines", parents=[common], help="Gaussian and photon-subtracted curves (baselines.csv)")
    p.add_argument("--r-grid", default="0:2:201")
    p.add_argument("--x-grid", default="0:0.95:96")
    p = sub.add_parser("state", parents=[common], help="optimal state at a target F plus its witness")
    p.add_argument("--target-f", type=float)
    sub.add_parser("channel", parents=[common], help="lossy-channel fidelities (channel.csv)")
    p = sub.add_parser("verify", parents=[common], help="run the consistency checks")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = RunConfig(
            dim=args.dim,
            l_max=args.lmax,
            tol=args.tol,
            p_grid=parse_grid(args.p_grid),
            target_f=getattr(args, "target_f", None),
            out=args.out,
            seed=args.seed,
            verify_blocks=args.verify_blocks,
            mc_samples=args.mc_samples,
        )
        if args.command == "tradeoff":
            return cmd_tradeoff(config, dump_matrices=args.dump_matrices)
        if args.command == "baselines":
            return cmd_baselines(config, parse_grid(args.r_grid), parse_grid(args.x_grid))
        if args.command == "state":
            return cmd_state(config)
        if args.command == "channel":
            return cmd_channel(config)
        return cmd_verify(config, inject_fault=args.inject_fault)
    except UsageError as exc:
        print(f"cvtradeoff: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
