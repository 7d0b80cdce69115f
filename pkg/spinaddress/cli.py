"""
Main CLI entry point for the addressing simulator
"""

import argparse
import csv
import io
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .config import RunConfig, resolve_config
from .drive import DriveParams, idle_fidelities
from .exceptions import ConfigError, NonAddressableError, SpinAddressError
from .fidelity import MonteCarloRunner, SweepPoint
from .oracle import compare_with_bound, simulate_sequence_exact, verify_swap_plan
from .reporters import Reporter, get_reporter
from .sequencer import (
    SequencePlan,
    check_bookkeeping,
    plan_sequence,
    schedule_rows,
    six_site_fixture,
    trace_steps,
)
from .spectrum import ArrayConfig, occupancy, sample_config
from .swap import ExchangeLink, SwapPlan, direct_swap_duration, plan_swap

logger = logging.getLogger(__name__)

CSV_HEADER = (
    "n_qubits",
    "f_avg_sequence",
    "f_avg_sequence_weighted",
    "f_avg_simple",
    "stderr_sequence",
    "stderr_simple",
    "n_configs",
    "seed",
)
IDLE_TABLE_OFFSETS = range(1, 11)


def _csv_number(x: float) -> str:
    return f"{x:.12g}"


def sweep_csv(points: Sequence[SweepPoint], n_configs: int, seed: int) -> str:
    """Render sweep results; identical inputs give identical bytes"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in points:
        writer.writerow(
            [
                p.n_qubits,
                _csv_number(p.sequence.f_avg),
                _csv_number(p.sequence_weighted.f_avg),
                _csv_number(p.simple.f_avg),
                _csv_number(p.sequence.standard_error),
                _csv_number(p.simple.standard_error),
                n_configs,
                seed,
            ]
        )
    return buffer.getvalue()


def cmd_sweep(config: RunConfig, reporter: Reporter) -> List[SweepPoint]:
    """Average fidelity against array size, written as CSV"""
    runner = MonteCarloRunner(
        params=config.spectrum(),
        theta=config.theta,
        phi=config.phi,
        ell=config.ell,
        f_swap=config.f_swap,
        t_total=config.t_total_us,
        baseline_phase=config.baseline_phase,
        workers=config.workers,
    )
    points = runner.sweep(list(config.n_qubits_list), config.n_configs, config.seed)
    text = sweep_csv(points, config.n_configs, config.seed)
    Path(config.output_path).write_text(text)

    headline = "sequence" if config.estimator == "mc_mean" else "sequence (weighted)"
    reporter.section("Fidelity sweep")
    reporter.table(
        ["N", headline, "stderr", "simple pulse", "excluded"],
        [
            [
                p.n_qubits,
                (p.sequence if config.estimator == "mc_mean" else p.sequence_weighted).f_avg,
                p.sequence.standard_error,
                p.simple.f_avg,
                p.sequence.n_excluded,
            ]
            for p in points
        ],
    )
    reporter.note(f"\nWrote {len(points)} rows to {config.output_path}")
    return points


def _plan_array(
    config: RunConfig, size: int, config_seed: Optional[int], fixture: bool
) -> ArrayConfig:
    params = config.spectrum()
    if fixture:
        return six_site_fixture(params)
    seed = config.seed if config_seed is None else config_seed
    array = sample_config(params, size, seed)
    if not occupancy(array).is_addressable():
        raise NonAddressableError(
            f"all {size} qubits fell into one bin with seed {seed}; try another --config-seed"
        )
    return array


def cmd_plan(
    config: RunConfig,
    reporter: Reporter,
    target_site: int = 0,
    config_seed: Optional[int] = None,
    size: int = 6,
    fixture: bool = False,
) -> SequencePlan:
    """Schedule, total time and per-qubit bookkeeping for one array"""
    array = _plan_array(config, size, config_seed, fixture)
    plan = plan_sequence(
        array,
        target_site,
        config.theta,
        config.phi,
        ell=config.ell,
        j_max=config.j_max_mhz,
        min_bin_separation=config.min_bin_separation,
    )

    reporter.section("Addressing sequence")
    reporter.field("Bins", " ".join(str(b) for b in array.bins))
    reporter.field("Target site", target_site + 1)
    reporter.field("Partner site", plan.partner_site + 1)
    reporter.write()
    reporter.table(
        ["step", "stage", "kind", "where", "angle/pi", "rabi", "duration"],
        [
            [r.index, r.stage, r.kind, r.where, r.angle / math.pi, r.rabi, r.duration]
            for r in schedule_rows(plan)
        ],
    )
    reporter.write()
    reporter.field("Total time", plan.total_duration, "us")
    reporter.write()

    rows = trace_steps(plan, array)
    reporter.table(
        ["stage", "operation", *[f"site {s + 1}" for s in range(array.n_qubits)]],
        [[r.stage, r.description, *r.cells] for r in rows],
    )

    deviations = check_bookkeeping(plan, array)
    exact = simulate_sequence_exact(plan, array, config.swap_mode)
    comparison = compare_with_bound(plan, array, config.f_swap, config.swap_mode)
    idle_errors = {q: e for q, e in exact.infidelity_breakdown().items() if q != plan.target_site}
    reporter.write()
    reporter.field("Spectators at identity", len(deviations))
    reporter.field("Largest ideal deviation", max(deviations.values(), default=0.0))
    if idle_errors:
        worst = max(idle_errors, key=idle_errors.__getitem__)
        reporter.field("Worst spectator (exact)", f"site {worst + 1}, {idle_errors[worst]:.3g}")
    reporter.field("Exact fidelity", exact.fidelity)
    reporter.field("Exact trace fidelity", comparison.exact_raw)
    reporter.field("Analytic bound term", comparison.bound)
    return plan


def idle_table(drive: DriveParams) -> List[Tuple[int, float, float]]:
    """(offset m, |Tr U_m / 2|^2, |U_m[0, 0]|^2) for m = 1..10"""
    offsets = [m * drive.bin_width for m in IDLE_TABLE_OFFSETS]
    trace = idle_fidelities(drive.rabi, offsets, drive.duration)
    blind = idle_fidelities(drive.rabi, offsets, drive.duration, phase_blind=True)
    return [(m, float(a), float(b)) for m, a, b in zip(IDLE_TABLE_OFFSETS, trace, blind)]


def cmd_drive(config: RunConfig, reporter: Reporter) -> DriveParams:
    """Drive strength, step duration and idle fidelities"""
    drive = DriveParams.optimal(config.delta_mhz, config.theta, config.ell)
    reporter.section("Global drive")
    reporter.field("Rabi frequency", drive.rabi, "MHz")
    reporter.field("Step duration", drive.duration, "us")
    reporter.write()
    reporter.table(
        ["m", "idle fidelity", "after virtual z"],
        [[m, f"{a:.6f}", f"{b:.6f}"] for m, a, b in idle_table(drive)],
    )
    return drive


def cmd_swap(config: RunConfig, reporter: Reporter) -> Tuple[SwapPlan, SwapPlan, float]:
    """
    Composite SWAP report for one link

    Returns:
        Tuple of (plan at alpha_total = pi/2, calibrated plan, calibrated SWAP fidelity)
    """
    link = ExchangeLink(j_max=config.j_max_mhz, delta_ez=config.delta_ez_mhz)
    nominal = plan_swap(link, math.pi / 2, pad=False)
    calibrated = plan_swap(link)
    check = verify_swap_plan(calibrated, link)
    direct = direct_swap_duration(link.j_max)

    reporter.section("SWAP synthesis")
    reporter.field("gamma", nominal.gamma, "rad")
    for name, p in (("pi/2 accounting", nominal), ("calibrated", calibrated)):
        reporter.write()
        reporter.write("  " + reporter.style("title", name))
        reporter.field("alpha_total", p.alpha_total, "rad")
        reporter.field("repetitions", p.n_reps)
        reporter.field("phi", p.phi, "rad")
        reporter.field("chi", p.chi, "rad")
        reporter.field("outer segment", p.outer_duration, "us")
        reporter.field("middle segment", p.middle_duration, "us")
        reporter.field("composite duration", p.total_duration, "us")
        reporter.field("padding loops", p.padding_loops)
        reporter.field("gate duration", p.gate_duration, "us")
    reporter.write()
    reporter.field("SWAP fidelity (local z)", check.fidelity)
    reporter.field("Direct exchange, pi/2J", direct.nominal, "us")
    reporter.field("Direct exchange, calibrated", direct.calibrated, "us")
    return nominal, calibrated, check.fidelity


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of run settings")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--out", dest="output_path", help="CSV output path")
    common.add_argument("--estimator", help="mc_mean or paper_weighted")
    common.add_argument("--workers", type=int, help="threads for the Monte Carlo")
    common.add_argument("--n-configs", dest="n_configs", type=int)
    common.add_argument("--n-qubits", dest="n_qubits_list", help="comma-separated sizes")
    common.add_argument("--theta", dest="theta_over_pi", type=float, help="x angle / pi")
    common.add_argument("--phi", dest="phi_over_pi", type=float, help="y angle / pi")
    common.add_argument("--ell", type=int)
    common.add_argument("--delta", dest="delta_mhz", type=float, help="bin width (MHz)")
    common.add_argument("--sigma", dest="sigma_mhz", type=float, help="frequency spread (MHz)")
    common.add_argument("--j-max", dest="j_max_mhz", type=float, help="largest exchange (MHz)")
    common.add_argument("--delta-ez", dest="delta_ez_mhz", type=float, help="gradient (MHz)")
    common.add_argument("--t-total", dest="t_total_us", type=float, help="baseline time (us)")
    common.add_argument("--baseline-phase", dest="baseline_phase")
    common.add_argument("--swap-mode", dest="swap_mode")
    common.add_argument("--f-swap", dest="f_swap", type=float)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--no-color", action="store_true", help="plain text output")
    return common


_OVERRIDE_KEYS = (
    "seed",
    "output_path",
    "estimator",
    "workers",
    "n_configs",
    "n_qubits_list",
    "theta_over_pi",
    "phi_over_pi",
    "ell",
    "delta_mhz",
    "sigma_mhz",
    "j_max_mhz",
    "delta_ez_mhz",
    "t_total_us",
    "baseline_phase",
    "swap_mode",
    "f_swap",
)


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="spinaddress",
        description="Single-qubit addressing in a binned, exchange-coupled spin array",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("sweep", parents=[common], help="average fidelity against array size")
    plan = commands.add_parser("plan", parents=[common], help="inspect one addressing sequence")
    plan.add_argument("--target", type=int, default=1, help="target site, counted from 1")
    plan.add_argument("--config-seed", type=int, help="seed of the sampled array")
    plan.add_argument("--size", type=int, default=6, help="number of qubits")
    plan.add_argument(
        "--six-site",
        "--fixture-table1",
        dest="six_site",
        action="store_true",
        help="use the six-site example array",
    )
    commands.add_parser("drive", parents=[common], help="drive strength and idle fidelities")
    commands.add_parser("swap", parents=[common], help="composite SWAP synthesis")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: getattr(args, key) for key in _OVERRIDE_KEYS}


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point for the spinaddress CLI"""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    reporter = get_reporter(color=not args.no_color)

    try:
        config = resolve_config(args.config, _overrides(args))
        if args.command == "sweep":
            cmd_sweep(config, reporter)
        elif args.command == "plan":
            cmd_plan(
                config,
                reporter,
                target_site=args.target - 1,
                config_seed=args.config_seed,
                size=args.size,
                fixture=args.six_site,
            )
        elif args.command == "drive":
            cmd_drive(config, reporter)
        else:
            cmd_swap(config, reporter)
    except KeyboardInterrupt:
        print("\n\nInterrupted by user")
        sys.exit(130)
    except ConfigError as e:
        reporter.error(f"invalid configuration: {e}")
        sys.exit(1)
    except (SpinAddressError, OSError, IndexError) as e:
        reporter.error(str(e))
        sys.exit(2)


if __name__ == "__main__":
    main()
