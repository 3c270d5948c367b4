"""Command line front end for the offload simulator and runtime model.

Subcommands: simulate one offload, sweep a grid to CSV, validate the model
against simulated timings, fit model coefficients from measurements, decide
a cluster count for a deadline, and calibrate timing parameters.

All outputs are deterministic: fixed field orders, fixed float formats
(cycles to one decimal, ratios and percentages to four), LF line endings.
Exit codes: 0 success, 1 failed validation or infeasible decision or bad
input data, 2 command line usage errors.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .analytic import (
    DEFAULT_MODEL,
    Measurement,
    fit_model,
    mape,
    measurements_from_csv,
    model_from_json,
    model_to_json,
)
from .calibrate import (
    PROTOCOL_SYNC,
    CalibrationTargets,
    SweepSpec,
    calibrate_params,
    report_to_csv,
)
from .decision import DecisionOutcome, DecisionQuery, min_clusters
from .simcore import EventKind, simulate_offload, trace_to_text
from .sysmodel import (
    ConfigError,
    JobRequest,
    Protocol,
    SyncMechanism,
    load_config,
    serialize_config,
)

DEFAULT_CONFIG_PATH = "offload-sim.json"

RUNTIME_HEADER = "protocol,n,m,total_cycles,setup,serial,dispatch,compute,sync"
SPEEDUP_HEADER = "n,m,speedup"
VALIDATE_HEADER = "n,mape_pct"

_SYNC_BY_FLAG = {
    "polling": SyncMechanism.SOFTWARE_POLLING,
    "credit": SyncMechanism.CREDIT_COUNTER,
}


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _load_setup(args):
    """Resolve the config file and optional cluster-count override."""
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        cfg, tp = load_config(path.read_text())
    else:
        path = Path(DEFAULT_CONFIG_PATH)
        cfg, tp = load_config(path.read_text() if path.is_file() else "")
    if getattr(args, "num_clusters", None) is not None:
        cfg = replace(cfg, num_clusters=args.num_clusters)
    return cfg, tp


def _result_row(protocol: Protocol, n: int, m: int, result) -> str:
    b = result.breakdown
    cells = (
        protocol.value,
        str(n),
        str(m),
        f"{result.total_cycles:.1f}",
        f"{b.setup_cycles:.1f}",
        f"{b.serial_cycles:.1f}",
        f"{b.dispatch_cycles:.1f}",
        f"{b.compute_cycles:.1f}",
        f"{b.sync_cycles:.1f}",
    )
    return ",".join(cells)


def _cmd_simulate(args) -> int:
    cfg, tp = _load_setup(args)
    protocol = Protocol(args.protocol)
    sync = _SYNC_BY_FLAG[args.sync] if args.sync else PROTOCOL_SYNC[protocol]
    job = JobRequest(n=args.n, m=args.m, protocol=protocol, sync=sync)
    result = simulate_offload(cfg, tp, job)
    sys.stdout.write(RUNTIME_HEADER + "\n")
    sys.stdout.write(_result_row(protocol, args.n, args.m, result) + "\n")
    if args.trace:
        Path(args.trace).write_text(trace_to_text(result.trace))
    return 0


def _cmd_sweep(args) -> int:
    cfg, tp = _load_setup(args)
    protocols = [Protocol(p) for p in args.protocols.split(",")]
    if len(set(protocols)) != len(protocols):
        raise ValueError("duplicate protocol in --protocols")
    sync_for = {
        Protocol.BASELINE_UNICAST: _SYNC_BY_FLAG[args.baseline_sync],
        Protocol.MULTICAST: _SYNC_BY_FLAG[args.multicast_sync],
    }
    totals = {}
    rows = []
    for protocol in sorted(protocols, key=lambda p: p.value):
        for n in args.n_values:
            for m in args.m_values:
                job = JobRequest(n=n, m=m, protocol=protocol, sync=sync_for[protocol])
                result = simulate_offload(cfg, tp, job)
                totals[(protocol, n, m)] = result.total_cycles
                rows.append(_result_row(protocol, n, m, result))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "runtime.csv").write_text(RUNTIME_HEADER + "\n" + "\n".join(rows) + "\n")

    if Protocol.BASELINE_UNICAST in protocols and Protocol.MULTICAST in protocols:
        lines = [SPEEDUP_HEADER]
        for n in args.n_values:
            for m in args.m_values:
                ratio = (
                    totals[(Protocol.BASELINE_UNICAST, n, m)]
                    / totals[(Protocol.MULTICAST, n, m)]
                )
                lines.append(f"{n},{m},{ratio:.4f}")
        (out_dir / "speedup.csv").write_text("\n".join(lines) + "\n")
    return 0


def _self_check(result) -> None:
    """Internal consistency checks on one simulation result."""
    if abs(result.breakdown.total() - result.total_cycles) > 1e-6:
        raise ValueError("phase breakdown does not sum to the total")
    keys = [event.sort_key() for event in result.trace]
    if keys != sorted(keys):
        raise ValueError("trace events are out of order")
    completes = [e for e in result.trace if e.kind is EventKind.OFFLOAD_COMPLETE]
    if len(completes) != 1 or result.trace[-1] is not completes[0]:
        raise ValueError("trace must end with exactly one completion event")


def _cmd_validate(args) -> int:
    cfg, tp = _load_setup(args)
    lines = [VALIDATE_HEADER]
    worst = 0.0
    for n in args.n_values:
        measurements = []
        for m in args.m_values:
            job = JobRequest(n=n, m=m)
            result = simulate_offload(cfg, tp, job)
            if args.self_check:
                _self_check(result)
            measurements.append(Measurement(m=m, n=n, t_cycles=result.total_cycles))
        err = mape(DEFAULT_MODEL, measurements)
        worst = max(worst, err)
        lines.append(f"{n},{err:.4f}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0 if worst < args.bound else 1


def _cmd_fit(args) -> int:
    measurements = measurements_from_csv(Path(args.measurements).read_text())
    model = fit_model(measurements)
    text = model_to_json(model)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_decide(args) -> int:
    model = (
        model_from_json(Path(args.model).read_text()) if args.model else DEFAULT_MODEL
    )
    query = DecisionQuery(n=args.n, t_max=args.t_max, m_cap=args.m_cap)
    result = min_clusters(model, query)
    if result.outcome is DecisionOutcome.FEASIBLE:
        sys.stdout.write(f"feasible,{result.clusters}\n")
        return 0
    if result.outcome is DecisionOutcome.INFEASIBLE_CAPACITY:
        sys.stdout.write(f"infeasible_capacity,{result.clusters}\n")
    else:
        sys.stdout.write("infeasible_deadline\n")
    return 1


def _cmd_calibrate(args) -> int:
    cfg, _ = _load_setup(args)
    targets = CalibrationTargets(
        mape_bound_pct=args.mape_bound,
        gap_min_cycles=args.gap_min,
        gap_max_cycles=args.gap_max,
        speedup_min=args.speedup_min,
        speedup_max=args.speedup_max,
        argmin_allowed=args.argmin_allowed,
    )
    spec = SweepSpec(n_values=args.n_values, m_values=args.m_values)
    tp, report = calibrate_params(
        cfg, spec=spec, targets=targets, budget=args.budget
    )
    Path(args.report).write_text(report_to_csv(report, targets))
    text = serialize_config(cfg, tp)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.targets_met else 1


def _add_grid_arguments(sub) -> None:
    sub.add_argument("--n-values", type=_int_list, default=(256, 512, 768, 1024))
    sub.add_argument("--m-values", type=_int_list, default=(1, 2, 4, 8, 16, 32))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offload-sim",
        description="Simulate and size job offloads on a host plus many-cluster accelerator.",
    )
    parser.add_argument(
        "--config",
        help=f"timing/config JSON (default: ./{DEFAULT_CONFIG_PATH} if present)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    sim = subparsers.add_parser("simulate", help="simulate one offload, CSV to stdout")
    sim.add_argument("--n", type=int, required=True, help="elements of work")
    sim.add_argument("--m", type=int, required=True, help="clusters to use")
    sim.add_argument(
        "--protocol", choices=[p.value for p in Protocol], default=Protocol.MULTICAST.value
    )
    sim.add_argument(
        "--sync",
        choices=sorted(_SYNC_BY_FLAG),
        default=None,
        help="completion mechanism (default pairs with the protocol)",
    )
    sim.add_argument("--trace", help="also write the event trace to this file")
    sim.add_argument("--num-clusters", type=int)
    sim.set_defaults(func=_cmd_simulate)

    sweep = subparsers.add_parser("sweep", help="simulate a grid, CSVs to a directory")
    _add_grid_arguments(sweep)
    sweep.add_argument("--protocols", default="baseline,multicast")
    sweep.add_argument("--baseline-sync", choices=sorted(_SYNC_BY_FLAG), default="polling")
    sweep.add_argument("--multicast-sync", choices=sorted(_SYNC_BY_FLAG), default="credit")
    sweep.add_argument("--out-dir", required=True)
    sweep.add_argument("--num-clusters", type=int)
    sweep.set_defaults(func=_cmd_sweep)

    val = subparsers.add_parser(
        "validate", help="model error against simulated timings, CSV to stdout"
    )
    _add_grid_arguments(val)
    val.add_argument("--bound", type=float, default=1.0, help="fail at this error (%%)")
    val.add_argument(
        "--self-check",
        action="store_true",
        help="also run internal consistency checks on every simulation",
    )
    val.add_argument("--num-clusters", type=int)
    val.set_defaults(func=_cmd_validate)

    fit = subparsers.add_parser("fit", help="fit model coefficients from a CSV")
    fit.add_argument("measurements", help="CSV with header m,n,t_cycles")
    fit.add_argument("--out", help="write model JSON here instead of stdout")
    fit.set_defaults(func=_cmd_fit)

    dec = subparsers.add_parser("decide", help="minimal clusters for a deadline")
    dec.add_argument("--n", type=int, required=True)
    dec.add_argument("--t-max", type=float, required=True, help="deadline in cycles")
    dec.add_argument("--m-cap", type=int, required=True, help="clusters available")
    dec.add_argument("--model", help="model JSON (default: built-in coefficients)")
    dec.set_defaults(func=_cmd_decide)

    cal = subparsers.add_parser(
        "calibrate", help="search timing parameters meeting the sweep targets"
    )
    _add_grid_arguments(cal)
    cal.add_argument("--mape-bound", type=float, default=1.0)
    cal.add_argument("--gap-min", type=float, default=300.0)
    cal.add_argument("--gap-max", type=float, default=340.0)
    cal.add_argument("--speedup-min", type=float, default=1.459)
    cal.add_argument("--speedup-max", type=float, default=1.499)
    cal.add_argument("--argmin-allowed", type=_int_list, default=(4, 8))
    cal.add_argument("--budget", type=int, default=200)
    cal.add_argument("--out", help="write calibrated config JSON here instead of stdout")
    cal.add_argument("--report", default="calibration-report.csv")
    cal.add_argument("--num-clusters", type=int)
    cal.set_defaults(func=_cmd_calibrate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
