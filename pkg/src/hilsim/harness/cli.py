"""Command-line front end.

    hilsim run <scenario.json> [--headless] [--log out.csv]
                               [--time-scale X] [--serve PORT]
    hilsim sweep <scenario.json> --axis elevator --f0 0.1 --f1 5
                                 --duration 60 [--amplitude 60] --log out.csv
    hilsim sysid <log.csv> --input elevator_us --output pitch_deg
                           [--out bode.csv] [--window N]
    hilsim replay <log.csv> --serve PORT [--rate 20]

Exit codes: 0 success, 1 scenario failure (crash), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from ..sysid import (
    DegenerateInput, MissingColumn, SweepSpec, generate_sweep, identify_axis,
)
from .runner import SweepInjection, run_scenario
from .scenario import load_scenario
from .server import TelemetryServer
from .telemetry_log import load_log

USAGE_ERROR = 2
DEFAULT_SERVE_PORT = 8642
CONTROL_RATE = 50.0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilsim",
        description="software-in-the-loop UAV bench: run missions, sweep "
                    "axes, identify frequency responses, replay logs")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario end to end")
    run_p.add_argument("scenario")
    run_p.add_argument("--headless", action="store_true",
                       help="no telemetry service")
    run_p.add_argument("--log", metavar="OUT.CSV")
    run_p.add_argument("--time-scale", type=float, default=None,
                       help="override scenario time scale (0 = flat out)")
    run_p.add_argument("--serve", type=int, metavar="PORT", default=None)

    sweep_p = sub.add_parser("sweep", help="open-loop chirp on one axis")
    sweep_p.add_argument("scenario")
    sweep_p.add_argument("--axis", required=True,
                         choices=["aileron", "elevator", "rudder", "throttle"])
    sweep_p.add_argument("--f0", type=float, required=True)
    sweep_p.add_argument("--f1", type=float, required=True)
    sweep_p.add_argument("--duration", type=float, required=True)
    sweep_p.add_argument("--amplitude", type=float, default=60.0,
                         help="us around the channel trim")
    sweep_p.add_argument("--lead-in", type=float, default=5.0)
    sweep_p.add_argument("--log", metavar="OUT.CSV", required=True)

    sysid_p = sub.add_parser("sysid", help="frequency response from a log")
    sysid_p.add_argument("log")
    sysid_p.add_argument("--input", required=True)
    sysid_p.add_argument("--output", required=True)
    sysid_p.add_argument("--out", metavar="BODE.CSV", default=None)
    sysid_p.add_argument("--window", type=int, default=1024)

    replay_p = sub.add_parser("replay", help="stream a recorded log over the "
                                             "telemetry service")
    replay_p.add_argument("log")
    replay_p.add_argument("--serve", type=int, metavar="PORT", required=True)
    replay_p.add_argument("--rate", type=float, default=20.0)
    return parser


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.time_scale is not None:
        from dataclasses import replace
        scenario = replace(scenario, time_scale=args.time_scale)

    server = None
    if args.serve is not None or not args.headless:
        port = args.serve if args.serve is not None else DEFAULT_SERVE_PORT
        server = TelemetryServer(port).start()
    try:
        report = run_scenario(scenario, log_path=args.log, server=server)
    finally:
        if server is not None:
            server.stop()
    print(json.dumps(report.to_dict(), indent=2))
    return 1 if report.crashed else 0


def _cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    spec = SweepSpec(f_start=args.f0, f_end=args.f1, duration=args.duration,
                     amplitude=args.amplitude)
    samples = generate_sweep(spec, CONTROL_RATE)
    from dataclasses import replace
    # run just past the sweep: trailing cruise only dilutes the spectra
    scenario = replace(scenario,
                       duration_limit=args.lead_in + args.duration + 2.0)
    injection = SweepInjection(axis=args.axis, samples=samples,
                               start_time=args.lead_in)
    report = run_scenario(scenario, log_path=args.log, sweep=injection)
    print(json.dumps(report.to_dict(), indent=2))
    return 1 if report.crashed else 0


def _cmd_sysid(args) -> int:
    table = load_log(args.log)
    try:
        response = identify_axis(table, args.input, args.output,
                                 window_len=args.window, out_csv=args.out)
    except MissingColumn as e:
        print(f"hilsim sysid: {e.args[0]}", file=sys.stderr)
        return USAGE_ERROR
    except DegenerateInput as e:
        print(f"hilsim sysid: {e}", file=sys.stderr)
        return USAGE_ERROR
    peak = int(response.magnitude.argmax())
    print(f"{len(response.frequencies)} frequency points, "
          f"{response.frequencies[0]:.3g}..{response.frequencies[-1]:.3g} Hz")
    print(f"peak {response.magnitude[peak]:.2f} dB at "
          f"{response.frequencies[peak]:.3g} Hz, "
          f"coherence there {response.coherence[peak]:.3f}")
    if args.out:
        print(f"bode table written to {args.out}")
    return 0


def _cmd_replay(args) -> int:
    table = load_log(args.log)
    if len(table) == 0:
        print("hilsim replay: log has no rows", file=sys.stderr)
        return USAGE_ERROR
    server = TelemetryServer(args.serve).start()
    interval = 1.0 / args.rate
    try:
        for i in range(len(table)):
            obj = {
                "type": "telemetry",
                "time_s": float(table["time_s"][i]),
                "truth": {k: float(table[f"{k2}"][i]) for k, k2 in [
                    ("north_m", "north_m"), ("east_m", "east_m"),
                    ("down_m", "down_m"), ("roll_deg", "roll_deg"),
                    ("pitch_deg", "pitch_deg"), ("yaw_deg", "yaw_deg")]},
                "estimate": {
                    "roll_deg": float(table["roll_est_deg"][i]),
                    "pitch_deg": float(table["pitch_est_deg"][i]),
                    "heading_deg": float(table["heading_est_deg"][i])},
                "objectives": {
                    "roll_cmd_deg": float(table["roll_cmd_deg"][i]),
                    "pitch_cmd_deg": float(table["pitch_cmd_deg"][i]),
                    "heading_cmd_deg": float(table["heading_cmd_deg"][i]),
                    "speed_cmd_mps": float(table["speed_cmd_mps"][i])},
                "servo": {
                    "aileron_us": int(table["aileron_us"][i]),
                    "elevator_us": int(table["elevator_us"][i]),
                    "rudder_us": int(table["rudder_us"][i]),
                    "throttle_us": int(table["throttle_us"][i])},
                "gps": None,
                "status": {"mode": 1, "current_wp": 0, "crosstrack_m": 0.0,
                           "fault_flags": int(table["fault_flags"][i])},
                "replay": True,
            }
            server.publish_telemetry(obj)
            for cmd, reply in server.drain_commands():
                reply({"type": "error", "command": cmd.get("type"),
                       "reason": "replay session: commands not accepted"})
            time.sleep(interval)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_ERROR
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "sysid":
            return _cmd_sysid(args)
        if args.command == "replay":
            return _cmd_replay(args)
    except FileNotFoundError as e:
        print(f"hilsim: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (KeyError, ValueError) as e:
        print(f"hilsim: bad input: {e}", file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
