"""HIL conductor: scenario runner, fault injection, telemetry, CLI."""

from .runner import (
    AutopilotSpawnFailure, RunReport, ScenarioRunner, SweepInjection,
    run_scenario,
)
from .scenario import FaultEvent, Scenario, load_scenario, scenario_from_dict
from .server import PortUnavailable, TelemetryServer, serve_telemetry
from .telemetry_log import (
    COLUMNS, IoFailure, LogTable, TelemetryRecord, TelemetryWriter, load_log,
    write_log,
)
from .cli import cli_main

__all__ = [
    "AutopilotSpawnFailure", "COLUMNS", "FaultEvent", "IoFailure", "LogTable",
    "PortUnavailable", "RunReport", "Scenario", "ScenarioRunner",
    "SweepInjection", "TelemetryRecord", "TelemetryServer", "TelemetryWriter",
    "cli_main", "load_log", "load_scenario", "run_scenario",
    "scenario_from_dict", "serve_telemetry", "write_log",
]
