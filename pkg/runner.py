"""
Scenario runner: run one preset, write its report, map checks to an exit code.
"""

import logging
import sys
from dataclasses import replace
from typing import Any

from config import RunConfig
from quantum.errors import (
    ConfigError,
    InterferometryError,
    InvalidParamsError,
    UnknownScenarioError,
)
from scenarios.presets import ScenarioReport, run_scenario
from tools.report import build_report, render_csv, render_json, write_output

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def status(message: str) -> None:
    """Human progress lines; reports own stdout."""
    print(message, file=sys.stderr)


def render_scenario_report(config: RunConfig, report: ScenarioReport) -> str:
    if config.output_format == "csv":
        if report.fringe is not None:
            return render_csv(("phase", "probability"), report.fringe)
        exact = next(iter(report.tables.values()))
        counts = report.counts or {}
        rows: list[tuple[Any, ...]] = [
            (name, counts.get(name, 0), probability) for name, probability in exact.items()
        ]
        return render_csv(("outcome", "count", "probability"), rows)
    return render_json(
        build_report(config.to_dict(), config.seed, report.to_tables(), report.checks)
    )


def cmd_run(config: RunConfig) -> int:
    overrides = dict(config.params)
    if config.n_trials is not None:
        overrides["trials"] = config.n_trials

    status(f"\n=== Scenario {config.scenario} (seed {config.seed}) ===")
    try:
        report = run_scenario(
            config.scenario or "", overrides, config.seed, config.workers, config.tolerances
        )
    except (ConfigError, UnknownScenarioError, InvalidParamsError) as e:
        status(f"Error: {e}")
        return EXIT_USAGE
    except InterferometryError as e:
        status(f"Scenario failed: {e}")
        return EXIT_CHECK_FAILED

    resolved = replace(config, params=report.parameters, n_trials=report.parameters["trials"])
    write_output(render_scenario_report(resolved, report), config.output)

    failed = [c.name for c in report.checks if not c.passed]
    for check in report.checks:
        logger.info("%s: %s (residual %r)", check.name, check.passed, check.residual)
    if failed:
        status(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    status(f"=== All {len(report.checks)} checks passed ===")
    return EXIT_OK
