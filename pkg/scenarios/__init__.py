from scenarios.presets import (
    ScenarioInfo,
    ScenarioReport,
    get_scenario,
    list_scenarios,
    run_scenario,
)

__all__ = ["ScenarioInfo", "ScenarioReport", "get_scenario", "list_scenarios", "run_scenario"]
