"""simcare: an agent-based discrete-event simulator of primary care systems.

Patients fall ill, ask for appointments or walk in; physicians schedule,
admit, and treat them under pluggable strategies. Runs aggregate into
system indicators (treatments, waits, access times, utilisation) with
confidence intervals across replications.
"""

__version__ = "0.1.0"

from .engine import Prepared, run_many, simulate_run
from .metrics import aggregate, report_csv, report_json
from .scenario import (
    Scenario,
    ScenarioError,
    evaluate_family,
    load_scenario,
    parse_scenario,
    save_scenario,
)

__all__ = [
    "Prepared",
    "Scenario",
    "ScenarioError",
    "__version__",
    "aggregate",
    "evaluate_family",
    "load_scenario",
    "parse_scenario",
    "report_csv",
    "report_json",
    "run_many",
    "save_scenario",
    "simulate_run",
]
