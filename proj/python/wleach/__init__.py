"""Python front end for the Watchdog-LEACH simulator core."""

import csv
import io
import json

from ._wleach import (
    ConfigError,
    Simulation,
    analytic_energy,
    canonical_config,
    reproduce_paper,
    watchdog_count_pmf,
)
from . import _wleach

__all__ = [
    "ConfigError",
    "Simulation",
    "analytic_energy",
    "canonical_config",
    "reproduce_paper",
    "run",
    "sweep",
    "watchdog_count_pmf",
]


def _text(config):
    if isinstance(config, dict):
        return json.dumps(config)
    return config or ""


def run(config=None, events=False):
    """Run a config (dict or JSON text). Returns (summary, metrics rows, events)."""
    out = _wleach.run(_text(config), events)
    rows = list(csv.DictReader(io.StringIO(out["metrics_csv"])))
    return json.loads(out["summary"]), rows, out["events"]


def sweep(config, axis, values, parallel=True):
    """One row per value; simulated columns are None for the noa axis."""
    text = _wleach.sweep(_text(config), axis, [str(v) for v in values], parallel)
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        rows.append({k: (v if k in ("axis", "value") else (float(v) if v else None)) for k, v in r.items()})
    return rows
