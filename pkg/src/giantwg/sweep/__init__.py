"""Configuration files, parameter sweeps and table output."""
from .config import (AXIS_NAMES, TARGETS, Axis, ConfigBundle, SweepSpec, load_config, parse_axis,
                     parse_config, point_model)
from .emit import emit, to_csv, to_json
from .runner import Record, SweepResult, evaluate, run_sweep

__all__ = ["AXIS_NAMES", "TARGETS", "Axis", "ConfigBundle", "Record", "SweepResult", "SweepSpec",
           "emit", "evaluate", "load_config", "parse_axis", "parse_config", "point_model",
           "run_sweep", "to_csv", "to_json"]
