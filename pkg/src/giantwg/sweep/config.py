"""Flat key-value configuration files.

Grammar (one entry per line, ``#`` or ``;`` start a comment line)::

    key = value
    key : value

No section headers are needed; the whole file is one table. Keys are case
insensitive. All frequencies and momenta are in units of gamma, lengths in
units of 1/gamma.

Physical keys: gamma, U, phi, d, phase_k0d, direction (R|L), k_i, omega0.
Angles accept plain numbers or multiples of pi (``0.015pi``, ``pi/2``).
``phi_rule`` decides how phi is fixed at every grid point:

    fixed       phi as given (default)
    chiral      phi from the chirality condition for the current k_i
    theta_lock  phi as given, phase_k0d adjusted so theta_{R k_i} = pi - phi

Numerical controls: series_rel_tol, series_max_order, fock_cutoff,
quadrature_abs_tol, ode_rel_tol, backend.

Sweep keys: target, axis1 and axis2 (``name min max points [linear|log]``),
observable, tau, X1, X2, output, format.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import ParseError, ValidationError
from ..model import Direction, DriveConfig, NumericalControls, SystemParams

TARGETS = {
    "single_photon": "t",
    "g2_map": "g2",
    "fluorescence_slice": "w_t",
    "steady_curve": "n",
    "reflected_curve": "rho_L",
    "gap_curve": "gap",
}
OBSERVABLES = {
    "single_photon": ("t", "r", "T", "R"),
    "g2_map": ("g2",),
    "fluorescence_slice": ("w_t", "F_t"),
    "steady_curve": ("n", "g2", "b_mean", "g2_out"),
    "reflected_curve": ("rho_L",),
    "gap_curve": ("gap",),
}
PHI_RULES = ("fixed", "chiral", "theta_lock")
PARAM_KEYS = ("gamma", "U", "phi", "d", "phase_k0d", "k_i", "omega0")
POSITION_KEYS = ("tau", "X1", "X2")
AXIS_NAMES = PARAM_KEYS + POSITION_KEYS
BACKENDS = ("auto", "series", "resummed", "quadrature", "fft")

_ANGLE = re.compile(r"^\s*([-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")
_CANON = {k.lower(): k for k in PARAM_KEYS + POSITION_KEYS}


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)

    def describe(self) -> str:
        return f"{self.name} {self.lo!r} {self.hi!r} {self.points} {self.scale}"


@dataclass(frozen=True)
class SweepSpec:
    target: str = "single_photon"
    axes: Tuple[Axis, ...] = ()
    fixed: Dict[str, float] = field(default_factory=dict)
    phi_rule: str = "fixed"
    direction: str = "R"
    observable: str = ""
    backend: str = "auto"
    controls: NumericalControls = field(default_factory=NumericalControls)
    output_path: Optional[str] = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValidationError("target", f"unknown target {self.target!r}; "
                                            f"one of {', '.join(TARGETS)}")
        if not self.observable:
            object.__setattr__(self, "observable", TARGETS[self.target])
        if self.observable not in OBSERVABLES[self.target]:
            raise ValidationError("observable", f"{self.observable!r} not available for {self.target}")
        if self.phi_rule not in PHI_RULES:
            raise ValidationError("phi_rule", f"one of {', '.join(PHI_RULES)}")
        if self.backend not in BACKENDS:
            raise ValidationError("backend", f"one of {', '.join(BACKENDS)}")
        if self.fmt not in ("csv", "json"):
            raise ValidationError("format", "csv or json")
        if len(self.axes) > 2:
            raise ValidationError("axes", "at most two sweep axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValidationError("axes", "axis names must be distinct")
        Direction.parse(self.direction)

    @property
    def axis_names(self) -> Tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(a.points for a in self.axes)

    def grid(self) -> List[Tuple[float, ...]]:
        """All axis tuples in row-major order (last axis fastest)."""
        vals = [a.values() for a in self.axes]
        return [tuple(float(v[i]) for v, i in zip(vals, idx)) for idx in np.ndindex(*self.shape)]

    def echo(self) -> Dict[str, object]:
        """Effective configuration with all defaults filled in."""
        out: Dict[str, object] = {"target": self.target, "observable": self.observable,
                                  "phi_rule": self.phi_rule, "direction": self.direction,
                                  "backend": self.backend, "format": self.fmt}
        out.update({k: self.fixed[k] for k in sorted(self.fixed)})
        for f in fields(self.controls):
            out[f.name] = getattr(self.controls, f.name)
        for i, a in enumerate(self.axes, 1):
            out[f"axis{i}"] = a.describe()
        return out


@dataclass(frozen=True)
class ConfigBundle:
    params: SystemParams
    drive: DriveConfig
    controls: NumericalControls
    sweep: SweepSpec


DEFAULTS = {"gamma": 1.0, "U": 0.0, "phi": 0.0, "d": 0.0, "phase_k0d": 0.0,
            "k_i": 0.0, "omega0": 0.0, "tau": 0.0, "X1": 0.0, "X2": 0.0}


def parse_number(text: str, key: str, line: Optional[int] = None) -> float:
    s = text.strip()
    m = _ANGLE.match(s)
    try:
        if m:
            coef = m.group(1)
            c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
            div = float(m.group(2)) if m.group(2) else 1.0
            return c * math.pi / div
        return float(s)
    except ValueError:
        raise ParseError(f"cannot read {text!r} as a number", line, key) from None


def parse_axis(text: str, line: Optional[int] = None, key: str = "axis") -> Axis:
    parts = text.split()
    if len(parts) not in (4, 5):
        raise ParseError("axis must read 'name min max points [linear|log]'", line, key)
    name = _CANON.get(parts[0].lower())
    if name is None:
        raise ValidationError(key, f"unknown parameter {parts[0]!r}; one of {', '.join(AXIS_NAMES)}")
    lo, hi = parse_number(parts[1], key, line), parse_number(parts[2], key, line)
    try:
        points = int(parts[3])
    except ValueError:
        raise ParseError(f"points must be an integer, got {parts[3]!r}", line, key) from None
    scale = parts[4].lower() if len(parts) == 5 else "linear"
    if scale not in ("linear", "log"):
        raise ParseError(f"scale must be linear or log, got {parts[4]!r}", line, key)
    if points < 2:
        raise ValidationError(key, "points must be >= 2")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValidationError(key, "range must be finite")
    if scale == "log" and (lo <= 0 or hi <= 0):
        raise ValidationError(key, "log axis needs positive bounds")
    return Axis(name, lo, hi, points, scale)


def _read(text: str) -> Dict[str, Tuple[str, int]]:
    cp = configparser.ConfigParser(interpolation=None, strict=True,
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str.lower
    try:
        cp.read_string("[giantwg]\n" + text)
    except configparser.DuplicateOptionError as exc:
        raise ParseError(f"duplicate key {exc.option!r}", (exc.lineno or 1) - 1, exc.option) from None
    except configparser.ParsingError as exc:
        lineno, raw = exc.errors[0]
        raise ParseError(f"cannot parse {raw.strip()!r}", lineno - 1, None) from None
    except configparser.Error as exc:
        raise ParseError(str(exc), None, None) from None
    if len(cp.sections()) != 1:
        raise ParseError("section headers are not allowed", None, None)
    lines = {}
    for n, raw in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*([^=:#;\s]+)\s*[=:]", raw)
        if m:
            lines.setdefault(m.group(1).lower(), n)
    return {k: (v, lines.get(k)) for k, v in cp["giantwg"].items()}


_CONTROL_TYPES = {f.name: f.type for f in fields(NumericalControls)}


def parse_config(text: str) -> ConfigBundle:
    """Parse and validate a configuration document."""
    raw = _read(text)
    fixed: Dict[str, float] = {}
    ctrl: Dict[str, object] = {}
    axes: List[Tuple[int, Axis]] = []
    opts = {"target": "single_photon", "phi_rule": "fixed", "direction": "R",
            "observable": "", "backend": "auto", "output": None, "format": "csv"}
    for key, (value, line) in raw.items():
        if key in _CANON:
            fixed[_CANON[key]] = parse_number(value, _CANON[key], line)
        elif key in _CONTROL_TYPES:
            if key == "fock_cutoff" and value.strip().lower() in ("", "auto", "none"):
                ctrl[key] = None
            elif key in ("series_max_order", "fock_cutoff"):
                try:
                    ctrl[key] = int(value)
                except ValueError:
                    raise ParseError(f"{key} must be an integer", line, key) from None
            else:
                ctrl[key] = parse_number(value, key, line)
        elif re.fullmatch(r"axis[12]?", key):
            idx = 1 if key in ("axis", "axis1") else 2
            axes.append((idx, parse_axis(value, line, key)))
        elif key in opts:
            opts[key] = value.strip() if key in ("output", "observable") else value.strip().lower()
        else:
            raise ParseError(f"unknown key {key!r}", line, key)
    if len({i for i, _ in axes}) != len(axes):
        raise ParseError("axis and axis1 both given", None, "axis")
    controls = NumericalControls(**ctrl)
    values = {**DEFAULTS, **fixed}
    spec = SweepSpec(target=opts["target"], axes=tuple(a for _, a in sorted(axes, key=lambda t: t[0])),
                     fixed=values, phi_rule=opts["phi_rule"], direction=opts["direction"].upper(),
                     observable=opts["observable"], backend=opts["backend"], controls=controls,
                     output_path=opts["output"], fmt=opts["format"])
    params, drive = point_model(spec, {})
    return ConfigBundle(params, drive, controls, spec)


def point_model(spec: SweepSpec, overrides: Dict[str, float]) -> Tuple[SystemParams, DriveConfig]:
    """SystemParams and DriveConfig at one grid point, after the phi rule."""
    from ..model import with_chiral_phase, with_locked_theta

    v = {**spec.fixed, **overrides}
    params = SystemParams(gamma=v["gamma"], U=v["U"], phi=v["phi"], d=v["d"],
                          phase_k0d=v["phase_k0d"], controls=spec.controls)
    drive = DriveConfig(Direction.parse(spec.direction), v["k_i"], v["omega0"])
    if spec.phi_rule == "chiral":
        params = with_chiral_phase(params, drive.k_i)
    elif spec.phi_rule == "theta_lock":
        params = with_locked_theta(params, drive.k_i)
    return params, drive


def load_config(path: str) -> ConfigBundle:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_overrides(spec: SweepSpec, **changes) -> SweepSpec:
    return replace(spec, **changes)
