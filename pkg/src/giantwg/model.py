"""Physical parameters and the phase bookkeeping of the two-point coupling.

Units: frequencies and momenta in units of the single-point decay rate
``gamma`` (group velocity 1), lengths and times in units of ``1/gamma``.
The bath centre frequency ``k0`` only matters through the propagation
phase ``k0*d`` which is stored directly (``phase_k0d``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi


def normalize_angle(a):
    """Map angle(s) onto the half-open interval (-pi, pi]."""
    r = np.remainder(np.asarray(a, dtype=float) + math.pi, TWO_PI) - math.pi
    r = np.where(r <= -math.pi, r + TWO_PI, r)
    if np.ndim(r) == 0:
        return float(r)
    return r


class Direction(str, enum.Enum):
    R = "R"
    L = "L"

    @property
    def sigma(self) -> int:
        return 1 if self is Direction.R else -1

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, Direction):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ValidationError("direction", f"expected R or L, got {value!r}") from None


@dataclass(frozen=True)
class NumericalControls:
    series_rel_tol: float = 1e-10
    series_max_order: int = 2000
    fock_cutoff: Optional[int] = None  # None -> chosen from the semiclassical branches
    quadrature_abs_tol: float = 1e-10
    ode_rel_tol: float = 1e-10

    def __post_init__(self):
        for name in ("series_rel_tol", "quadrature_abs_tol", "ode_rel_tol"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValidationError(name, "must be a positive finite number")
        if int(self.series_max_order) != self.series_max_order or self.series_max_order < 4:
            raise ValidationError("series_max_order", "must be an integer >= 4")
        if self.fock_cutoff is not None and (int(self.fock_cutoff) != self.fock_cutoff
                                             or self.fock_cutoff < 2):
            raise ValidationError("fock_cutoff", "must be an integer >= 2")


@dataclass(frozen=True)
class SystemParams:
    """Cavity, coupling and bath constants.

    ``phi`` is normalized to (-pi, pi] on construction. ``phase_k0d`` is the
    propagation phase k0*d of the bath centre frequency, kept separately from
    ``d`` so that d -> 0 limits can hold it fixed.
    """

    gamma: float = 1.0
    U: float = 0.0
    phi: float = 0.0
    d: float = 0.0
    phase_k0d: float = 0.0
    controls: NumericalControls = field(default_factory=NumericalControls)

    def __post_init__(self):
        for name in ("gamma", "U", "phi", "d", "phase_k0d"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(name, "must be finite")
        if self.gamma <= 0:
            raise ValidationError("gamma", "must be > 0")
        if self.d < 0:
            raise ValidationError("d", "must be >= 0")
        object.__setattr__(self, "phi", normalize_angle(float(self.phi)))
        object.__setattr__(self, "phase_k0d", float(self.phase_k0d))

    @classmethod
    def from_k0(cls, k0: float, d: float, **kw) -> "SystemParams":
        if k0 < 0:
            raise ValidationError("k0", "must be >= 0")
        return cls(d=d, phase_k0d=float(np.remainder(k0 * d, TWO_PI)), **kw)

    @property
    def V0(self) -> float:
        return math.sqrt(self.gamma / TWO_PI)

    @property
    def k0(self) -> float:
        """Smallest non-negative k0 consistent with ``phase_k0d`` (nan at d = 0)."""
        if self.d == 0:
            return math.nan
        return float(np.remainder(self.phase_k0d, TWO_PI)) / self.d

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class DriveConfig:
    direction: Direction = Direction.R
    k_i: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        if not np.isfinite(self.k_i):
            raise ValidationError("k_i", "must be finite")
        if not (np.isfinite(self.omega0) and self.omega0 >= 0):
            raise ValidationError("omega0", "must be >= 0")

    @property
    def bath_momentum(self) -> float:
        """Momentum of the driven mode: sigma*k_i, so its energy is k_i."""
        return self.direction.sigma * self.k_i


class ModePhases(NamedTuple):
    theta: np.ndarray
    eta: np.ndarray
    V: np.ndarray


def propagation_phase(params: SystemParams, direction, k):
    """theta_{lambda k} = sigma*k0*d + k*d."""
    sigma = Direction.parse(direction).sigma
    return sigma * params.phase_k0d + np.asarray(k, dtype=float) * params.d


def eta(params: SystemParams, direction, k):
    return np.exp(1j * params.phi) + np.exp(1j * propagation_phase(params, direction, k))


def mode_phases(params: SystemParams, direction, k) -> ModePhases:
    theta = propagation_phase(params, direction, k)
    e = np.exp(1j * params.phi) + np.exp(1j * theta)
    return ModePhases(theta, e, params.V0 * e)


def chiral_phase(k_i: float, params: SystemParams, n: int = 0) -> float:
    """Coupling phase that decouples the left-moving mode at -k_i."""
    return normalize_angle((2 * n + 1) * math.pi - (params.phase_k0d + k_i * params.d))


def with_chiral_phase(params: SystemParams, k_i: float, n: int = 0) -> SystemParams:
    return params.with_(phi=chiral_phase(k_i, params, n))


def with_locked_theta(params: SystemParams, k_i: float) -> SystemParams:
    """Adjust ``phase_k0d`` so that theta_{R k_i} = pi - phi (same condition, solved for k0*d)."""
    ph = normalize_angle(math.pi - params.phi - k_i * params.d)
    return params.with_(phase_k0d=ph)


def effective_coupling(params: SystemParams, k):
    """Coupling strength of the symmetric bath combination seen by the cavity."""
    c = math.cos(params.phi)
    arg = 1.0 + c * np.cos(params.phase_k0d + np.asarray(k, dtype=float) * params.d)
    out = 2.0 * params.V0 * np.sqrt(np.clip(arg, 0.0, None))
    return float(out) if np.ndim(out) == 0 else out
