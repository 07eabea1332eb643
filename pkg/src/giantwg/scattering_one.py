"""Single-photon self-energy, propagator and scattering amplitudes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularGreenFunction
from .model import Direction, SystemParams, eta

SINGULAR_THRESHOLD = 1e-12


def self_energy(params: SystemParams, k):
    """Sigma(k) = -2i gamma (1 + cos(phi) e^{i theta_{Rk}}); vectorized over k."""
    theta = params.phase_k0d + np.asarray(k, dtype=float) * params.d
    return -2j * params.gamma * (1.0 + math.cos(params.phi) * np.exp(1j * theta))


def green(params: SystemParams, k):
    k = np.asarray(k, dtype=float)
    den = k - self_energy(params, k)
    if np.any(np.abs(den) < SINGULAR_THRESHOLD * params.gamma):
        raise SingularGreenFunction(
            f"|k - Sigma(k)| below {SINGULAR_THRESHOLD:g} gamma (bound state in the continuum)")
    g = 1.0 / den
    return complex(g) if g.ndim == 0 else g


@dataclass(frozen=True)
class ScatterAmplitudes:
    r: complex
    t: complex
    sigma: complex
    green: complex
    direction: Direction


def scatter_single(params: SystemParams, k: float, input_direction="R") -> ScatterAmplitudes:
    """Reflection and transmission of one photon with energy k.

    A right-moving photon has momentum k, a left-moving one -k. The
    reflected/transmitted amplitudes are obtained from the couplings of the
    incoming and outgoing modes through the dressed cavity propagator.
    """
    direction = Direction.parse(input_direction)
    g = green(params, k)
    sigma = complex(self_energy(params, k))
    eta_r = complex(eta(params, Direction.R, k))
    eta_l = complex(eta(params, Direction.L, -k))
    if direction is Direction.R:
        eta_in, eta_out = eta_r, eta_l
    else:
        eta_in, eta_out = eta_l, eta_r
    gam = params.gamma
    t = 1.0 - 1j * gam * abs(eta_in) ** 2 * g
    r = -1j * gam * np.conj(eta_out) * g * eta_in
    return ScatterAmplitudes(complex(r), complex(t), sigma, complex(g), direction)


def transmission(params: SystemParams, k):
    """Vectorized right-input transmission amplitude t(k)."""
    e = eta(params, Direction.R, k)
    return 1.0 - 1j * params.gamma * np.abs(e) ** 2 * green(params, k)
