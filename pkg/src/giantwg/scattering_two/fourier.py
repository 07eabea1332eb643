"""Fourier-sum oracle for the two-photon wavefunction.

The fluorescence density is sampled on a momentum grid along the
energy-conserving line p2 = E - p1 and transformed to positions by a direct
discrete Fourier sum (the positions requested are arbitrary, so no FFT
layout is imposed). The free single-pole part and the large-|p| tail are
added analytically; the error estimate compares the sum against the same sum
on every other grid point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import GridTooCoarse
from ..model import Direction, SystemParams, eta
from ..scattering_one import green, self_energy, transmission
from . import quadrature
from .series import pair_coefficients

_MAX_GRID = 4_000_000
_CHUNK = 1 << 16


@dataclass(frozen=True)
class FourierWavefunction:
    values: np.ndarray
    error_estimate: float
    fine_spacing: float


def narrowest_width(params: SystemParams) -> float:
    """Smallest Lorentzian width of G along the real momentum axis."""
    c = abs(math.cos(params.phi))
    return 2 * params.gamma * (1 - c) / (1 + 2 * params.gamma * c * params.d)


def _grid(lo, hi, step):
    n = max(int(math.ceil((hi - lo) / step)), 2)
    n += n % 2  # even number of intervals so the half grid is exact
    return np.linspace(lo, hi, n + 1)


def _trapezoid_weights(p):
    w = np.empty_like(p)
    dp = np.diff(p)
    w[0], w[-1] = dp[0] / 2, dp[-1] / 2
    w[1:-1] = (dp[:-1] + dp[1:]) / 2
    return w


def _transform(p, weights, values, X):
    out = np.zeros(X.shape, complex)
    for s in range(0, p.size, _CHUNK):
        ps = p[s:s + _CHUNK]
        vw = values[s:s + _CHUNK] * weights[s:s + _CHUNK]
        out += np.exp(1j * np.multiply.outer(X, ps)) @ vw
    return out


def wavefunction_fft(params: SystemParams, k1: float, k2: float, X1, X2=0.0,
                     resolution: float | None = None, window: float = 400.0):
    """Two-photon transmitted wavefunction from a discrete Fourier sum.

    resolution: fine momentum spacing near the resonances (defaults to a
    sixteenth of the narrowest Green-function width).
    Returns FourierWavefunction(values, error_estimate, fine_spacing).
    """
    g, L = params.gamma, params.d
    E = k1 + k2
    X1, X2 = np.broadcast_arrays(np.asarray(X1, float), np.asarray(X2, float))
    t1, t2 = complex(transmission(params, k1)), complex(transmission(params, k2))
    plane = t1 * t2 * (np.exp(1j * (k2 * X1 + k1 * X2)) + np.exp(1j * (k1 * X1 + k2 * X2))) / (2 * math.pi)
    if params.U == 0:
        return FourierWavefunction(plane, 0.0, 0.0)

    width = narrowest_width(params)
    if width <= 0:
        raise GridTooCoarse("vanishing Green-function width (bound state in the continuum)")
    if resolution is None:
        resolution = width / 16
    elif resolution > width / 4:
        raise GridTooCoarse(f"resolution {resolution:.3g} does not resolve width {width:.3g}")
    X = (X1 - X2).ravel()
    reach = float(np.max(np.abs(X))) + 2 * L + 1.0
    coarse = min(math.pi / (8 * reach), 0.05)
    resolution = min(resolution, coarse)
    B = 2 * g * abs(math.cos(params.phi)) + abs(E) + 8 * g
    P = max(window * g, 2 * B)
    n_points = 2 * B / resolution + 2 * (P - B) / coarse
    if n_points > _MAX_GRID:
        raise GridTooCoarse(f"{n_points:.3g} grid points needed to resolve width {width:.3g}")

    p = np.concatenate([_grid(-P, -B, coarse)[:-1], _grid(-B, B, resolution),
                        _grid(B, P, coarse)[1:]])
    coeffs = pair_coefficients(params, E)
    shape = sum(a * np.exp(1j * s * p * L) for s, a in coeffs.items())
    Gp, Gq = green(params, p), green(params, E - p)
    remainder = shape * (Gp * Gq - 1.0 / ((p + 2j * g) * (E - p + 2j * g)))

    full = _transform(p, _trapezoid_weights(p), remainder, X)
    # every other point: the three segments each have an even interval count
    n1 = _grid(-P, -B, coarse).size - 1
    n2 = _grid(-B, B, resolution).size
    keep = np.zeros(p.size, bool)
    keep[0:n1:2] = True
    keep[n1:n1 + n2:2] = True
    keep[n1 + n2 + 1::2] = True
    keep[-1] = True
    ph = p[keep]
    half = _transform(ph, _trapezoid_weights(ph), remainder[keep], X)

    terms = quadrature._tail_terms(params, E)
    analytic = np.array([sum(a * (quadrature.free_pair_transform(E, g, x + s * L)
                                  + quadrature._tail_sum(terms, x + s * L, P))
                             for s, a in coeffs.items()) for x in X])
    conv = quadrature.green_convolution_quadrature(params, 0.5 * E)
    T = params.U / (1 - 1j * params.U / (2 * math.pi) * conv)
    eta1 = complex(eta(params, Direction.R, k1))
    eta2 = complex(eta(params, Direction.R, k2))
    pref = (-1j * g * g / (2 * math.pi)) * eta1 * eta2 * T * green(params, k1) * green(params, k2)
    Ft = np.exp(1j * E * X2.ravel()) * (full + analytic) / math.pi
    err_Ft = np.abs(full - half) / math.pi
    values = plane + (pref * Ft).reshape(X1.shape)
    err = float(np.max(np.abs(pref) * err_Ft)) if err_Ft.size else 0.0
    return FourierWavefunction(values, err, float(resolution))


def single_pole_profile(params: SystemParams, k1: float, k2: float, X1, X2=0.0):
    """Closed form of F_t when cos(phi) = 0 and d = 0: a single pole of width 2 gamma."""
    E = k1 + k2
    sig = complex(self_energy(params, 0.0))
    ec = np.exp(-1j * params.phi) + np.exp(-1j * params.phase_k0d)
    X1, X2 = np.broadcast_arrays(np.asarray(X1, float), np.asarray(X2, float))
    return (-2j * ec * ec * np.exp(1j * E * np.minimum(X1, X2))
            * np.exp(1j * (E - sig) * np.abs(X1 - X2)) / (E - 2 * sig))
