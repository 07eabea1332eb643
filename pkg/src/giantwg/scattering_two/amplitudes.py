"""Two-photon T-matrix, S-matrix, transmitted wavefunction and g2(tau).

Backends for the correlated part and the Green-function convolution:

* ``series``     truncated double series with shell-based stopping
* ``resummed``   the same series summed in closed form (default, ``auto``)
* ``quadrature`` direct numerical integration over momenta
* ``fft``        (wavefunction only) Fourier-sum oracle
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ..errors import UndefinedG2
from ..model import Direction, SystemParams, eta
from ..scattering_one import green, self_energy, transmission
from . import fourier, quadrature, resummed, series
from .series import ConvolutionResult, SeriesDiagnostics

BACKENDS = ("auto", "series", "resummed", "quadrature")
_QUADRATURE = SeriesDiagnostics(0, 0.0, True, "quadrature")


def _backend(name: str) -> str:
    name = (name or "auto").lower()
    if name not in BACKENDS + ("fft",):
        raise ValueError(f"unknown backend {name!r}")
    return "resummed" if name == "auto" else name


class TMatrixResult(NamedTuple):
    T_S: complex
    diag: SeriesDiagnostics


def convolution(params: SystemParams, k_bar: float, backend: str = "auto") -> ConvolutionResult:
    b = _backend(backend)
    if b == "series":
        return series.green_convolution(params, k_bar)
    if b in ("quadrature", "fft"):
        return ConvolutionResult(quadrature.green_convolution_quadrature(params, k_bar), _QUADRATURE)
    return ConvolutionResult(resummed.green_convolution(params, k_bar), resummed.RESUMMED)


def t_matrix(params: SystemParams, k1: float, k2: float, backend: str = "auto") -> TMatrixResult:
    """Nonlinear two-photon vertex at total energy k1 + k2."""
    if params.U == 0:
        return TMatrixResult(0j, SeriesDiagnostics(0, 0.0, True, "trivial"))
    conv, diag = convolution(params, 0.5 * (k1 + k2), backend)
    return TMatrixResult(complex(params.U / (1 - 1j * params.U / (2 * math.pi) * conv)), diag)


@dataclass(frozen=True)
class TwoPhotonAmplitude:
    """Elastic and fluorescence parts of the two-photon S-matrix.

    ``elastic_coeff`` multiplies delta(k1-p1) delta(k2-p2) + exchange; for
    k1 == k2 both deltas coincide and it is reported as 2 t(k1) t(k2).
    """

    k1: float
    k2: float
    elastic_coeff: complex
    T_S: complex
    diag: SeriesDiagnostics
    fluorescence: Callable = field(repr=False)


def two_photon_s(params: SystemParams, k1: float, k2: float, backend: str = "auto") -> TwoPhotonAmplitude:
    t1, t2 = complex(transmission(params, k1)), complex(transmission(params, k2))
    elastic = t1 * t2 * (2.0 if k1 == k2 else 1.0)
    T, diag = t_matrix(params, k1, k2, backend)
    E = k1 + k2
    g = params.gamma
    vert = (g * g / math.pi) * T * green(params, k1) * green(params, k2) \
        * eta(params, Direction.R, k1) * eta(params, Direction.R, k2)

    def fluorescence(p1):
        p1 = np.asarray(p1, dtype=float)
        p2 = E - p1
        out = (vert * np.conj(eta(params, Direction.R, p1)) * np.conj(eta(params, Direction.R, p2))
               * green(params, p1) * green(params, p2))
        return complex(out) if np.ndim(out) == 0 else out

    return TwoPhotonAmplitude(k1, k2, complex(elastic), T, diag, fluorescence)


def correlated_part(params: SystemParams, k1: float, k2: float, X1, X2, backend: str = "auto"):
    b = _backend(backend)
    if b == "series":
        return series.correlated_part(params, k1, k2, X1, X2)
    if b == "quadrature":
        return quadrature.correlated_part(params, k1, k2, X1, X2)
    return resummed.correlated_part(params, k1, k2, X1, X2)


def wavefunction_t(params: SystemParams, k1: float, k2: float, X1, X2, backend: str = "auto"):
    """Transmitted two-photon wavefunction w_t(X1, X2) (both photons right-moving).

    Elastic plane waves plus the fluorescence term obtained by Fourier
    transforming -i Gamma over the energy-conserving line.
    """
    b = _backend(backend)
    if b == "fft":
        return fourier.wavefunction_fft(params, k1, k2, X1, X2).values
    X1a, X2a = np.broadcast_arrays(np.asarray(X1, float), np.asarray(X2, float))
    t1, t2 = complex(transmission(params, k1)), complex(transmission(params, k2))
    w = t1 * t2 * (np.exp(1j * (k2 * X1a + k1 * X2a)) + np.exp(1j * (k1 * X1a + k2 * X2a))) / (2 * math.pi)
    if params.U != 0:
        T, _ = t_matrix(params, k1, k2, b)
        Ft, _ = correlated_part(params, k1, k2, X1a, X2a, b)
        g = params.gamma
        pref = (-1j * g * g / (2 * math.pi)) * eta(params, Direction.R, k1) \
            * eta(params, Direction.R, k2) * T * green(params, k1) * green(params, k2)
        w = w + pref * Ft
    return complex(w) if w.ndim == 0 else w


def g2_transmitted(params: SystemParams, k_i: float, tau=0.0, backend: str = "auto"):
    """Second-order coherence of the transmitted light for two photons at k_i."""
    t = complex(transmission(params, k_i))
    if abs(t) < 1e-10:
        raise UndefinedG2(f"|t(k_i)| = {abs(t):.3g}: no transmitted light")
    w = wavefunction_t(params, k_i, k_i, tau, 0.0 * np.asarray(tau, float), backend)
    out = np.abs(w) ** 2 / (abs(t) ** 2 / math.pi) ** 2
    return float(out) if np.ndim(out) == 0 else out


def g2_markov_limit(params: SystemParams, k_i: float, tau=0.0):
    """g2(tau) for a single lumped coupling with Sigma and eta frozen at k_i."""
    g, E = params.gamma, 2 * k_i
    sig = complex(self_energy(params, k_i))
    G = 1.0 / (k_i - sig)
    e = complex(eta(params, Direction.R, k_i))
    t = 1 - 1j * g * abs(e) ** 2 * G
    if abs(t) < 1e-10:
        raise UndefinedG2(f"|t(k_i)| = {abs(t):.3g}: no transmitted light")
    tau = np.abs(np.asarray(tau, float))
    T = params.U * (E - 2 * sig) / (E - 2 * sig - params.U)
    Ft = -2j * np.conj(e) ** 2 * np.exp(1j * (E - sig) * tau) / (E - 2 * sig)
    w = t * t * np.exp(1j * k_i * tau) / math.pi + (-1j * g * g / (2 * math.pi)) * e * e * T * G * G * Ft
    out = np.abs(w) ** 2 / (abs(t) ** 2 / math.pi) ** 2
    return float(out) if np.ndim(out) == 0 else out
