"""Quantum-regression correlators and waveguide output statistics.

Operators are evaluated in the frame rotating at the drive frequency k_i; a
lab-frame correlator picks up e^{i k_i tau} per unit of time separation.

Output fields follow from input-output theory. With the cavity emitting at
both coupling points, the field leaving in direction lambda' is

    a_out(t) = a_in(t) - i sqrt(gamma) [e^{-i phi} b(t) + e^{-i theta_{lambda' 0}} b(t + sigma' d)],

so every moment of the output reduces to multi-time cavity correlators at
separations 0 and d. Those are evaluated with the regression theorem,

    <b^dag(0)^p b^dag(d)^q b(d)^q' b(0)^p'> = Tr[b^dag^q b^q' e^{L d}(b^p' rho b^dag^p)],

which is the normally and time-ordered product (later operators innermost).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla

from ..errors import OrderingAssemblyError, UndefinedG2
from ..model import Direction, DriveConfig, SystemParams, propagation_phase
from .operators import LiouvillianMatrix, build_liouvillian, destroy, rabi_frequency, unvec, vec
from .steady import SteadyState, steady_state

KRYLOV_NORM_LIMIT = 5e3  # beyond |L| tau ~ this, Krylov steps get too many


@dataclass
class Propagator:
    """Action of exp(L tau) on vectorized operators.

    Short times use scipy's ``expm_multiply``. Long times project onto the
    slow eigenmodes of L with left/right eigenvectors (computed once and
    cached): modes that have decayed below machine precision are dropped, and
    the stationary part is taken from the steady state when one is supplied.
    Projecting with left eigenvectors keeps the ill-conditioned fast modes
    from polluting the result.
    """

    L: LiouvillianMatrix
    short_time: float = 100.0
    stationary: Optional[np.ndarray] = None
    _eig: list = field(default_factory=list, repr=False)

    def _norm(self) -> float:
        return float(spla.onenormest(self.L.sparse))

    def _spectral(self):
        """(eigenvalues, left vectors, right vectors, overlaps, zero-mode index)."""
        if not self._eig:
            lam, VL, VR = la.eig(self.L.dense, left=True, right=True)
            overlap = np.einsum("ij,ij->j", VL.conj(), VR)
            self._eig.append((lam, VL, VR, overlap, int(np.argmax(lam.real))))
        return self._eig[0]

    def _long(self, v: np.ndarray, tau: float) -> np.ndarray:
        lam, VL, VR, overlap, zero = self._spectral()
        decay = np.exp(lam * tau)
        keep = np.abs(decay) > 1e-17 * np.abs(overlap)
        if self.stationary is not None:
            tr = v[:: self.L.cutoff + 2].sum()
            v = v - tr * self.stationary
            keep[zero] = False
            base = tr * self.stationary
        else:
            base = 0
        c = (VL[:, keep].conj().T @ v) / overlap[keep]
        return base + VR[:, keep] @ (decay[keep] * c)

    def apply(self, v: np.ndarray, tau: float) -> np.ndarray:
        if tau < 0:
            raise ValueError("tau must be >= 0")
        v = np.array(v, dtype=complex)
        if tau == 0:
            return v
        if self.L.gamma * tau <= self.short_time and self._norm() * tau <= KRYLOV_NORM_LIMIT:
            return spla.expm_multiply(self.L.sparse * tau, v)
        return self._long(v, tau)


@dataclass
class DrivenCavity:
    """Liouvillian, steady state and propagator for one parameter point."""

    params: SystemParams
    drive: DriveConfig
    L: LiouvillianMatrix
    state: SteadyState
    propagator: Propagator

    @property
    def rho(self) -> np.ndarray:
        return self.state.rho

    @property
    def b(self) -> np.ndarray:
        return destroy(self.L.cutoff)


@functools.lru_cache(maxsize=16)
def prepare(params: SystemParams, drive: DriveConfig, cutoff: Optional[int] = None) -> DrivenCavity:
    L = build_liouvillian(params, drive, cutoff)
    state = steady_state(L)
    return DrivenCavity(params, drive, L, state, Propagator(L, stationary=vec(state.rho)))


def two_time_correlation(params: SystemParams, drive: DriveConfig, tau, cutoff: Optional[int] = None):
    """Lab-frame <b^dag(tau) b(0)> in the steady state, tau >= 0."""
    sys = prepare(params, drive, cutoff)
    b = sys.b
    D = sys.L.dim
    start = vec(b @ sys.rho)
    taus = np.atleast_1d(np.asarray(tau, float))
    out = np.empty(taus.shape, complex)
    for i, t in enumerate(taus):
        X = sys.propagator.apply(start, float(t))
        # Tr[A Y] = sum_ij A^T_ij Y_ij
        out[i] = np.exp(1j * drive.k_i * t) * np.sum(b * unvec(X, D))
    return complex(out[0]) if np.ndim(tau) == 0 else out


def output_density(params: SystemParams, drive: DriveConfig, out_direction,
                   cutoff: Optional[int] = None, include_input: bool = True) -> float:
    """Photon flux <a_out^dag a_out> leaving in ``out_direction``.

    ``include_input=False`` drops the coherent input, leaving only the
    cavity emission.
    """
    out_direction = Direction.parse(out_direction)
    mom = _output_moments(params, drive, out_direction, cutoff, include_input)
    return float(mom.first.real)


def reflected_density(params: SystemParams, drive: DriveConfig, cutoff: Optional[int] = None) -> float:
    """Density of photons leaving against the drive direction."""
    if rabi_frequency(params, drive) == 0:
        return 0.0
    sys = prepare(params, drive, cutoff)
    n = float(np.real(np.trace(sys.b.conj().T @ sys.b @ sys.rho)))
    C = two_time_correlation(params, drive, params.d, cutoff)
    if drive.direction is Direction.R:
        # left output: emission at x=0 interferes with the one from x=d, a time d earlier
        cross = np.exp(1j * (params.phi + params.phase_k0d)) * C
    else:
        cross = np.exp(-1j * (params.phi - params.phase_k0d)) * C
    return float(2 * params.gamma * (n + cross.real))


@dataclass(frozen=True)
class OutputMoments:
    first: complex    # <X^dag X>
    second: complex   # <X^dag X^dag X X>
    amplitude: complex  # <X>


def _output_coefficients(params: SystemParams, drive: DriveConfig, out_direction: Direction,
                         include_input: bool):
    """(alpha, c_early, c_late) of X = alpha + c_e b(0) + c_l b(d) in the drive frame."""
    g = params.gamma
    c_phi = -1j * math.sqrt(g) * np.exp(-1j * params.phi)
    theta = float(propagation_phase(params, out_direction, out_direction.sigma * drive.k_i))
    c_theta = -1j * math.sqrt(g) * np.exp(-1j * theta)
    alpha = 0j
    if include_input and out_direction is drive.direction:
        alpha = complex(drive.omega0 / math.sqrt(g))
    if out_direction is Direction.R:
        return alpha, c_phi, c_theta  # second coupling point is reached later
    return alpha, c_theta, c_phi


class _Correlator:
    """Memoized multi-time correlators <b0^dag^p bd^dag^q bd^q' b0^p'>."""

    def __init__(self, sys: DrivenCavity, separation: float):
        self.sys = sys
        self.tau = separation
        self.b = sys.b
        self.bd = self.b.conj().T
        self._prop: Dict[Tuple[int, int], np.ndarray] = {}

    def _propagated(self, p_ann: int, p_cre: int) -> np.ndarray:
        key = (p_ann, p_cre)
        if key not in self._prop:
            b, bd = self.b, self.bd
            X = np.linalg.matrix_power(b, p_ann) @ self.sys.rho @ np.linalg.matrix_power(bd, p_cre)
            D = self.sys.L.dim
            self._prop[key] = unvec(self.sys.propagator.apply(vec(X), self.tau), D)
        return self._prop[key]

    def __call__(self, p_cre: int, q_cre: int, q_ann: int, p_ann: int) -> complex:
        if min(p_cre, q_cre, q_ann, p_ann) < 0:
            raise OrderingAssemblyError("negative operator count")
        if q_cre == 0 and q_ann == 0:
            X = np.linalg.matrix_power(self.b, p_ann) @ self.sys.rho @ np.linalg.matrix_power(self.bd, p_cre)
            return complex(np.trace(X))
        Y = self._propagated(p_ann, p_cre)
        A = np.linalg.matrix_power(self.bd, q_cre) @ np.linalg.matrix_power(self.b, q_ann)
        return complex(np.sum(A.T * Y))


def _expand(n_factors: int, coeffs):
    """Multinomial expansion of (alpha + c_e B_e + c_l B_l)^n: yields (weight, n_e, n_l)."""
    for i, j in product(range(n_factors + 1), repeat=2):
        k = n_factors - i - j
        if k < 0:
            continue
        w = math.factorial(n_factors) / (math.factorial(i) * math.factorial(j) * math.factorial(k))
        yield w * coeffs[0] ** k * coeffs[1] ** i * coeffs[2] ** j, i, j


def _output_moments(params, drive, out_direction, cutoff, include_input=True) -> OutputMoments:
    alpha, ce, cl = _output_coefficients(params, drive, out_direction, include_input)
    if rabi_frequency(params, drive) == 0:
        # the cavity stays in vacuum; only the input survives
        return OutputMoments(abs(alpha) ** 2, abs(alpha) ** 4, alpha)
    sys = prepare(params, drive, cutoff)
    corr = _Correlator(sys, params.d)
    coeffs = (alpha, ce, cl)
    amp = sum(w * corr(0, 0, nl, ne) for w, ne, nl in _expand(1, coeffs))
    first = sum(np.conj(wc) * wa * corr(nec, nlc, nla, nea)
                for wc, nec, nlc in _expand(1, coeffs) for wa, nea, nla in _expand(1, coeffs))
    second = sum(np.conj(wc) * wa * corr(nec, nlc, nla, nea)
                 for wc, nec, nlc in _expand(2, coeffs) for wa, nea, nla in _expand(2, coeffs))
    return OutputMoments(complex(first), complex(second), complex(amp))


def transmitted_g2_output(params: SystemParams, drive: DriveConfig, tau: float = 0.0,
                          cutoff: Optional[int] = None) -> float:
    """Equal-time g2 of the transmitted field from input-output theory."""
    if tau != 0:
        raise NotImplementedError("only tau = 0 is assembled")
    mom = _output_moments(params, drive, drive.direction, cutoff)
    if abs(mom.first) < 1e-300 or mom.first.real <= 0:
        raise UndefinedG2("no transmitted photons")
    return float(mom.second.real / mom.first.real ** 2)


def transmitted_amplitude(params: SystemParams, drive: DriveConfig, cutoff: Optional[int] = None) -> complex:
    """<a_out> / alpha: the effective transmission coefficient of the coherent part."""
    if drive.omega0 == 0:
        raise UndefinedG2("no drive")
    mom = _output_moments(params, drive, drive.direction, cutoff)
    return mom.amplitude / (drive.omega0 / math.sqrt(params.gamma))
