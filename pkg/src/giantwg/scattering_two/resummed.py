"""Closed-form resummation of the two-photon power series.

Summing the n-direction with the generating function of C(2n+a, n) gives,
with S = sqrt(1 - 4x^2) and u = 2x / (1 + S),

    sum_n C(2n+a, n) x^{2n+a} = u^a / S,

after which the remaining sum over the block offset j = m - n is geometric
with ratio rho = u e^{i q L} e^{-2i q L h}, h = x u. The result is the same
series, summed exactly, and it stays well conditioned in the long-delay
regime where the truncated shells converge slowly.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from ..errors import SeriesDiverged
from ..model import SystemParams
from .series import SeriesDiagnostics, expansion_base, pair_coefficients

RESUMMED = SeriesDiagnostics(orders_used=0, truncation_error_estimate=0.0,
                             converged=True, backend="resummed")


def _constants(params: SystemParams, k_bar: float):
    q, x = expansion_base(params, k_bar)
    if abs(2 * x) >= 1:
        raise SeriesDiverged("|2 gamma cos(phi) / (kbar + 2i gamma)| >= 1")
    S = np.sqrt(1 - 4 * x * x)
    u = 2 * x / (1 + S)
    h = x * u
    rho = u * np.exp(1j * q * params.d - 2j * q * params.d * h)
    if abs(rho) >= 1:
        raise SeriesDiverged(f"block ratio |rho| = {abs(rho):.6g} >= 1")
    return q, x, complex(S), complex(u), complex(h), complex(rho)


def green_convolution(params: SystemParams, k_bar: float) -> complex:
    q, _, S, _, _, rho = _constants(params, k_bar)
    return complex(-2j * math.pi / q / S * (1 + rho) / (2 * (1 - rho)))


def _negative_block(J, z, x, u, log_pref):
    """Full n-sum of a block with offset j = -J < 0: sum_l (zx)^l u^{|l-J|} / l!."""
    if u == 0:
        return 0j
    lu = np.log(u)
    zx = z * x
    if zx == 0:
        return complex(np.exp(log_pref + J * lu))
    lzx = np.log(zx)
    l = np.arange(J)
    lo = np.exp(log_pref + l * lzx - gammaln(l + 1) + (J - l) * lu)
    extra = int(math.ceil(2 * math.e * abs(zx * u))) + 60
    l = np.arange(J, J + extra)
    hi = np.exp(log_pref + l * lzx - gammaln(l + 1) + (l - J) * lu)
    return complex(lo.sum() + hi.sum())


def _half(params, k_bar, E, X, consts, coeffs):
    """sum_s A_s sum_j step(Y) T_j(Y), Y = X + (j + s) L, for L > 0."""
    q, x, S, u, h, rho = consts
    L, g = params.d, params.gamma
    base = np.log(-1j * math.pi / q / S)
    total = 0j
    for s, A in coeffs.items():
        if A == 0:
            continue
        scale = 1.0 + abs(X) + abs(s) * L
        j_lo = math.ceil(-X / L - s - 1e-12 * scale / L)
        # geometric tail j >= max(j_lo, 0)
        j0 = max(j_lo, 0)
        Y0 = X + (j0 + s) * L
        lt = base + 1j * Y0 * (E + 2j * g) - 2j * q * Y0 * h - 1j * k_bar * j0 * L
        t0 = np.exp(lt) * (u ** j0 if j0 else 1.0)
        part = t0 / (1 - rho)
        if abs(Y0) <= 1e-12 * scale:
            part -= 0.5 * t0
        # finite set of negative offsets
        for j in range(j_lo, 0):
            Y = X + (j + s) * L
            lp = base + 1j * Y * (E + 2j * g) - 1j * k_bar * j * L
            v = _negative_block(-j, -2j * q * Y, x, u, lp)
            part += 0.5 * v if abs(Y) <= 1e-12 * scale else v
        total += A * part
    return total


def correlated_part(params: SystemParams, k1: float, k2: float, X1, X2):
    """Resummed F_t(X1, X2); see ``series.correlated_part`` for the definition."""
    E = k1 + k2
    kb = 0.5 * E
    X1, X2 = np.broadcast_arrays(np.asarray(X1, float), np.asarray(X2, float))
    out = np.empty(X1.shape, complex)
    if params.d == 0:
        # one effective coupling point: a single pole at E - Sigma
        sig = -2j * params.gamma * (1 + math.cos(params.phi) * np.exp(1j * params.phase_k0d))
        ec = np.exp(-1j * params.phi) + np.exp(-1j * params.phase_k0d)
        lo = np.minimum(X1, X2)
        out[...] = (-2j * ec * ec * np.exp(1j * E * lo + 1j * (E - sig) * np.abs(X1 - X2))
                    / (E - 2 * sig))
    else:
        consts = _constants(params, kb)
        coeffs = pair_coefficients(params, E)
        for idx in np.ndindex(X1.shape):
            a1, a2 = float(X1[idx]), float(X2[idx])
            out[idx] = (np.exp(1j * E * a2) * _half(params, kb, E, a1 - a2, consts, coeffs)
                        + np.exp(1j * E * a1) * _half(params, kb, E, a2 - a1, consts, coeffs)) / math.pi
    return (complex(out) if out.ndim == 0 else out), [RESUMMED] * out.size
