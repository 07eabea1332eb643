"""Double power series for the two-photon vertex and the correlated wavefunction.

Both objects are sums over (m, n) >= 0 of

    x^{m+n} e^{-i kbar (m-n) L} e^{i Y (E + 2i gamma)} / m!
        * sum_{l<=n} (m+n-l)! / ((n-l)! l!) (-2i q Y)^l

with q = kbar + 2i gamma, x = -i gamma cos(phi) e^{i theta_{R kbar}} / q and an
effective distance Y that depends on j = m - n. Terms are grouped in shells
of constant m+n. Rather than looping over (m, n, l) we swap the order of the
n and l sums; for a block of fixed j the inner n-sum becomes a partial sum

    P[a, r] = sum_{r'<=r} C(2r'+a, r') x^{a+2r'}

which is tabulated once per (x, order), so a truncated sum at any order M
costs O(M^2) instead of O(M^3). Everything is accumulated in log space; the
raw factorials overflow long before the series converges for |cos phi| ~ 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from ..errors import OrderOverflow, SeriesDiverged
from ..model import SystemParams

_LOG_TINY = -745.0  # exp() underflows to zero below this
_FIRST_ORDER = 64


@dataclass(frozen=True)
class SeriesDiagnostics:
    orders_used: int
    truncation_error_estimate: float
    converged: bool
    backend: str = "series"


class ConvolutionResult(NamedTuple):
    value: complex
    diag: SeriesDiagnostics


def expansion_base(params: SystemParams, k_bar: float):
    """Return (q, x) for the average momentum k_bar."""
    q = k_bar + 2j * params.gamma
    theta = params.phase_k0d + k_bar * params.d
    c = math.cos(params.phi)
    if abs(c) < 1e-15:  # cos(+-pi/2) in floating point
        c = 0.0
    x = -1j * params.gamma * c * np.exp(1j * theta) / q
    return complex(q), complex(x)


def _check_indices(params, m, n, l=0):
    for name, v in (("m", m), ("n", n), ("l", l)):
        if int(v) != v or v < 0:
            raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
    if l > n:
        raise ValueError("l must not exceed n")
    if m + n > params.controls.series_max_order:
        raise OrderOverflow(f"m+n={m + n} exceeds series_max_order="
                            f"{params.controls.series_max_order}")


def _log_coefficient(m, n, l):
    if m + n <= 20:
        return math.log(math.factorial(m + n - l)
                        / (math.factorial(n - l) * math.factorial(l)))
    return float(gammaln(m + n - l + 1) - gammaln(n - l + 1) - gammaln(l + 1))


def c_mnl(params: SystemParams, k: float, m: int, n: int, l: int) -> complex:
    _check_indices(params, m, n, l)
    z = -2j * (m - n) * (k + 2j * params.gamma) * params.d
    if l == 0:
        return complex(math.exp(_log_coefficient(m, n, 0)))
    if z == 0:
        return 0j
    return complex(np.exp(_log_coefficient(m, n, l) + l * np.log(z)))


def f_mn(params: SystemParams, k: float, m: int, n: int) -> complex:
    _check_indices(params, m, n)
    q, x = expansion_base(params, k)
    if m + n > 0 and x == 0:
        return 0j
    inner = sum(c_mnl(params, k, m, n, l) for l in range(n + 1))
    log_pre = 1j * (m - n) * q * params.d - gammaln(m + 1)
    if m + n > 0:
        log_pre += (m + n) * np.log(x)
    return complex(np.exp(log_pre) * inner)


class _PartialSums:
    """Table P[a, r] = sum_{r'<=r} C(2r'+a, r') x^{a+2r'} for 0 <= a <= N, r <= N//2."""

    def __init__(self, x: complex, order: int):
        self.order = order
        a = np.arange(order + 1)[:, None]
        r = np.arange(order // 2 + 1)[None, :]
        if x == 0:
            terms = np.zeros((order + 1, order // 2 + 1), complex)
            terms[0, 0] = 1.0
        else:
            logb = gammaln(2 * r + a + 1) - gammaln(r + 1) - gammaln(r + a + 1)
            terms = np.exp(logb + (a + 2 * r) * np.log(x))
        self.table = np.cumsum(terms, axis=1)

    def lookup(self, a, idx):
        """B_a(K) in the notation of the module docstring; idx already shifted."""
        aa = np.abs(a)
        ok = (idx >= 0) & (aa <= self.order)
        out = np.zeros(np.broadcast(a, idx).shape, complex)
        out[ok] = self.table[aa[ok], np.minimum(idx[ok], self.table.shape[1] - 1)]
        return out


def _block_totals(ps: _PartialSums, x, j, z, log_pref, orders: Sequence[int], chunk=256):
    """Sum all blocks truncated at each m+n <= M for M in ``orders``.

    j: integer block offsets m - n; z: -2i q Y per block; log_pref: log of the
    block prefactor (includes step weight). Returns array of totals.
    """
    totals = np.zeros(len(orders), complex)
    j = np.asarray(j, dtype=np.int64)
    z = np.asarray(z, dtype=complex)
    log_pref = np.asarray(log_pref, dtype=complex)
    if j.size == 0:
        return totals
    zx = z * x
    with np.errstate(divide="ignore"):
        log_zx = np.where(zx != 0, np.log(np.where(zx != 0, zx, 1.0)), -np.inf)
    big = max(orders)
    # l beyond ~e|zx| contributes below double precision; cap the l range there
    lcap = np.minimum((big - j) // 2, np.ceil(2 * math.e * np.abs(zx)).astype(np.int64) + 60)
    lcap = np.where(zx == 0, 0, lcap)
    for s in range(0, j.size, chunk):
        sl = slice(s, s + chunk)
        jj, lz, lp, lc = j[sl, None], log_zx[sl, None], log_pref[sl, None], lcap[sl]
        l = np.arange(int(lc.max()) + 1)[None, :]
        with np.errstate(invalid="ignore"):
            lw = np.where(l == 0, 0.0, l * lz) - gammaln(l + 1) + lp
        lw = np.where(l <= lc[:, None], lw, -np.inf)
        lw = np.where(lw.real < _LOG_TINY, -np.inf, lw)
        w = np.exp(lw)
        a = jj + l
        for i, M in enumerate(orders):
            K = np.floor_divide(M - jj, 2)
            idx = K - l - np.maximum(0, -a)
            valid = (K >= 0) & (l <= K)
            vals = np.where(valid, w * ps.lookup(a, np.where(valid, idx, -1)), 0)
            totals[i] += vals.sum()
    return totals


def _shell_error(totals):
    """Relative size of the last three shells (totals at M, M-1, M-2, M-3)."""
    shells = np.abs(np.diff(totals[::-1]))  # |T_{M-2}-T_{M-3}|, ..., |T_M-T_{M-1}|
    scale = abs(totals[0])
    if scale == 0:
        return 0.0 if not shells.any() else math.inf
    return float(shells.sum() / scale)


def sum_shells(x, blocks_for_order, params: SystemParams, what="series"):
    """Adaptive driver: doubles the order until three trailing shells are below tolerance.

    ``blocks_for_order(N)`` returns (j, z, log_pref) arrays of all blocks that
    can contribute up to order N. Returns (value, SeriesDiagnostics).
    """
    tol = params.controls.series_rel_tol
    cap = int(params.controls.series_max_order)
    N = min(_FIRST_ORDER, cap)
    while True:
        ps = _PartialSums(x, N)
        j, z, lp = blocks_for_order(N)
        totals = _block_totals(ps, x, j, z, lp, [N, N - 1, N - 2, N - 3])
        err = _shell_error(totals)
        if not np.all(np.isfinite(totals)):
            raise SeriesDiverged(f"{what}: non-finite partial sums at order {N}")
        if err < tol:
            return totals[0], SeriesDiagnostics(N, err, True)
        if N >= cap:
            raise SeriesDiverged(
                f"{what}: trailing shells still {err:.3g} of the sum at "
                f"series_max_order={cap}")
        N = min(2 * N, cap)


def green_convolution(params: SystemParams, k_bar: float):
    """Series value of the integral of G(w) G(2 kbar - w) over the real line.

    The m = n terms carry weight 1/2 (step function at zero).
    Returns ConvolutionResult(value, SeriesDiagnostics).
    """
    q, x = expansion_base(params, k_bar)
    if abs(2 * x) >= 1:
        raise SeriesDiverged("|2 gamma cos(phi) / (kbar + 2i gamma)| >= 1")
    d = params.d

    def blocks(N):
        j = np.arange(N + 1)
        z = -2j * j * q * d
        lp = 1j * j * q * d + np.where(j == 0, math.log(0.5), 0.0)
        return j, z, lp

    total, diag = sum_shells(x, blocks, params, "green_convolution")
    return ConvolutionResult(complex(-2j * math.pi / q * total), diag)


def green_convolution_direct(params: SystemParams, k_bar: float, order: int) -> complex:
    """Literal double loop over f_mn truncated at m+n <= order (testing aid)."""
    q, _ = expansion_base(params, k_bar)
    s = 0j
    for m in range(order + 1):
        for n in range(min(m, order - m) + 1):
            w = 0.5 if m == n else 1.0
            s += w * f_mn(params, k_bar, m, n)
    return complex(-2j * math.pi / q * s)


def pair_coefficients(params: SystemParams, E: float):
    """Coefficients A_s of e^{i s p L} in conj(eta(p)) conj(eta(E - p)), s = 0, -1, +1."""
    phi, ph, L = params.phi, params.phase_k0d, params.d
    a0 = np.exp(-2j * phi) + np.exp(-2j * ph - 1j * E * L)
    am = np.exp(-1j * (phi + ph))
    ap = np.exp(-1j * (phi + ph) - 1j * E * L)
    return {0: complex(a0), -1: complex(am), 1: complex(ap)}


def step_weight(Y, scale):
    """Heaviside step with value 1/2 at zero (relative tolerance 1e-12)."""
    Y = np.asarray(Y, dtype=float)
    zero = np.abs(Y) <= 1e-12 * scale
    return np.where(zero, 0.5, np.where(Y > 0, 1.0, 0.0))


def correlated_part(params: SystemParams, k1: float, k2: float, X1, X2):
    """Series evaluation of F_t(X1, X2) (Fourier transform of the fluorescence shape).

    F_t = (1/pi) int dp e^{i p X1} e^{i (E-p) X2} conj(eta(p) eta(E-p)) G(p) G(E-p).
    Returns (values, list of SeriesDiagnostics), one per position pair.
    """
    E = k1 + k2
    kb = 0.5 * E
    q, x = expansion_base(params, kb)
    if abs(2 * x) >= 1:
        raise SeriesDiverged("|2 gamma cos(phi) / (kbar + 2i gamma)| >= 1")
    L, g = params.d, params.gamma
    coeffs = {s: a for s, a in pair_coefficients(params, E).items() if a != 0}
    X1, X2 = np.broadcast_arrays(np.asarray(X1, float), np.asarray(X2, float))
    out = np.empty(X1.shape, complex)
    diags = []
    log_q = np.log(-1j * math.pi / q) - math.log(math.pi)  # (1/pi)(-i pi/q)

    for idx in np.ndindex(X1.shape):
        a1, a2 = float(X1[idx]), float(X2[idx])

        def blocks(N, a1=a1, a2=a2):
            js, zs, lps = [], [], []
            for X, other in ((a1 - a2, a2), (a2 - a1, a1)):
                for s, A in coeffs.items():
                    j = np.arange(-N, N + 1)
                    Y = X + (j + s) * L
                    w = step_weight(Y, 1.0 + abs(X) + np.abs(j + s) * L)
                    keep = w > 0
                    j, Y, w = j[keep], Y[keep], w[keep]
                    js.append(j)
                    zs.append(-2j * q * Y)
                    lps.append(np.log(A) + 1j * E * other + log_q + np.log(w)
                               + 1j * Y * (E + 2j * g) - 1j * kb * j * L)
            return np.concatenate(js), np.concatenate(zs), np.concatenate(lps)

        val, diag = sum_shells(x, blocks, params, "correlated_part")
        out[idx] = val
        diags.append(diag)
    return (complex(out) if out.ndim == 0 else out), diags
