"""Real-line quadrature oracles, independent of the power series.

Strategy: subtract the free (single-pole, decay 2 gamma) integrand, whose
integral is known in closed form, integrate the remainder over [-W, W] with
scipy's adaptive vector quadrature, and add the |p| > W tail from the p^-3
and p^-4 asymptotics, which integrate to generalized exponential integrals.

Writing G(p) = 1/(p + b + alpha(p)) with b = 2i gamma,
alpha(p) = 2i gamma cos(phi) e^{i theta_{Rp}} and beta(p) = alpha(E - p), the
product G(p) G(E - p) minus its free part is

    (alpha - beta) / p^3
    + [alpha (E - b) - beta (2E + b) - beta^2 + alpha beta - alpha^2] / p^4 + ...
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad_vec
from scipy.optimize import brentq
from scipy.special import exp1

from ..errors import QuadratureNotConverged
from ..model import SystemParams
from ..scattering_one import self_energy
from .series import pair_coefficients

_MAX_POINTS = 200_000


def _e3(z: complex) -> complex:
    """E_3(z) by upward recurrence from E_1."""
    z = complex(z)
    if abs(z) < 1e-12:
        return 0.5
    e1 = exp1(z)
    e2 = np.exp(-z) - z * e1
    return complex((np.exp(-z) - z * e2) / 2)


def _e4(z: complex) -> complex:
    z = complex(z)
    if abs(z) < 1e-12:
        return 1.0 / 3.0
    return complex((np.exp(-z) - z * _e3(z)) / 3)


def _tail(kappa: float, W: float, power: int) -> complex:
    """Integral of e^{i kappa p} / p^power over |p| > W, power in {3, 4}."""
    if power == 3:
        return (_e3(-1j * kappa * W) - _e3(1j * kappa * W)) / W ** 2
    return (_e4(-1j * kappa * W) + _e4(1j * kappa * W)) / W ** 3


def _tail_terms(params: SystemParams, E: float):
    """(coefficient, wavenumber, power) of the large-|p| expansion of G(p)G(E-p) - free."""
    g, L = params.gamma, params.d
    b = 2j * g
    a1 = 2j * g * math.cos(params.phi) * np.exp(1j * params.phase_k0d)  # coefficient of e^{ipL}
    b1 = a1 * np.exp(1j * E * L)                                          # of e^{-ipL}
    return [(a1, L, 3), (-b1, -L, 3),
            (-b1 * (2 * E + b), -L, 4), (a1 * (E - b), L, 4),
            (-b1 * b1, -2 * L, 4), (a1 * b1, 0.0, 4), (-a1 * a1, 2 * L, 4)]


def _tail_sum(terms, shift, W):
    return sum(c * _tail(kappa + shift, W, pw) for c, kappa, pw in terms)


def free_pair_transform(E: float, gamma: float, Y: float) -> complex:
    """Integral of e^{i p Y} / ((p + 2i gamma)(E - p + 2i gamma)) over the real line."""
    pre = -2j * math.pi / (E + 4j * gamma)
    if Y >= 0:
        return complex(pre * np.exp(1j * (E + 2j * gamma) * Y))
    return complex(pre * math.exp(2 * gamma * Y))


def resonance_points(params: SystemParams, lo: float, hi: float):
    """Real p in [lo, hi] where p = Re Sigma(p), i.e. where |G| peaks."""
    c = math.cos(params.phi)
    reach = 2 * params.gamma * abs(c) + 1e-9
    lo, hi = max(lo, -reach), min(hi, reach)
    if hi <= lo:
        return np.empty(0)

    def g(p):
        return p - self_energy(params, p).real

    if params.d == 0:
        n = 3
    else:
        n = int(min(64 * (hi - lo) * params.d / (2 * math.pi) + 64, 2_000_000))
    grid = np.linspace(lo, hi, n)
    vals = g(grid)
    roots = list(grid[vals == 0])
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-15))
    return np.unique(np.asarray(roots))


def _breakpoints(params, E, freq, W):
    pts = [resonance_points(params, -W, W)]
    pts.append(E - pts[0])
    if freq > 0:
        step = max(math.pi / freq, 2 * W / _MAX_POINTS)
        pts.append(np.arange(-W, W, step)[1:])
    else:
        pts.append(np.linspace(-W, W, 81)[1:-1])
    p = np.unique(np.concatenate(pts))
    return p[(p > -W) & (p < W)]


def _integrate(f, W, points, abs_tol, what):
    res, err, info = quad_vec(f, -W, W, epsabs=abs_tol, epsrel=1e-12, limit=10 * len(points) + 10_000,
                              points=points, full_output=True)
    res = complex(res)
    if not info.success or not np.isfinite(res) or err > 100 * max(abs_tol, 1e-11 * abs(res)):
        raise QuadratureNotConverged(f"{what}: error estimate {err:.3g} (status {info.status})")
    return res, float(err)


def _window(params, E):
    return max(400.0 * params.gamma, 50.0 * (abs(E) + 4 * params.gamma))


def green_convolution_quadrature(params: SystemParams, k_bar: float) -> complex:
    """Integral of G(w) G(2 kbar - w) over the real line by adaptive quadrature."""
    g, L = params.gamma, params.d
    E = 2.0 * k_bar
    W = _window(params, E)

    def G(p):
        return 1.0 / (p - self_energy(params, p))

    def f(p):
        return G(p) * G(E - p) - 1.0 / ((p + 2j * g) * (E - p + 2j * g))

    body, _ = _integrate(f, W, _breakpoints(params, E, 2 * L, W),
                         params.controls.quadrature_abs_tol, "green_convolution_quadrature")
    tail = _tail_sum(_tail_terms(params, E), 0.0, W)
    return complex(body + tail + free_pair_transform(E, g, 0.0))


def correlated_part(params: SystemParams, k1: float, k2: float, X1, X2):
    """F_t(X1, X2) by direct quadrature of its Fourier integral, point by point."""
    g, L = params.gamma, params.d
    E = k1 + k2
    W = _window(params, E)
    coeffs = pair_coefficients(params, E)
    terms = _tail_terms(params, E)
    tol = params.controls.quadrature_abs_tol

    def G(p):
        return 1.0 / (p - self_energy(params, p))

    X1, X2 = np.broadcast_arrays(np.asarray(X1, float), np.asarray(X2, float))
    out = np.empty(X1.shape, complex)
    for idx in np.ndindex(X1.shape):
        X = float(X1[idx] - X2[idx])

        def f(p, X=X):
            shape = sum(a * np.exp(1j * s * p * L) for s, a in coeffs.items())
            diff = G(p) * G(E - p) - 1.0 / ((p + 2j * g) * (E - p + 2j * g))
            return np.exp(1j * p * X) * shape * diff

        body, _ = _integrate(f, W, _breakpoints(params, E, abs(X) + 2 * L, W), tol,
                             "correlated_part quadrature")
        free = sum(a * free_pair_transform(E, g, X + s * L) for s, a in coeffs.items())
        tail = sum(a * _tail_sum(terms, X + s * L, W) for s, a in coeffs.items())
        out[idx] = np.exp(1j * E * X2[idx]) * (body + free + tail) / math.pi
    return (complex(out) if out.ndim == 0 else out), []
