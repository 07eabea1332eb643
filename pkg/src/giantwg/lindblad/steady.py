"""Steady states by direct linear solve and by time integration."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from ..errors import CutoffTooSmall, DegenerateSteadyState, NotConverged, UndefinedG2
from .operators import LiouvillianMatrix, destroy, trace_functional, unvec, vec

TOP_POPULATION_LIMIT = 1e-8
RESIDUAL_LIMIT = 1e-10
DENSE_LIMIT = 4000


@dataclass(frozen=True)
class SteadyState:
    rho: np.ndarray
    residual: float
    top_population: float
    method: str

    @property
    def cutoff(self) -> int:
        return self.rho.shape[0] - 1


def _finalize(rho: np.ndarray, L: LiouvillianMatrix, method: str, check_cutoff: bool) -> SteadyState:
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    residual = float(np.max(np.abs(L.sparse @ vec(rho))))
    top = float(rho[-1, -1].real)
    if check_cutoff and top > TOP_POPULATION_LIMIT:
        raise CutoffTooSmall(f"population {top:.3g} in the top Fock level {L.cutoff}")
    return SteadyState(rho, residual, top, method)


def _bordered(L: LiouvillianMatrix, row: int):
    D = L.dim
    A = L.sparse.tolil(copy=True)
    A[row, :] = trace_functional(D)
    rhs = np.zeros(D * D, complex)
    rhs[row] = 1.0
    return A, rhs


def steady_state(L: LiouvillianMatrix, method: str = "auto", check_cutoff: bool = True) -> SteadyState:
    """Null vector of L with unit trace.

    One equation of L vec(rho) = 0 is replaced by the trace condition. That
    system is nonsingular exactly when the null space is one dimensional;
    singularity (or a solution that fails the residual test) is reported as a
    degenerate steady state. ``method``: ``dense`` (LU with a condition
    estimate), ``sparse`` (SuperLU), or ``auto`` (dense up to 4000 unknowns).
    """
    D = L.dim
    n2 = D * D
    if method == "auto":
        method = "dense" if n2 <= DENSE_LIMIT else "sparse"
    A, rhs = _bordered(L, 0)
    if method == "dense":
        M = A.toarray()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", la.LinAlgWarning)  # judged by rcond below
            lu, piv = la.lu_factor(M, check_finite=False)
        rcond = la.lapack.zgecon(lu, np.linalg.norm(M, 1), norm="1")[0]
        if not rcond > 1e3 * np.finfo(float).eps:
            raise DegenerateSteadyState(f"null space of L is not one dimensional (rcond {rcond:.3g})")
        x = la.lu_solve((lu, piv), rhs)
    elif method == "sparse":
        try:
            x = spla.splu(sp.csc_matrix(A)).solve(rhs)
        except RuntimeError as exc:  # SuperLU reports exact singularity this way
            raise DegenerateSteadyState(str(exc)) from None
    else:
        raise ValueError(f"unknown method {method!r}")
    state = _finalize(unvec(x, D), L, method, check_cutoff)
    if not np.isfinite(state.residual) or state.residual > RESIDUAL_LIMIT:
        raise DegenerateSteadyState(f"steady-state residual {state.residual:.3g}")
    return state


def steady_state_ode(L: LiouvillianMatrix, t_final: float = 1e6, rho0: Optional[np.ndarray] = None,
                     rtol: float = 1e-10, residual_tol: float = 1e-11, transient: float = 1.0,
                     check_cutoff: bool = True) -> SteadyState:
    """Integrate d vec(rho)/dt = L vec(rho) from the vacuum until it stops moving.

    The fast transient (up to ``transient``/gamma) is followed with adaptive
    BDF. After that the slow approach to the stationary point is stepped with
    implicit Euler at doubling step sizes: it is L-stable, so large steps damp
    the decaying modes instead of amplifying them, and its fixed point is the
    exact steady state whatever the step.
    """
    D = L.dim
    if rho0 is None:
        rho0 = np.zeros((D, D), complex)
        rho0[0, 0] = 1.0
    y = vec(rho0).astype(complex)
    J = sp.csc_matrix(L.sparse)
    tr = trace_functional(D)

    def residual(v):
        return float(np.max(np.abs(J @ v)))

    t = 0.0
    if residual(y) > residual_tol:
        t = min(transient / L.gamma, t_final)
        sol = solve_ivp(lambda _, v: J @ v, (0.0, t), y, method="BDF", jac=J,
                        rtol=rtol, atol=rtol * 1e-3)
        if not sol.success:
            raise NotConverged(sol.message)
        y = sol.y[:, -1]
    h = 1.0 / L.gamma
    eye = sp.identity(D * D, dtype=complex, format="csc")
    lu, lu_h = None, None
    while residual(y) > residual_tol:
        if t >= t_final:
            raise NotConverged(f"|L rho| = {residual(y):.3g} after t = {t:.4g}")
        h = min(h, t_final - t)
        if lu_h != h:
            lu, lu_h = spla.splu(eye - h * J), h
        y = lu.solve(y)
        y = y / (tr @ y)
        t += h
        h = min(2 * h, 1e4 / L.gamma)
    return _finalize(unvec(y, D), L, "ode", check_cutoff)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


class CavityObservables(NamedTuple):
    n: float
    g2: float
    b_mean: complex


def cavity_observables(state) -> CavityObservables:
    """Photon number, equal-time g2 and coherent amplitude of the cavity."""
    rho = state.rho if isinstance(state, SteadyState) else np.asarray(state)
    N = rho.shape[0] - 1
    b = destroy(N)
    diag = np.real(np.diag(rho))
    k = np.arange(N + 1)
    n = float(np.sum(k * diag))
    b_mean = complex(np.trace(b @ rho))
    if n <= 1e-14:
        raise UndefinedG2(f"cavity photon number {n:.3g}")
    g2 = float(np.sum(k * (k - 1) * diag)) / n ** 2
    return CavityObservables(n, g2, b_mean)


def photon_number(state) -> float:
    rho = state.rho if isinstance(state, SteadyState) else np.asarray(state)
    return float(np.sum(np.arange(rho.shape[0]) * np.real(np.diag(rho))))


def is_physical(rho: np.ndarray, tol: float = 1e-10) -> bool:
    herm = np.max(np.abs(rho - rho.conj().T)) <= 1e-12
    tr = abs(np.trace(rho) - 1) <= 1e-12
    return bool(herm and tr and np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() > -tol)


__all__ = ["SteadyState", "CavityObservables", "steady_state", "steady_state_ode",
           "cavity_observables", "photon_number", "trace_distance", "is_physical"]
