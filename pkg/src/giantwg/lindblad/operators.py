"""Truncated Fock-space operators, Hamiltonian and Liouvillian.

The density matrix is vectorized by stacking columns (Fortran order), so that
vec(A rho B) = (B^T kron A) vec(rho).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import ValidationError
from ..model import DriveConfig, SystemParams, eta

CUTOFF_MIN, CUTOFF_MAX = 20, 60


def destroy(N: int) -> np.ndarray:
    """Annihilation operator on {|0>, ..., |N>}."""
    return np.diag(np.sqrt(np.arange(1, N + 1, dtype=float)), k=1).astype(complex)


@dataclass(frozen=True)
class FockOperator:
    matrix: np.ndarray
    cutoff: int

    @property
    def dim(self) -> int:
        return self.cutoff + 1


def rabi_frequency(params: SystemParams, drive: DriveConfig) -> complex:
    """Omega = Omega0 * eta of the driven bath mode.

    |eta| below 1e-12 is roundoff from an exact cancellation (the decoupled
    direction at the chiral point) and is returned as exactly zero.
    """
    e = complex(eta(params, drive.direction, drive.bath_momentum))
    if abs(e) < 1e-12:
        return 0j
    return drive.omega0 * e


def semiclassical_branches(params: SystemParams, drive: DriveConfig) -> Tuple[float, ...]:
    """Non-negative real roots of n ((U n - k_i)^2 + 4 gamma^2) = |Omega|^2, sorted."""
    U, k, g = params.U, drive.k_i, params.gamma
    w2 = abs(rabi_frequency(params, drive)) ** 2
    if U == 0:
        return (w2 / (k * k + 4 * g * g),)
    roots = np.roots([U * U, -2 * U * k, k * k + 4 * g * g, -w2])
    scale = max(1.0, float(np.max(np.abs(roots))))
    real = [float(r.real) for r in roots if abs(r.imag) <= 1e-9 * scale and r.real >= -1e-12 * scale]
    return tuple(sorted(max(r, 0.0) for r in real))


def default_cutoff(params: SystemParams, drive: DriveConfig) -> int:
    n_max = max(semiclassical_branches(params, drive))
    return int(min(max(math.ceil(3 * n_max) + 10, CUTOFF_MIN), CUTOFF_MAX))


def resolve_cutoff(params: SystemParams, drive: DriveConfig, cutoff: Optional[int] = None) -> int:
    if cutoff is None:
        cutoff = params.controls.fock_cutoff
    if cutoff is None:
        cutoff = default_cutoff(params, drive)
    if int(cutoff) != cutoff or cutoff < 2:
        raise ValidationError("fock_cutoff", "must be an integer >= 2")
    return int(cutoff)


def _require_markovian(params: SystemParams):
    if abs(math.cos(params.phi)) > 1e-9:
        raise ValidationError(
            "phi", "the Markovian master equation holds only for phi = +-pi/2")


def build_hamiltonian(params: SystemParams, drive: DriveConfig,
                      cutoff: Optional[int] = None) -> FockOperator:
    """H = -k_i b^dag b + (U/2) b^dag^2 b^2 + Omega b^dag + conj(Omega) b (drive frame)."""
    N = resolve_cutoff(params, drive, cutoff)
    n = np.arange(N + 1, dtype=float)
    H = np.diag(-drive.k_i * n + 0.5 * params.U * n * (n - 1)).astype(complex)
    om = rabi_frequency(params, drive)
    b = destroy(N)
    H += om * b.conj().T + np.conj(om) * b
    return FockOperator(H, N)


@dataclass(frozen=True)
class LiouvillianMatrix:
    """Generator of d vec(rho)/dt; ``sparse`` is CSR, ``dense`` built on demand."""

    sparse: sp.csr_matrix
    cutoff: int
    hamiltonian: FockOperator
    gamma: float
    _dense: list = field(default_factory=list, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def dense(self) -> np.ndarray:
        if not self._dense:
            self._dense.append(self.sparse.toarray())
        return self._dense[0]

    @property
    def shape(self):
        return self.sparse.shape

    def apply(self, rho: np.ndarray) -> np.ndarray:
        D = self.dim
        return (self.sparse @ rho.reshape(D * D, order="F")).reshape((D, D), order="F")


def build_liouvillian(params: SystemParams, drive: DriveConfig,
                      cutoff: Optional[int] = None) -> LiouvillianMatrix:
    """-i[H, rho] + 2 gamma (2 b rho b^dag - {b^dag b, rho}), column-stacked."""
    _require_markovian(params)
    H = build_hamiltonian(params, drive, cutoff)
    N = H.cutoff
    D = N + 1
    I = sp.identity(D, dtype=complex, format="csr")
    Hs = sp.csr_matrix(H.matrix)
    b = sp.csr_matrix(destroy(N))
    nop = sp.diags(np.arange(D, dtype=complex))
    g = params.gamma
    L = (-1j * (sp.kron(I, Hs) - sp.kron(Hs.T, I))
         + 2 * g * (2 * sp.kron(b.conj(), b) - sp.kron(I, nop) - sp.kron(nop.T, I)))
    L = sp.csr_matrix(L)
    L.eliminate_zeros()
    return LiouvillianMatrix(L, N, H, g)


def vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return v.reshape((dim, dim), order="F")


def trace_functional(dim: int) -> np.ndarray:
    """Row vector t with t . vec(rho) = Tr rho."""
    t = np.zeros(dim * dim, complex)
    t[:: dim + 1] = 1.0
    return t
