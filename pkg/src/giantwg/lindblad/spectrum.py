"""Liouvillian eigenvalues and the dissipative gap."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla

from ..errors import EigenSolverFailure
from .operators import LiouvillianMatrix

DENSE_MAX_DIM = 46 * 46  # N <= 45
ZERO_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray  # sorted by descending real part
    gap: float
    method: str

    @property
    def zero_count(self) -> int:
        return int(np.sum(np.abs(self.eigenvalues) < ZERO_TOL))


def _gap(ev: np.ndarray) -> float:
    nonzero = ev[np.abs(ev) >= ZERO_TOL]
    if nonzero.size == 0:
        raise EigenSolverFailure("no nonzero eigenvalue found")
    return float(-np.max(nonzero.real))


def liouvillian_spectrum(L: LiouvillianMatrix, count: Optional[int] = None,
                         method: str = "auto") -> SpectrumResult:
    """Eigenvalues with the largest real parts and the gap.

    Dense LAPACK for N <= 45. Larger cutoffs fall back to ARPACK in
    shift-invert mode around a small positive shift; that only finds the
    slowest modes reliably when they are well separated, so ``count`` should
    be modest there.
    """
    n = L.shape[0]
    if method == "auto":
        method = "dense" if n <= DENSE_MAX_DIM else "sparse"
    try:
        if method == "dense":
            ev = la.eigvals(L.dense, check_finite=True)
        elif method == "sparse":
            k = min(count or 6, n - 2)
            ev = spla.eigs(L.sparse.tocsc(), k=max(k, 2), sigma=1e-3 * L.gamma,
                           which="LM", return_eigenvectors=False)
        else:
            raise ValueError(f"unknown method {method!r}")
    except (la.LinAlgError, spla.ArpackNoConvergence, spla.ArpackError, ValueError) as exc:
        if isinstance(exc, ValueError) and "unknown method" in str(exc):
            raise
        raise EigenSolverFailure(str(exc)) from None
    ev = ev[np.lexsort((ev.imag, -ev.real))]
    gap = _gap(ev)
    if count is not None:
        ev = ev[:count]
    return SpectrumResult(ev, gap, method)


def liouvillian_gap(L: LiouvillianMatrix) -> float:
    return liouvillian_spectrum(L).gap
