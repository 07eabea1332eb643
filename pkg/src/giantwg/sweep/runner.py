"""Grid evaluation of one observable, optionally across worker processes."""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .. import __version__
from ..errors import GiantWGError
from .config import SweepSpec, point_model


@dataclass(frozen=True)
class Record:
    point: Tuple[float, ...]
    observable: str
    value: Optional[complex]
    flag: str = "ok"
    message: str = ""


@dataclass
class SweepResult:
    spec: SweepSpec
    records: List[Record]
    version: str = __version__
    wall_time: float = 0.0
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def failures(self) -> List[Record]:
        return [r for r in self.records if r.flag != "ok"]


def evaluate(spec: SweepSpec, overrides: Dict[str, float]) -> complex:
    """Value of ``spec.observable`` at a single grid point."""
    from .. import lindblad, scattering_one, scattering_two

    params, drive = point_model(spec, overrides)
    v = {**spec.fixed, **overrides}
    target, obs = spec.target, spec.observable
    if target == "single_photon":
        amp = scattering_one.scatter_single(params, drive.k_i, drive.direction)
        return {"t": amp.t, "r": amp.r, "T": abs(amp.t) ** 2, "R": abs(amp.r) ** 2}[obs]
    if target == "g2_map":
        return scattering_two.g2_transmitted(params, drive.k_i, v["tau"], spec.backend)
    if target == "fluorescence_slice":
        if obs == "F_t":
            val, _ = scattering_two.correlated_part(params, drive.k_i, drive.k_i, v["X1"], v["X2"],
                                                    spec.backend)
            return val
        return scattering_two.wavefunction_t(params, drive.k_i, drive.k_i, v["X1"], v["X2"], spec.backend)
    cutoff = spec.controls.fock_cutoff
    if target == "steady_curve":
        if obs == "g2_out":
            return lindblad.transmitted_g2_output(params, drive, cutoff=cutoff)
        L = lindblad.build_liouvillian(params, drive, cutoff)
        state = lindblad.steady_state(L)
        if obs == "n":
            return lindblad.photon_number(state)
        ob = lindblad.cavity_observables(state)
        return ob.g2 if obs == "g2" else ob.b_mean
    if target == "reflected_curve":
        return lindblad.reflected_density(params, drive, cutoff)
    if target == "gap_curve":
        return lindblad.liouvillian_spectrum(lindblad.build_liouvillian(params, drive, cutoff)).gap
    raise ValueError(f"unknown target {target!r}")


def _job(args) -> Record:
    spec, point = args
    try:
        value = complex(evaluate(spec, dict(zip(spec.axis_names, point))))
        return Record(point, spec.observable, value)
    except GiantWGError as exc:
        return Record(point, spec.observable, None, exc.code, str(exc))
    except (ValueError, ArithmeticError, NotImplementedError) as exc:
        return Record(point, spec.observable, None, "error", f"{type(exc).__name__}: {exc}")


def worker_count(n_jobs: int) -> int:
    env = os.environ.get("GIANTWG_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            pass
    return max(1, min(cap, n_jobs))


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """Evaluate the target at every grid point, row-major over the axes.

    Points that raise a library error become flagged records; the sweep
    itself never aborts on them.
    """
    grid = spec.grid() if spec.axes else [()]
    jobs = [(spec, p) for p in grid]
    n = worker_count(len(jobs)) if workers is None else max(1, workers)
    t0 = time.perf_counter()
    if n == 1:
        records = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            records = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * n))))
    wall = time.perf_counter() - t0
    meta = {"version": f"giantwg {__version__}", "config": spec.echo(),
            "axes": list(spec.axis_names), "points": len(grid)}
    return SweepResult(spec, records, f"giantwg {__version__}", wall, meta)
