"""Command line front end: ``giantwg <command> --config FILE``."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace

from .. import __version__
from ..errors import GiantWGError
from .config import load_config
from .emit import emit
from .runner import run_sweep

log = logging.getLogger("giantwg")

COMMAND_TARGETS = {
    "single": "single_photon",
    "two": "g2_map",
    "steady": "steady_curve",
    "gap": "gap_curve",
    "reflected": "reflected_curve",
}


def _frame_warning(spec):
    """Warn when k_i d is not a multiple of 2 pi for the reflected density."""
    ks = [spec.fixed["k_i"]]
    ds = [spec.fixed["d"]]
    for a in spec.axes:
        if a.name == "k_i":
            ks = list(a.values())
        if a.name == "d":
            ds = list(a.values())
    for k in ks:
        for d in ds:
            frac = math.remainder(k * d, 2 * math.pi)
            if abs(frac) > 1e-9 * max(1.0, abs(k * d)):
                log.warning("k_i*d = %.6g is not a multiple of 2 pi; the lab-frame correlator "
                            "carries the factor exp(i k_i d)", k * d)
                return


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="giantwg", description="Giant Kerr cavity on a waveguide: "
                                 "scattering, master-equation and sweep tools.")
    ap.add_argument("--version", action="version", version=f"giantwg {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {"single": "single-photon amplitudes", "two": "two-photon g2 of transmitted light",
             "steady": "steady-state cavity observables", "gap": "Liouvillian gap",
             "reflected": "reflected photon density", "sweep": "target taken from the config"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="key = value parameter file")
        p.add_argument("--out", help="output file (default: stdout or the config's output key)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("--workers", type=int, help="worker processes (default from GIANTWG_THREADS)")
        p.add_argument("--timing", action="store_true", help="add wall time to JSON metadata")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="giantwg: %(levelname)s: %(message)s")
    try:
        bundle = load_config(args.config)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return 2
    except GiantWGError as exc:
        log.error("%s", exc)
        return 2
    spec = bundle.sweep
    if args.command != "sweep":
        target = COMMAND_TARGETS[args.command]
        obs = spec.observable if spec.target == target else ""
        try:
            spec = replace(spec, target=target, observable=obs)
        except GiantWGError as exc:
            log.error("%s", exc)
            return 2
    fmt = args.format or spec.fmt
    out = args.out or spec.output_path
    if spec.target == "reflected_curve":
        _frame_warning(spec)
    result = run_sweep(spec, workers=args.workers)
    for rec in result.failures:
        log.info("point %s failed: %s", rec.point, rec.message)
    try:
        emit(result, fmt, path=out, stream=None if out else sys.stdout, include_timing=args.timing)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
