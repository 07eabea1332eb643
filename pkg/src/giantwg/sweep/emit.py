"""CSV and JSON writers. Output is byte-identical for identical sweeps."""
from __future__ import annotations

import csv
import io
import json
from typing import Optional, TextIO

from .runner import SweepResult


def _num(x: float) -> str:
    return repr(float(x))


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(result.spec.axis_names) + ["observable", "value_re", "value_im", "flag"])
    for rec in result.records:
        row = [_num(p) for p in rec.point] + [rec.observable]
        if rec.value is None:
            row += ["", ""]
        else:
            row += [_num(rec.value.real), _num(rec.value.imag)]
        w.writerow(row + [rec.flag])
    return buf.getvalue()


def to_json(result: SweepResult, include_timing: bool = False) -> str:
    """Records plus metadata. Wall time varies run to run, so it is opt-in."""
    meta = dict(result.metadata)
    if include_timing:
        meta["wall_time_s"] = result.wall_time
    records = []
    for rec in result.records:
        item = {"point": dict(zip(result.spec.axis_names, rec.point)),
                "observable": rec.observable, "flag": rec.flag}
        if rec.value is None:
            item["value"] = None
            item["message"] = rec.message
        else:
            item["value"] = [rec.value.real, rec.value.imag]
        records.append(item)
    return json.dumps({"metadata": meta, "records": records}, indent=2, sort_keys=True) + "\n"


def emit(result: SweepResult, fmt: str = "csv", path: Optional[str] = None,
         stream: Optional[TextIO] = None, include_timing: bool = False) -> str:
    """Render ``result`` and write it to ``path`` (or ``stream``); returns the text."""
    if fmt == "csv":
        text = to_csv(result)
    elif fmt == "json":
        text = to_json(result, include_timing)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif stream is not None:
        stream.write(text)
    return text
