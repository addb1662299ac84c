"""On-disk formats: map fields, checkpoints, trace CSV.

Map field (``*.mfd``), stable across versions:
    line 1   UTF-8 JSON header ``{"format": "torusflow-mapfield-1",
             "h": H, "w": W, "k": K, "target": "<name>"}`` + newline
    rest     H*W*K little-endian float64, row-major (y, x, component)

Checkpoint (``*.ckpt``): same layout with format ``torusflow-checkpoint-1``;
the header additionally carries t, step, eta2, a, b, e0, e_prev and the
original run configuration text, so a resumed run reproduces the unsplit
trajectory bit for bit.  Checkpoints are written atomically (temp file +
rename).  Trace CSV rows are flushed as they are produced so aborted runs
stay inspectable.

Floats in headers and trace rows are rendered with ``repr``, which
round-trips binary64 exactly and deterministically.
"""

from __future__ import annotations

import json
import os
from typing import NamedTuple

import numpy as np

from .domain import MapField
from .targets import TargetManifold

MAPFIELD_FORMAT = "torusflow-mapfield-1"
CHECKPOINT_FORMAT = "torusflow-checkpoint-1"

TRACE_HEADER = "t,E,tension_l2,projhopf_l2,a,b,max_density"


class TraceRow(NamedTuple):
    t: float
    energy: float
    tension_l2: float
    projhopf_l2: float
    a: float
    b: float
    max_density: float


def format_trace_row(row: TraceRow) -> str:
    return ",".join(repr(float(v)) for v in row)


def parse_trace_row(line: str) -> TraceRow:
    return TraceRow(*(float(p) for p in line.split(",")))


class TraceWriter:
    """Appends one CSV row per call and flushes immediately."""

    def __init__(self, path, write_header: bool = True):
        self.path = path
        self._fh = open(path, "a", encoding="utf-8")
        if write_header:
            self._fh.write(TRACE_HEADER + "\n")
            self._fh.flush()

    def write(self, row: TraceRow) -> None:
        self._fh.write(format_trace_row(row) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _write_header_and_blob(path, header: dict, values: np.ndarray) -> None:
    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())
    os.replace(tmp, path)


def _read_header_and_blob(path, expected_format: str) -> tuple[dict, np.ndarray]:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        header = json.loads(header_line.decode("utf-8"))
        if header.get("format") != expected_format:
            raise ValueError(
                f"{path}: expected format {expected_format!r}, found {header.get('format')!r}"
            )
        hh, ww, kk = header["h"], header["w"], header["k"]
        blob = fh.read(8 * hh * ww * kk)
        if len(blob) != 8 * hh * ww * kk:
            raise ValueError(f"{path}: truncated blob")
        values = np.frombuffer(blob, dtype="<f8").reshape(hh, ww, kk).copy()
    return header, values


def write_map_field(path, u: MapField) -> None:
    hh, ww = u.grid_shape
    header = {
        "format": MAPFIELD_FORMAT,
        "h": hh,
        "w": ww,
        "k": u.target.ambient_dim,
        "target": u.target.name,
    }
    _write_header_and_blob(path, header, u.values)


def read_map_field(path) -> MapField:
    header, values = _read_header_and_blob(path, MAPFIELD_FORMAT)
    return MapField(values, TargetManifold.from_name(header["target"]))


def write_checkpoint(path, *, u: MapField, a: float, b: float, t: float, step: int,
                     eta2: float, e0: float, e_prev: float, config_text: str) -> None:
    hh, ww = u.grid_shape
    header = {
        "format": CHECKPOINT_FORMAT,
        "h": hh,
        "w": ww,
        "k": u.target.ambient_dim,
        "target": u.target.name,
        "a": a,
        "b": b,
        "t": t,
        "step": step,
        "eta2": eta2,
        "e0": e0,
        "e_prev": e_prev,
        "config": config_text,
    }
    _write_header_and_blob(path, header, u.values)


class Checkpoint(NamedTuple):
    u: MapField
    a: float
    b: float
    t: float
    step: int
    eta2: float
    e0: float
    e_prev: float
    config_text: str


def read_checkpoint(path) -> Checkpoint:
    header, values = _read_header_and_blob(path, CHECKPOINT_FORMAT)
    u = MapField(values, TargetManifold.from_name(header["target"]))
    return Checkpoint(
        u=u,
        a=float(header["a"]),
        b=float(header["b"]),
        t=float(header["t"]),
        step=int(header["step"]),
        eta2=float(header["eta2"]),
        e0=float(header["e0"]),
        e_prev=float(header["e_prev"]),
        config_text=header["config"],
    )
