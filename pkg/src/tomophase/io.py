"""Artifact files and CSV reports.

An artifact is a magic line, one JSON metadata line, then the payload arrays
as little-endian float64 in storage (row-major) order.  Complex arrays are
stored as interleaved (re, im) pairs.  The metadata lists every array with
its shape and whether it is complex, so decoding needs no other context.
"""

import csv
import io as _io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Object3D
from .diffraction import Autocorrelation2D, DiffractionPattern, Mask2D
from .errors import MalformedFile, VersionMismatch
from .schemes import Scheme
from .xray import Direction, Projection2D

MAGIC = b"TOMOPHASE"
FORMAT_VERSION = 1
KINDS = ("Object", "Mask", "Scheme", "Projection", "Pattern", "Autocorrelation", "Report")


@dataclass
class Report:
    """Flat list of checks; each row is (name, value, threshold, passed)."""

    title: str = ""
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, name, value, threshold=None, passed=None):
        self.rows.append((str(name), value, threshold, passed))
        return passed

    @property
    def passed(self):
        return all(r[3] is not False for r in self.rows)

    def to_csv(self):
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "value", "threshold", "pass"])
        for name, value, threshold, ok in self.rows:
            w.writerow([name, _cell(value), _cell(threshold), "" if ok is None else str(bool(ok)).lower()])
        return buf.getvalue()


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_report(report: Report, path):
    Path(path).write_text(report.to_csv(), encoding="utf-8")


def read_report(path):
    rows = list(csv.DictReader(Path(path).read_text(encoding="utf-8").splitlines()))
    return rows


# ---------------------------------------------------------------------------


def _meta_and_arrays(entity):
    if isinstance(entity, Object3D):
        return "Object", {"n": entity.n, "p": entity.p}, {"values": entity.values}
    if isinstance(entity, Mask2D):
        return "Mask", {"p": entity.p, "mask_id": entity.mask_id}, {"phases": entity.phases}
    if isinstance(entity, Scheme):
        meta = {"family": entity.family, "n": entity.n, "p": entity.p,
                "extra": list(entity.extra) if entity.extra is not None else None,
                "label": entity.label}
        return "Scheme", meta, {"slopes": entity.slopes}
    if isinstance(entity, Projection2D):
        d = entity.direction
        meta = {"p": entity.p,
                "direction": None if d is None else [d.family, d.alpha, d.beta]}
        return "Projection", meta, {"values": entity.values}
    if isinstance(entity, DiffractionPattern):
        meta = {"p": entity.p, "grid": entity.grid, "pattern_metadata": entity.metadata}
        return "Pattern", meta, {"intensities": entity.intensities, "nodes": entity.nodes}
    if isinstance(entity, Autocorrelation2D):
        return "Autocorrelation", {"p": entity.p, "condition": entity.condition}, {"values": entity.values}
    if isinstance(entity, Report):
        rows = [[r[0], _json_value(r[1]), _json_value(r[2]), r[3]] for r in entity.rows]
        return "Report", {"title": entity.title, "rows": rows, "report_metadata": entity.metadata}, {}
    raise TypeError(f"cannot encode {type(entity).__name__}")


def _json_value(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def encode(entity, provenance=None):
    kind, meta, arrays = _meta_and_arrays(entity)
    layout = []
    blobs = []
    for name, arr in arrays.items():
        arr = np.asarray(arr)
        is_complex = np.iscomplexobj(arr)
        flat = np.ascontiguousarray(arr, dtype=np.complex128 if is_complex else np.float64)
        raw = flat.view(np.float64) if is_complex else flat
        blobs.append(raw.astype("<f8", copy=False).tobytes())
        layout.append({"name": name, "shape": list(arr.shape), "complex": bool(is_complex)})
    header = {"format_version": FORMAT_VERSION, "kind": kind, "metadata": meta, "arrays": layout}
    if provenance:
        header["provenance"] = provenance
    text = json.dumps(header, sort_keys=True, separators=(",", ":"))
    return MAGIC + b" " + str(FORMAT_VERSION).encode() + b"\n" + text.encode("utf-8") + b"\n" + b"".join(blobs)


def _read_header(data):
    nl = data.find(b"\n")
    if nl < 0 or not data.startswith(MAGIC + b" "):
        raise MalformedFile("missing magic line", 0)
    try:
        version = int(data[len(MAGIC) + 1:nl])
    except ValueError:
        raise MalformedFile("unreadable format version", len(MAGIC) + 1) from None
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"file format version {version}, this build reads {FORMAT_VERSION}")
    start = nl + 1
    end = data.find(b"\n", start)
    if end < 0:
        raise MalformedFile("metadata line not terminated", len(data))
    try:
        header = json.loads(data[start:end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        pos = start + getattr(exc, "pos", getattr(exc, "start", 0))
        raise MalformedFile(f"bad metadata: {exc}", pos) from None
    if not isinstance(header, dict) or header.get("kind") not in KINDS:
        raise MalformedFile("metadata has no valid kind", start)
    if header.get("format_version") != FORMAT_VERSION:
        raise VersionMismatch(f"metadata format version {header.get('format_version')}")
    return header, end + 1


def decode(data: bytes):
    """Inverse of :func:`encode`; the entity passes its own constructor checks."""
    data = bytes(data)
    header, pos = _read_header(data)
    arrays = {}
    for entry in header.get("arrays", []):
        shape = tuple(int(s) for s in entry["shape"])
        count = int(np.prod(shape, dtype=np.int64)) * (2 if entry["complex"] else 1)
        nbytes = 8 * count
        if pos + nbytes > len(data):
            raise MalformedFile(f"payload {entry['name']!r} truncated", len(data))
        raw = np.frombuffer(data, dtype="<f8", count=count, offset=pos).astype(np.float64)
        arr = raw.view(np.complex128) if entry["complex"] else raw
        arrays[entry["name"]] = arr.reshape(shape)
        pos += nbytes
    if pos != len(data):
        raise MalformedFile("trailing bytes after payload", pos)
    try:
        return _build(header["kind"], header.get("metadata", {}), arrays)
    except KeyError as exc:
        raise MalformedFile(f"missing field {exc}", 0) from None


def _build(kind, meta, arrays):
    if kind == "Object":
        return Object3D(arrays["values"], int(meta["p"]))
    if kind == "Mask":
        return Mask2D(arrays["phases"], meta.get("mask_id", ""))
    if kind == "Scheme":
        extra = meta.get("extra")
        return Scheme(meta["family"], arrays["slopes"], int(meta["n"]), int(meta["p"]),
                      tuple(extra) if extra is not None else None, meta.get("label", ""))
    if kind == "Projection":
        d = meta.get("direction")
        direction = None if d is None else Direction(d[0], float(d[1]), float(d[2]))
        return Projection2D(arrays["values"], direction)
    if kind == "Pattern":
        return DiffractionPattern(arrays["intensities"], arrays["nodes"], int(meta["p"]),
                                  meta.get("grid", "regular"), meta.get("pattern_metadata", {}))
    if kind == "Autocorrelation":
        return Autocorrelation2D(arrays["values"], float(meta.get("condition", 1.0)))
    rows = [tuple(r) for r in meta.get("rows", [])]
    return Report(meta.get("title", ""), rows, meta.get("report_metadata", {}))


def save(entity, path, provenance=None):
    Path(path).write_bytes(encode(entity, provenance))


def load(path, kind=None):
    entity = decode(Path(path).read_bytes())
    if kind is not None and not isinstance(entity, kind):
        raise MalformedFile(f"{path}: expected {kind.__name__}, found {type(entity).__name__}", 0)
    return entity
