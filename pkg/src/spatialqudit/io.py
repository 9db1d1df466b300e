"""JSON, CSV and PGM readers/writers shared by the command line and notebooks."""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import DensityMatrix, StateValidationError
from .tomography import CountRecord, MeasurementSetting, analyzer_labels, measurement_set

SCHEMA_VERSION = 1
LOAD_ATOL = 1e-6


class SchemaError(ValueError):
    """A file does not follow the expected layout; ``path`` locates the fault."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _require(obj: dict, key: str, path: str):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{path}.{key}", "missing field")
    return obj[key]


def _check_schema(obj: dict, name: str, path: str = "$"):
    schema = obj.get("schema")
    if schema is not None and schema != f"{name}/{SCHEMA_VERSION}":
        raise SchemaError(f"{path}.schema", f"expected {name}/{SCHEMA_VERSION}, got {schema!r}")


# -- density matrices --------------------------------------------------------

def density_to_dict(rho: DensityMatrix) -> dict:
    m = rho.matrix
    return {
        "schema": f"density-matrix/{SCHEMA_VERSION}",
        "dims": list(rho.dims),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def density_from_dict(obj: dict, path: str = "$") -> DensityMatrix:
    """Parse and validate a density matrix; also accepts a reconstruction report."""
    if isinstance(obj, dict) and "density_matrix" in obj:
        return density_from_dict(obj["density_matrix"], f"{path}.density_matrix")
    _check_schema(obj, "density-matrix", path)
    dims = _require(obj, "dims", path)
    rows = _require(obj, "matrix", path)
    if not isinstance(dims, list) or not all(isinstance(d, int) and d > 0 for d in dims):
        raise SchemaError(f"{path}.dims", "must be a list of positive integers")
    D = int(np.prod(dims))
    if not isinstance(rows, list) or len(rows) != D:
        raise SchemaError(f"{path}.matrix", f"expected {D} rows")
    m = np.empty((D, D), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != D:
            raise SchemaError(f"{path}.matrix[{i}]", f"expected {D} entries")
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(t, (int, float)) for t in z)):
                raise SchemaError(f"{path}.matrix[{i}][{j}]", "expected [re, im]")
            m[i, j] = complex(z[0], z[1])
    try:
        DensityMatrix(m, tuple(dims), atol=LOAD_ATOL)
    except StateValidationError as exc:
        raise SchemaError(f"{path}.matrix", str(exc)) from None
    # pull the accepted matrix back inside the strict internal tolerances
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    m = (v * w) @ v.conj().T
    m /= np.trace(m).real
    return DensityMatrix(0.5 * (m + m.conj().T), tuple(dims))


def write_json(obj: Any, path: str | Path | None):
    text = json.dumps(obj, indent=2) + "\n"
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(str(path), f"invalid JSON ({exc})") from None


def save_density(rho: DensityMatrix, path: str | Path | None):
    write_json(density_to_dict(rho), path)


def load_density(path: str | Path) -> DensityMatrix:
    return density_from_dict(read_json(path))


# -- counts --------------------------------------------------------------------

def set_flavor(settings: Sequence[MeasurementSetting]) -> str:
    d = settings[0].dims[0]
    labels = {lab for s in settings for lab in s.id}
    if labels == set(analyzer_labels(d, True)):
        return "overcomplete"
    if labels == set(analyzer_labels(d, False)):
        return "minimal"
    return "custom"


def counts_to_dict(records: Sequence[CountRecord], dims: Sequence[int], flavor: str) -> dict:
    shots = {r.shots for r in records}
    common = shots.pop() if len(shots) == 1 else None
    out_records = []
    for r in records:
        rec = {"setting": list(r.setting), "count": r.count}
        if common is None:
            rec["shots"] = r.shots
        out_records.append(rec)
    out = {"schema": f"counts/{SCHEMA_VERSION}", "dims": list(dims), "set": flavor}
    if common is not None:
        out["shots"] = common
    out["records"] = out_records
    return out


def counts_from_dict(obj: dict, path: str = "$") -> tuple[list[CountRecord], tuple[int, ...]]:
    _check_schema(obj, "counts", path)
    dims = _require(obj, "dims", path)
    if not isinstance(dims, list) or not all(isinstance(d, int) for d in dims):
        raise SchemaError(f"{path}.dims", "must be a list of integers")
    default = obj.get("shots")
    records = _require(obj, "records", path)
    if not isinstance(records, list):
        raise SchemaError(f"{path}.records", "must be a list")
    out = []
    for i, rec in enumerate(records):
        p = f"{path}.records[{i}]"
        setting = _require(rec, "setting", p)
        count = _require(rec, "count", p)
        shots = rec.get("shots", default)
        if not (isinstance(setting, list) and len(setting) == len(dims)
                and all(isinstance(s, str) for s in setting)):
            raise SchemaError(f"{p}.setting", f"expected {len(dims)} analyzer labels")
        if not isinstance(count, int) or count < 0:
            raise SchemaError(f"{p}.count", "must be a non-negative integer")
        if not isinstance(shots, int) or shots <= 0:
            raise SchemaError(f"{p}.shots", "missing or non-positive shots")
        out.append(CountRecord(tuple(setting), count, shots))
    return out, tuple(dims)


def settings_for(records: Sequence[CountRecord], dims: Sequence[int]) -> list[MeasurementSetting]:
    """Measurement settings named by a set of records."""
    from .tomography import setting
    seen = {}
    for r in records:
        if r.setting not in seen:
            seen[r.setting] = setting(r.setting, dims)
    return list(seen.values())


def default_settings(dims: Sequence[int], flavor: str) -> list[MeasurementSetting]:
    if len(set(dims)) != 1:
        raise ValueError("all arms must have the same dimension")
    return measurement_set(dims[0], len(dims), overcomplete=(flavor == "overcomplete"))


# -- curves and rasters ----------------------------------------------------------

def write_curves_csv(rows, path: str | Path | None):
    lines = ["curve,param,K,C"]
    lines += [f"{name},{float(param)!r},{float(K)!r},{float(C)!r}" for name, param, K, C in rows]
    text = "\n".join(lines) + "\n"
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)


def read_curves_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{"curve": r["curve"], "param": float(r["param"]), "K": float(r["K"]),
                 "C": float(r["C"])} for r in csv.DictReader(fh)]


def write_pgm(values: np.ndarray, path: str | Path, lo: float | None = None,
              hi: float | None = None):
    """8-bit binary PGM, linearly scaling [lo, hi] onto [0, 255]."""
    a = np.asarray(values, dtype=float)
    lo = a.min() if lo is None else lo
    hi = a.max() if hi is None else hi
    scaled = np.zeros_like(a) if hi <= lo else (a - lo) / (hi - lo)
    img = np.clip(np.rint(scaled * 255), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if not m:
        raise SchemaError(str(path), "not a binary PGM")
    w, h = int(m.group(1)), int(m.group(2))
    return np.frombuffer(data[m.end(): m.end() + w * h], dtype=np.uint8).reshape(h, w)
