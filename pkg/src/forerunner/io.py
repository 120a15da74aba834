"""Plain-text formats: 17-significant-digit CSV tables, key-value configs and
a small deterministic JSON writer.

Every float leaves this module through :func:`fmt`, so outputs are stable
byte for byte across runs on the same platform.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .source import ComplexField, Provenance

FIELD_HEADER = ("x", "t", "re_psi", "im_psi", "density", "provenance")
TIMES_HEADER = ("x", "tau_c", "tau_abs", "tau_T", "plateau", "method")
SPECTROGRAM_HEADER = ("t_center", "omega", "power")


class SpecError(ValueError):
    """Malformed or incomplete configuration / scenario file."""


def fmt(v: float) -> str:
    """17 significant digits; inf and nan spelled the way Python parses them."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _write_rows(path: Path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_field_csv(field: ComplexField, path) -> Path:
    """Row-major dump, x outer and t inner."""
    prov = Provenance(field.provenance).value
    rows = []
    for i, x in enumerate(field.x_samples):
        for j, t in enumerate(field.t_samples):
            v = complex(field.values[i, j])
            rows.append((fmt(x), fmt(t), fmt(v.real), fmt(v.imag), fmt(abs(v) ** 2), prov))
    return _write_rows(path, FIELD_HEADER, rows)


def read_field_csv(path) -> ComplexField:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise SpecError(f"{path}: empty field table")
    xs = sorted({float(r["x"]) for r in rows})
    ts = sorted({float(r["t"]) for r in rows})
    if len(rows) != len(xs) * len(ts):
        raise SpecError(f"{path}: not a full x-by-t table")
    vals = np.array([complex(float(r["re_psi"]), float(r["im_psi"])) for r in rows])
    provs = {r["provenance"] for r in rows}
    if len(provs) != 1:
        raise SpecError(f"{path}: mixed provenance {sorted(provs)}")
    return ComplexField(np.array(xs), np.array(ts), vals.reshape(len(xs), len(ts)), Provenance(provs.pop()))


def write_times_csv(times: Iterable, path) -> Path:
    """CharacteristicTimes rows; ``None`` entries (failed points) are skipped."""
    rows = [
        (fmt(c.x), fmt(c.tau_c), fmt(c.tau_abs), fmt(c.tau_T), fmt(c.plateau), getattr(c.method, "value", c.method))
        for c in times if c is not None
    ]
    return _write_rows(path, TIMES_HEADER, rows)


def read_times_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        out = []
        for r in csv.DictReader(fh):
            out.append({k: (r[k] if k == "method" else float(r[k])) for k in TIMES_HEADER})
    return out


def write_spectrogram_csv(spec, path) -> Path:
    rows = [
        (fmt(tc), fmt(w), fmt(p))
        for j, tc in enumerate(spec.t_centers)
        for w, p in zip(spec.omega_bins, spec.power[j])
    ]
    return _write_rows(path, SPECTROGRAM_HEADER, rows)


def write_fixture_table(zs, ws, path) -> Path:
    """Whitespace table ``re(z) im(z) re(w) im(w)``."""
    path = Path(path)
    lines = ["# re(z) im(z) re(w) im(w)"]
    for z, w in zip(zs, ws):
        z, w = complex(z), complex(w)
        lines.append(" ".join(fmt(v) for v in (z.real, z.imag, w.real, w.imag)))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_fixture_table(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, comments="#", ndmin=2)
    return data[:, 0] + 1j * data[:, 1], data[:, 2] + 1j * data[:, 3]


# -- key-value configs ------------------------------------------------------

def _parse_value(raw: str) -> Any:
    raw = raw.strip()
    if "," in raw:
        return [_parse_value(p) for p in raw.split(",") if p.strip()]
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_kv(text: str, source: str = "<string>") -> dict:
    """``key = value`` per line; ``#`` starts a comment; commas make lists."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{source}:{n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key or not val:
            raise SpecError(f"{source}:{n}: empty key or value")
        if key in out:
            raise SpecError(f"{source}:{n}: duplicate key {key!r}")
        out[key] = _parse_value(val)
    return out


def _kv_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ", ".join(_kv_value(x) for x in v) + ("," if len(v) == 1 else "")
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def dump_kv(mapping: Mapping) -> str:
    return "".join(f"{k} = {_kv_value(v)}\n" for k, v in mapping.items())


def load_mapping(path) -> dict:
    """JSON if the file parses as a JSON object, otherwise key-value text."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise SpecError(f"{path}: top level must be an object")
        return data
    return parse_kv(text, str(path))


# -- deterministic JSON -------------------------------------------------------

def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _encode(obj, indent: int, level: int) -> str:
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + _encode(v, indent, level + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, float):
        # JSON has no inf/nan; strings keep the file valid and readable
        return fmt(obj) if math.isfinite(obj) else json.dumps(fmt(obj))
    return json.dumps(obj)


def dumps(obj, indent: int = 2) -> str:
    """Sorted keys, floats at 17 significant digits, non-finite floats as strings."""
    return _encode(_plain(obj), indent, 0) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def read_json(path) -> Any:
    return json.loads(Path(path).read_text())

