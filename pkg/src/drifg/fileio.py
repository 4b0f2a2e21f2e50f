"""On-disk formats: binary images, PGM phase exports, key = value configs.

Image file layout (little-endian)::

    bytes 0-7    magic b"DRIFGv01"
    bytes 8-11   u32 rows
    bytes 12-15  u32 cols
    byte  16     u8 dtype tag (0 = complex128 interleaved re/im, 1 = float64)
    bytes 17-19  reserved, zero
    bytes 20-    row-major payload
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

MAGIC = b"DRIFGv01"
_HEADER = struct.Struct("<8sIIB3s")
TAG_COMPLEX = 0
TAG_REAL = 1
_DTYPES = {TAG_COMPLEX: np.dtype("<c16"), TAG_REAL: np.dtype("<f8")}


class ConfigError(ValueError):
    """Bad or unknown configuration key/value."""


class FormatError(ValueError):
    """Malformed file or inconsistent dimensions."""


def write_image(path, data) -> None:
    data = np.asarray(data)
    if data.ndim != 2:
        raise FormatError(f"expected a 2-D array, got shape {data.shape}")
    tag = TAG_COMPLEX if np.iscomplexobj(data) else TAG_REAL
    payload = np.ascontiguousarray(data, dtype=_DTYPES[tag])
    rows, cols = data.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols, tag, b"\0\0\0"))
        fh.write(payload.tobytes(order="C"))


def read_image(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, rows, cols, tag, reserved = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if tag not in _DTYPES:
        raise FormatError(f"{path}: unknown dtype tag {tag}")
    if reserved != b"\0\0\0":
        raise FormatError(f"{path}: reserved bytes not zero")
    dtype = _DTYPES[tag]
    expected = rows * cols * dtype.itemsize
    body = raw[_HEADER.size:]
    if len(body) != expected:
        raise FormatError(f"{path}: payload is {len(body)} bytes, expected {expected}")
    return np.frombuffer(body, dtype=dtype).reshape(rows, cols).astype(dtype.newbyteorder("="))


def write_phase_pgm(path, phase) -> None:
    """16-bit PGM with (-pi, pi] mapped linearly onto [0, 65535]."""
    phase = np.asarray(phase, dtype=np.float64)
    levels = np.rint((phase + np.pi) / (2 * np.pi) * 65535)
    _write_pgm(path, np.clip(levels, 0, 65535).astype(">u2"))


def write_real_pgm(path, values) -> tuple[float, float]:
    """16-bit PGM of an arbitrary real field plus a ``.txt`` min/max sidecar."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo
    levels = np.zeros(values.shape) if span == 0 else np.rint((values - lo) / span * 65535)
    _write_pgm(path, levels.astype(">u2"))
    Path(str(path) + ".txt").write_text(f"min = {lo!r}\nmax = {hi!r}\n")
    return lo, hi


def _write_pgm(path, data):
    rows, cols = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n65535\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5" or parts[2] != b"65535":
        raise FormatError(f"{path}: not a 16-bit binary PGM")
    cols, rows = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=">u2").reshape(rows, cols)


def write_kv(path, items: dict) -> None:
    lines = [f"{k} = {_fmt(v)}" for k, v in items.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_kv(path_or_text, *, is_text: bool = False) -> dict[str, str]:
    text = path_or_text if is_text else Path(path_or_text).read_text()
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = value
    return out


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "inf" if v == math.inf else repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def _parse_bool(s):
    low = s.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_fraction(s):
    frac = Fraction(s)
    return str(frac)


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of a pipeline run.  Key names are the config-file keys."""

    rows: int = 256
    cols: int = 256
    fringe: str = "hills"
    fringe_max_gradient: float = 1.0
    fringe_count: int = 3
    fringe_width: float = 0.15
    fringe_direction: float = 0.0
    flat_row: float = 0.0
    flat_col: float = 0.5
    amplitude_law: str = "rayleigh"
    amplitude_sigma: float = 1.0
    backscatter_depth: float = 0.0
    alpha: str = "1/2"
    beta: str = "1/2"
    snr_db: float = math.inf
    wavelet: str = "db4"
    wavelet_levels: int = 4
    lam: float = 1e-4
    max_iters: int = 200
    step: float = 1.0
    rel_tol: float = 0.0
    normalize_input: bool = True
    seed: int = 0
    reference: str = "truth"
    coherence_rows: int = 8
    coherence_cols: int = 8
    coherence_draws: int = 50
    coherence_levels: int = 1
    input_dir: str = ""

    def __post_init__(self):
        if self.reference not in ("truth", "conventional"):
            raise ConfigError(f"reference must be 'truth' or 'conventional', got {self.reference!r}")
        for name in ("alpha", "beta"):
            try:
                object.__setattr__(self, name, _parse_fraction(getattr(self, name)))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"{name}: {exc}") from None

    @classmethod
    def from_dict(cls, raw: dict[str, str]) -> "PipelineConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in raw.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            typ = known[key].type
            try:
                if typ == "int":
                    kwargs[key] = int(value)
                elif typ == "float":
                    kwargs[key] = float(value)
                elif typ == "bool":
                    kwargs[key] = _parse_bool(value)
                else:
                    kwargs[key] = value
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        return cls.from_dict(read_kv(text, is_text=True))

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        try:
            return cls.from_dict(read_kv(path))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_text(self) -> str:
        return "".join(f"{k} = {_fmt(v)}\n" for k, v in self.to_dict().items())
