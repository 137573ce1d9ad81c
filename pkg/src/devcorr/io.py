"""Text formats for matrices, time series, correlation tables and fit reports.

All numbers are written with 17 significant digits so that doubles round-trip
exactly. Files are written atomically: to a temporary file in the target
directory which is then renamed over the destination.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import DeviationMatrix

DEVIATION_HEADER = "# deviation 4x4"
NUM_FMT = "%.17g"


def fmt(x: float) -> str:
    return NUM_FMT % (x + 0.0)  # no "-0"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# deviation matrix ----------------------------------------------------------


def format_deviation(d) -> str:
    m = np.asarray(d, dtype=complex)
    lines = [DEVIATION_HEADER]
    for row in m:
        lines.append(" ".join(f"{fmt(z.real)} {fmt(z.imag)}" for z in row))
    return "\n".join(lines) + "\n"


def parse_deviation(text: str) -> DeviationMatrix:
    """Parse the 4x4 deviation format; raises ``ValueError`` (or one of its
    ``InvalidDeviationMatrix`` subclasses) on malformed input."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != DEVIATION_HEADER:
        raise ValueError(f"expected first line {DEVIATION_HEADER!r}")
    rows = lines[1:]
    if len(rows) != 4:
        raise ValueError(f"expected 4 matrix rows, got {len(rows)}")
    m = np.empty((4, 4), dtype=complex)
    for i, row in enumerate(rows):
        vals = row.split()
        if len(vals) != 8:
            raise ValueError(f"row {i} has {len(vals)} numbers, expected 8 (re im pairs)")
        try:
            nums = [float(v) for v in vals]
        except ValueError as exc:
            raise ValueError(f"row {i}: {exc}") from None
        m[i] = np.array(nums[0::2]) + 1j * np.array(nums[1::2])
    return DeviationMatrix(m)


def write_deviation(path, d) -> None:
    atomic_write_text(path, format_deviation(d))


def read_deviation(path) -> DeviationMatrix:
    return parse_deviation(Path(path).read_text())


# time series ---------------------------------------------------------------

SERIES_COLUMNS = ["t_s"] + [f"{p}_{i}{j}" for i in range(4) for j in range(4) for p in ("re", "im")]


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def format_series(series) -> str:
    rows = []
    for t, d in series:
        m = np.asarray(d, dtype=complex).ravel()
        vals = np.column_stack([m.real, m.imag]).ravel()
        rows.append([fmt(t)] + [fmt(v) for v in vals])
    return _csv_text(SERIES_COLUMNS, rows)


def _data_lines(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def parse_series(text: str) -> list[tuple[float, DeviationMatrix]]:
    reader = csv.reader(_data_lines(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != SERIES_COLUMNS:
        raise ValueError("time-series CSV must start with header t_s,re_00,im_00,...,re_33,im_33")
    out = []
    for n, row in enumerate(reader, start=1):
        if len(row) != len(SERIES_COLUMNS):
            raise ValueError(f"row {n} has {len(row)} fields, expected {len(SERIES_COLUMNS)}")
        vals = np.array([float(v) for v in row])
        m = (vals[1::2] + 1j * vals[2::2]).reshape(4, 4)
        out.append((float(vals[0]), DeviationMatrix(m)))
    return out


def write_series(path, series) -> None:
    atomic_write_text(path, format_series(series))


def read_series(path) -> list[tuple[float, DeviationMatrix]]:
    return parse_series(Path(path).read_text())


def looks_like_series(text: str) -> bool:
    lines = _data_lines(text)
    return bool(lines) and lines[0].startswith("t_s")


# correlation table ---------------------------------------------------------

CORRELATION_COLUMNS = ["t_s", "I", "K", "Q", "theta_A", "phi_A", "theta_B", "phi_B"]
EXACT_COLUMNS = ["I_exact_bits", "D_exact_bits", "C_exact_bits"]


def format_correlations(rows: Sequence[dict], units: str, exact: bool = False, epsilon: float | None = None) -> str:
    header = CORRELATION_COLUMNS + (EXACT_COLUMNS if exact else [])
    comments = [f"I, K, Q in units of {units}"]
    if exact:
        comments.append(f"exact columns in bits at epsilon = {fmt(epsilon)}; D and C for a measurement on B")
    body = [[fmt(r[c]) for c in header] for r in rows]
    return _csv_text(header, body, comments)


def parse_correlations(text: str) -> list[dict[str, float]]:
    reader = csv.DictReader(_data_lines(text))
    return [{k: float(v) for k, v in row.items()} for row in reader]


# fit report ----------------------------------------------------------------


def format_report(values: dict[str, float]) -> str:
    return "".join(f"{k} = {fmt(v)}\n" for k, v in values.items())


def parse_key_values(text: str) -> dict[str, str]:
    """``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def format_curves(t, observed: dict[str, np.ndarray], fitted: dict[str, np.ndarray]) -> str:
    """Observed and fitted values of every combination (real and imaginary parts)."""
    header = ["t_s"]
    cols = []
    for name in observed:
        for part, f in (("re", np.real), ("im", np.imag)):
            if part == "im" and not np.iscomplexobj(observed[name]):
                continue
            header += [f"{name}_{part}_obs", f"{name}_{part}_fit"]
            cols += [f(observed[name]), f(fitted[name])]
    rows = [[fmt(t[k])] + [fmt(c[k]) for c in cols] for k in range(len(t))]
    return _csv_text(header, rows)
