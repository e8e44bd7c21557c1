"""CSV output of sweep results."""
from __future__ import annotations

import csv
import io
from pathlib import Path

HEADER = [
    "f_L_GHz",
    "dt1_ns",
    "P_total_fW",
    "P1_fW",
    "P2_fW",
    "P_dimensionless",
    "rho_ee_p",
    "winding",
    "purity_min",
    "converged",
    "cycles",
]

_FW = 1e15


def _fw(p):
    return None if p is None else p * _FW


def to_row(point):
    """Values of one point in CSV units (fW for powers)."""
    return {
        "f_L_GHz": point.f_L,
        "dt1_ns": point.dt1,
        "P_total_fW": _fw(point.P_total),
        "P1_fW": _fw(point.P1),
        "P2_fW": _fw(point.P2),
        "P_dimensionless": point.P_dimensionless,
        "rho_ee_p": point.rho_ee_p,
        "winding": point.winding,
        "purity_min": point.purity_min,
        "converged": point.converged,
        "cycles": point.cycles,
    }


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def format_csv(points):
    buf = io.StringIO()
    buf.write(",".join(HEADER) + "\n")
    for p in points:
        row = to_row(p)
        buf.write(",".join(_fmt(row[k]) for k in HEADER) + "\n")
    return buf.getvalue()


def write_csv(results, path):
    """Write a result set (or a list of points) to ``path``."""
    points = getattr(results, "points", results)
    if not points:
        raise ValueError("nothing to write: empty result set")
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_csv(points))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def _parse(key, text):
    if text == "":
        return None
    if key == "converged":
        return text == "true"
    if key in ("winding", "cycles"):
        return int(text)
    return float(text)


def read_csv(path):
    """Rows as dicts in CSV units; empty fields become ``None``."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != HEADER:
            raise ValueError(f"unexpected header in {path}")
        return [{k: _parse(k, v) for k, v in zip(HEADER, row)} for row in reader]
