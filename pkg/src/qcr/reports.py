"""Serialization of scan results and run reports."""

from __future__ import annotations

import csv
import io
import json
import math

from .spectral import SpectralReport

CSV_DIGITS = 12


def _num(x, digits: int = CSV_DIGITS) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return f"{float(x):.{digits}g}"


def csv_header(d: int) -> list[str]:
    return [f"xi_{i + 1}" for i in range(d)] + [
        "N", "degree", "dim", "lambda_min", "paper_bound", "margin", "pass", "wall_ms"]


def csv_row(r: SpectralReport, timing: bool = True) -> list[str]:
    passed = "" if r.passed is None else str(r.passed).lower()
    lam = _num(r.lambda_min)
    # margin from the printed value so both columns round consistently
    margin = None if r.margin is None else float(lam) - r.paper_bound
    return [_num(x) for x in r.xi] + [
        str(r.N), str(r.degree), str(r.dim), lam, _num(r.paper_bound),
        _num(margin), passed, f"{r.wall_ms:.3f}" if timing else ""]


def spectral_csv(reports, d: int, timing: bool = True) -> str:
    """CSV text for a list of reports; ``timing=False`` blanks ``wall_ms``.

    Floats carry 12 significant digits so repeated runs agree byte for byte
    even when the eigensolver differs in the last bits.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(d))
    for r in reports:
        w.writerow(csv_row(r, timing))
    return buf.getvalue()


def _clean(obj):
    """Replace non-finite floats by strings so the JSON is standard."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def to_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def strip_timing(obj, keys=("wall_ms", "timing")):
    """Copy of a JSON-like object with timing fields removed."""
    if isinstance(obj, dict):
        return {k: strip_timing(v, keys) for k, v in obj.items() if k not in keys}
    if isinstance(obj, list):
        return [strip_timing(v, keys) for v in obj]
    return obj
