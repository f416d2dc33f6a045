"""JSON documents: field and modulus descriptions, and the result writer.

Complex numbers are always ``[re, im]`` pairs; series terms are
``[m, n, re, im]`` rows.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import BiSeries, CoeffTable
from .geometry import FormalClass
from .leaf import DulacField

__all__ = [
    "InputError",
    "load_json",
    "parse_complex",
    "parse_field",
    "parse_modulus",
    "parse_series_list",
    "parse_int",
    "table_document",
    "field_document",
    "modulus_document",
    "complex_pair",
    "round_sig",
    "dumps",
]


class InputError(ValueError):
    """Validation failure, with the offending field in the message."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(str(path), f"cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def _need(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise InputError(where, "expected a JSON object")
    if key not in doc:
        raise InputError(f"{where}.{key}", "missing")
    return doc[key]


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def parse_complex(v, where: str) -> complex:
    if _is_number(v):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(_is_number(a) for a in v):
        return complex(v[0], v[1])
    raise InputError(where, "expected [re, im]")


def parse_int(v, where: str, minimum: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise InputError(where, "expected an integer")
    v = int(v)
    if minimum is not None and v < minimum:
        raise InputError(where, f"must be >= {minimum}")
    return v


def parse_series_list(rows, where: str) -> BiSeries:
    if not isinstance(rows, list):
        raise InputError(where, "expected a list of [m, n, re, im]")
    terms: dict = {}
    for i, row in enumerate(rows):
        w = f"{where}[{i}]"
        if not isinstance(row, list) or len(row) != 4 or not all(_is_number(a) for a in row):
            raise InputError(w, "expected [m, n, re, im]")
        m = parse_int(row[0], f"{w}[0]", 0)
        n = parse_int(row[1], f"{w}[1]", 0)
        terms[(m, n)] = terms.get((m, n), 0j) + complex(row[2], row[3])
    return BiSeries(terms)


def parse_field(doc: dict, where: str = "input") -> DulacField:
    """``{"k", "mu", "U"?, "R"?, "sigma"?}`` to a validated :class:`DulacField`."""
    k = parse_int(_need(doc, "k", where), f"{where}.k", 1)
    mu = parse_complex(_need(doc, "mu", where), f"{where}.mu")
    U = parse_series_list(doc["U"], f"{where}.U") if doc.get("U") is not None else None
    R = parse_series_list(doc.get("R") or [], f"{where}.R")
    sigma = parse_int(doc["sigma"], f"{where}.sigma", 0) if doc.get("sigma") is not None else None
    if U is not None and U(0.0, 0.0) == 0:
        raise InputError(f"{where}.U", "U(0, 0) must be non-zero")
    if any(n == 0 for _, n in R.terms):
        raise InputError(f"{where}.R", "R(x, 0) must vanish (pure-x term present)")
    try:
        return DulacField.from_series(k, mu, U, R, sigma)
    except ValueError as exc:
        raise InputError(where, str(exc)) from exc


def _parse_table(doc, k: int, where: str) -> np.ndarray:
    if not isinstance(doc, dict):
        raise InputError(where, "expected an object keyed by sector index")
    rows = []
    for j in range(k):
        if str(j) not in doc:
            raise InputError(f"{where}.{j}", "missing sector")
        vals = doc[str(j)]
        if not isinstance(vals, list) or not vals:
            raise InputError(f"{where}.{j}", "expected a non-empty list of [re, im]")
        rows.append([parse_complex(v, f"{where}.{j}[{i}]") for i, v in enumerate(vals)])
    D = max(len(r) for r in rows)
    out = np.zeros((k, D), dtype=complex)
    for j, r in enumerate(rows):
        out[j, : len(r)] = r
    return out


def parse_modulus(doc: dict, where: str = "input") -> tuple[int, complex, CoeffTable | None, CoeffTable | None]:
    """``{"k", "mu", "orbital"?, "temporal"?}``; each table maps ``"j"`` to orders 1..D."""
    k = parse_int(_need(doc, "k", where), f"{where}.k", 1)
    mu = parse_complex(_need(doc, "mu", where), f"{where}.mu")
    try:
        FormalClass(k, mu)
    except ValueError as exc:
        raise InputError(f"{where}.mu", str(exc)) from exc
    orb = doc.get("orbital")
    tem = doc.get("temporal")
    orb = CoeffTable(k, _parse_table(orb, k, f"{where}.orbital")) if orb is not None else None
    tem = CoeffTable(k, _parse_table(tem, k, f"{where}.temporal")) if tem is not None else None
    return k, mu, orb, tem


def round_sig(v: float, digits: int = 15) -> float:
    if v == 0 or not math.isfinite(v):
        return 0.0 if v == 0 else v
    return float(f"{v:.{digits}g}")


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [round_sig(z.real), round_sig(z.imag)]


def table_document(table: CoeffTable) -> dict:
    return {str(j): [complex_pair(z) for z in table.entries[j]] for j in range(table.k)}


def series_document(s: BiSeries) -> list:
    return [[m, n, round_sig(c.real), round_sig(c.imag)] for (m, n), c in s.terms.items()]


def field_document(field: DulacField, U: BiSeries | None = None) -> dict:
    U = U if U is not None else field.U
    return {
        "k": field.k,
        "mu": complex_pair(field.mu),
        "sigma": field.formal.sigma,
        "U": series_document(U) if U is not None else [[0, 0, 1.0, 0.0]],
        "R": series_document(field.R),
    }


def modulus_document(k: int, mu: complex, orbital: CoeffTable | None, temporal: CoeffTable | None) -> dict:
    out: dict = {"k": k, "mu": complex_pair(mu)}
    if orbital is not None:
        out["orbital"] = table_document(orbital)
    if temporal is not None:
        out["temporal"] = table_document(temporal)
    return out


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return round_sig(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_pair(obj)
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2) + "\n"
