"""JSON exchange formats for matrices, families, channels and reports.

Floats are written with 17 significant digits so that identical runs give
byte-identical files and every value round-trips exactly.
"""

import csv
import io
import json
import math

import numpy as np

from .channels import KrausChannel
from .errors import BadFamily, MixedFSError
from .states import (
    family_constant,
    family_eigenvalue_path,
    family_ginibre_path,
    family_linear,
    family_unitary_orbit,
)


class FormatError(MixedFSError, ValueError):
    """Malformed input document."""


# -- numbers and JSON text ------------------------------------------------


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = f"{x:.17g}"
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def to_plain(obj):
    """Convert numpy containers and scalars to built-in Python types."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return matrix_to_json(obj) if obj.ndim == 2 else {"re": obj.real.tolist(), "im": obj.imag.tolist()}
        return obj.tolist()
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _emit(obj, out, indent, level):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + pad)
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(sep)
            out.append(json.dumps(str(k)) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        # numeric rows stay on one line
        if not obj or all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            out.append("[" + ", ".join(format_float(v) if isinstance(v, float) else str(v) for v in obj) + "]")
            return
        out.append("[" + pad)
        for i, v in enumerate(obj):
            if i:
                out.append(sep)
            _emit(v, out, indent, level + 1)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    out = []
    _emit(to_plain(obj), out, indent, 0)
    return "".join(out) + "\n"


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def load_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc


# -- matrices -------------------------------------------------------------


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise FormatError("matrix must be two-dimensional")
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def _check_keys(doc, allowed, what):
    if not isinstance(doc, dict):
        raise FormatError(f"{what} must be a JSON object")
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise FormatError(f"unknown key(s) in {what}: {', '.join(extra)}")


def matrix_from_json(doc, square=True):
    _check_keys(doc, ("dim", "re", "im"), "matrix")
    if "re" not in doc:
        raise FormatError("matrix needs a 're' field")
    try:
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"matrix entries must be numbers: {exc}") from exc
    if re.ndim != 2 or re.shape != im.shape:
        raise FormatError("'re' and 'im' must be equal-shape 2-d arrays")
    if square and re.shape[0] != re.shape[1]:
        raise FormatError(f"matrix must be square, got {re.shape}")
    if "dim" in doc and doc["dim"] != re.shape[0]:
        raise FormatError(f"'dim' = {doc['dim']} disagrees with {re.shape[0]} rows")
    return re + 1j * im


def _vector(doc, what):
    try:
        v = np.asarray(doc, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what} must be a list of numbers") from exc
    if v.ndim != 1:
        raise FormatError(f"{what} must be one-dimensional")
    return v


# -- families -------------------------------------------------------------

FAMILY_KEYS = {
    "unitary_orbit": (("rho0", "H"), ()),
    "eigenvalue_path": (("offset", "slope"), ("basis", "interval")),
    "ginibre_path": (("G0", "directions"), ()),
    "linear": (("rho0", "tangents"), ()),
    "constant": (("rho0",), ("params",)),
}


def family_from_json(doc):
    """Build a :class:`StateFamily` from its JSON description."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise FormatError("family description needs a 'kind' field")
    kind = doc["kind"]
    if kind == "matrix_table":
        raise BadFamily("matrix_table families are not exactly evaluable; use an analytic kind")
    if kind not in FAMILY_KEYS:
        raise BadFamily(f"unknown family kind {kind!r}")
    required, optional = FAMILY_KEYS[kind]
    _check_keys(doc, ("kind",) + required + optional, f"{kind} family")
    missing = [k for k in required if k not in doc]
    if missing:
        raise FormatError(f"{kind} family is missing {', '.join(missing)}")
    if kind == "unitary_orbit":
        return family_unitary_orbit(matrix_from_json(doc["rho0"]), matrix_from_json(doc["H"]))
    if kind == "eigenvalue_path":
        basis = matrix_from_json(doc["basis"]) if "basis" in doc else None
        interval = tuple(_vector(doc.get("interval", [0.0, 1.0]), "interval"))
        if len(interval) != 2:
            raise FormatError("interval must have two entries")
        return family_eigenvalue_path(_vector(doc["offset"], "offset"), _vector(doc["slope"], "slope"),
                                      basis, interval)
    if kind == "ginibre_path":
        return family_ginibre_path(matrix_from_json(doc["G0"]),
                                   [matrix_from_json(d) for d in _list(doc["directions"], "directions")])
    if kind == "linear":
        return family_linear(matrix_from_json(doc["rho0"]),
                             [matrix_from_json(d) for d in _list(doc["tangents"], "tangents")])
    params = doc.get("params", 1)
    if not isinstance(params, int) or params < 1:
        raise FormatError("params must be a positive integer")
    return family_constant(matrix_from_json(doc["rho0"]), params)


def _list(x, what):
    if not isinstance(x, list):
        raise FormatError(f"{what} must be a list")
    return x


def family_to_json(family):
    return to_plain(family.description)


# -- channels -------------------------------------------------------------


def channel_to_json(ch):
    return {"in_dim": ch.in_dim, "out_dim": ch.out_dim, "kraus": [matrix_to_json(a) for a in ch.kraus]}


def channel_from_json(doc):
    _check_keys(doc, ("in_dim", "out_dim", "kraus"), "channel")
    ops = [matrix_from_json(a, square=False) for a in _list(doc.get("kraus"), "kraus")]
    ch = KrausChannel(tuple(ops))
    for key, val in (("in_dim", ch.in_dim), ("out_dim", ch.out_dim)):
        if key in doc and doc[key] != val:
            raise FormatError(f"{key} = {doc[key]} disagrees with the Kraus operators ({val})")
    return ch


# -- tables ---------------------------------------------------------------


def rows_to_csv(rows):
    """CSV text for a list of flat dicts; the header is the first row's keys."""
    if not rows:
        return ""
    buf = io.StringIO()
    fields = list(rows[0])
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in rows:
        writer.writerow([_cell(r.get(k)) for k in fields])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return v
