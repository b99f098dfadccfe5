"""JSON/CSV input and output with stable, byte-reproducible formatting."""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import tempfile
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .diophantine import RealNumberSpec
from .fields import CoefficientField
from .operator import OperatorSpec, VekuaOperator, preset
from .scalar import GaussianRational, fraction_str, parse_rational


class SpecError(ValueError):
    """Malformed input; ``where`` names the offending field or position."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# output ------------------------------------------------------------------------


def to_jsonable(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, GaussianRational):
        return {"re": fraction_str(obj.re), "im": fraction_str(obj.im)}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, RealNumberSpec):
        return str(obj)
    if isinstance(obj, CoefficientField):
        return field_to_json(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _float_text(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _emit(v, out: list, level: int):
    pad = "  " * (level + 1)
    if v is None:
        out.append("null")
    elif v is True:
        out.append("true")
    elif v is False:
        out.append("false")
    elif isinstance(v, int):
        out.append(str(v))
    elif isinstance(v, float):
        out.append(_float_text(v))
    elif isinstance(v, str):
        out.append(json.dumps(v))
    elif isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{\n")
        for i, k in enumerate(sorted(v)):
            out.append(f"{pad}{json.dumps(k)}: ")
            _emit(v[k], out, level + 1)
            out.append(",\n" if i < len(v) - 1 else "\n")
        out.append("  " * level + "}")
    elif isinstance(v, list):
        if not v:
            out.append("[]")
        elif all(not isinstance(x, (dict, list)) for x in v):
            out.append("[")
            for i, x in enumerate(v):
                _emit(x, out, level)
                if i < len(v) - 1:
                    out.append(", ")
            out.append("]")
        else:
            out.append("[\n")
            for i, x in enumerate(v):
                out.append(pad)
                _emit(x, out, level + 1)
                out.append(",\n" if i < len(v) - 1 else "\n")
            out.append("  " * level + "]")
    else:
        raise TypeError(f"unexpected {type(v).__name__}")


def dumps(obj: Any) -> str:
    """Stable JSON: sorted keys, 17 significant digits, inf/nan as strings."""
    out: list[str] = []
    _emit(to_jsonable(obj), out, 0)
    return "".join(out) + "\n"


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_float_text(c).strip('"') if isinstance(c, float) else c for c in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# input -------------------------------------------------------------------------------


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(path, f"cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def _real(value, where: str):
    if isinstance(value, bool):
        raise SpecError(where, "expected a number or rational string")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return parse_rational(value)
        except ValueError:
            raise SpecError(where, f"not a rational literal: {value!r}") from None
    raise SpecError(where, "expected a number or rational string")


def parse_scalar(value, where: str):
    """{"re": .., "im": ..}, a bare number, or a rational string."""
    if value is None:
        return GaussianRational(0)
    if isinstance(value, dict):
        unknown = set(value) - {"re", "im"}
        if unknown:
            raise SpecError(where, f"unknown keys {sorted(unknown)}")
        re = _real(value.get("re", 0), f"{where}.re")
        im = _real(value.get("im", 0), f"{where}.im")
    elif isinstance(value, list) and len(value) == 2:
        re, im = _real(value[0], f"{where}[0]"), _real(value[1], f"{where}[1]")
    else:
        re, im = _real(value, where), Fraction(0)
    if isinstance(re, Fraction) and isinstance(im, Fraction):
        return GaussianRational(re, im)
    return complex(float(re), float(im))


def parse_pair_arg(text: str, where: str = "argument"):
    """CLI scalar syntax ``re,im`` (or just ``re``)."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) not in (1, 2) or not all(parts):
        raise SpecError(where, f"expected 're,im', got {text!r}")
    vals = []
    for p in parts:
        try:
            vals.append(parse_rational(p))
        except ValueError:
            try:
                vals.append(float(p))
            except ValueError:
                raise SpecError(where, f"not a number: {p!r}") from None
    re, im = vals[0], vals[1] if len(vals) == 2 else Fraction(0)
    if isinstance(re, Fraction) and isinstance(im, Fraction):
        return GaussianRational(re, im)
    return complex(float(re), float(im))


def parse_eta(text, where: str = "eta") -> RealNumberSpec:
    try:
        if isinstance(text, (int, float)) and not isinstance(text, bool):
            text = str(text)
        if ":" not in text and text not in ("e", "pi"):
            q = parse_rational(text)
            return RealNumberSpec.rational(q.numerator, q.denominator)
        return RealNumberSpec.parse(text)
    except (ValueError, TypeError) as exc:
        raise SpecError(where, str(exc)) from None


def parse_operator(data, where: str = "spec") -> tuple[VekuaOperator, Optional[RealNumberSpec]]:
    """Operator from the JSON schema or the preset form.  Returns the operator
    and the eta spec when one was given."""
    if not isinstance(data, dict):
        raise SpecError(where, "expected a JSON object")
    eta = parse_eta(data["eta"], f"{where}.eta") if "eta" in data else None
    A = parse_scalar(data.get("A"), f"{where}.A")
    B = parse_scalar(data.get("B"), f"{where}.B")
    if "preset" in data:
        name = data["preset"]
        kw = {"A": A, "B": B}
        if "dim" in data:
            kw["dim"] = data["dim"]
        if eta is not None:
            kw["eta"] = eta
        if "C" in data:
            kw["C"] = parse_scalar(data["C"], f"{where}.C")
        try:
            return preset(name, **kw), eta
        except (ValueError, TypeError) as exc:
            raise SpecError(f"{where}.preset", str(exc)) from None
    for key in ("dim", "terms"):
        if key not in data:
            raise SpecError(where, f"missing field {key!r}")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SpecError(f"{where}.dim", "must be a positive integer")
    if not isinstance(data["terms"], list) or not data["terms"]:
        raise SpecError(f"{where}.terms", "must be a non-empty list")
    terms = {}
    for i, t in enumerate(data["terms"]):
        tw = f"{where}.terms[{i}]"
        if not isinstance(t, dict) or "alpha" not in t:
            raise SpecError(tw, "expected an object with 'alpha'")
        alpha = t["alpha"]
        if not isinstance(alpha, list) or len(alpha) != dim or not all(
            isinstance(a, int) and not isinstance(a, bool) and a >= 0 for a in alpha
        ):
            raise SpecError(f"{tw}.alpha", f"must be {dim} non-negative integers")
        if sum(alpha) == 0:
            raise SpecError(f"{tw}.alpha", "constant terms belong in A")
        if tuple(alpha) in terms:
            raise SpecError(f"{tw}.alpha", "duplicate multi-index")
        terms[tuple(alpha)] = parse_scalar({k: t[k] for k in ("re", "im") if k in t}, tw)
    try:
        return VekuaOperator(OperatorSpec(dim, terms), A, B), eta
    except ValueError as exc:
        raise SpecError(where, str(exc)) from None


def operator_to_json(P: VekuaOperator) -> dict:
    return {
        "dim": P.dim,
        "terms": [dict(alpha=list(a), **_scalar_json(c)) for a, c in P.L.terms.items()],
        "A": _scalar_json(P.A),
        "B": _scalar_json(P.B),
    }


def _scalar_json(c) -> dict:
    if isinstance(c, GaussianRational):
        return {"re": fraction_str(c.re), "im": fraction_str(c.im)}
    c = complex(c)
    return {"re": c.real, "im": c.imag}


def parse_field(data, where: str = "field") -> CoefficientField:
    if not isinstance(data, dict) or "dim" not in data or "coeffs" not in data:
        raise SpecError(where, "expected {'dim': n, 'coeffs': [...]}")
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise SpecError(f"{where}.dim", "must be a positive integer")
    coeffs = {}
    for i, c in enumerate(data["coeffs"]):
        cw = f"{where}.coeffs[{i}]"
        xi = c.get("xi") if isinstance(c, dict) else None
        if not isinstance(xi, list) or len(xi) != dim or not all(isinstance(v, int) for v in xi):
            raise SpecError(f"{cw}.xi", f"must be {dim} integers")
        if tuple(xi) in coeffs:
            raise SpecError(f"{cw}.xi", "duplicate frequency")
        coeffs[tuple(xi)] = parse_scalar({k: c[k] for k in ("re", "im") if k in c}, cw)
    return CoefficientField(dim, coeffs, real_valued=bool(data.get("real_valued", False)))


def field_to_json(f: CoefficientField) -> dict:
    return {
        "dim": f.dim,
        "coeffs": [dict(xi=list(xi), **_scalar_json(f[xi])) for xi in f.support()],
    }


def parse_grid(data, where: str = "grid") -> np.ndarray:
    """{"shape": [N1, ...], "re": [...], "im": [...]} in row-major order."""
    shape = data.get("shape")
    if not isinstance(shape, list) or not all(isinstance(s, int) and s > 0 for s in shape):
        raise SpecError(f"{where}.shape", "must be a list of positive integers")
    size = int(np.prod(shape))
    re = data.get("re")
    if not isinstance(re, list) or len(re) != size:
        raise SpecError(f"{where}.re", f"must hold {size} numbers")
    im = data.get("im", [0.0] * size)
    if not isinstance(im, list) or len(im) != size:
        raise SpecError(f"{where}.im", f"must hold {size} numbers")
    try:
        arr = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
    except (TypeError, ValueError):
        raise SpecError(where, "values must be numbers") from None
    return arr.reshape(shape)


def grid_to_json(values: np.ndarray) -> dict:
    flat = np.asarray(values, dtype=complex).ravel()
    return {"shape": list(values.shape), "re": [float(v) for v in flat.real], "im": [float(v) for v in flat.imag]}


def outcome_to_json(outcome) -> dict:
    return {
        "solution": field_to_json(outcome.solution),
        "singular_pairs": [
            {"xi": list(s.xi), "handling": s.handling.value, "defect": float(s.defect)} for s in outcome.singular_pairs
        ],
        "residual": float(outcome.residual),
        "warnings": list(outcome.warnings),
        "pairs_solved": outcome.pairs_solved,
        "incompatible": [list(x) for x in outcome.incompatible],
    }


def witness_to_json(w) -> dict:
    return {
        "kind": w.kind.value,
        "branch": w.branch,
        "frequencies": [list(x) for x in w.frequencies],
        "f_hat": field_to_json(w.f_hat),
        "induced_u_hat": field_to_json(w.induced_u_hat),
        "diagnostics": [
            {"norm": r.norm, "abs_f": r.abs_f, "abs_u": r.abs_u, "abs_u_minus": r.abs_u_minus} for r in w.diagnostics
        ],
        "consistent": w.consistent,
        "dropped": [list(x) for x in w.dropped],
        "flags": list(w.flags),
    }


def decay_to_json(report) -> list:
    return [
        {"order": o.order, "sup": o.sup, "log_sup": o.log_sup, "head_log_sup": o.head_log_sup, "passes": o.passes}
        for o in report.orders
    ]
