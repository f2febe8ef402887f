"""JSON model descriptions and CSV/JSON table output.

A model spec is a JSON object with a ``kind`` field:

* ``heston``: ``lambda``, ``theta``, ``zeta``, ``rho``
* ``heston_jumps``: Heston fields plus ``jumps`` (a jump object), or
  ``intensity`` and ``mean_size`` for downward exponential jumps
* ``bates``: Heston fields plus ``jumps``
* ``bns``: ``lambda``, ``rho`` and ``subordinator`` (a jump object), or
  ``gamma_shape`` and ``gamma_rate`` for a Gamma-OU variance
* ``parameters``: ``a``, ``alpha`` (2x2), ``b``, ``beta`` (pairs), ``c``,
  ``gamma`` and optional jump objects ``m`` and ``mu``

A jump object is ``{"intensity": ..., "family": ..., ...}`` with families
``exponential`` (rate, sign), ``double_exponential`` (p_up, eta_up,
eta_down), ``gaussian`` (mean, std), ``point`` (x, y) and
``coupled_exponential`` (rate, slope). Every kind accepts an optional
``V0`` used by pricing and martingale checks.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .affine_core import AdmissibleParameterSet, GeneratorPair, ParametricGenerator
from .errors import AffineSVError, SpecError
from .jumps import (
    CompoundPoisson,
    CoupledExponentialMarks,
    DoubleExponentialMarks,
    ExponentialMarks,
    GaussianMarks,
    PointMark,
)
from .models import (
    DEFAULT_BATES,
    DEFAULT_BNS,
    FIG_HESTON,
    FIG_JUMPS,
    BatesGenerator,
    BatesParams,
    BNSGenerator,
    BNSParams,
    HestonGenerator,
    HestonJumpGenerator,
    HestonJumpParams,
    HestonParams,
    gamma_subordinator,
)

KINDS = ("parameters", "heston", "heston_jumps", "bates", "bns")


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    generator: GeneratorPair
    V0: float
    source: dict


def _num(obj, key, path, default=None, required=True):
    if key not in obj:
        if required and default is None:
            raise SpecError(f"{path}{key}", "missing")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"{path}{key}", f"expected a number, got {json.dumps(v)}")
    v = float(v)
    if math.isnan(v):
        raise SpecError(f"{path}{key}", "NaN is not allowed")
    return v


def _obj(v, path):
    if not isinstance(v, dict):
        raise SpecError(path or "<root>", "expected a JSON object")
    return v


def _pair(obj, key, path):
    v = obj.get(key, [0.0, 0.0])
    if not (isinstance(v, list) and len(v) == 2):
        raise SpecError(f"{path}{key}", "expected a list of two numbers")
    return tuple(_num({"_": x}, "_", f"{path}{key}[{i}]") for i, x in enumerate(v))


def _matrix(obj, key, path):
    v = obj.get(key, [[0.0, 0.0], [0.0, 0.0]])
    if not (isinstance(v, list) and len(v) == 2):
        raise SpecError(f"{path}{key}", "expected a 2x2 nested list")
    return tuple(_pair({"row": row}, "row", f"{path}{key}[{i}].") for i, row in enumerate(v))


_FAMILIES = {
    "exponential": (ExponentialMarks, ("rate",), {"sign": -1.0}),
    "double_exponential": (DoubleExponentialMarks, ("p_up", "eta_up", "eta_down"), {}),
    "gaussian": (GaussianMarks, ("mean", "std"), {}),
    "point": (PointMark, (), {"x": 0.0, "y": 0.0}),
    "coupled_exponential": (CoupledExponentialMarks, ("rate",), {"slope": 0.0}),
}


def _jumps(v, path):
    obj = _obj(v, path)
    fam = obj.get("family")
    if fam not in _FAMILIES:
        raise SpecError(f"{path}.family", f"expected one of {sorted(_FAMILIES)}, got {json.dumps(fam)}")
    cls, req, opt = _FAMILIES[fam]
    kw = {k: _num(obj, k, path + ".") for k in req}
    kw.update({k: _num(obj, k, path + ".", default=d) for k, d in opt.items()})
    if "sign" in kw:
        kw["sign"] = int(kw["sign"])
    intensity = _num(obj, "intensity", path + ".")
    try:
        return CompoundPoisson(intensity, cls(**kw))
    except (ValueError, AffineSVError) as exc:
        raise SpecError(path, str(exc)) from None


def _heston(obj):
    vals = {k: _num(obj, k, "") for k in ("lambda", "theta", "zeta", "rho")}
    for k in ("lambda", "theta", "zeta"):
        if not vals[k] > 0:
            raise SpecError(k, "must be positive")
    if not -1.0 <= vals["rho"] <= 1.0:
        raise SpecError("rho", "must lie in [-1, 1]")
    return HestonParams(vals["lambda"], vals["theta"], vals["zeta"], vals["rho"])


def _build(obj):
    kind = obj.get("kind")
    if kind not in KINDS:
        raise SpecError("kind", f"expected one of {list(KINDS)}, got {json.dumps(kind)}")
    try:
        if kind == "heston":
            hp = _heston(obj)
            return HestonGenerator(hp), hp.theta
        if kind == "heston_jumps":
            hp = _heston(obj)
            if "jumps" in obj:
                params = HestonJumpParams(hp, _jumps(obj["jumps"], "jumps"))
            else:
                params = HestonJumpParams.exponential(hp, _num(obj, "intensity", ""), _num(obj, "mean_size", ""))
            return HestonJumpGenerator(params), hp.theta
        if kind == "bates":
            hp = _heston(obj)
            if "jumps" not in obj:
                raise SpecError("jumps", "missing")
            return BatesGenerator(BatesParams(hp, _jumps(obj["jumps"], "jumps"))), hp.theta
        if kind == "bns":
            if "subordinator" in obj:
                sub = _jumps(obj["subordinator"], "subordinator")
                v0 = 0.04
            else:
                shape, rate = _num(obj, "gamma_shape", ""), _num(obj, "gamma_rate", "")
                sub = gamma_subordinator(shape, rate)
                v0 = shape / rate
            return BNSGenerator(BNSParams(_num(obj, "lambda", ""), _num(obj, "rho", ""), sub)), v0
        p = AdmissibleParameterSet(
            a=_matrix(obj, "a", ""), alpha=_matrix(obj, "alpha", ""), b=_pair(obj, "b", ""),
            beta=_pair(obj, "beta", ""), c=_num(obj, "c", "", default=0.0), gamma=_num(obj, "gamma", "", default=0.0),
            m=_jumps(obj["m"], "m") if obj.get("m") is not None else None,
            mu=_jumps(obj["mu"], "mu") if obj.get("mu") is not None else None,
        )
        return ParametricGenerator(p), 1.0
    except SpecError:
        raise
    except (ValueError, AffineSVError) as exc:
        raise SpecError(kind, str(exc)) from None


def parse_model_spec(text: str) -> ModelSpec:
    """Parse a JSON model spec; raises SpecError naming the offending field."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("<json>", f"{exc.msg} at line {exc.lineno} column {exc.colno}") from None
    obj = _obj(obj, "")
    g, v0 = _build(obj)
    v0 = _num(obj, "V0", "", default=v0)
    if not v0 > 0:
        raise SpecError("V0", "must be positive")
    return ModelSpec(obj["kind"], g, v0, obj)


def load_model_spec(arg: str) -> ModelSpec:
    """Inline JSON text or a path to a JSON file."""
    if not arg.lstrip().startswith("{") and os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            arg = fh.read()
    return parse_model_spec(arg)


def _heston_json(hp):
    return {"lambda": hp.lam, "theta": hp.theta, "zeta": hp.zeta, "rho": hp.rho}


def _preset_json():
    bates_j = DEFAULT_BATES.jumps
    bns = DEFAULT_BNS.subordinator
    return {
        "heston": {"kind": "heston", **_heston_json(FIG_HESTON)},
        "heston_jumps": {"kind": "heston_jumps", **_heston_json(FIG_JUMPS.heston), "jumps": FIG_JUMPS.jumps.to_json()},
        "bates": {"kind": "bates", **_heston_json(DEFAULT_BATES.heston), "jumps": bates_j.to_json()},
        "bns": {"kind": "bns", "lambda": DEFAULT_BNS.lam, "rho": DEFAULT_BNS.rho,
                "gamma_shape": bns.intensity, "gamma_rate": bns.marks.rate},
    }


PRESET_JSON = _preset_json()
PRESET_NAMES = tuple(PRESET_JSON)


def preset_spec(name: str, overrides: str | None = None) -> ModelSpec:
    """Preset model, optionally with fields replaced by an inline JSON object."""
    if name not in PRESET_JSON:
        raise SpecError("preset", f"unknown preset {name!r}; choose from {list(PRESET_NAMES)}")
    obj = dict(PRESET_JSON[name])
    if overrides:
        try:
            extra = json.loads(overrides)
        except json.JSONDecodeError as exc:
            raise SpecError("<json>", f"{exc.msg} at line {exc.lineno} column {exc.colno}") from None
        obj.update(_obj(extra, ""))
    return parse_model_spec(json.dumps(obj))


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def fmt(x) -> str:
    """Round-trip exact text for a table cell."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    if x is None:
        return ""
    return str(x)


def to_csv(header, rows, comments=()) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(c) for c in row) for row in rows]
    lines += [f"# {c}" for c in comments]
    return "\n".join(lines) + "\n"


def _json_cell(x):
    if isinstance(x, float) and not math.isfinite(x):
        return fmt(x)
    return x


def to_json(header, rows, comments=()) -> str:
    doc = {"columns": list(header), "rows": [[_json_cell(c) for c in row] for row in rows]}
    if comments:
        doc["notes"] = list(comments)
    return json.dumps(doc, indent=1) + "\n"


def render(header, rows, fmt_name="csv", comments=()) -> str:
    if fmt_name == "csv":
        return to_csv(header, rows, comments)
    if fmt_name == "json":
        return to_json(header, rows, comments)
    raise ValueError(f"unknown format {fmt_name!r}")
