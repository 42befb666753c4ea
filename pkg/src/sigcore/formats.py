"""JSON readers and writers for structures, lifetime models and results.

Component labels are 1-based in every file. Floats are written with 17
significant digits so every emitted number reads back bit-identically.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from ._bits import check_n, components_of, level_masks, mask_from_components
from .errors import ModelError
from .lifetimes import (
    IID,
    Exchangeable,
    Exponential,
    IndependentMarginals,
    LogNormal,
    OrderProbabilities,
    Uniform,
    Weibull,
    WeibullModel,
)
from .quality import QualityFunction, tilde
from .signature import SignatureVector, SymmetricApproximation, TailProbabilityVector
from .structure import (
    PathSetSystem,
    StructureFunction,
    from_path_sets,
    k_out_of_n,
    parallel,
    series,
)

# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def _encode(obj: Any) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot encode non-finite float {x}")
        text = format(x, ".17g")
        return text if any(ch in text for ch in ".eE") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Compact JSON with 17-significant-digit floats."""
    return _encode(obj)


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def quality_to_json(q: QualityFunction, with_tilde: bool = False) -> dict:
    order = [int(m) for lv in level_masks(q.n) for m in lv]
    rows = [{"set": list(components_of(m)), "value": q[m]} for m in order]
    if with_tilde:
        qt = tilde(q).values
        for row, m in zip(rows, order):
            row["tilde"] = float(qt[m])
    out = {"n": q.n, "q": rows, "level_sums": q.level_sums().tolist(), "route": q.route}
    if q.normalized:
        out["normalized_levels"] = True
    return out


def signature_to_json(sig: SignatureVector, tails: TailProbabilityVector | None = None) -> dict:
    out: dict[str, Any] = {"n": sig.n, "p": sig.clamped().tolist()}
    if tails is not None:
        out["tails"] = tails.tails.tolist()
    out["route"] = sig.route
    out["checks"] = {"sum_p": sig.total(), "min_p": float(sig.p.min())}
    if np.any(sig.p < 0):
        out["p_raw"] = sig.p.tolist()
    return out


def projection_to_json(approx: SymmetricApproximation, residual: float) -> dict:
    return {
        "n": approx.n,
        "constant": approx.constant,
        "c": np.asarray(approx.coefficients).tolist(),
        "residual_orthogonality": residual,
    }


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ModelError(f"{where}: expected a JSON object")
    if key not in obj:
        raise ModelError(f"{where}: missing field {key!r}")
    return obj[key]


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelError(f"{where}: expected an integer, got {value!r}")
    return value


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelError(f"{where}: expected a number, got {value!r}")
    return float(value)


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ModelError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON ({exc})") from exc


def parse_structure(obj: dict) -> tuple[StructureFunction, PathSetSystem | None]:
    """Structure file to a truth table, plus path sets when the file gave them."""
    n = _int(_require(obj, "n", "structure"), "structure.n")
    try:
        n = check_n(n)
    except ValueError as exc:
        raise ModelError(f"structure.n: {exc}") from exc
    body = _require(obj, "structure", "structure")
    kind = _require(body, "type", "structure.structure")
    try:
        if kind == "paths":
            raw = _require(body, "minimal_path_sets", "structure.structure")
            if not isinstance(raw, list) or not all(isinstance(p, list) for p in raw):
                raise ModelError("structure.minimal_path_sets: expected a list of lists")
            for i, p in enumerate(raw):
                for c in p:
                    _int(c, f"structure.minimal_path_sets[{i}]")
            paths = PathSetSystem(n, tuple(mask_from_components(p, n) for p in raw))
            return from_path_sets(paths), paths
        if kind == "table":
            bits = _require(body, "bits", "structure.structure")
            if not isinstance(bits, str):
                raise ModelError("structure.bits: expected a string")
            phi = StructureFunction.from_bits(bits)
            if phi.n != n:
                raise ModelError(f"structure.bits: length {len(bits)} does not match n = {n}")
            return phi, None
        if kind == "k_out_of_n":
            k = _int(_require(body, "k", "structure.structure"), "structure.k")
            return k_out_of_n(n, k), None
        if kind == "series":
            return series(n), None
        if kind == "parallel":
            return parallel(n), None
    except ModelError:
        raise
    except ValueError as exc:
        raise ModelError(f"structure: {exc}") from exc
    raise ModelError(f"structure.type: unknown type {kind!r}")


def structure_to_json(phi: StructureFunction) -> dict:
    return {"n": phi.n, "structure": {"type": "table", "bits": phi.to_bits()}}


def _parse_marginal(obj: dict, where: str):
    dist = _require(obj, "dist", where)
    if dist == "weibull":
        shape = obj.get("alpha", obj.get("shape"))
        if shape is None:
            raise ModelError(f"{where}: missing field 'alpha'")
        return Weibull(_num(shape, f"{where}.alpha"), _num(_require(obj, "rate", where), f"{where}.rate"))
    if dist == "exponential":
        return Exponential(_num(_require(obj, "rate", where), f"{where}.rate"))
    if dist == "uniform":
        return Uniform(_num(_require(obj, "a", where), f"{where}.a"), _num(_require(obj, "b", where), f"{where}.b"))
    if dist == "lognormal":
        return LogNormal(_num(_require(obj, "mu", where), f"{where}.mu"), _num(_require(obj, "sigma", where), f"{where}.sigma"))
    raise ModelError(f"{where}.dist: unknown distribution {dist!r}")


def parse_model(obj: dict):
    kind = _require(obj, "type", "model")
    n = obj.get("n")
    if n is not None:
        n = _int(n, "model.n")
    try:
        if kind in ("iid", "exchangeable"):
            return (IID if kind == "iid" else Exchangeable)(n)
        if kind == "weibull":
            lam = _require(obj, "lambda", "model")
            if not isinstance(lam, list):
                raise ModelError("model.lambda: expected a list")
            model = WeibullModel(
                _num(_require(obj, "alpha", "model"), "model.alpha"),
                tuple(_num(v, f"model.lambda[{i}]") for i, v in enumerate(lam)),
            )
        elif kind == "independent":
            ms = _require(obj, "marginals", "model")
            if not isinstance(ms, list):
                raise ModelError("model.marginals: expected a list")
            model = IndependentMarginals(tuple(_parse_marginal(m, f"model.marginals[{i}]") for i, m in enumerate(ms)))
        elif kind == "order_probs":
            rows = _require(obj, "probs", "model")
            if not isinstance(rows, list) or not rows:
                raise ModelError("model.probs: expected a nonempty list")
            probs = {}
            for i, row in enumerate(rows):
                perm = _require(row, "perm", f"model.probs[{i}]")
                if not isinstance(perm, list):
                    raise ModelError(f"model.probs[{i}].perm: expected a list")
                key = tuple(_int(c, f"model.probs[{i}].perm") for c in perm)
                if key in probs:
                    raise ModelError(f"model.probs[{i}]: permutation {list(key)} listed twice")
                probs[key] = _num(_require(row, "p", f"model.probs[{i}]"), f"model.probs[{i}].p")
            size = len(next(iter(probs)))
            model = OrderProbabilities(size, probs)
        else:
            raise ModelError(f"model.type: unknown type {kind!r}")
    except ModelError:
        raise
    except ValueError as exc:
        raise ModelError(f"model: {exc}") from exc
    if n is not None and n != model.n:
        raise ModelError(f"model.n = {n} but the model describes {model.n} components")
    return model


def parse_quality(obj: dict) -> QualityFunction:
    n = _int(_require(obj, "n", "quality"), "quality.n")
    rows = _require(obj, "q", "quality")
    try:
        n = check_n(n)
        values = np.full(1 << n, np.nan)
        for i, row in enumerate(rows):
            s = _require(row, "set", f"quality.q[{i}]")
            mask = mask_from_components([_int(c, f"quality.q[{i}].set") for c in s], n)
            values[mask] = _num(_require(row, "value", f"quality.q[{i}]"), f"quality.q[{i}].value")
        missing = np.flatnonzero(np.isnan(values))
        if missing.size:
            raise ModelError(f"quality.q: no value for set {list(components_of(int(missing[0])))}")
        return QualityFunction(n, values, str(obj.get("route", "custom")))
    except ModelError:
        raise
    except ValueError as exc:
        raise ModelError(f"quality: {exc}") from exc


def parse_table(obj: dict, what: str) -> np.ndarray:
    """A real table on ``2**n`` sets from any of: ``{"n", "values"}``, a quality file, a structure file."""
    if isinstance(obj, dict) and "values" in obj:
        n = _int(_require(obj, "n", what), f"{what}.n")
        vals = obj["values"]
        if not isinstance(vals, list) or len(vals) != 1 << n:
            raise ModelError(f"{what}.values: expected a list of 2**{n} numbers")
        try:
            check_n(n)
        except ValueError as exc:
            raise ModelError(f"{what}.n: {exc}") from exc
        return np.array([_num(v, f"{what}.values[{i}]") for i, v in enumerate(vals)])
    if isinstance(obj, dict) and "q" in obj:
        return np.asarray(parse_quality(obj).values, dtype=np.float64)
    if isinstance(obj, dict) and "structure" in obj:
        return parse_structure(obj)[0].table.astype(np.float64)
    raise ModelError(f"{what}: expected a table ({{'n', 'values'}}), a quality file or a structure file")


__all__ = [
    "dumps",
    "fmt_float",
    "load_json",
    "parse_structure",
    "structure_to_json",
    "parse_model",
    "parse_quality",
    "parse_table",
    "quality_to_json",
    "signature_to_json",
    "projection_to_json",
]
