"""JSON system descriptions and deterministic report output.

System file layout::

    {
      "dim": 3,
      "drift": {"eigenvalues": [1.41, 1.73, 2.23],
                "exact": ["sqrt(2)", {"rational": "0", "irrational": {"sqrt(3)": "1"}}, null]},
      "controls": [{"matrix": [[0, 1, 0], [1, 0, [0, 1]], ...]},
                   {"entries": [[0, 2, 0.5, 0.0]]}],
      "tolerances": {"rank": 1e-9},
      "truncations": [2, 3],
      "seed": 0
    }

``drift`` may instead hold ``{"matrix": ...}``.  Matrix entries are numbers
or ``[re, im]`` pairs.  Sparse ``entries`` are ``[row, col, re, im]`` with
0-based indices; the conjugate entry is filled in automatically.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .config import Tolerances
from .errors import ConfigError, LarcError
from .exact import ExactValue
from .linop import ControlSystem, ControlSchedule, dagger
from .spectral import DriftSpectrum, spectrum_from_eigenvalues, spectrum_from_matrix


# --- deterministic JSON ----------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json(), indent, level)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.number, str)) or v is None for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with every float printed to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def complex_matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)] for z in row] for row in m]


# --- parsing ---------------------------------------------------------------

def _entry(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ConfigError(f"{where}: boolean is not a number")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ConfigError(f"{where}: expected a number or [re, im], got {x!r}")


def _dense(rows, dim: int, where: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != dim:
        raise ConfigError(f"{where}: expected {dim} rows")
    out = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ConfigError(f"{where}: row {i} must have {dim} entries")
        for j, x in enumerate(row):
            out[i, j] = _entry(x, f"{where}[{i}][{j}]")
    return out


def _sparse(entries, dim: int, where: str) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    seen: dict[tuple[int, int], complex] = {}
    for k, e in enumerate(entries):
        if not isinstance(e, list) or len(e) not in (3, 4):
            raise ConfigError(f"{where}[{k}]: expected [row, col, re, im]")
        r, c = e[0], e[1]
        if not (isinstance(r, int) and isinstance(c, int) and 0 <= r < dim and 0 <= c < dim):
            raise ConfigError(f"{where}[{k}]: indices out of range 0..{dim - 1}")
        z = complex(float(e[2]), float(e[3]) if len(e) == 4 else 0.0)
        if r == c and abs(z.imag) > 0:
            raise ConfigError(f"{where}[{k}]: diagonal entry must be real")
        for key, val in (((r, c), z), ((c, r), z.conjugate())):
            if key in seen and abs(seen[key] - val) > 1e-12 * max(1.0, abs(val)):
                raise ConfigError(f"{where}[{k}]: conflicts with an earlier entry at {key}")
            seen[key] = val
            out[key] = val
    return out


def _hermitian(m: np.ndarray, tol: float, where: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - dagger(m))) > tol * scale:
        raise ConfigError(f"{where}: matrix is not Hermitian")
    return m


@dataclass
class SystemConfig:
    system: ControlSystem
    tolerances: Tolerances = field(default_factory=Tolerances)
    truncations: list[int] = field(default_factory=list)
    seed: int = 0


def parse_drift(obj, dim: int, tol: Tolerances) -> DriftSpectrum:
    if not isinstance(obj, dict):
        raise ConfigError("drift must be an object")
    if "eigenvalues" in obj:
        vals = obj["eigenvalues"]
        if not isinstance(vals, list) or len(vals) != dim:
            raise ConfigError(f"drift.eigenvalues must list {dim} numbers")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            raise ConfigError("drift.eigenvalues must be real numbers")
        exact = obj.get("exact")
        tags = None
        if exact is not None:
            if not isinstance(exact, list) or len(exact) != dim:
                raise ConfigError(f"drift.exact must list {dim} tags (null allowed)")
            try:
                tags = [None if e is None else ExactValue.from_json(e) for e in exact]
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise ConfigError(f"drift.exact: {exc}") from exc
            for k, (v, t) in enumerate(zip(vals, tags)):
                if t is not None and abs(float(t) - v) > 1e-9 * max(1.0, abs(v)):
                    raise ConfigError(f"drift.exact[{k}] = {t} does not match eigenvalue {v}")
        return spectrum_from_eigenvalues([float(v) for v in vals], exact=tags, gap_tol=tol.gap)
    if "matrix" in obj:
        m = _hermitian(_dense(obj["matrix"], dim, "drift.matrix"), tol.structural, "drift.matrix")
        return spectrum_from_matrix(m, gap_tol=tol.gap, tol=tol.structural)
    raise ConfigError("drift needs 'eigenvalues' or 'matrix'")


def parse_config(obj: dict, overrides: dict | None = None) -> SystemConfig:
    if not isinstance(obj, dict):
        raise ConfigError("configuration must be a JSON object")
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ConfigError("'dim' must be a positive integer")
    try:
        tol = Tolerances().with_overrides(obj.get("tolerances", {}) or {})
        if overrides:
            tol = tol.with_overrides(overrides)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"tolerances: {exc}") from exc
    drift = parse_drift(obj.get("drift"), dim, tol)
    controls = []
    for j, c in enumerate(obj.get("controls", []) or [], start=1):
        where = f"controls[{j - 1}]"
        if isinstance(c, list):
            c = {"matrix": c}
        if not isinstance(c, dict):
            raise ConfigError(f"{where}: expected an object")
        if "matrix" in c:
            m = _hermitian(_dense(c["matrix"], dim, where), tol.structural, where)
        elif "entries" in c:
            m = _sparse(c["entries"], dim, where)
        else:
            raise ConfigError(f"{where}: needs 'matrix' or 'entries'")
        controls.append(m)
    truncs = obj.get("truncations") or []
    if not isinstance(truncs, list) or not all(isinstance(n, int) and 1 <= n <= dim for n in truncs):
        raise ConfigError(f"truncations must be integers in 1..{dim}")
    seed = obj.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    try:
        system = ControlSystem(drift, tuple(controls), tol.structural)
    except LarcError as exc:
        raise ConfigError(str(exc)) from exc
    return SystemConfig(system, tol, list(truncs), seed)


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def load_config(path: str | Path, overrides: dict | None = None) -> SystemConfig:
    return parse_config(load_json(path), overrides)


def _is_phased_permutation(v: np.ndarray) -> bool:
    a = np.abs(v)
    return bool(np.count_nonzero(a) == v.shape[0] and np.allclose(a.max(axis=0), 1.0, rtol=0, atol=1e-15))


def system_to_config(system: ControlSystem, tolerances: Tolerances | None = None,
                     truncations=None, seed: int = 0) -> dict:
    """Inverse of ``parse_config`` (diagonal drifts keep their eigenvalue list and tags)."""
    spec = system.drift
    out: dict[str, Any] = {"dim": system.dim}
    if _is_phased_permutation(spec.vectors):
        perm_vals = np.real(np.diagonal(spec.matrix()))
        drift: dict[str, Any] = {"eigenvalues": [float(v) for v in perm_vals]}
        if spec.exact is not None:
            col_tag = {}
            for k, sl in enumerate(spec.slices()):
                for c in range(sl.start, sl.stop):
                    col_tag[int(np.argmax(np.abs(spec.vectors[:, c])))] = spec.exact[k]
            drift["exact"] = [None if col_tag.get(i) is None else col_tag[i].to_json()
                              for i in range(spec.dim)]
        out["drift"] = drift
    else:
        out["drift"] = {"matrix": complex_matrix_to_json(spec.matrix())}
    out["controls"] = [{"matrix": complex_matrix_to_json(h)} for h in system.controls]
    if tolerances is not None:
        out["tolerances"] = {k: v for k, v in tolerances.as_dict().items() if v is not None}
    if truncations:
        out["truncations"] = list(truncations)
    out["seed"] = seed
    return out


def parse_schedule(obj) -> ControlSchedule:
    """``{"segments": [[tau, [y_1, ..., y_N]], ...]}`` or the bare list."""
    segs = obj.get("segments") if isinstance(obj, dict) else obj
    if not isinstance(segs, list):
        raise ConfigError("schedule needs a 'segments' list")
    try:
        return ControlSchedule(tuple((float(s[0]), tuple(float(v) for v in s[1])) for s in segs))
    except (TypeError, ValueError, IndexError, KeyError) as exc:
        raise ConfigError(f"invalid schedule: {exc}") from exc


def schedule_to_json(schedule: ControlSchedule) -> dict:
    return {"segments": [[tau, list(y)] for tau, y in schedule.segments]}


def parse_vectors(obj, dim: int) -> list[np.ndarray]:
    if not isinstance(obj, list):
        raise ConfigError("vectors must be a list")
    out = []
    for k, v in enumerate(obj):
        if not isinstance(v, list) or len(v) != dim:
            raise ConfigError(f"vector {k} must have {dim} entries")
        out.append(np.array([_entry(x, f"vector {k}") for x in v]))
    return out
