"""JSON serialization for reports: complex matrices as nested [re, im]
pairs, plus the deterministic report envelope shared by all subcommands."""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, is_dataclass
from typing import Any, Dict

import numpy as np

from . import __version__
from .choi import ChoiMatrix
from .errors import DimensionError


def matrix_to_json(m: np.ndarray):
    """Nested row-major lists of [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise DimensionError(f"expected an (r, c, 2) nested array, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def choi_to_json(phi: ChoiMatrix) -> Dict[str, Any]:
    return {"n_in": phi.n_in, "n_out": phi.n_out, "matrix": matrix_to_json(phi.matrix)}


def choi_from_json(data: Dict[str, Any]) -> ChoiMatrix:
    return ChoiMatrix(int(data["n_in"]), int(data["n_out"]),
                      matrix_from_json(data["matrix"]))


def jsonable(obj: Any) -> Any:
    """Recursively convert package values (ndarrays, dataclasses, numpy
    scalars, Choi matrices) into plain JSON-compatible structures."""
    if isinstance(obj, ChoiMatrix):
        return choi_to_json(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj) or obj.ndim == 2:
            return matrix_to_json(np.atleast_2d(obj))
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, type):
        return obj.__name__
    if callable(obj):
        return getattr(obj, "expression", repr(obj))
    return obj


def report_envelope(command: str, config: Dict[str, Any], result: Any,
                    seed: Any = None) -> Dict[str, Any]:
    """Replayable report: embeds the resolved configuration, the seed, and
    the artifact version alongside the result payload."""
    return {
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": jsonable(config),
        "result": jsonable(result),
    }


def dump_json(obj: Any) -> str:
    """Byte-stable rendering: sorted keys, fixed separators, no locale."""
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)
