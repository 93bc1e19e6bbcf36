"""JSON formats for systems, matrices, tensors, limit specs and families.

Complex scalars are objects {"re": ..., "im": ...}; vectors are lists of
scalars, matrices {"dim", "entries"} with entries[i][j], tensors
{"dim", "entries"} with entries[i][j][k] plus an optional "constant_index"
flag (default true) marking whether index 0 is the constant coordinate.
Floats are emitted with full round-trip precision by the json module.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .limits import LimitSpec, TensorFamily
from .obtuse import ObtuseSystem, Tensor3


class FormatError(ValueError):
    """Raised when a JSON document does not match the expected schema."""


def complex_to_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    try:
        return complex(float(obj["re"]), float(obj.get("im", 0.0)))
    except (TypeError, KeyError) as exc:
        raise FormatError(f"not a complex scalar: {obj!r}") from exc


def vector_to_json(vec) -> list:
    return [complex_to_json(z) for z in np.asarray(vec, dtype=complex)]


def vector_from_json(obj) -> np.ndarray:
    if not isinstance(obj, list):
        raise FormatError("vector must be a list")
    return np.array([complex_from_json(z) for z in obj], dtype=complex)


def matrix_to_json(mat) -> dict:
    arr = np.asarray(mat, dtype=complex)
    return {
        "dim": int(arr.shape[0]),
        "entries": [[complex_to_json(z) for z in row] for row in arr],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows = obj["entries"]
    except (TypeError, KeyError) as exc:
        raise FormatError("matrix must have an 'entries' field") from exc
    arr = np.array([[complex_from_json(z) for z in row] for row in rows], dtype=complex)
    if arr.ndim != 2:
        raise FormatError("matrix entries must be a 2-d array")
    return arr


def system_to_json(system: ObtuseSystem) -> dict:
    return {
        "dim": int(system.dim),
        "values": [vector_to_json(v) for v in system.values],
        "probabilities": [float(p) for p in system.probabilities],
    }


def system_values_from_json(obj):
    """Values and optional probabilities from a system document."""
    try:
        values = np.array(
            [[complex_from_json(z) for z in row] for row in obj["values"]],
            dtype=complex,
        )
    except (TypeError, KeyError) as exc:
        raise FormatError("system must have a 'values' field") from exc
    if values.ndim != 2:
        raise FormatError("system values must be a list of equal-length vectors")
    if "dim" in obj and int(obj["dim"]) != values.shape[1]:
        raise FormatError("declared dim does not match the vectors")
    probs = obj.get("probabilities")
    if probs is not None:
        probs = np.asarray([float(p) for p in probs])
    return values, probs


def tensor_to_json(tensor: Tensor3) -> dict:
    return {
        "dim": int(tensor.dim),
        "constant_index": bool(tensor.has_constant),
        "entries": [
            [[complex_to_json(z) for z in row] for row in plane]
            for plane in tensor.entries
        ],
    }


def tensor_from_json(obj) -> Tensor3:
    try:
        raw = obj["entries"]
    except (TypeError, KeyError) as exc:
        raise FormatError("tensor must have an 'entries' field") from exc
    arr = np.array(
        [[[complex_from_json(z) for z in row] for row in plane] for plane in raw],
        dtype=complex,
    )
    if arr.ndim != 3:
        raise FormatError("tensor entries must be a 3-d array")
    has_constant = bool(obj.get("constant_index", True))
    if "dim" in obj and int(obj["dim"]) != arr.shape[0]:
        raise FormatError("declared dim does not match the entries")
    try:
        return Tensor3(entries=arr, has_constant=has_constant)
    except DimensionMismatch as exc:
        raise FormatError(str(exc)) from exc


def limitspec_to_json(spec: LimitSpec) -> dict:
    return {
        "dim": int(spec.dim),
        "M": tensor_to_json(spec.tensor),
        "Lambda": matrix_to_json(spec.lambda_matrix),
        "V": matrix_to_json(spec.v_matrix),
        "poisson": [
            {"v": vector_to_json(v), "intensity": float(lam)}
            for v, lam in zip(spec.poisson_dirs, spec.intensities)
        ],
        "brownian": [vector_to_json(v) for v in spec.brownian_basis],
    }


def limitspec_from_json(obj) -> LimitSpec:
    try:
        tensor = tensor_from_json(obj["M"])
        lam = matrix_from_json(obj["Lambda"])
        v = matrix_from_json(obj["V"])
        poisson = obj.get("poisson", [])
        brownian = obj.get("brownian", [])
    except (TypeError, KeyError) as exc:
        raise FormatError("limit spec missing required fields") from exc
    n = lam.shape[0]
    dirs = (
        np.array([vector_from_json(p["v"]) for p in poisson], dtype=complex)
        if poisson
        else np.zeros((0, n), dtype=complex)
    )
    intensities = np.array([float(p["intensity"]) for p in poisson])
    basis = (
        np.array([vector_from_json(b) for b in brownian], dtype=complex)
        if brownian
        else np.zeros((0, n), dtype=complex)
    )
    return LimitSpec(
        dim=n,
        tensor=tensor,
        lambda_matrix=lam,
        v_matrix=v,
        poisson_dirs=dirs,
        intensities=intensities,
        brownian_basis=basis,
    )


def family_from_json(obj, default_steps) -> TensorFamily:
    """Tensor family from a document with sampled tensors or systems.

    Accepted shapes: {"steps", "tensors"}, {"steps", "systems"} (a system
    per step; tensors are computed), or {"system"} with optional "steps"
    (h-independent family).
    """
    from .obtuse import ObtuseRV, tensor_of

    if not isinstance(obj, dict):
        raise FormatError("family must be an object")
    steps = obj.get("steps")
    if "tensors" in obj:
        if steps is None or len(steps) != len(obj["tensors"]):
            raise FormatError("family needs matching 'steps' and 'tensors'")
        tensors = [tensor_from_json(t) for t in obj["tensors"]]
        return TensorFamily.from_samples([float(h) for h in steps], tensors)
    if "systems" in obj:
        if steps is None or len(steps) != len(obj["systems"]):
            raise FormatError("family needs matching 'steps' and 'systems'")
        tensors = []
        for doc in obj["systems"]:
            values, _ = system_values_from_json(doc)
            tensors.append(tensor_of(ObtuseRV.from_values(values)))
        return TensorFamily.from_samples([float(h) for h in steps], tensors)
    if "system" in obj:
        values, _ = system_values_from_json(obj["system"])
        tensor = tensor_of(ObtuseRV.from_values(values))
        steps = [float(h) for h in steps] if steps else list(default_steps)
        return TensorFamily.constant(tensor, steps=tuple(steps))
    raise FormatError("family needs 'tensors', 'systems' or 'system'")
