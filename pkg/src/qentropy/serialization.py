"""JSON and CSV interchange formats.

The shared matrix format is ``{"dim": N, "matrix": [[[re, im], ...], ...]}``:
the outer array runs over rows, the inner over columns, and every entry is a
two-element array of finite doubles.  Channels are ``{"dim": N, "kraus":
[<matrix>, ...]}`` where each Kraus entry is the nested row/column array (the
full wrapped object is also accepted).  Choi matrices reuse the matrix format
with ``dim`` set to the subsystem dimension, so the array is N^2 x N^2.

Classical (B, p) batches come either as CSV records -- a line holding N, then
N comma-separated rows of B, then one row of p, repeated until the end of the
file -- or as JSON: an object ``{"dim": N, "matrix": [[...]], "p": [...]}``
with real entries, or a list of such objects.

All floats emitted by :func:`dumps` are printed with 17 significant digits so
doubles round-trip exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .channels import KrausChannel, kraus_channel
from .choi import ChoiMatrix, choi_from_matrix
from .classical import ProbabilityVector, StochasticMatrix, probability_vector, stochastic_matrix
from .entropy_analysis import Block, BlockStructure
from .errors import ValidationError
from .states import DensityMatrix, as_complex_matrix, validate_state
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "matrix_to_obj",
    "matrix_from_obj",
    "state_to_obj",
    "state_from_obj",
    "channel_to_obj",
    "channel_from_obj",
    "choi_to_obj",
    "choi_from_obj",
    "block_structure_to_obj",
    "block_structure_from_obj",
    "load_json",
    "save_json",
    "load_classical_batch",
    "dumps",
]


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return f"{x:.17g}"


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits.

    Non-finite floats use the same ``Infinity``/``NaN`` literals the standard
    library emits and accepts.
    """

    def render(node, depth: int) -> str:
        pad = " " * (indent * depth)
        inner_pad = " " * (indent * (depth + 1))
        if isinstance(node, dict):
            if not node:
                return "{}"
            items = [
                f'{inner_pad}{json.dumps(str(key))}: {render(value, depth + 1)}'
                for key, value in node.items()
            ]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(node, (list, tuple)):
            if len(node) == 0:
                return "[]"
            rendered = [render(value, depth + 1) for value in node]
            flat = "[" + ", ".join(rendered) + "]"
            if "\n" not in flat and len(flat) <= 100:
                return flat
            return "[\n" + ",\n".join(inner_pad + r for r in rendered) + "\n" + pad + "]"
        if isinstance(node, bool) or node is None or isinstance(node, str):
            return json.dumps(node)
        if isinstance(node, (int, np.integer)):
            return str(int(node))
        if isinstance(node, (float, np.floating)):
            return _format_float(float(node))
        raise TypeError(f"cannot serialize value of type {type(node).__name__}")

    return render(obj, 0)


def matrix_to_obj(m: np.ndarray) -> list:
    arr = np.asarray(m, dtype=complex)
    return [[[float(e.real), float(e.imag)] for e in row] for row in arr]


def matrix_from_obj(obj) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix entries: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValidationError(
            f"matrix entries must be [re, im] pairs; got array of shape {arr.shape}"
        )
    return as_complex_matrix(arr[:, :, 0] + 1j * arr[:, :, 1])


def state_to_obj(rho: DensityMatrix) -> dict:
    return {"dim": rho.dim, "matrix": matrix_to_obj(rho.matrix)}


def state_from_obj(obj, tol: ToleranceConfig = DEFAULT_TOL) -> DensityMatrix:
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise ValidationError('expected an object with a "matrix" field')
    matrix = matrix_from_obj(obj["matrix"])
    if "dim" in obj and int(obj["dim"]) != matrix.shape[0]:
        raise ValidationError(
            f'declared dim {obj["dim"]} does not match matrix rows {matrix.shape[0]}'
        )
    return validate_state(matrix, tol)


def channel_to_obj(phi: KrausChannel) -> dict:
    return {"dim": phi.dim, "kraus": [matrix_to_obj(m) for m in phi.kraus]}


def channel_from_obj(obj, tol: ToleranceConfig = DEFAULT_TOL) -> KrausChannel:
    if not isinstance(obj, dict) or "kraus" not in obj:
        raise ValidationError('expected an object with a "kraus" field')
    mats = []
    for entry in obj["kraus"]:
        if isinstance(entry, dict):
            mats.append(matrix_from_obj(entry["matrix"]))
        else:
            mats.append(matrix_from_obj(entry))
    phi = kraus_channel(mats, tol)
    if "dim" in obj and int(obj["dim"]) != phi.dim:
        raise ValidationError(
            f'declared dim {obj["dim"]} does not match Kraus dimension {phi.dim}'
        )
    return phi


def choi_to_obj(j: ChoiMatrix) -> dict:
    return {"dim": j.dim, "matrix": matrix_to_obj(j.matrix)}


def choi_from_obj(obj, tol: ToleranceConfig = DEFAULT_TOL) -> ChoiMatrix:
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise ValidationError('expected an object with a "matrix" field')
    j = choi_from_matrix(matrix_from_obj(obj["matrix"]), tol)
    if "dim" in obj and int(obj["dim"]) != j.dim:
        raise ValidationError(
            f'declared dim {obj["dim"]} does not match subsystem dimension {j.dim}'
        )
    return j


def block_structure_to_obj(structure: BlockStructure) -> dict:
    return {
        "dim": structure.dim,
        "blocks": [
            {
                "dim_left": b.dim_left,
                "dim_right": b.dim_right,
                "isometry": matrix_to_obj(b.isometry),
            }
            for b in structure.blocks
        ],
    }


def block_structure_from_obj(obj) -> BlockStructure:
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise ValidationError('expected an object with a "blocks" field')
    blocks = []
    for entry in obj["blocks"]:
        iso = matrix_from_obj(entry["isometry"])
        blocks.append(
            Block(
                isometry=iso,
                dim_left=int(entry["dim_left"]),
                dim_right=int(entry["dim_right"]),
            )
        )
    return BlockStructure(dim=int(obj["dim"]), blocks=tuple(blocks))


def load_json(path) -> object:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def save_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(obj))
        handle.write("\n")


def _batch_from_json_obj(
    obj, tol: ToleranceConfig
) -> list[tuple[StochasticMatrix, ProbabilityVector]]:
    records = obj if isinstance(obj, list) else [obj]
    out = []
    for record in records:
        if not isinstance(record, dict) or "matrix" not in record or "p" not in record:
            raise ValidationError('each record needs "matrix" and "p" fields')
        matrix = np.asarray(record["matrix"], dtype=float)
        out.append(
            (stochastic_matrix(matrix, tol), probability_vector(record["p"], tol))
        )
    return out


def _batch_from_csv(
    text: str, tol: ToleranceConfig
) -> list[tuple[StochasticMatrix, ProbabilityVector]]:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    out = []
    pos = 0
    while pos < len(lines):
        try:
            n = int(lines[pos])
        except ValueError as exc:
            raise ValidationError(f"expected a dimension line, got {lines[pos]!r}") from exc
        if pos + n + 1 >= len(lines):
            raise ValidationError("truncated CSV record")
        rows = []
        for line in lines[pos + 1 : pos + 1 + n]:
            rows.append([float(x) for x in line.split(",")])
        p_entries = [float(x) for x in lines[pos + 1 + n].split(",")]
        out.append(
            (stochastic_matrix(np.asarray(rows), tol), probability_vector(p_entries, tol))
        )
        pos += n + 2
    if not out:
        raise ValidationError("empty classical batch")
    return out


def load_classical_batch(
    path, tol: ToleranceConfig = DEFAULT_TOL
) -> list[tuple[StochasticMatrix, ProbabilityVector]]:
    """Load (B, p) records from a CSV or JSON file (format sniffed by content)."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return _batch_from_json_obj(json.loads(text), tol)
    return _batch_from_csv(text, tol)
