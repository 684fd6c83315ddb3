"""Instance files: JSON documents describing an operator family.

Schema::

    {"name": str, "space_dim": int,
     "generators": [{"label": str, "matrix": [[[re, im], ...], ...]}, ...],
     "tolerances": {"rank_rel": float, "eig_cluster": float, "residual": float}}   # optional
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InstanceError
from .liealg import OperatorFamily, verify_closure
from .numkit import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class Instance:
    name: str
    family: OperatorFamily
    tolerances: Tolerances


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceError(f"{where}: expected a number, got {value!r}")
    if not np.isfinite(value):
        raise InstanceError(f"{where}: non-finite value")
    return float(value)


def _matrix(raw, size: int, label: str) -> np.ndarray:
    where = f"generator {label!r}"
    if not isinstance(raw, list) or len(raw) != size:
        got = len(raw) if isinstance(raw, list) else type(raw).__name__
        raise InstanceError(f"{where}: matrix must have {size} rows, got {got}")
    out = np.zeros((size, size), dtype=complex)
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != size:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise InstanceError(f"{where}: row {r} must have {size} entries, got {got}")
        for c, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                raise InstanceError(f"{where}: entry [{r}][{c}] must be a [re, im] pair")
            out[r, c] = complex(_number(entry[0], f"{where}[{r}][{c}]"), _number(entry[1], f"{where}[{r}][{c}]"))
    return out


def instance_from_dict(doc: dict, overrides: dict = None, check_closure: bool = True) -> Instance:
    """Validate a decoded instance document.  Non-``None`` entries of
    ``overrides`` take precedence over the document's own tolerances."""
    if not isinstance(doc, dict):
        raise InstanceError("top level must be a JSON object")
    for key in ("name", "space_dim", "generators"):
        if key not in doc:
            raise InstanceError(f"missing field {key!r}")
    name = doc["name"]
    if not isinstance(name, str):
        raise InstanceError("field 'name' must be a string")
    size = doc["space_dim"]
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise InstanceError("field 'space_dim' must be a positive integer")
    gens = doc["generators"]
    if not isinstance(gens, list) or not gens:
        raise InstanceError("field 'generators' must be a non-empty array")
    labels, mats = [], []
    for i, g in enumerate(gens):
        if not isinstance(g, dict) or "label" not in g or "matrix" not in g:
            raise InstanceError(f"generators[{i}] must be an object with 'label' and 'matrix'")
        if not isinstance(g["label"], str):
            raise InstanceError(f"generators[{i}].label must be a string")
        labels.append(g["label"])
        mats.append(_matrix(g["matrix"], size, g["label"]))
    if len(set(labels)) != len(labels):
        raise InstanceError("generator labels must be distinct")

    in_file = doc.get("tolerances") or {}
    if not isinstance(in_file, dict):
        raise InstanceError("field 'tolerances' must be an object")
    unknown = set(in_file) - {"rank_rel", "eig_cluster", "residual"}
    if unknown:
        raise InstanceError(f"unknown tolerance fields: {', '.join(sorted(unknown))}")
    try:
        base = DEFAULT_TOL.updated(**{k: _number(v, f"tolerances.{k}") for k, v in in_file.items()})
        base = base.updated(**(overrides or {}))
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc

    fam = OperatorFamily(tuple(mats), tuple(labels))
    if check_closure:
        verify_closure(fam, base)
    return Instance(name, fam, base)


def parse_instance(path, overrides: dict = None, check_closure: bool = True) -> Instance:
    """Read and validate an instance file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return instance_from_dict(doc, overrides, check_closure)
    except InstanceError as exc:
        raise InstanceError(f"{path}: {exc}") from exc


def instance_to_dict(name: str, fam: OperatorFamily, tol: Tolerances = None) -> dict:
    doc = {
        "name": name,
        "space_dim": fam.d,
        "generators": [
            {
                "label": label,
                "matrix": [[[float(v.real), float(v.imag)] for v in row] for row in g],
            }
            for label, g in zip(fam.labels, fam.generators)
        ],
    }
    if tol is not None:
        doc["tolerances"] = tol.as_dict()
    return doc


def dumps_instance(doc: dict) -> str:
    """JSON text with one matrix row per line."""
    lines = ["{", f'  "name": {json.dumps(doc["name"])},', f'  "space_dim": {doc["space_dim"]},', '  "generators": [']
    for gi, g in enumerate(doc["generators"]):
        lines.append(f'    {{"label": {json.dumps(g["label"])}, "matrix": [')
        rows = [json.dumps(row) for row in g["matrix"]]
        lines += [f"      {r}{',' if ri < len(rows) - 1 else ''}" for ri, r in enumerate(rows)]
        lines.append("    ]}" + ("," if gi < len(doc["generators"]) - 1 else ""))
    lines.append("  ]" + ("," if "tolerances" in doc else ""))
    if "tolerances" in doc:
        lines.append(f'  "tolerances": {json.dumps(doc["tolerances"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"
