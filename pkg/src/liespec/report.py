"""Report documents: one JSON-compatible dict per run, plus a text rendering.

Floats are rounded to 12 significant digits and values below ``CHOP`` in
magnitude are written as 0, so repeated runs produce byte-identical output.
Complex numbers are ``[re, im]`` pairs.
"""
from __future__ import annotations

import json
from itertools import combinations

import numpy as np

from .liealg import (
    NON_SOLVABLE,
    OperatorFamily,
    classify,
    derived_series,
    jordan_holder_flag,
    lower_central_series,
    verify_closure,
)
from .numkit import Tolerances
from .spectrum import SpectrumResult, weights

SCHEMA = "liespec.report/1"
DIGITS = 12
CHOP = 1e-11


def real(x) -> float:
    x = float(x)
    if abs(x) < CHOP:
        return 0.0
    return float(f"{x:.{DIGITS}g}")


def cplx(z) -> list:
    z = complex(z)
    return [real(z.real), real(z.imag)]


def cmatrix(m) -> list:
    return [[cplx(v) for v in row] for row in np.asarray(m)]


def _constants(sc) -> list:
    """Nonzero ``c[h, i, j]`` with ``i < j``: coefficient of ``x_h`` in ``[x_j, x_i]``."""
    out = []
    for i, j in combinations(range(sc.n), 2):
        for h in range(sc.n):
            value = cplx(sc.c[h, i, j])
            if value != [0.0, 0.0]:
                out.append({"h": h, "i": i, "j": j, "value": value})
    return out


def _flag(flag) -> dict:
    return {
        "labels": list(flag.adapted.labels),
        "change_of_basis": cmatrix(flag.change_of_basis),
        "ideal_dims": list(flag.ideal_dims),
        "k": flag.k,
        "nilpotent_shape": flag.nilpotent_shape,
    }


def structure_report(name: str, fam: OperatorFamily, tol: Tolerances) -> dict:
    """Classification, series and flag; no spectral computation."""
    sc = verify_closure(fam, tol)
    cls = classify(sc, tol)
    doc = {
        "schema": SCHEMA,
        "instance": {"name": name, "space_dim": fam.d, "generators": list(fam.labels)},
        "tolerances": tol.as_dict(),
        "classification": cls,
        "series": {
            "derived": list(derived_series(sc, tol).dims),
            "lower_central": list(lower_central_series(sc, tol).dims),
        },
        "structure_constants": _constants(sc),
        "flag": None,
    }
    if cls != NON_SOLVABLE:
        flag = jordan_holder_flag(fam, sc, tol)
        doc["flag"] = _flag(flag)
        doc["adapted_structure_constants"] = _constants(flag.constants)
    return doc


def add_spectrum(doc: dict, result: SpectrumResult, tol: Tolerances) -> dict:
    flag = result.flag
    doc["component_spectra"] = [
        {"j": j, "label": flag.adapted.labels[j], "values": [cplx(v) for v in comp]}
        for j, comp in enumerate(result.candidate_grid)
    ]
    doc["weights"] = [
        {
            "j": j,
            "entries": [{"alpha": list(alpha), "r": cplx(r)} for alpha, r in weights(flag.constants, j, tol).entries.items()],
        }
        for j in range(flag.n)
    ]
    original = result.original_coordinates()
    rows = [
        {
            "coords": [cplx(v) for v in p],
            "original_coords": [cplx(v) for v in q],
            "betti": list(b),
        }
        for p, q, b in zip(result.points, original, result.betti)
    ]
    rows.sort(key=lambda r: r["coords"])
    doc["points"] = rows
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _fmt(pair) -> str:
    re, im = pair
    if im == 0.0:
        return f"{re:g}"
    if re == 0.0:
        return f"{im:g}i"
    return f"{re:g}{'+' if im > 0 else '-'}{abs(im):g}i"


def _tuple(pairs) -> str:
    return "(" + ", ".join(_fmt(p) for p in pairs) + ")"


def render_text(doc: dict) -> str:
    lines = []
    inst = doc.get("instance")
    if inst:
        lines.append(f"instance        {inst['name']}  (space dim {inst['space_dim']}, generators {', '.join(inst['generators'])})")
    if "classification" in doc:
        lines.append(f"classification  {doc['classification']}")
    if "series" in doc:
        lines.append(f"derived dims    {tuple(doc['series']['derived'])}")
        lines.append(f"lower central   {tuple(doc['series']['lower_central'])}")
    flag = doc.get("flag")
    if flag:
        lines.append(f"adapted basis   {', '.join(flag['labels'])}  (k = {flag['k']}, ideal dims {tuple(flag['ideal_dims'])})")
        for row in flag["change_of_basis"]:
            lines.append("                [" + ", ".join(_fmt(v) for v in row) + "]")
    for comp in doc.get("component_spectra", []):
        lines.append(f"Sp(x̄_{comp['j']})         {{{', '.join(_fmt(v) for v in comp['values'])}}}")
    if "points" in doc:
        lines.append(f"spectrum        {len(doc['points'])} point(s)")
        for p in doc["points"]:
            lines.append(f"  {_tuple(p['coords'])}  betti {tuple(p['betti'])}")
    if "oracle" in doc:
        lines.append(f"joint eigenvalues  {len(doc['oracle'])} point(s)")
        for p in doc["oracle"]:
            lines.append(f"  {_tuple(p)}")
    for name, check in doc.get("checks", {}).items():
        detail = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in check.items() if k != "status")
        lines.append(f"check {name:<11} {check['status']}" + (f"  ({detail})" if detail else ""))
    if "error" in doc:
        lines.append(f"error           {doc['error']['type']}: {doc['error']['message']}")
    return "\n".join(lines) + "\n"
