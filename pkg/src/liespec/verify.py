"""Named consistency checks run against a computed spectrum.

Each check returns a dict with a ``status`` of ``"pass"``, ``"fail"`` or
``"skipped: precondition"`` plus the residuals it measured.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from . import numkit as nk
from .errors import NotApplicableError
from .koszul import KoszulComplex, homotopy, split_check
from .liealg import ABELIAN, commutator
from .numkit import Tolerances
from .spectrum import SpectrumResult, grid_scan, nilpotent_bound_check, projection_check, taylor_oracle

CHECKS = ("dd", "split", "homotopy", "thm1", "thm2", "projection", "oracle")
SKIPPED = "skipped: precondition"

DD_TOL = 1e-10
SPLIT_TOL = 1e-10
HOMOTOPY_TOL = 1e-8
MATCH_RADIUS = 1e-7
SCAN_STEP = 0.25
SCAN_RADIUS = 1e-6
SCAN_MAX_DIM = 3
SAMPLES = 5


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def sample_characters(cx: KoszulComplex, count: int, rng, spread: float = 3.0) -> list:
    """Random characters: complex Gaussian coordinates projected off ``[L, L]``."""
    n = cx.fam.n
    dv = cx.derived()
    out = []
    for _ in range(count):
        f = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * spread
        if dv.shape[1]:
            f = f - (f @ dv) @ dv.conj().T
            f[np.abs(f) < 1e-14] = 0
        out.append(f)
    return out


def off_grid_characters(cx: KoszulComplex, grid, count: int, rng, margin: float = 1e-2) -> list:
    """Random characters whose last coordinate keeps ``margin`` away from the last component spectrum."""
    out = []
    while len(out) < count:
        (f,) = sample_characters(cx, 1, rng)
        if min(abs(f[-1] - g) for g in grid[-1]) > margin:
            out.append(f)
    return out


def check_dd(result: SpectrumResult, cx: KoszulComplex, chars) -> dict:
    worst = 0.0
    for f in chars:
        for num, den in cx.boundary(f).composite_residuals().values():
            worst = max(worst, num / den if den > 0 else num)
    return {"status": _status(worst <= DD_TOL), "max_relative_residual": worst, "characters": len(chars)}


def check_split(result: SpectrumResult, tol: Tolerances, chars) -> dict:
    flag = result.flag
    worst = 0.0
    for f in chars:
        worst = max([worst] + list(split_check(flag.adapted, f, flag.constants, tol).values()))
    return {"status": _status(worst <= SPLIT_TOL), "max_residual": worst, "characters": len(chars)}


def check_homotopy(result: SpectrumResult, tol: Tolerances, chars) -> dict:
    """Off-grid characters must admit a contracting homotopy; spectrum points must not."""
    flag = result.flag
    worst, built = 0.0, 0
    for f in chars:
        try:
            h = homotopy(flag.adapted, f, flag.constants, tol, HOMOTOPY_TOL)
        except NotApplicableError:
            continue
        built += 1
        worst = max([worst] + list(h.identity_residuals.values()) + list(h.intertwining_residuals.values()))
    contradictions = 0
    for p in result.points:
        try:
            if homotopy(flag.adapted, np.asarray(p), flag.constants, tol, HOMOTOPY_TOL).ok:
                contradictions += 1
        except NotApplicableError:
            pass
    ok = built == len(chars) and worst <= HOMOTOPY_TOL and contradictions == 0
    return {
        "status": _status(ok),
        "built": built,
        "characters": len(chars),
        "max_residual": worst,
        "homotopies_at_spectrum_points": contradictions,
    }


def check_thm1(result: SpectrumResult, tol: Tolerances) -> dict:
    grid = result.candidate_grid
    inside = all(
        min(abs(v - g) for g in grid[i]) <= tol.eig_cluster for p in result.points for i, v in enumerate(p)
    )
    k = result.flag.k
    characters = all(abs(v) <= tol.residual for p in result.points for v in p[:k])
    out = {"in_grid": inside, "characters": characters, "nonempty": bool(result.points)}
    ok = inside and characters and bool(result.points)
    fam = result.flag.adapted
    if fam.d <= SCAN_MAX_DIM and fam.n <= SCAN_MAX_DIM:
        offending, scanned = grid_scan(result, tol, SCAN_STEP, SCAN_RADIUS)
        out["scanned"] = scanned
        out["off_grid_hits"] = len(offending)
        ok = ok and not offending
    return {"status": _status(ok), **out}


def check_thm2(result: SpectrumResult, tol: Tolerances) -> dict:
    try:
        rep = nilpotent_bound_check(result.flag.original, tol, result=result)
    except NotApplicableError:
        return {"status": SKIPPED, "reason": f"classification is {result.classification}"}
    return {
        "status": _status(rep.ok()),
        "max_weight": rep.max_weight,
        "in_product": rep.product_ok,
        "max_norm_excess": rep.max_norm_excess,
    }


def check_projection(result: SpectrumResult, tol: Tolerances) -> dict:
    flag = result.flag
    bad = []
    for j in range(1, flag.n):
        rep = projection_check(flag.adapted, j, flag.constants, tol, MATCH_RADIUS, result.points)
        if not rep.ok:
            bad.append(j)
    return {"status": _status(not bad), "prefixes": max(flag.n - 1, 0), "mismatched_prefixes": bad}


def check_oracle(result: SpectrumResult, tol: Tolerances) -> dict:
    fam = result.flag.original
    mats = fam.generators
    commuting = result.classification == ABELIAN and all(
        nk.fro(commutator(a, b)) <= tol.residual * (1.0 + nk.fro(a) * nk.fro(b)) for a, b in combinations(mats, 2)
    )
    if not commuting:
        return {"status": SKIPPED, "reason": "family does not commute"}
    oracle = taylor_oracle(fam, tol)
    ok = nk.sets_match(result.original_coordinates(), oracle, MATCH_RADIUS)
    return {"status": _status(ok), "spectrum_points": len(result.points), "oracle_points": len(oracle)}


def run_checks(result: SpectrumResult, names, tol: Tolerances, seed: int = 0) -> dict:
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    rng = np.random.default_rng(seed)
    flag = result.flag
    cx = KoszulComplex(flag.adapted, flag.constants, tol)
    chars = sample_characters(cx, SAMPLES, rng) + [np.asarray(p) for p in result.points]
    out = {}
    for name in names:
        if name == "dd":
            out[name] = check_dd(result, cx, chars)
        elif name == "split":
            out[name] = check_split(result, tol, chars)
        elif name == "homotopy":
            out[name] = check_homotopy(result, tol, off_grid_characters(cx, result.candidate_grid, SAMPLES, rng))
        elif name == "thm1":
            out[name] = check_thm1(result, tol)
        elif name == "thm2":
            out[name] = check_thm2(result, tol)
        elif name == "projection":
            out[name] = check_projection(result, tol)
        else:
            out[name] = check_oracle(result, tol)
    return out
