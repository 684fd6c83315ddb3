"""Joint spectrum of a solvable Lie algebra of matrices.

A character ``f`` lies in the spectrum when the complex ``(E⊗ΛL, d(f))``
has nonzero homology.  The search is restricted to the finite product of
the component spectra ``Sp(x̄_j)``, which contains every spectral point.
Characters are given by their coordinates ``(f(x_1), ..., f(x_n))`` in a
triangular (Jordan-Hölder) basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np

from . import numkit as nk
from .errors import (
    ClassificationError,
    ConsistencyError,
    FlagError,
    NotApplicableError,
    ToleranceError,
)
from .koszul import KoszulComplex, xbar
from .liealg import (
    ABELIAN,
    NILPOTENT,
    NON_SOLVABLE,
    JordanHolderFlag,
    OperatorFamily,
    StructureConstants,
    classify,
    common_eigenvector,
    commutator,
    jordan_holder_flag,
    verify_closure,
)
from .numkit import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class WeightTable:
    j: int
    entries: dict  # wedge tuple over range(j) -> r_alpha

    def values(self) -> list:
        return list(self.entries.values())


@dataclass(frozen=True)
class SpectrumResult:
    points: tuple
    betti: tuple
    candidate_grid: tuple
    flag: JordanHolderFlag
    classification: str

    def original_coordinates(self) -> list:
        """Points as values on the input generators rather than the adapted basis."""
        tinv = np.linalg.inv(self.flag.change_of_basis)
        return [tuple(complex(v) for v in tinv.T @ np.asarray(p)) for p in self.points]


def is_triangular(sc: StructureConstants, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Every prefix span is an ideal: ``c[h, i, j] = 0`` for ``h > i``, ``i < j``."""
    n = sc.n
    bound = tol.residual * sc.scale()
    return all(
        np.abs(sc.c[i + 1 :, i, j]).max(initial=0.0) <= bound for i, j in combinations(range(n), 2)
    )


def _require_triangular(sc, tol):
    if not is_triangular(sc, tol):
        raise FlagError("basis is not adapted to a Jordan-Hölder flag; compute jordan_holder_flag first")


def weights(sc: StructureConstants, j: int, tol: Tolerances = DEFAULT_TOL) -> WeightTable:
    _require_triangular(sc, tol)
    diag = np.array([sc.c[i, i, j] for i in range(j)], dtype=complex)
    entries = {}
    for p in range(j + 1):
        for alpha in combinations(range(j), p):
            entries[alpha] = complex(diag[list(alpha)].sum()) if alpha else 0j
    return WeightTable(j, entries)


def _dedup(values, radius):
    out = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        if not any(abs(v - w) <= radius for w in out):
            out.append(v)
    return out


def component_spectrum(
    fam: OperatorFamily, j: int, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL
) -> list:
    """``Sp(x̄_j)`` as a sorted list: the union over wedges ``alpha`` of ``Sp(x_j) - r_alpha``.

    The union is cross-checked against the eigenvalues of the assembled
    operator ``x_j ⊗ 1 - 1 ⊗ theta(x_j)``; disagreement raises
    :class:`ConsistencyError`.
    """
    sc = sc if sc is not None else verify_closure(fam, tol)
    table = weights(sc, j, tol)
    eig = nk.spectral_set(fam.generators[j], tol)
    mult: dict = {}
    for mu, m in eig:
        for r in table.values():
            mult[mu - r] = mult.get(mu - r, 0) + m
    points = _dedup(list(mult), tol.eig_cluster)
    counts = {p: 0 for p in points}
    for v, m in mult.items():
        counts[min(points, key=lambda p: abs(p - v))] += m

    bar = xbar(fam, j, sc, tol)
    scale = max(nk.op_norm(bar), 1.0)
    assigned = {p: 0 for p in points}
    for lam in nk.eigenvalues(bar):
        near = min(points, key=lambda p: abs(p - lam))
        if abs(near - lam) > nk.defect_radius(counts[near], scale, tol):
            raise ConsistencyError(f"eigenvalue {lam:.6g} of x̄_{j} is far from every predicted value")
        assigned[near] += 1
    if assigned != counts:
        raise ConsistencyError(f"multiplicities of x̄_{j} disagree with the weight formula")
    return points


def homology_dims(
    fam: OperatorFamily, f, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL, complex_=None
) -> tuple:
    """Betti vector ``(dim H_0, ..., dim H_n)`` of ``(E⊗ΛL, d(f))``."""
    cx = complex_ if complex_ is not None else KoszulComplex(fam, sc, tol)
    f = cx.check_character(f)
    return betti_batch(cx, f[None, :], tol)[0]


def betti_batch(cx: KoszulComplex, fs, tol: Tolerances = DEFAULT_TOL) -> list:
    """Betti vectors for many characters at once (rows of ``fs``)."""
    fs = np.asarray(fs, dtype=complex).reshape(-1, cx.fam.n)
    n, d = cx.fam.n, cx.fam.d
    batch = len(fs)
    ranks = np.zeros((batch, n + 2), dtype=int)  # ranks[:, p] = rank of d_{p-1}
    for p, mats in cx.boundary_batch(fs).items():
        s = np.linalg.svd(mats, compute_uv=False)
        top = np.maximum(s[:, :1], cx.scale)
        ranks[:, p] = np.count_nonzero(s > tol.rank_rel * top, axis=1)
    sizes = np.array([d * comb(n, p) for p in range(n + 1)])
    dims = sizes[None, :] - ranks[:, : n + 1] - ranks[:, 1:]
    if dims.min(initial=0) < 0:
        p = int(np.argmin(dims.min(axis=0)))
        raise ToleranceError(f"negative homology dimension in degree {p}; ranks are inconsistent at rank_rel")
    signs = (-1) ** np.arange(n + 1)
    if np.any(dims @ signs != 0):
        raise ToleranceError("Euler characteristic of the complex is not zero")
    return [tuple(int(v) for v in row) for row in dims]


def is_in_spectrum(fam: OperatorFamily, f, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL) -> bool:
    return any(homology_dims(fam, f, sc, tol))


def _character_filter(cx: KoszulComplex, cands: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Drop candidates not vanishing on [L, L]; project survivors onto the character subspace."""
    dv = cx.derived()
    if not dv.shape[1] or not len(cands):
        return cands
    viol = np.abs(cands @ dv).max(axis=1)
    scale = np.maximum(1.0, np.abs(cands).max(axis=1))
    keep = cands[viol <= tol.eig_cluster * scale]
    return keep - (keep @ dv) @ dv.conj().T


def spectrum_in_basis(fam: OperatorFamily, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL):
    """Spectrum points, Betti vectors and candidate grid for a family whose
    basis is already triangular.  Coordinates are in that basis."""
    sc = sc if sc is not None else verify_closure(fam, tol)
    _require_triangular(sc, tol)
    grid = tuple(tuple(component_spectrum(fam, j, sc, tol)) for j in range(fam.n))
    cx = KoszulComplex(fam, sc, tol)
    cands = np.array(list(product(*grid)), dtype=complex).reshape(-1, fam.n)
    cands = _character_filter(cx, cands, tol)
    pts, bet = [], []
    if len(cands):
        for f, b in zip(cands, betti_batch(cx, cands, tol)):
            if any(b):
                pts.append(tuple(complex(v) for v in f))
                bet.append(b)
    kept = nk.dedup_points(pts, tol.eig_cluster)
    betti = [bet[pts.index(p)] for p in kept]
    return tuple(kept), tuple(betti), grid


def joint_spectrum(fam: OperatorFamily, tol: Tolerances = DEFAULT_TOL) -> SpectrumResult:
    sc = verify_closure(fam, tol)
    cls = classify(sc, tol)
    if cls == NON_SOLVABLE:
        raise ClassificationError("the joint spectrum is defined here only for solvable algebras", cls)
    flag = jordan_holder_flag(fam, sc, tol)
    points, betti, grid = spectrum_in_basis(flag.adapted, flag.constants, tol)
    if not points:
        raise ToleranceError("no spectral point found; the spectrum is never empty, so tolerances are off")
    return SpectrumResult(points, betti, grid, flag, cls)


def taylor_oracle(fam: OperatorFamily, tol: Tolerances = DEFAULT_TOL) -> list:
    """Joint eigenvalues of a commuting family by repeated common-eigenvector deflation."""
    mats = [np.array(g) for g in fam.generators]
    for a, b in combinations(mats, 2):
        if nk.fro(commutator(a, b)) > tol.residual * (1.0 + nk.fro(a) * nk.fro(b)):
            raise NotApplicableError("taylor_oracle needs a commuting family")
    found = []
    while mats[0].shape[0] > 0:
        v, w = common_eigenvector(mats, tol)
        found.append(tuple(w))
        r = mats[0].shape[0]
        q, _ = np.linalg.qr(np.column_stack([v, np.eye(r)]))
        mats = [(q.conj().T @ m @ q)[1:, 1:] for m in mats]
    return nk.dedup_points(found, tol.eig_cluster)


@dataclass(frozen=True)
class ProjectionReport:
    j: int
    ideal_points: tuple
    projected_points: tuple
    radius: float

    @property
    def ok(self) -> bool:
        return nk.sets_match(self.ideal_points, self.projected_points, self.radius)


def projection_check(
    fam: OperatorFamily,
    j: int,
    sc: StructureConstants = None,
    tol: Tolerances = DEFAULT_TOL,
    radius: float = None,
    full_points=None,
) -> ProjectionReport:
    """Compare ``Sp(L_j)`` with the truncation of ``Sp(L)`` to its first ``j`` coordinates."""
    sc = sc if sc is not None else verify_closure(fam, tol)
    if full_points is None:
        full_points, _, _ = spectrum_in_basis(fam, sc, tol)
    sub_sc = StructureConstants(sc.c[:j, :j, :j])
    ideal, _, _ = spectrum_in_basis(fam.prefix(j), sub_sc, tol)
    proj = nk.dedup_points([p[:j] for p in full_points], tol.eig_cluster)
    return ProjectionReport(j, tuple(ideal), tuple(proj), radius if radius is not None else tol.eig_cluster)


@dataclass(frozen=True)
class NilpotentBoundReport:
    max_weight: float
    product_ok: bool
    max_norm_excess: float
    samples: int

    def ok(self, weight_tol: float = 1e-10, norm_tol: float = 1e-8) -> bool:
        return self.max_weight <= weight_tol and self.product_ok and self.max_norm_excess <= norm_tol


def nilpotent_bound_check(
    fam: OperatorFamily, tol: Tolerances = DEFAULT_TOL, samples: int = 20, seed: int = 0, result: SpectrumResult = None
) -> NilpotentBoundReport:
    """Product bound and norm bound for a nilpotent family."""
    sc = verify_closure(fam, tol)
    cls = classify(sc, tol)
    if cls not in (ABELIAN, NILPOTENT):
        raise NotApplicableError(f"nilpotent bound needs a nilpotent algebra, got {cls}")
    res = result if result is not None else joint_spectrum(fam, tol)
    adapted, asc = res.flag.adapted, res.flag.constants
    wmax = max(
        (abs(r) for j in range(adapted.n) for r in weights(asc, j, tol).values()), default=0.0
    )
    spectra = [[mu for mu, _ in nk.spectral_set(g, tol)] for g in adapted.generators]
    product_ok = all(
        any(abs(v - mu) <= tol.eig_cluster for mu in spectra[i]) for p in res.points for i, v in enumerate(p)
    )
    rng = np.random.default_rng(seed)
    excess = -np.inf
    for _ in range(samples):
        a = rng.standard_normal(adapted.n) + 1j * rng.standard_normal(adapted.n)
        a /= np.linalg.norm(a)
        norm = nk.op_norm(adapted.element(a))
        for p in res.points:
            excess = max(excess, abs(np.dot(a, p)) - norm)
    return NilpotentBoundReport(float(wmax), bool(product_ok), float(excess), samples)


def scan_axes(result: SpectrumResult, step: float = 0.25) -> list:
    """Per coordinate ``j``, a grid of complex values covering the eigenvalues of
    ``x_j`` and the candidates for ``j``, padded by one step on every side."""
    axes = []
    for j, g in enumerate(result.flag.adapted.generators):
        vals = [complex(v) for v in nk.eigenvalues(g)] + list(result.candidate_grid[j])
        re = [v.real for v in vals]
        im = [v.imag for v in vals]
        res = np.arange(np.floor(min(re) / step) - 1, np.ceil(max(re) / step) + 2) * step
        ims = np.arange(np.floor(min(im) / step) - 1, np.ceil(max(im) / step) + 2) * step
        axes.append((res[:, None] + 1j * ims[None, :]).ravel())
    return axes


def grid_scan(result: SpectrumResult, tol: Tolerances = DEFAULT_TOL, step: float = 0.25, radius: float = 1e-6):
    """Characters on a regular grid with nonzero homology lying off the candidate product.

    Only coordinates outside ``[L, L]`` vary; those inside are fixed at 0.
    Returns ``(offending points, number scanned)``.
    """
    flag = result.flag
    axes = scan_axes(result, step)
    free = list(range(flag.k, flag.n))
    cx = KoszulComplex(flag.adapted, flag.constants, tol)
    grids = np.array(list(product(*[axes[j] for j in free])), dtype=complex).reshape(-1, len(free))
    fs = np.zeros((len(grids), flag.n), dtype=complex)
    fs[:, free] = grids
    grid = result.candidate_grid
    offending, scanned = [], 0
    for start in range(0, len(fs), 4096):
        chunk = fs[start : start + 4096]
        for f, b in zip(chunk, betti_batch(cx, chunk, tol)):
            scanned += 1
            if not any(b):
                continue
            near = all(min(abs(f[i] - g) for g in grid[i]) <= radius for i in range(flag.n))
            if not near:
                offending.append(tuple(complex(v) for v in f))
    return offending, scanned
