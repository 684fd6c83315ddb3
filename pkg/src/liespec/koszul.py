"""The chain complex ``(E ⊗ ΛL, d(f))`` and the operators built from it.

Coordinates of ``E ⊗ Λ^p`` are laid out degree by degree: wedge index
``alpha`` (strictly increasing tuples, lexicographic order) is the major
key and the ``E`` coordinate the minor one, so the flat index of
``e_s ⊗ x_alpha`` is ``pos(alpha) * d + s``.  In that layout an operator on
the ``Λ`` factor is ``kron(M, I_d)`` and an operator on ``E`` is
``kron(I, A)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from . import numkit as nk
from .errors import CharacterError, DimensionError, FlagError, NotApplicableError, SingularMatrixError
from .liealg import OperatorFamily, StructureConstants, derived_series, verify_closure
from .numkit import DEFAULT_TOL, Tolerances

HOMOTOPY_TOL = 1e-8


@dataclass(frozen=True)
class GradedBasis:
    d: int
    m: int
    degrees: tuple = field(init=False)
    _index: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.d < 1 or self.m < 0:
            raise DimensionError(f"need d >= 1 and m >= 0, got d={self.d}, m={self.m}")
        degrees = tuple(tuple(combinations(range(self.m), p)) for p in range(self.m + 1))
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "_index", tuple({a: i for i, a in enumerate(lst)} for lst in degrees))

    def wedges(self, p: int) -> tuple:
        return self.degrees[p] if 0 <= p <= self.m else ()

    def position(self, alpha) -> int:
        return self._index[len(alpha)][tuple(alpha)]

    def offset(self, alpha, s: int) -> int:
        return self.position(alpha) * self.d + s

    def size(self, p: int) -> int:
        return self.d * comb(self.m, p) if 0 <= p <= self.m else 0


def exterior_basis(d: int, m: int) -> GradedBasis:
    return GradedBasis(d, m)


def normalize_wedge(seq):
    """Sort a wedge monomial.  Returns ``(sign, tuple)`` or ``(0, None)`` on a repeat."""
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0, None
    inversions = sum(1 for a, b in combinations(seq, 2) if a > b)
    return (-1) ** inversions, tuple(sorted(seq))


@dataclass(frozen=True)
class BoundaryFamily:
    """``maps[p]`` is the matrix of ``d_{p-1}(f)``, from degree ``p`` to ``p - 1``."""

    f: tuple
    basis: GradedBasis
    maps: dict

    @property
    def m(self) -> int:
        return self.basis.m

    def out_of(self, p: int) -> np.ndarray:
        if p in self.maps:
            return self.maps[p]
        return np.zeros((self.basis.size(p - 1), self.basis.size(p)), dtype=complex)

    def composite_residuals(self) -> dict:
        """``{p: (|d_{p-1} d_p|_F, |d_{p-1}|_F |d_p|_F)}`` for ``1 <= p < m``."""
        out = {}
        for p in range(1, self.m):
            a, b = self.out_of(p), self.out_of(p + 1)
            out[p] = (nk.fro(a @ b), nk.fro(a) * nk.fro(b))
        return out


class KoszulComplex:
    """The complex of a fixed operator family, affine in the character.

    ``d_{p-1}(f) = const[p] - sum_j f_j * shift[p][j]``; both parts are
    assembled once so that many characters can be evaluated cheaply.
    """

    def __init__(self, fam: OperatorFamily, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL):
        self.fam = fam
        self.sc = sc if sc is not None else verify_closure(fam, tol)
        self.tol = tol
        self.basis = exterior_basis(fam.d, fam.n)
        self._derived = None
        self.const, self.shift = {}, {}
        for p in range(1, fam.n + 1):
            self.const[p], self.shift[p] = self._assemble(p)
        # Magnitude of the data the boundaries are built from; rank cutoffs
        # never drop below rank_rel times this.
        self.scale = max([1.0, self.sc.scale()] + [nk.op_norm(g) for g in fam.generators])

    def _assemble(self, p):
        d, b = self.fam.d, self.basis
        eye = np.eye(d)
        table = self.sc.table()
        const = np.zeros((b.size(p - 1), b.size(p)), dtype=complex)
        shift = np.zeros((self.fam.n,) + const.shape, dtype=complex)
        for alpha in b.wedges(p):
            col = b.position(alpha) * d
            for k, xk in enumerate(alpha):
                row = b.position(alpha[:k] + alpha[k + 1 :]) * d
                sign = (-1) ** k
                const[row : row + d, col : col + d] += sign * self.fam.generators[xk]
                shift[xk, row : row + d, col : col + d] += sign * eye
            for k, l in combinations(range(p), 2):
                rest = alpha[:k] + alpha[k + 1 : l] + alpha[l + 1 :]
                for h in np.flatnonzero(table[:, alpha[k], alpha[l]]):
                    s, target = normalize_wedge((int(h),) + rest)
                    if not s:
                        continue
                    row = b.position(target) * d
                    coef = (-1) ** (k + l) * s * table[h, alpha[k], alpha[l]]
                    const[row : row + d, col : col + d] += coef * eye
        return const, shift

    def derived(self) -> np.ndarray:
        if self._derived is None:
            sub = derived_series(self.sc, self.tol).subspaces
            self._derived = sub[1] if len(sub) > 1 else np.zeros((self.fam.n, 0))
        return self._derived

    def check_character(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=complex).ravel()
        if f.size != self.fam.n:
            raise CharacterError(f"character has {f.size} coordinates, algebra has dimension {self.fam.n}")
        dv = self.derived()
        if dv.shape[1]:
            viol = np.abs(dv.T @ f).max()
            if viol > self.tol.eig_cluster * max(1.0, float(np.abs(f).max())):
                raise CharacterError(f"functional does not vanish on [L, L] (violation {viol:.3e})")
        return f

    def boundary(self, f) -> BoundaryFamily:
        f = self.check_character(f)
        maps = {p: self.const[p] - np.tensordot(f, self.shift[p], axes=1) for p in self.const}
        return BoundaryFamily(tuple(complex(v) for v in f), self.basis, maps)

    def boundary_batch(self, fs) -> dict:
        """``{p: array (batch, rows, cols)}`` for characters given as rows of ``fs``."""
        fs = np.asarray(fs, dtype=complex).reshape(-1, self.fam.n)
        return {p: self.const[p][None] - np.tensordot(fs, self.shift[p], axes=1) for p in self.const}


def boundary(fam: OperatorFamily, f, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL) -> BoundaryFamily:
    return KoszulComplex(fam, sc, tol).boundary(f)


def theta_wedge(sc: StructureConstants, j: int, tol: Tolerances = DEFAULT_TOL) -> list:
    """Matrices of the derivation ``theta(x_j)`` on ``Λ^p span(x_0..x_{j-1})``, ``p = 0..j``.

    Rows and columns follow the lexicographic wedge order; with adapted
    constants each matrix is upper triangular.
    """
    n = sc.n
    if not 0 <= j < n:
        raise DimensionError(f"generator index {j} outside 0..{n - 1}")
    coeff = sc.c[:, :j, j]  # coeff[h, i]: x_h in [x_j, x_i]
    bound = tol.residual * sc.scale()
    if j and coeff[j:].size and np.abs(coeff[j:]).max() > bound:
        raise FlagError(f"span of the first {j} generators is not invariant under ad(x_{j})")
    sub = exterior_basis(1, j)
    mats = []
    for p in range(j + 1):
        mat = np.zeros((comb(j, p), comb(j, p)), dtype=complex)
        for alpha in sub.wedges(p):
            col = sub.position(alpha)
            for k, i in enumerate(alpha):
                for h in np.flatnonzero(coeff[:j, i]):
                    s, target = normalize_wedge(alpha[:k] + (int(h),) + alpha[k + 1 :])
                    if s:
                        mat[sub.position(target), col] += s * coeff[h, i]
        mats.append(mat)
    return mats


def theta(fam: OperatorFamily, j: int, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL) -> list:
    """``1_E ⊗ theta(x_j)`` on each ``E ⊗ Λ^p L_j`` (``L_j`` = span of the first ``j`` generators)."""
    sc = sc if sc is not None else verify_closure(fam, tol)
    eye = np.eye(fam.d)
    return [np.kron(t, eye) for t in theta_wedge(sc, j, tol)]


def xbar(fam: OperatorFamily, j: int, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``x_j ⊗ 1 - 1 ⊗ theta(x_j)`` on the whole of ``E ⊗ Λ L_j``, degrees stacked block-diagonally."""
    blocks = theta(fam, j, sc, tol)
    x = fam.generators[j]
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size), dtype=complex)
    at = 0
    for b in blocks:
        r = b.shape[0]
        out[at : at + r, at : at + r] = np.kron(np.eye(r // fam.d), x) - b
        at += r
    return out


def lp_operator(fam: OperatorFamily, f, p: int, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``L_p = (x_last - f(x_last)) ⊗ 1 - 1 ⊗ theta(x_last)`` on ``E ⊗ Λ^p L'``."""
    n = fam.n
    if not 0 <= p <= n - 1:
        raise DimensionError(f"degree {p} outside 0..{n - 1}")
    f = np.asarray(f, dtype=complex).ravel()
    th = theta_wedge(sc if sc is not None else verify_closure(fam, tol), n - 1, tol)[p]
    r = th.shape[0]
    shifted = fam.generators[-1] - f[-1] * np.eye(fam.d)
    return np.kron(np.eye(r), shifted) - np.kron(th, np.eye(fam.d))


def _embeddings(d: int, m: int):
    """Inclusions of ``E⊗Λ^p L'`` and ``(E⊗Λ^{p-1} L')∧x_last`` into ``E⊗Λ^p L``."""
    full, sub = exterior_basis(d, m), exterior_basis(d, m - 1)
    last = m - 1
    inner, outer = {}, {}
    for p in range(m + 1):
        a = np.zeros((full.size(p), sub.size(p)))
        b = np.zeros((full.size(p), sub.size(p - 1)))
        for alpha in full.wedges(p):
            row = full.position(alpha) * d
            if alpha and alpha[-1] == last:
                col = sub.position(alpha[:-1]) * d
                b[row : row + d, col : col + d] = np.eye(d)
            else:
                col = sub.position(alpha) * d
                a[row : row + d, col : col + d] = np.eye(d)
        inner[p], outer[p] = a, b
    return inner, outer


def _sub_boundary(fam: OperatorFamily, sc: StructureConstants, f, tol: Tolerances):
    """``out_of`` of the complex of ``L'`` (the first ``m - 1`` generators) at ``f`` restricted."""
    m = fam.n
    if m == 1:
        zero = exterior_basis(fam.d, 0)
        return lambda p: np.zeros((zero.size(p - 1), zero.size(p)), dtype=complex)
    sub = KoszulComplex(fam.prefix(m - 1), StructureConstants(sc.c[: m - 1, : m - 1, : m - 1]), tol)
    return sub.boundary(f[: m - 1]).out_of


def split_check(fam: OperatorFamily, f, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Residuals of the splitting of ``d(f)`` along ``L = L' ⊕ <x_last>``.

    Checks, for each degree ``p``, that ``d_{p-1}(f)`` restricted to
    ``E⊗Λ^p L'`` is the boundary of ``L'``, and that on ``a ∧ x_last`` it equals
    ``(-1)^{p+1} L_{p-1}(a) + d'_{p-2}(a) ∧ x_last``.  Returns
    ``{p: max(residual_inner, residual_wedge)}`` (Frobenius norms).
    """
    full = KoszulComplex(fam, sc, tol)
    f = full.check_character(f)
    m, d = fam.n, fam.d
    dd = full.boundary(f)
    sub_out = _sub_boundary(fam, full.sc, f, tol)
    inner, outer = _embeddings(d, m)
    out = {}
    for p in range(1, m + 1):
        lhs = dd.out_of(p)
        r_inner = nk.fro(lhs @ inner[p] - inner[p - 1] @ sub_out(p)) if inner[p].size else 0.0
        expected = (-1) ** (p + 1) * inner[p - 1] @ lp_operator(fam, f, p - 1, full.sc, tol)
        if p >= 2:
            expected = expected + outer[p - 1] @ sub_out(p - 1)
        r_wedge = nk.fro(lhs @ outer[p] - expected)
        out[p] = max(r_inner, r_wedge)
    return out


@dataclass
class HomotopyFamily:
    """``maps[p]``: ``S_p`` from degree ``p`` to ``p + 1``; identity and intertwining residuals per degree."""

    f: tuple
    maps: dict
    identity_residuals: dict
    intertwining_residuals: dict
    tolerance: float

    @property
    def ok(self) -> bool:
        return max(self.identity_residuals.values(), default=0.0) <= self.tolerance and max(
            self.intertwining_residuals.values(), default=0.0
        ) <= self.tolerance

    @property
    def max_identity_residual(self) -> float:
        return max(self.identity_residuals.values(), default=0.0)


def homotopy(
    fam: OperatorFamily,
    f,
    sc: StructureConstants = None,
    tol: Tolerances = DEFAULT_TOL,
    homotopy_tol: float = HOMOTOPY_TOL,
) -> HomotopyFamily:
    """Contracting homotopy for ``d(f)`` when every ``L_p`` is invertible.

    ``S_p`` vanishes on ``(E⊗Λ^{p-1}L')∧x_last`` and sends ``a`` in
    ``E⊗Λ^p L'`` to ``(-1)^p (L_p^{-1} a) ∧ x_last``.  Raises
    :class:`NotApplicableError` when some ``L_p`` is singular.
    """
    full = KoszulComplex(fam, sc, tol)
    f = full.check_character(f)
    m, d = fam.n, fam.d
    dd = full.boundary(f)
    inner, outer = _embeddings(d, m)
    basis = full.basis
    s_maps, inverses = {}, {}
    for p in range(m):
        lp = lp_operator(fam, f, p, full.sc, tol)
        try:
            inverses[p] = nk.solve_linear(lp, np.eye(lp.shape[0]), tol, full.scale)
        except SingularMatrixError as exc:
            raise NotApplicableError(f"L_{p} is singular (rank {exc.rank} < {lp.shape[0]}); f may lie in the spectrum") from exc
        s_maps[p] = (-1) ** p * outer[p + 1] @ inverses[p] @ inner[p].T

    def s(p):
        if p in s_maps:
            return s_maps[p]
        return np.zeros((basis.size(p + 1), basis.size(p)), dtype=complex)

    identity = {}
    for p in range(m + 1):
        lhs = dd.out_of(p + 1) @ s(p) + s(p - 1) @ dd.out_of(p)
        identity[p] = nk.fro(lhs - np.eye(basis.size(p)))

    sub_out = _sub_boundary(fam, full.sc, f, tol)
    intertwining = {}
    for p in range(m - 1):
        dsub = sub_out(p + 1)
        lhs = s(p) @ inner[p] @ dsub @ lp_operator(fam, f, p + 1, full.sc, tol)
        rhs = (-1) ** p * outer[p + 1] @ dsub
        intertwining[p] = nk.fro(lhs - rhs) / (1.0 + nk.fro(rhs))
    return HomotopyFamily(tuple(complex(v) for v in f), s_maps, identity, intertwining, homotopy_tol)
