"""Lie algebras of matrices.

Operators act on the right, so the bracket of two matrices is the opposite
commutator ``[a, b] = b a - a b``.  Structure constants are stored as a
tensor ``c[h, i, j]`` holding the coefficient of ``x_h`` in ``[x_j, x_i]``;
indices are 0-based throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import numkit as nk
from .errors import (
    ClassificationError,
    DegenerateBasisError,
    DimensionError,
    FlagError,
    NotClosedError,
    ToleranceError,
)
from .numkit import DEFAULT_TOL, Tolerances

ABELIAN = "abelian"
NILPOTENT = "nilpotent"
SOLVABLE = "solvable"
NON_SOLVABLE = "non_solvable"


@dataclass(frozen=True)
class OperatorFamily:
    """``n`` square ``d x d`` matrices, read as a basis of a Lie algebra acting on C^d."""

    generators: tuple
    labels: tuple = ()

    def __post_init__(self):
        gens = tuple(nk.as_cmatrix(g, square=True, name=f"generator {i}") for i, g in enumerate(self.generators))
        if not gens:
            raise DimensionError("an operator family needs at least one generator")
        d = gens[0].shape[0]
        for i, g in enumerate(gens):
            if g.shape != (d, d):
                raise DimensionError(f"generator {i} has shape {g.shape}, expected {(d, d)}")
            g.setflags(write=False)
        labels = tuple(self.labels) if self.labels else tuple(f"x{i + 1}" for i in range(len(gens)))
        if len(labels) != len(gens):
            raise DimensionError(f"{len(labels)} labels for {len(gens)} generators")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "labels", labels)

    @property
    def d(self) -> int:
        return self.generators[0].shape[0]

    @property
    def n(self) -> int:
        return len(self.generators)

    def stacked(self) -> np.ndarray:
        """Generators as the columns of a ``d*d x n`` matrix."""
        return np.stack([g.ravel() for g in self.generators], axis=1)

    def element(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=complex)
        return np.tensordot(coords, np.stack(self.generators), axes=1)

    def prefix(self, j: int) -> "OperatorFamily":
        return OperatorFamily(self.generators[:j], self.labels[:j])

    def conjugated(self, p) -> "OperatorFamily":
        p = nk.as_cmatrix(p, square=True)
        pinv = np.linalg.inv(p)
        return OperatorFamily(tuple(p @ g @ pinv for g in self.generators), self.labels)


@dataclass(frozen=True)
class StructureConstants:
    c: np.ndarray

    @property
    def n(self) -> int:
        return self.c.shape[0]

    def table(self) -> np.ndarray:
        """``T[h, a, b]``: coefficient of ``x_h`` in ``[x_a, x_b]``."""
        return np.transpose(self.c, (0, 2, 1))

    def bracket(self, u, v) -> np.ndarray:
        """Coordinates of ``[u, v]`` for coordinate vectors ``u``, ``v``."""
        return np.einsum("hab,a,b->h", self.table(), np.asarray(u, complex), np.asarray(v, complex))

    def ad(self, a: int) -> np.ndarray:
        """Matrix of ``ad(x_a)`` acting on coordinate vectors."""
        return self.table()[:, a, :]

    def scale(self) -> float:
        return max(float(np.max(np.abs(self.c))) if self.c.size else 0.0, 1.0)

    def antisymmetry_residual(self) -> float:
        if self.c.size == 0:
            return 0.0
        return float(np.max(np.abs(self.c + np.transpose(self.c, (0, 2, 1)))))

    def jacobi_residual(self) -> float:
        if self.n == 0:
            return 0.0
        t = self.table()
        # j[h, a, b, c] = [x_a, [x_b, x_c]]
        j = np.einsum("gbc,hag->habc", t, t)
        cyc = j + np.transpose(j, (0, 2, 3, 1)) + np.transpose(j, (0, 3, 1, 2))
        return float(np.max(np.abs(cyc)))


@dataclass(frozen=True)
class SeriesChain:
    kind: str
    subspaces: tuple
    dims: tuple


@dataclass(frozen=True)
class JordanHolderFlag:
    change_of_basis: np.ndarray
    adapted: OperatorFamily
    constants: StructureConstants
    ideal_dims: tuple
    k: int
    nilpotent_shape: bool
    original: OperatorFamily = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return self.adapted.n

    def to_original(self, coords) -> np.ndarray:
        """Express adapted coordinates of an algebra element in the input basis."""
        return self.change_of_basis @ np.asarray(coords, dtype=complex)


def commutator(a, b) -> np.ndarray:
    a = nk.as_cmatrix(a, square=True, name="a")
    b = nk.as_cmatrix(b, square=True, name="b")
    if a.shape != b.shape:
        raise DimensionError(f"cannot bracket shapes {a.shape} and {b.shape}")
    return b @ a - a @ b


def verify_closure(fam: OperatorFamily, tol: Tolerances = DEFAULT_TOL) -> StructureConstants:
    """Structure constants of ``fam``, checking independence and closure."""
    n = fam.n
    g = fam.stacked()
    rank = nk.numerical_rank(g, tol)
    if rank < n:
        raise DegenerateBasisError(
            f"generators {', '.join(fam.labels)} are linearly dependent (rank {rank} < {n})"
        )
    c = np.zeros((n, n, n), dtype=complex)
    for i, j in combinations(range(n), 2):
        br = commutator(fam.generators[j], fam.generators[i])
        coef, *_ = np.linalg.lstsq(g, br.ravel(), rcond=None)
        res = nk.fro(g @ coef - br.ravel())
        if res > tol.residual * (1.0 + nk.fro(br)):
            raise NotClosedError(
                f"bracket [{fam.labels[j]}, {fam.labels[i]}] leaves the span "
                f"(residual {res:.3e})",
                pair=(fam.labels[j], fam.labels[i]),
            )
        c[:, i, j] = coef
        c[:, j, i] = -coef
    return StructureConstants(c)


def _span(vectors, n: int, tol: Tolerances, floor: float) -> np.ndarray:
    if not vectors:
        return np.zeros((n, 0), dtype=complex)
    return nk.range_basis(np.stack(vectors, axis=1), tol, floor)


def derived_series(sc: StructureConstants, tol: Tolerances = DEFAULT_TOL) -> SeriesChain:
    n = sc.n
    current = np.eye(n, dtype=complex)
    subspaces, dims = [current], [n]
    while current.shape[1] > 0:
        cols = [current[:, a] for a in range(current.shape[1])]
        nxt = _span([sc.bracket(u, v) for u, v in combinations(cols, 2)], n, tol, sc.scale())
        subspaces.append(nxt)
        dims.append(nxt.shape[1])
        if nxt.shape[1] == current.shape[1]:
            break
        current = nxt
    return SeriesChain("derived", tuple(subspaces), tuple(dims))


def lower_central_series(sc: StructureConstants, tol: Tolerances = DEFAULT_TOL) -> SeriesChain:
    n = sc.n
    current = np.eye(n, dtype=complex)
    subspaces, dims = [current], [n]
    while current.shape[1] > 0:
        nxt = _span(
            [sc.bracket(np.eye(n)[a], current[:, b]) for a in range(n) for b in range(current.shape[1])],
            n,
            tol,
            sc.scale(),
        )
        subspaces.append(nxt)
        dims.append(nxt.shape[1])
        if nxt.shape[1] == current.shape[1]:
            break
        current = nxt
    return SeriesChain("lower_central", tuple(subspaces), tuple(dims))


def classify(sc: StructureConstants, tol: Tolerances = DEFAULT_TOL) -> str:
    if sc.c.size == 0 or np.max(np.abs(sc.c)) <= tol.residual * sc.scale():
        return ABELIAN
    if lower_central_series(sc, tol).dims[-1] == 0:
        return NILPOTENT
    if derived_series(sc, tol).dims[-1] == 0:
        return SOLVABLE
    return NON_SOLVABLE


def _normalize(v) -> np.ndarray:
    """Scale so the first entry of (near-)maximal modulus equals 1."""
    mags = np.abs(v)
    top = mags.max()
    idx = int(np.argmax(mags >= top * (1 - 1e-12)))
    return v / v[idx]


def _matrix_span(mats, tol: Tolerances, floor: float) -> list:
    if not mats:
        return []
    d = mats[0].shape[0]
    basis = nk.range_basis(np.stack([m.ravel() for m in mats], axis=1), tol, floor)
    return [basis[:, i].reshape(d, d) for i in range(basis.shape[1])]


def _in_matrix_span(span, m, tol: Tolerances, floor: float) -> bool:
    vec = m.ravel()[:, None]
    if not span:
        return nk.fro(m) <= tol.rank_rel * floor
    base = np.stack([s.ravel() for s in span], axis=1)
    return nk.numerical_rank(np.hstack([base, vec]), tol, floor) == nk.numerical_rank(base, tol, floor)


def _pick_eigvec(z, tol: Tolerances, floor: float) -> np.ndarray:
    """Eigenvector of ``z``: largest eigenspace first, then smallest (re, im)."""
    best = None
    for mu, _ in nk.spectral_set(z, tol):
        shifted = z - mu * np.eye(z.shape[0])
        _, s, vh = np.linalg.svd(shifted)
        geo = max(1, z.shape[0] - nk.rank_from_singular_values(s, tol.rank_rel, floor))
        if best is None or geo > best[0]:
            best = (geo, vh[-1].conj())
    return best[1]


def _common_eigvec(mats: list, tol: Tolerances, scale: float = None) -> np.ndarray:
    """``scale`` is the norm of the top-level input; rank decisions never go below it."""
    d = mats[0].shape[0]
    if scale is None:
        scale = max(max(nk.fro(m) for m in mats), 1.0)
    span = _matrix_span(mats, tol, scale)
    if not span:
        return np.eye(d, dtype=complex)[:, 0]
    derived = _matrix_span([commutator(a, b) for a, b in combinations(span, 2)], tol, 1.0)
    if len(derived) >= len(span):
        raise ClassificationError("matrices do not span a solvable Lie algebra", NON_SOLVABLE)
    ideal = list(derived)
    z = None
    for m in mats:
        if _in_matrix_span(ideal, m, tol, scale):
            continue
        if len(ideal) < len(span) - 1:
            ideal.append(m)
        else:
            z = m
            break
    if z is None:
        raise ToleranceError("could not split the span into an ideal plus one element; loosen rank_rel")
    if ideal:
        v = _common_eigvec(ideal, tol, scale)
        lam = [np.vdot(v, k @ v) / np.vdot(v, v) for k in ideal]
        shifted = np.vstack([k - l * np.eye(d) for k, l in zip(ideal, lam)])
        q = nk.null_space(shifted, tol, scale)
        if q.shape[1] == 0:
            raise ToleranceError("empty joint weight space; loosen rank_rel")
    else:
        q = np.eye(d, dtype=complex)
    zw = q.conj().T @ z @ q
    u = _pick_eigvec(zw, tol, scale)
    return q @ u


def common_eigenvector(mats: Sequence, tol: Tolerances = DEFAULT_TOL, sc: StructureConstants = None):
    """A common eigenvector of matrices spanning a solvable Lie algebra.

    Constructive Lie's theorem: recurse into a codimension-one ideal that
    contains the derived algebra, intersect its weight space, then diagonalize
    the remaining element on that (invariant) subspace.  Returns ``(v, weights)``
    with ``v`` scaled so its leading maximal entry is 1.
    """
    mats = [nk.as_cmatrix(m, square=True) for m in mats]
    if not mats:
        raise DimensionError("need at least one matrix")
    if sc is not None and classify(sc, tol) == NON_SOLVABLE:
        raise ClassificationError("matrices do not span a solvable Lie algebra", NON_SOLVABLE)
    v = _normalize(_common_eigvec(mats, tol))
    weights = [complex(np.vdot(v, m @ v) / np.vdot(v, v)) for m in mats]
    vn = nk.fro(v)
    for i, (m, lam) in enumerate(zip(mats, weights)):
        res = nk.fro(m @ v - lam * v)
        if res > tol.residual * max(nk.fro(m), 1.0) * vn:
            raise ToleranceError(f"common eigenvector residual {res:.3e} for matrix {i}; loosen rank_rel")
    return v, weights


def jordan_holder_flag(
    fam: OperatorFamily, sc: StructureConstants = None, tol: Tolerances = DEFAULT_TOL
) -> JordanHolderFlag:
    if sc is None:
        sc = verify_closure(fam, tol)
    cls = classify(sc, tol)
    if cls == NON_SOLVABLE:
        raise ClassificationError("Jordan-Hölder flags exist only for solvable algebras", cls)
    n = fam.n
    derived = derived_series(sc, tol).subspaces[1] if n > 1 else np.zeros((n, 0), dtype=complex)
    k = derived.shape[1]
    ads = [sc.ad(a) for a in range(n)]
    ad_scale = max(max(nk.fro(ad) for ad in ads), 1.0)

    flag = []
    for _ in range(k):
        if flag:
            b = nk.range_basis(np.stack(flag, axis=1), tol)
            rest = derived - b @ (b.conj().T @ derived)
        else:
            rest = derived
        q = nk.range_basis(rest, tol)
        if q.shape[1] != k - len(flag):
            raise ToleranceError("lost track of the derived algebra while building the flag")
        if q.shape[1] == 1:
            u = np.ones(1, dtype=complex)
        else:
            u = _common_eigvec([q.conj().T @ ad @ q for ad in ads], tol, ad_scale)
        flag.append(_normalize(q @ u))
    for a in range(n):
        if len(flag) == n:
            break
        e = np.eye(n, dtype=complex)[:, a]
        if not flag or not nk.contains(np.stack(flag, axis=1), e[:, None], tol):
            flag.append(e)
    if len(flag) != n:
        raise ToleranceError("could not complete the flag to a basis")
    t = np.stack(flag, axis=1)

    labels = []
    for i in range(n):
        col = t[:, i]
        hit = np.flatnonzero(np.abs(col) > 1e-12)
        if hit.size == 1 and abs(col[hit[0]] - 1) <= 1e-12:
            labels.append(fam.labels[hit[0]])
        else:
            labels.append(f"w{i + 1}")
    adapted = OperatorFamily(tuple(fam.element(t[:, i]) for i in range(n)), tuple(labels))
    asc = verify_closure(adapted, tol)

    c = asc.c.copy()
    bound = tol.residual * asc.scale()
    nil_shape = True
    for i, j in combinations(range(n), 2):
        above = np.abs(c[i + 1 :, i, j])
        if above.size and above.max() > bound:
            raise FlagError(f"adapted constants break triangular shape at pair ({i}, {j})")
        c[i + 1 :, i, j] = 0
        c[i + 1 :, j, i] = 0
        if abs(c[i, i, j]) > bound:
            nil_shape = False
    for i in range(1, n + 1):
        span = t[:, :i]
        for a in range(n):
            if not nk.contains(span, (ads[a] @ span), tol):
                raise FlagError(f"span of the first {i} adapted generators is not an ideal")
    return JordanHolderFlag(
        change_of_basis=t,
        adapted=adapted,
        constants=StructureConstants(c),
        ideal_dims=tuple(range(n + 1)),
        k=k,
        nilpotent_shape=nil_shape,
        original=fam,
    )
