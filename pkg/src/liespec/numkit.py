"""Dense complex linear algebra used by the rest of the package.

Everything here is a pure function of its inputs.  Matrices are plain
``numpy`` arrays of dtype ``complex128``; :func:`as_cmatrix` is the single
validation point.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError, LieSpecError, SingularMatrixError

# Effective relative perturbation assumed when deciding whether nearby
# computed eigenvalues split off a single defective eigenvalue.  Covers
# machine epsilon amplified by moderate eigenvector conditioning.
DEFECT_EPS = 1e-13
DEFECT_SAFETY = 8.0


@dataclass(frozen=True)
class Tolerances:
    rank_rel: float = 1e-10
    eig_cluster: float = 1e-8
    residual: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel", "eig_cluster", "residual"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {name} must be a positive number, got {value!r}")

    def updated(self, **overrides) -> "Tolerances":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def as_dict(self) -> dict:
        return {"rank_rel": self.rank_rel, "eig_cluster": self.eig_cluster, "residual": self.residual}


DEFAULT_TOL = Tolerances()


def as_cmatrix(m, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LieSpecError(f"{name} has non-finite entries")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def fro(m) -> float:
    return float(np.linalg.norm(m))


def op_norm(m) -> float:
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def sort_complex(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex).ravel()
    order = np.lexsort((values.imag, values.real))
    return values[order]


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues with algebraic multiplicity, sorted by (re, im).

    LAPACK's Hessenberg QR is backward stable; sorting only makes the
    output order reproducible.
    """
    a = as_cmatrix(m, square=True)
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    return sort_complex(np.linalg.eigvals(a))


def singular_values(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def rank_from_singular_values(s, rank_rel: float, floor: float = 0.0) -> int:
    """Count singular values above ``rank_rel * max(s_max, floor)``.

    ``floor`` is the scale of the data the matrix was computed from; it keeps
    pure rounding noise (e.g. brackets of commuting matrices) at rank 0.
    """
    s = np.asarray(s)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_rel * max(s[0], floor)))


def numerical_rank(m, tol: Tolerances = DEFAULT_TOL, floor: float = 0.0) -> int:
    a = as_cmatrix(m)
    return rank_from_singular_values(singular_values(a), tol.rank_rel, floor)


def null_space(m, tol: Tolerances = DEFAULT_TOL, floor: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel."""
    a = as_cmatrix(m)
    cols = a.shape[1]
    if a.shape[0] == 0 or cols == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = rank_from_singular_values(s, tol.rank_rel, floor)
    return vh[r:].conj().T


def range_basis(m, tol: Tolerances = DEFAULT_TOL, floor: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical column space."""
    a = as_cmatrix(m)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    r = rank_from_singular_values(s, tol.rank_rel, floor)
    return u[:, :r]


def contains(basis, vectors, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when every column of ``vectors`` lies in the span of ``basis``."""
    basis = np.asarray(basis, dtype=complex)
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.size == 0:
        return True
    stacked = np.hstack([basis, vectors]) if basis.size else vectors
    scale = max(op_norm(stacked), 1.0)
    if basis.size == 0:
        return op_norm(vectors) <= tol.residual * scale
    return numerical_rank(stacked, tol, scale) == numerical_rank(basis, tol, scale)


def solve_linear(a, b, tol: Tolerances = DEFAULT_TOL, floor: float = 0.0) -> np.ndarray:
    a = as_cmatrix(a, square=True, name="a")
    b = as_cmatrix(b, name="b")
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"right-hand side has {b.shape[0]} rows, expected {a.shape[0]}")
    r = numerical_rank(a, tol, floor)
    if r < a.shape[0]:
        raise SingularMatrixError(f"matrix is singular: numerical rank {r} < {a.shape[0]}", rank=r)
    x = np.linalg.solve(a, b)
    res = fro(a @ x - b)
    if res > tol.residual * max(fro(b), np.finfo(float).tiny):
        raise SingularMatrixError(
            f"solve residual {res:.3e} exceeds tolerance; matrix is numerically singular", rank=r
        )
    return x


def defect_radius(multiplicity: int, scale: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest spread expected when one eigenvalue of algebraic multiplicity
    ``multiplicity`` is computed in floating point from a matrix of norm ``scale``."""
    if multiplicity <= 1 or scale == 0.0:
        return tol.eig_cluster
    spread = DEFECT_SAFETY * DEFECT_EPS ** (1.0 / multiplicity) * scale
    return max(tol.eig_cluster, spread)


# A split defective eigenvalue scatters into a near-regular polygon, so the
# edges of its minimum spanning tree have comparable lengths.  A component
# whose longest edge exceeds the next one by this factor holds two clusters.
GAP_RATIO = 10.0


def _components(values, idx, gap: float) -> list:
    """Single-link components of ``values[idx]`` at linkage distance ``gap``."""
    left = list(idx)
    out = []
    while left:
        group = [left.pop(0)]
        grew = True
        while grew:
            grew = False
            for i in list(left):
                if np.min(np.abs(values[group] - values[i])) <= gap:
                    group.append(i)
                    left.remove(i)
                    grew = True
        out.append(sorted(group))
    return out


def _split_longest_edge(values, comp, floor: float):
    """Halves of ``comp`` across the longest spanning-tree edge when that edge
    is an outlier, else ``None``."""
    pts = values[comp]
    dist = np.abs(pts[:, None] - pts[None, :])
    inside, edges = [0], []
    best = dist[0].copy()
    parent = np.zeros(len(comp), dtype=int)
    while len(inside) < len(comp):
        best[inside] = np.inf
        k = int(np.argmin(best))
        edges.append((best[k], int(parent[k]), k))
        inside.append(k)
        closer = dist[k] < best
        parent[closer] = k
        best = np.minimum(best, dist[k])
    edges.sort(reverse=True)
    if len(edges) < 2 or edges[0][0] <= GAP_RATIO * max(edges[1][0], floor):
        return None
    cut = edges[0]
    adj = {i: set() for i in range(len(comp))}
    for _, a, b in edges[1:]:
        adj[a].add(b)
        adj[b].add(a)
    side, stack = {cut[1]}, [cut[1]]
    while stack:
        for nb in adj[stack.pop()] - side:
            side.add(nb)
            stack.append(nb)
    first = [comp[i] for i in sorted(side)]
    return first, [c for c in comp if c not in first]


def cluster_eigenvalues(values, scale: float, tol: Tolerances = DEFAULT_TOL):
    """Group computed eigenvalues that stem from one exact eigenvalue.

    A group of size ``m`` is accepted when its diameter is within
    :func:`defect_radius` for ``m`` and it has no outlying gap; otherwise it
    is re-split.  Returns ``[(mean, multiplicity), ...]`` sorted by
    (re, im).  The mean of a split defective eigenvalue is accurate to
    working precision even when the individual members are not.
    """
    values = np.asarray(values, dtype=complex).ravel()
    groups = []
    pending = [(list(range(values.size)), values.size)]
    while pending:
        idx, cap = pending.pop()
        for comp in _components(values, idx, defect_radius(cap, scale, tol)):
            if len(comp) == 1:
                groups.append(comp)
                continue
            halves = _split_longest_edge(values, comp, tol.eig_cluster)
            if halves is not None:
                pending += [(h, len(h)) for h in halves]
                continue
            pts = values[comp]
            diameter = np.max(np.abs(pts[:, None] - pts[None, :]))
            if diameter <= defect_radius(len(comp), scale, tol) or cap <= 1:
                groups.append(comp)
            else:
                pending.append((comp, min(cap, len(comp)) - 1))
    out = [(complex(np.mean(values[g])), len(g)) for g in groups]
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def spectral_set(m, tol: Tolerances = DEFAULT_TOL):
    """Distinct eigenvalues of ``m`` as ``[(value, algebraic multiplicity)]``."""
    a = as_cmatrix(m, square=True)
    return cluster_eigenvalues(eigenvalues(a), op_norm(a), tol)


def dedup_points(points, radius: float) -> list[tuple]:
    """Merge complex tuples closer than ``radius`` in max-norm; keeps the first
    representative in sorted order."""
    pts = sorted((tuple(complex(c) for c in p) for p in points), key=point_key)
    kept: list[tuple] = []
    for p in pts:
        if not any(point_distance(p, q) <= radius for q in kept):
            kept.append(p)
    return kept


def point_key(p):
    return tuple((c.real, c.imag) for c in p)


def point_distance(p, q) -> float:
    if len(p) == 0:
        return 0.0
    return float(np.max(np.abs(np.asarray(p, dtype=complex) - np.asarray(q, dtype=complex))))


def sets_match(a, b, radius: float) -> bool:
    """Set equality of complex tuples up to ``radius`` (max-norm)."""
    a, b = list(a), list(b)
    return all(any(point_distance(p, q) <= radius for q in b) for p in a) and all(
        any(point_distance(p, q) <= radius for q in a) for p in b
    )
