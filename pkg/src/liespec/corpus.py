"""Bundled example instances and seeded random families."""
from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .liealg import OperatorFamily

BUNDLED = ("g2", "heisenberg", "abelian_diag", "borel2", "upper3", "sl2")
ALIASES = {"commuting_diag": "abelian_diag", "abelian": "abelian_diag"}


def bundled_names() -> tuple:
    return BUNDLED


def bundled_text(name: str) -> str:
    key = name[:-5] if name.endswith(".json") else name
    key = ALIASES.get(key, key)
    if key not in BUNDLED:
        raise KeyError(f"no bundled instance named {name!r}; available: {', '.join(BUNDLED)}")
    return resources.files("liespec").joinpath("corpus", f"{key}.json").read_text()


def bundled(name: str) -> dict:
    return json.loads(bundled_text(name))


def _closure(positions: set) -> set:
    out = set(positions)
    grew = True
    while grew:
        grew = False
        for i, j in list(out):
            for k, l in list(out):
                if j == k and (i, l) not in out:
                    out.add((i, l))
                    grew = True
    return out


def _closed_positions(rng, d: int, count: int) -> list:
    """A set of strictly-upper positions closed under (i,j),(j,l) -> (i,l)."""
    chosen: set = set()
    slots = [(i, j) for i in range(d) for j in range(i + 1, d)]
    while len(chosen) < count:
        options = [p for p in slots if p not in chosen and len(_closure(chosen | {p})) == len(chosen) + 1]
        chosen.add(options[rng.integers(len(options))])
    return sorted(chosen)


def _unit(d, i, j):
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1
    return m


def _near_identity(rng, size: int, spread: float = 0.5) -> np.ndarray:
    """Random complex matrix within ``spread`` of the identity in operator norm (condition <= 3)."""
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return np.eye(size) + spread * g / np.linalg.norm(g, 2)


def _half_integers(rng, size, complex_prob=0.3):
    re = rng.integers(-4, 5, size) / 2
    im = rng.integers(-2, 3, size) / 2 * (rng.random(size) < complex_prob)
    return re + 1j * im


def _finish(rng, gens, mix: bool, prefix="x") -> OperatorFamily:
    n, d = len(gens), gens[0].shape[0]
    gens = np.stack(gens)
    if mix and n > 1:
        gens = np.tensordot(_near_identity(rng, n), gens, axes=1)
    p = _near_identity(rng, d)
    pinv = np.linalg.inv(p)
    return OperatorFamily(tuple(p @ g @ pinv for g in gens), tuple(f"{prefix}{i + 1}" for i in range(n)))


def random_solvable(seed: int, d: int, n: int, mix: bool = True) -> OperatorFamily:
    """Diagonal-plus-nilpotent generators of an upper-triangular subalgebra, conjugated.

    Diagonal entries are half-integers, so repeated eigenvalues (and defective
    ones after conjugation) occur on purpose.
    """
    rng = np.random.default_rng(seed)
    top = d * (d - 1) // 2
    if not 1 <= n <= d + top:
        raise ValueError(f"a solvable family in dimension {d} here has 1..{d + top} generators, asked {n}")
    n_diag = int(rng.integers(max(1, n - top), min(d, n) + 1))
    positions = _closed_positions(rng, d, n - n_diag)
    while True:
        diags = [np.diag(_half_integers(rng, d)) for _ in range(n_diag)]
        if np.linalg.matrix_rank(np.stack([np.diag(h) for h in diags])) == n_diag:
            break
    units = [_unit(d, i, j) for i, j in positions]
    gens = []
    for h in diags:
        extra = sum((rng.standard_normal() * u for u in units), np.zeros((d, d), dtype=complex))
        gens.append(h + extra)
    if units:
        mixer = _near_identity(rng, len(units))
        gens += [sum(mixer[r, t] * units[t] for t in range(len(units))) for r in range(len(units))]
    return _finish(rng, gens, mix)


def random_nilpotent(seed: int, d: int, n: int, mix: bool = True) -> OperatorFamily:
    """Strictly upper-triangular generators, optionally plus one scalar-shifted element."""
    rng = np.random.default_rng(seed)
    top = d * (d - 1) // 2
    if not 1 <= n <= top + 1:
        raise ValueError(f"a nilpotent family in dimension {d} here has 1..{top + 1} generators, asked {n}")
    n_scalar = 1 if n > top else int(rng.integers(0, 2)) if n > 0 else 0
    positions = _closed_positions(rng, d, n - n_scalar)
    units = [_unit(d, i, j) for i, j in positions]
    gens = []
    if n_scalar:
        c = 0
        while c == 0:
            c = _half_integers(rng, 1)[0]
        extra = sum((rng.standard_normal() * u for u in units), np.zeros((d, d), dtype=complex))
        gens.append(c * np.eye(d) + extra)
    if units:
        mixer = _near_identity(rng, len(units))
        gens += [sum(mixer[r, t] * units[t] for t in range(len(units))) for r in range(len(units))]
    return _finish(rng, gens, mix)


def random_commuting(seed: int, d: int, n: int) -> OperatorFamily:
    """Polynomials in block upper-triangular matrices, conjugated.

    Within each diagonal block every generator is a polynomial in one fixed
    triangular matrix, so all generators commute.
    """
    rng = np.random.default_rng(seed)
    if not 1 <= n <= d:
        raise ValueError(f"need 1 <= n <= d, got n={n}, d={d}")
    for _ in range(100):
        cut = int(rng.integers(1, d)) if d > 1 and rng.random() < 0.5 else d
        sizes = [cut, d - cut] if cut < d else [d]
        bases = []
        for s in sizes:
            a = np.triu(rng.standard_normal((s, s)), 1) + np.diag(_half_integers(rng, s))
            bases.append(a)
        gens = []
        for _ in range(n):
            g = np.zeros((d, d), dtype=complex)
            at = 0
            for a in bases:
                s = a.shape[0]
                coef = rng.integers(-2, 3, s) / 2
                block = sum((c * np.linalg.matrix_power(a, k) for k, c in enumerate(coef)), np.zeros((s, s)))
                g[at : at + s, at : at + s] = block
                at += s
            gens.append(g)
        stacked = np.stack([g.ravel() for g in gens], axis=1)
        if np.linalg.matrix_rank(stacked, tol=1e-6) == n:
            return _finish(rng, gens, mix=False, prefix="a")
    raise ValueError(f"could not draw {n} independent commuting matrices of size {d}")
