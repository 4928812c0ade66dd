"""Gaussian elimination over GF(p).

Dense work happens in numpy: rows are bit-packed into uint64 words for
p = 2 and stored as int64 for odd p below 2**31 (products of two reduced
entries then fit in a signed 64-bit word).  Larger primes fall back to
object arrays.

``SparseSystem`` sits on top: columns that are single monomials (unit
vectors) are eliminated combinatorially before anything dense is built,
which is what keeps Frobenius-power systems small.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ExponentOverflow

DEFAULT_MAX_DENSE = 1500


def _dtype_for(p: int):
    return np.int64 if p < 2**31 else object


# -- GF(2): packed bit rows -------------------------------------------------

def _pack(M: np.ndarray) -> np.ndarray:
    n, m = M.shape
    words = max(1, (m + 63) // 64)
    bits = np.zeros((n, words * 64), dtype=np.uint8)
    bits[:, :m] = (M % 2).astype(np.uint8)
    return np.packbits(bits, axis=1, bitorder="little").view(np.uint64)


def _unpack(P: np.ndarray, m: int) -> np.ndarray:
    bits = np.unpackbits(P.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :m].astype(np.int64)


def _rref_gf2(M: np.ndarray, limit: int) -> tuple[np.ndarray, list[int]]:
    n, m = M.shape
    P = _pack(M)
    pivots: list[int] = []
    row = 0
    for col in range(limit):
        if row == n:
            break
        w = col >> 6
        bit = np.uint64(1 << (col & 63))
        hits = np.flatnonzero(P[row:, w] & bit)
        if hits.size == 0:
            continue
        piv = row + int(hits[0])
        if piv != row:
            P[[row, piv]] = P[[piv, row]]
        mask = (P[:, w] & bit) != 0
        mask[row] = False
        if mask.any():
            P[mask, w:] ^= P[row, w:]
        pivots.append(col)
        row += 1
    return _unpack(P, m), pivots


# -- odd p ------------------------------------------------------------------

def _rref_modp(M: np.ndarray, p: int, limit: int) -> tuple[np.ndarray, list[int]]:
    M = M.copy()
    n, _ = M.shape
    pivots: list[int] = []
    row = 0
    for col in range(limit):
        if row == n:
            break
        hits = np.flatnonzero(M[row:, col] != 0)
        if hits.size == 0:
            continue
        piv = row + int(hits[0])
        if piv != row:
            M[[row, piv]] = M[[piv, row]]
        inv = pow(int(M[row, col]), -1, p)
        M[row, col:] = (M[row, col:] * inv) % p
        others = np.flatnonzero(M[:, col] != 0)
        others = others[others != row]
        if others.size:
            factors = M[others, col].reshape(-1, 1)
            M[others, col:] = (M[others, col:] - factors * M[row, col:]) % p
        pivots.append(col)
        row += 1
    return M, pivots


def rref(M: np.ndarray, p: int, limit: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; pivots are only sought among the first ``limit`` columns."""
    M = np.asarray(M)
    if limit is None:
        limit = M.shape[1]
    if M.shape[0] == 0 or M.shape[1] == 0:
        return M.copy(), []
    if p == 2:
        return _rref_gf2(M, limit)
    return _rref_modp(M.astype(_dtype_for(p)) % p, p, limit)


def rank(M: np.ndarray, p: int) -> int:
    return len(rref(M, p)[1])


def nullspace(M: np.ndarray, p: int) -> list[np.ndarray]:
    """Basis of {x : M x = 0}."""
    n, m = M.shape
    R, pivots = rref(M, p)
    pivot_set = set(pivots)
    basis = []
    for free in range(m):
        if free in pivot_set:
            continue
        x = np.zeros(m, dtype=_dtype_for(p))
        x[free] = 1
        for i, pc in enumerate(pivots):
            x[pc] = (-R[i, free]) % p
        basis.append(x)
    return basis


def solve(M: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some x with M x = b, or None when b is outside the column span."""
    n, m = M.shape
    if n == 0:
        return np.zeros(m, dtype=_dtype_for(p))
    aug = np.concatenate([M.astype(_dtype_for(p)), np.asarray(b, dtype=_dtype_for(p)).reshape(-1, 1)], axis=1) % p
    R, pivots = rref(aug, p, limit=m)
    r = len(pivots)
    if np.any(R[r:, m] != 0):
        return None
    x = np.zeros(m, dtype=_dtype_for(p))
    for i, pc in enumerate(pivots):
        x[pc] = R[i, m]
    return x


def separating_functional(M: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """A row vector lam with lam M = 0 and lam b != 0; b must lie outside span(M)."""
    lam = _functional_or_none(M, b, p)
    if lam is None:
        raise ValueError("vector lies in the column span; no separating functional exists")
    return lam


def _functional_or_none(M: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    n, m = M.shape
    b = np.asarray(b, dtype=_dtype_for(p)) % p
    R, pivots = rref(M.T.astype(_dtype_for(p)) % p, p)
    residual = b.copy()
    for i, pc in enumerate(pivots):
        if residual[pc]:
            residual = (residual - residual[pc] * R[i]) % p
    hits = np.flatnonzero(residual != 0)
    if hits.size == 0:
        return None
    j = int(hits[0])
    lam = np.zeros(n, dtype=_dtype_for(p))
    lam[j] = 1
    for i, pc in enumerate(pivots):
        lam[pc] = (-R[i, j]) % p
    return lam


# -- sparse systems with unit-column elimination ------------------------------

SparseVector = dict  # index -> nonzero residue


@dataclass
class SparseSystem:
    """Linear map GF(p)^ncols -> GF(p)^nrows given by sparse columns."""

    nrows: int
    columns: list[SparseVector]
    p: int
    max_dense: int = DEFAULT_MAX_DENSE
    _split: tuple | None = field(default=None, init=False, repr=False)

    @property
    def ncols(self) -> int:
        return len(self.columns)

    def _partition(self):
        if self._split is None:
            units: dict[int, list[tuple[int, int]]] = {}
            dense: list[int] = []
            zeros: list[int] = []
            for j, col in enumerate(self.columns):
                if not col:
                    zeros.append(j)
                elif len(col) == 1:
                    (r, v), = col.items()
                    units.setdefault(r, []).append((j, v))
                else:
                    dense.append(j)
            uncovered = [r for r in range(self.nrows) if r not in units]
            self._split = (units, dense, zeros, uncovered)
        return self._split

    def dense_shape(self) -> tuple[int, int]:
        _, dense, _, uncovered = self._partition()
        return len(uncovered), len(dense)

    def _dense_block(self) -> np.ndarray:
        _, dense, _, uncovered = self._partition()
        rows, cols = len(uncovered), len(dense)
        if rows and cols and min(rows, cols) > self.max_dense:
            raise ExponentOverflow(
                f"dense block {rows}x{cols} exceeds the budget of {self.max_dense}"
            )
        pos = {r: i for i, r in enumerate(uncovered)}
        D = np.zeros((rows, cols), dtype=_dtype_for(self.p))
        for k, j in enumerate(dense):
            for r, v in self.columns[j].items():
                i = pos.get(r)
                if i is not None:
                    D[i, k] = v
        return D

    def rank(self) -> int:
        units, dense, _, uncovered = self._partition()
        if not dense or not uncovered:
            return len(units)
        return len(units) + rank(self._dense_block(), self.p)

    def kernel(self) -> list[SparseVector]:
        p = self.p
        units, dense, zeros, uncovered = self._partition()
        basis: list[SparseVector] = [{j: 1} for j in zeros]
        for r, entries in units.items():
            j1, v1 = entries[0]
            for jk, vk in entries[1:]:
                basis.append({jk: v1 % p, j1: (-vk) % p})
        if not dense:
            return basis
        if uncovered:
            dense_kernel = [
                {dense[k]: int(x[k]) for k in np.flatnonzero(x)}
                for x in nullspace(self._dense_block(), p)
            ]
        else:
            dense_kernel = [{j: 1} for j in dense]
        for vec in dense_kernel:
            image: dict[int, int] = {}
            for j, xj in vec.items():
                for r, v in self.columns[j].items():
                    image[r] = (image.get(r, 0) + v * xj) % p
            vec = dict(vec)
            for r, s in image.items():
                if s and r in units:
                    j1, v1 = units[r][0]
                    vec[j1] = (vec.get(j1, 0) - s * pow(v1, -1, p)) % p
            basis.append({j: v for j, v in vec.items() if v})
        return basis

    def solve(self, b: SparseVector) -> tuple[bool, SparseVector]:
        """Return (True, x) with A x = b, or (False, lam) with lam A = 0 and lam b != 0."""
        p = self.p
        units, dense, _, uncovered = self._partition()
        b_unc = np.array([b.get(r, 0) % p for r in uncovered], dtype=_dtype_for(p))
        if dense and uncovered:
            D = self._dense_block()
            # the transposed elimination decides consistency and yields the
            # functional at once; large instances are mostly non-members
            lam = _functional_or_none(D, b_unc, p)
            if lam is not None:
                return False, {uncovered[i]: int(lam[i]) for i in np.flatnonzero(lam)}
            x_d = solve(D, b_unc, p)
            x = {dense[k]: int(x_d[k]) for k in np.flatnonzero(x_d)}
        else:
            hits = np.flatnonzero(b_unc)
            if hits.size:
                return False, {uncovered[int(hits[0])]: 1}
            x = {}
        residual = {r: v % p for r, v in b.items() if v % p}
        for j, xj in x.items():
            for r, v in self.columns[j].items():
                residual[r] = (residual.get(r, 0) - v * xj) % p
        for r, s in residual.items():
            if s:
                j1, v1 = units[r][0]
                x[j1] = (x.get(j1, 0) + s * pow(v1, -1, p)) % p
        return True, {j: v for j, v in x.items() if v}
