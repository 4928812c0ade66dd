from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import GF, Matrix
from sympy.polys.matrices import DomainMatrix

from fermat_closure.errors import ExponentOverflow
from fermat_closure.linalg import SparseSystem, nullspace, rank, separating_functional, solve


def sympy_rank(M: np.ndarray, p: int) -> int:
    dm = DomainMatrix.from_list_sympy(*M.shape, Matrix(M.tolist()).tolist()).convert_to(GF(p))
    return dm.rank()


@st.composite
def matrices(draw, p=None):
    p = p or draw(st.sampled_from([2, 3, 5, 7, 23]))
    n = draw(st.integers(1, 9))
    m = draw(st.integers(1, 9))
    sparse = draw(st.booleans())
    hi = 1 if sparse else p - 1
    entries = draw(st.lists(st.integers(0, hi), min_size=n * m, max_size=n * m))
    return np.array(entries, dtype=np.int64).reshape(n, m), p


@settings(max_examples=80)
@given(matrices())
def test_rank_matches_sympy(mp):
    M, p = mp
    assert rank(M, p) == sympy_rank(M, p)


@settings(max_examples=60)
@given(matrices())
def test_nullspace_is_kernel_of_right_size(mp):
    M, p = mp
    basis = nullspace(M, p)
    assert len(basis) == M.shape[1] - sympy_rank(M, p)
    for v in basis:
        assert not np.any((M @ v) % p)


@settings(max_examples=60)
@given(matrices(), st.data())
def test_solve_or_separate(mp, data):
    M, p = mp
    b = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=M.shape[0], max_size=M.shape[0])))
    x = solve(M, b, p)
    if x is None:
        lam = separating_functional(M, b, p)
        assert not np.any((lam @ M) % p)
        assert (lam @ b) % p
    else:
        assert np.array_equal((M @ x) % p, b % p)


def _sparse(M: np.ndarray, p: int, max_dense: int = 1500) -> SparseSystem:
    cols = [{i: int(M[i, j]) for i in range(M.shape[0]) if M[i, j]} for j in range(M.shape[1])]
    return SparseSystem(M.shape[0], cols, p, max_dense)


@settings(max_examples=80)
@given(matrices())
def test_sparse_system_agrees_with_dense(mp):
    M, p = mp
    S = _sparse(M, p)
    assert S.rank() == sympy_rank(M, p)
    kernel = S.kernel()
    assert len(kernel) == M.shape[1] - S.rank()
    for vec in kernel:
        x = np.zeros(M.shape[1], dtype=np.int64)
        for j, v in vec.items():
            x[j] = v
        assert not np.any((M @ x) % p)


@settings(max_examples=60)
@given(matrices(), st.data())
def test_sparse_solve_certificates(mp, data):
    M, p = mp
    b = data.draw(st.lists(st.integers(0, p - 1), min_size=M.shape[0], max_size=M.shape[0]))
    ok, vec = _sparse(M, p).solve({i: v for i, v in enumerate(b) if v})
    if ok:
        x = np.zeros(M.shape[1], dtype=np.int64)
        for j, v in vec.items():
            x[j] = v
        assert np.array_equal((M @ x) % p, np.array(b) % p)
    else:
        lam = np.zeros(M.shape[0], dtype=np.int64)
        for i, v in vec.items():
            lam[i] = v
        assert not np.any((lam @ M) % p)
        assert (lam @ np.array(b)) % p


def test_gf2_packing_beyond_one_word():
    rng = np.random.default_rng(7)
    M = rng.integers(0, 2, size=(90, 150))
    assert rank(M, 2) == sympy_rank(M, 2)


def test_dense_budget():
    M = np.ones((5, 5), dtype=np.int64)
    M[np.arange(5), np.arange(5)] = 2
    with pytest.raises(ExponentOverflow):
        _sparse(M, 3, max_dense=2).rank()
