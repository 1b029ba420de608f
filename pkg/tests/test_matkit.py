import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmetro.errors import NonHermitianInput
from qmetro.matkit import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    check_hermitian,
    dagger,
    herm_eig,
    kron,
    op_norm,
    partial_trace,
    pinv_on_support,
    random_hermitian,
)

seeds = st.integers(0, 2**32 - 1)


def test_herm_eig_examples():
    assert np.allclose(herm_eig(PAULI_Z)[0], [-1, 1])
    assert np.allclose(herm_eig((IDENTITY_2 + 0.8 * PAULI_X) / 2)[0], [0.1, 0.9])
    assert np.allclose(herm_eig(np.zeros((2, 2)))[0], [0, 0])


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        herm_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NonHermitianInput):
        check_hermitian(np.array([[1, 1j], [1j, 1]]))


def test_op_norm_examples():
    assert op_norm(PAULI_Y) == pytest.approx(1)
    assert op_norm(np.diag([3, -4])) == pytest.approx(4)
    assert op_norm(np.zeros((3, 3))) == 0


def test_pinv_on_support_examples():
    assert np.allclose(pinv_on_support(np.diag([2.0, 0.0])), np.diag([0.5, 0]))
    assert np.allclose(pinv_on_support(np.eye(2)), np.eye(2))
    assert np.allclose(pinv_on_support(np.diag([4.0, 1e-15]), cutoff=1e-10), np.diag([0.25, 0]))


def test_partial_trace_examples():
    assert np.allclose(partial_trace(np.eye(4), (2, 2), "A"), 2 * np.eye(2))
    assert np.allclose(partial_trace(np.eye(4), (2, 2), "B"), 2 * np.eye(2))
    vec_i = np.eye(2).ravel()
    assert np.allclose(partial_trace(np.outer(vec_i, vec_i), (2, 2), "B"), np.eye(2))
    x, y = np.diag([1.0, 2.0]), np.array([[1, 2], [3, 4]])
    assert np.allclose(partial_trace(kron(x, y), (2, 2), "A"), 5 * x)


def test_kron_examples():
    assert np.allclose(kron(IDENTITY_2, IDENTITY_2), np.eye(4))
    ket00 = np.array([1, 0, 0, 0])
    assert np.allclose(kron(PAULI_X, PAULI_X) @ ket00, [0, 0, 0, 1])


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 8))
def test_herm_eig_unitary_eigenvectors(seed, d):
    m = random_hermitian(d, np.random.default_rng(seed))
    w, v = herm_eig(m)
    assert np.linalg.norm(dagger(v) @ v - np.eye(d)) <= 1e-10
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(v @ np.diag(w) @ dagger(v), m, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_op_norm_multiplicative_under_kron(seed, da, db):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(da, da)) + 1j * rng.normal(size=(da, da))
    b = rng.normal(size=(db, db))
    assert op_norm(kron(a, b)) == pytest.approx(op_norm(a) * op_norm(b), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_pinv_is_generalised_inverse(seed, d, rank):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, min(rank, d))) + 1j * rng.normal(size=(d, min(rank, d)))
    m = g @ dagger(g)
    p = pinv_on_support(m)
    assert np.allclose(p @ m @ p, p, atol=1e-9 * (1 + op_norm(p)))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_partial_trace_preserves_trace(seed, da, db):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(da * db, da * db)) + 1j * rng.normal(size=(da * db, da * db))
    for keep in ("A", "B"):
        assert abs(np.trace(partial_trace(m, (da, db), keep)) - np.trace(m)) <= 1e-12 * (1 + np.abs(m).sum())
