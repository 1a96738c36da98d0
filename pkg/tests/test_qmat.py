import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tempcorr import qmat
from tempcorr.errors import CapacityError, DimensionError

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def rand_herm(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_hermitian_symmetrizes_and_freezes():
    m = np.array([[1, 1 + 1e-10j], [1, 2]])
    h = qmat.hermitian(m)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-12
    with pytest.raises(ValueError):
        h[0, 0] = 3


def test_hermitian_rejects_asymmetric():
    with pytest.raises(ValueError):
        qmat.hermitian([[1, 1], [0, 1]])
    with pytest.raises(DimensionError):
        qmat.hermitian(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        qmat.hermitian([[np.nan]])


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.diag([3.0, 1.0, -2.0]), [3, 1, -2]),
        (np.eye(4), [1, 1, 1, 1]),
        (SWAP / 2, [0.5, 0.5, 0.5, -0.5]),
    ],
)
def test_eig_examples(m, expected):
    w, _ = qmat.eig_hermitian(m)
    assert np.allclose(w, expected, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 9, 18])
def test_eig_against_lapack(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        m = rand_herm(rng, n)
        w, v = qmat.eig_hermitian(m)
        assert np.all(np.diff(w) <= 0)
        assert np.allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-11)
        assert np.linalg.norm(m - v @ np.diag(w) @ v.conj().T) <= 1e-10 * np.linalg.norm(m)
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-10


def test_eig_degenerate_and_zero():
    w, v = qmat.eig_hermitian(np.zeros((3, 3)))
    assert np.all(w == 0) and np.allclose(v, np.eye(3))
    rng = np.random.default_rng(7)
    u, _ = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    m = u @ np.diag([2, 2, 2, -1, -1]) @ u.conj().T
    w, _ = qmat.eig_hermitian(m)
    assert np.allclose(w, [2, 2, 2, -1, -1], atol=1e-12)


def test_eig_iteration_cap():
    rng = np.random.default_rng(0)
    with pytest.raises(qmat.ConvergenceError) as info:
        qmat.eig_hermitian(rand_herm(rng, 6), max_sweeps=1)
    assert info.value.residual > 0


@pytest.mark.parametrize("m, expected", [(np.diag([0.5, 0.5]), 1.0), (SWAP / 2, 2.0), (np.zeros((3, 3)), 0.0)])
def test_trace_norm_examples(m, expected):
    assert qmat.trace_norm(m) == pytest.approx(expected, abs=1e-12)


def test_kron_examples():
    assert np.allclose(qmat.kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(qmat.kron(SZ, SZ), np.diag([1, -1, -1, 1]))
    with pytest.raises(CapacityError):
        qmat.kron(np.eye(9), np.eye(10))


def test_kron_index_convention():
    rng = np.random.default_rng(1)
    a, b = rand_herm(rng, 2), rand_herm(rng, 3)
    k = np.asarray(qmat.kron(a, b)).reshape(2, 3, 2, 3)
    for i, kk, j, ll in np.ndindex(2, 3, 2, 3):
        assert k[i, kk, j, ll] == pytest.approx(a[i, j] * b[kk, ll])


def test_partial_trace_examples():
    rng = np.random.default_rng(2)
    rho, sigma = rand_herm(rng, 2), rand_herm(rng, 3)
    out = qmat.partial_trace(np.kron(rho, sigma), (2, 3), keep="B")
    assert np.allclose(out, np.trace(rho) * sigma)
    assert np.allclose(qmat.partial_trace(SWAP / 2, (2, 2), keep="A"), np.eye(2) / 2)
    assert np.allclose(qmat.partial_trace(np.eye(9) / 9, (3, 3), keep="A"), np.eye(3) / 3)
    with pytest.raises(DimensionError):
        qmat.partial_trace(np.eye(6), (3, 3))


def test_partial_transpose_examples():
    rng = np.random.default_rng(3)
    rho, sigma = rand_herm(rng, 3), rand_herm(rng, 2)
    assert np.allclose(qmat.partial_transpose(np.kron(rho, sigma), (3, 2), "B"), np.kron(rho, sigma.T))
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(qmat.partial_transpose(SWAP, (2, 2), "B"), 2 * np.outer(phi, phi))
    assert np.allclose(qmat.partial_transpose(np.eye(6), (2, 3), "A"), np.eye(6))


def test_eigprojectors_examples():
    (v0, p0), (v1, p1) = qmat.eigprojectors(SZ)
    assert (v0, v1) == (1.0, -1.0)
    assert np.allclose(p0, np.diag([1, 0])) and np.allclose(p1, np.diag([0, 1]))
    [(v, p)] = qmat.eigprojectors(np.eye(3))
    assert v == 1.0 and np.allclose(p, np.eye(3))
    k1 = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    (vp, pp), (vm, pm) = qmat.eigprojectors(k1)
    assert vp == pytest.approx(1) and vm == pytest.approx(-1)
    assert np.trace(pp).real == pytest.approx(2) and np.trace(pm).real == pytest.approx(1)


def test_eigprojectors_property_1000_random():
    rng = np.random.default_rng(11)
    for k in range(1000):
        n = 2 + k % 8
        m = rand_herm(rng, n)
        if k % 3 == 0:
            # force degeneracy
            u, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            vals = rng.integers(-2, 3, size=n).astype(float)
            m = u @ np.diag(vals) @ u.conj().T
        projs = [p for _, p in qmat.eigprojectors(m)]
        assert np.max(np.abs(sum(projs) - np.eye(n))) <= 1e-10
        for i, pa in enumerate(projs):
            for j, pb in enumerate(projs):
                expected = pa if i == j else 0
                assert np.max(np.abs(pa @ pb - expected)) <= 1e-10


herm_dims = st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)])


@settings(max_examples=60, deadline=None)
@given(dims=herm_dims, seed=st.integers(0, 2**32 - 1))
def test_partial_transpose_involution(dims, seed):
    rng = np.random.default_rng(seed)
    m = rand_herm(rng, dims[0] * dims[1])
    for side in "AB":
        twice = qmat.partial_transpose(qmat.partial_transpose(m, dims, side), dims, side)
        assert np.max(np.abs(twice - m)) <= 1e-14
        assert np.trace(qmat.partial_transpose(m, dims, side)) == pytest.approx(np.trace(m))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 9), seed=st.integers(0, 2**32 - 1))
def test_trace_norm_dominates_trace(n, seed):
    rng = np.random.default_rng(seed)
    m = rand_herm(rng, n)
    assert qmat.trace_norm(m) >= abs(np.trace(m).real) - 1e-12
    psd = m @ m
    assert qmat.trace_norm(psd) == pytest.approx(np.trace(psd).real, rel=1e-10)
    assert qmat.trace_norm(-psd) == pytest.approx(np.trace(psd).real, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(na=st.integers(1, 4), nb=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_kron_trace_multiplicative(na, nb, seed):
    rng = np.random.default_rng(seed)
    a, b = rand_herm(rng, na), rand_herm(rng, nb)
    assert np.trace(qmat.kron(a, b)) == pytest.approx(np.trace(a) * np.trace(b), abs=1e-12)


def test_matrix_json_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    m = rand_herm(rng, 3)
    path = tmp_path / "m.json"
    qmat.save_matrix(m, path)
    assert np.array_equal(qmat.load_matrix(path), m)
    with pytest.raises(Exception):
        qmat.matrix_from_json([[[1.0, 0.0, 2.0]]])
    with pytest.raises(DimensionError):
        qmat.matrix_from_json([[[1, 0], [0, 0]], [[1, 0]]])
