"""Dense complex linear algebra for small Hermitian operators.

Operators are plain ``numpy`` complex arrays. :func:`hermitian` is the
validating constructor: it symmetrizes, rejects grossly non-Hermitian input and
returns a read-only array, so results can be shared between threads.
"""
from __future__ import annotations

import json
from importlib import resources
from typing import NamedTuple

import numpy as np

from .errors import CapacityError, ConvergenceError, DimensionError

MAX_DIM = 81
HERMITICITY_TOL = 1e-8
CLUSTER_TOL = 1e-9


class Spectrum(NamedTuple):
    """Eigenvalues sorted descending and eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return ``(m + m^†)/2`` as a read-only complex array.

    Raises :class:`DimensionError` for non-square input and :class:`ValueError`
    for non-finite entries or when ``max|m - m^†|`` exceeds ``tol``.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    asym = np.max(np.abs(a - a.conj().T))
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e} > {tol:.1e})")
    return _frozen((a + a.conj().T) / 2)


def identity(d: int) -> np.ndarray:
    return _frozen(np.eye(d, dtype=complex))


def eig_hermitian(op, max_sweeps: int = 100) -> Spectrum:
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the real symmetric Schur rotation, so the iteration never leaves
    the Hermitian matrices. Sweeps stop once the off-diagonal Frobenius norm
    drops below machine precision relative to ``||op||_F``.
    """
    a = np.array(hermitian(op), dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0 or n == 1:
        return _sorted_spectrum(a.diagonal().real.copy(), v)

    target = 4 * np.finfo(float).eps * scale
    for _ in range(max_sweeps):
        off = _off_diagonal_norm(a)
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ rot
    else:
        off = _off_diagonal_norm(a)
        raise ConvergenceError(
            f"Jacobi iteration did not converge after {max_sweeps} sweeps "
            f"(off-diagonal norm {off:.3e}, target {target:.3e})",
            residual=off,
        )
    return _sorted_spectrum(a.diagonal().real.copy(), v)


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(a.diagonal())))


def _sorted_spectrum(w: np.ndarray, v: np.ndarray) -> Spectrum:
    order = np.argsort(-w, kind="stable")
    return Spectrum(_frozen(w[order]), _frozen(v[:, order]))


def eigvalsh(op) -> np.ndarray:
    return eig_hermitian(op).eigenvalues


def trace_norm(op) -> float:
    """Sum of absolute eigenvalues."""
    return float(np.sum(np.abs(eig_hermitian(op).eigenvalues)))


def kron(a, b, cap: int = MAX_DIM) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    dim = a.shape[0] * b.shape[0]
    if dim > cap:
        raise CapacityError(f"kron dimension {dim} exceeds cap {cap}")
    return hermitian(np.kron(a, b))


def _split(op, dims) -> tuple[np.ndarray, int, int]:
    a = np.asarray(op, dtype=complex)
    da, db = (int(x) for x in dims)
    if da <= 0 or db <= 0 or a.shape != (da * db, da * db):
        raise DimensionError(f"operator of shape {a.shape} does not match dims ({da}, {db})")
    return a.reshape(da, db, da, db), da, db


def partial_trace(op, dims, keep: str = "A") -> np.ndarray:
    """Trace out one factor of a ``dA*dB`` operator, keeping ``keep`` ('A' or 'B')."""
    t, _, _ = _split(op, dims)
    if keep == "A":
        out = np.einsum("ijkj->ik", t)
    elif keep == "B":
        out = np.einsum("ijil->jl", t)
    else:
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    return hermitian(out)


def partial_transpose(op, dims, side: str = "B") -> np.ndarray:
    t, da, db = _split(op, dims)
    if side == "B":
        out = t.transpose(0, 3, 2, 1)
    elif side == "A":
        out = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return hermitian(out.reshape(da * db, da * db))


def eigprojectors(op, tol: float = CLUSTER_TOL) -> list[tuple[float, np.ndarray]]:
    """Spectral projectors of ``op`` with eigenvalues clustered within ``tol``.

    Returns ``(value, projector)`` pairs in descending order of value, where
    value is the mean of the clustered eigenvalues.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w, v = eig_hermitian(op)
    out = []
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[start] - w[stop] <= tol:
            stop += 1
        cols = v[:, start:stop]
        out.append((float(np.mean(w[start:stop])), hermitian(cols @ cols.conj().T)))
        start = stop
    return out


def is_psd(op, tol: float = 1e-10) -> bool:
    return bool(eig_hermitian(op).eigenvalues[-1] >= -tol)


def is_state(rho, tol: float = 1e-10) -> bool:
    rho = np.asarray(rho)
    return abs(np.trace(rho).real - 1.0) <= tol and is_psd(rho, tol)


# -- matrix text format -------------------------------------------------------

def _schema():
    text = resources.files("tempcorr").joinpath("data/matrix.schema").read_text()
    return json.loads(text)


def matrix_to_json(m) -> list:
    """Nested row-major lists of ``[re, im]`` pairs."""
    a = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(doc) -> np.ndarray:
    import jsonschema

    jsonschema.validate(doc, _schema())
    widths = {len(row) for row in doc}
    if len(widths) != 1:
        raise DimensionError("ragged matrix rows")
    return np.array([[complex(re, im) for re, im in row] for row in doc])


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def save_matrix(m, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(m), fh)
        fh.write("\n")
