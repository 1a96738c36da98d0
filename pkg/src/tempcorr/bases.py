"""Operator bases for one qubit or qutrit.

Index tables (element ordering is part of the public contract):

``pauli`` (d=2)
    0: I, 1: σx, 2: σy, 3: σz

``wigner_qutrit`` (d=3)
    0..8: K1..K9, the qutrit phase-point operators, with K7 = K4ᵀ, K8 = K5ᵀ,
    K9 = K6ᵀ. They satisfy ΣK = 3I, tr(KiKj) = 3δij, tr Ki = 1.

``gellmann_normalized`` (d=2, 3)
    0: I/√d, then the generators scaled to tr(λ²) = 1. For d=2 these are
    σx, σy, σz over √2; for d=3 the standard Gell-Mann order λ1..λ8 over √2
    (λ1, λ2 couple levels 0-1, λ3 = diag(1,-1,0), λ4, λ5 couple 0-2,
    λ6, λ7 couple 1-2, λ8 = diag(1,1,-2)/√3).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import qmat
from .errors import DimensionError


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    dim: int
    label: str
    elements: np.ndarray  # shape (d*d, d, d), read-only

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def gram(self) -> np.ndarray:
        e = self.elements
        return np.einsum("iab,jba->ij", e, e).real

    def norms(self) -> np.ndarray:
        """Hilbert-Schmidt squares tr(G_i²)."""
        return np.diag(self.gram()).copy()


def _basis(dim, label, mats) -> OperatorBasis:
    elements = np.array([qmat.hermitian(m) for m in mats])
    elements.setflags(write=False)
    return OperatorBasis(dim, label, elements)


@lru_cache(maxsize=None)
def pauli_basis() -> OperatorBasis:
    return _basis(
        2,
        "pauli",
        [
            np.eye(2),
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
    )


@lru_cache(maxsize=None)
def wigner_qutrit_basis() -> OperatorBasis:
    w = (-1 - np.sqrt(3) * 1j) / 2
    wc = w.conjugate()
    k1 = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    k2 = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    k3 = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
    k4 = np.array([[1, 0, 0], [0, 0, w], [0, wc, 0]])
    k5 = np.array([[0, w, 0], [wc, 0, 0], [0, 0, 1]])
    k6 = np.array([[0, 0, w], [0, 1, 0], [wc, 0, 0]])
    basis = _basis(3, "wigner_qutrit", [k1, k2, k3, k4, k5, k6, k4.T, k5.T, k6.T])

    e = basis.elements
    if np.max(np.abs(e.sum(axis=0) - 3 * np.eye(3))) > 1e-12:
        raise AssertionError("phase-point operators do not sum to 3I")
    if np.max(np.abs(basis.gram() - 3 * np.eye(9))) > 1e-12:
        raise AssertionError("phase-point operators are not orthogonal")
    if np.max(np.abs(np.einsum("iaa->i", e) - 1)) > 1e-12:
        raise AssertionError("phase-point operators must have unit trace")
    return basis


@lru_cache(maxsize=None)
def gellmann_basis(d: int) -> OperatorBasis:
    if d == 2:
        mats = [m * np.sqrt(2) / 2 for m in pauli_basis().elements]
        mats[0] = np.eye(2) / np.sqrt(2)
    elif d == 3:
        s = 1 / np.sqrt(2)
        mats = [np.eye(3) / np.sqrt(3)]
        for p, q in ((0, 1), (0, 2), (1, 2)):
            sym = np.zeros((3, 3), dtype=complex)
            sym[p, q] = sym[q, p] = s
            anti = np.zeros((3, 3), dtype=complex)
            anti[p, q], anti[q, p] = -1j * s, 1j * s
            mats += [sym, anti]
            if (p, q) == (0, 1):
                mats.append(np.diag([s, -s, 0]))
        mats.append(np.diag([1, 1, -2]) / np.sqrt(6))
    else:
        raise DimensionError(f"gellmann_basis supports d in {{2, 3}}, got {d}")
    return _basis(d, "gellmann_normalized", mats)


def default_basis(d: int) -> OperatorBasis:
    if d == 2:
        return pauli_basis()
    if d == 3:
        return wigner_qutrit_basis()
    raise DimensionError(f"no default operator basis for d={d}")


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """Coefficients C with ``op = Σ C_ij G_i ⊗ G_j``."""

    coefficients: np.ndarray
    basis_a: OperatorBasis
    basis_b: OperatorBasis

    def reconstruct(self) -> np.ndarray:
        ea, eb = self.basis_a.elements, self.basis_b.elements
        da, db = self.basis_a.dim, self.basis_b.dim
        out = np.einsum("ij,iab,jcd->acbd", self.coefficients, ea, eb)
        return out.reshape(da * db, da * db)


def expand(op, basis_a: OperatorBasis, basis_b: OperatorBasis) -> CorrelationTensor:
    """Expand a bipartite operator in ``basis_a ⊗ basis_b``.

    ``C_ij = tr[op (G_i ⊗ G_j)] / (tr G_i² · tr G_j²)``, which makes
    :meth:`CorrelationTensor.reconstruct` exact for any orthogonal basis.
    """
    op = np.asarray(op, dtype=complex)
    da, db = basis_a.dim, basis_b.dim
    if op.shape != (da * db, da * db):
        raise DimensionError(f"operator shape {op.shape} does not match bases ({da}, {db})")
    t = op.reshape(da, db, da, db)
    # tr[op (A ⊗ B)] = Σ op[(a,c),(b,d)] A[b,a] B[d,c]
    raw = np.einsum("acbd,iba,jdc->ij", t, basis_a.elements, basis_b.elements)
    coeffs = raw / np.outer(basis_a.norms(), basis_b.norms())
    if np.max(np.abs(coeffs.imag)) <= 1e-12 * max(1.0, np.max(np.abs(coeffs))):
        coeffs = coeffs.real
    return CorrelationTensor(coeffs, basis_a, basis_b)
