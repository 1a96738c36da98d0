"""States over time for two measurement events on one qubit or qutrit.

Two constructions are provided:

* :func:`build_pdo`: the pseudo-density operator built from two-time
  expectation values of an operator basis ``{G_i}`` with ``tr(G_iG_j) = dδ_ij``
  (Pauli for qubits, phase-point operators for qutrits)::

      R = (1/d²) Σ_ij ⟨G_i ⊗ G_j⟩ G_i ⊗ G_j
      ⟨G_i ⊗ G_j⟩ = Σ_a a · tr[E (Π_{i,a} ρ Π_{i,a} ⊗ G_j)]

  where Π_{i,a} projects onto the whole eigenspace of G_i with eigenvalue a
  (Lüders rule; degenerate eigenvalues are clustered, not split into rank-1
  projectors).

* :func:`build_wigner`: the qutrit quasi-probability construction
  ``R = Σ_ij r(j|i) r(i) K_i ⊗ K_j`` with ``r(i) = tr(ρK_i)/d`` and
  ``r(j|i) = tr[E (K_i ⊗ K_j)]/d``; the 1/d factors make r(i) and r(·|i)
  normalized and give tr R = 1.

For ρ = I/d both reduce to ``E/d``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import qmat
from .bases import OperatorBasis, default_basis, wigner_qutrit_basis
from .dynamics import Channel, ChoiOperator, _check_state, choi, propagate_choi
from .errors import DimensionError

NSIT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StateOverTime:
    operator: np.ndarray
    dims: tuple[int, int]
    construction: str
    rho: np.ndarray | None = None
    channel: Channel | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.operator, dtype=dtype)

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def marginal(self, keep: str = "A") -> np.ndarray:
        return qmat.partial_trace(self.operator, self.dims, keep=keep)


def as_operator(r) -> tuple[np.ndarray, tuple[int, int]]:
    """Operator and subsystem dims of a StateOverTime or a square d²×d² array."""
    if isinstance(r, StateOverTime):
        return r.operator, r.dims
    op = qmat.hermitian(r)
    d = int(round(np.sqrt(op.shape[0])))
    if d * d != op.shape[0]:
        raise DimensionError(f"cannot infer subsystem dims from shape {op.shape}; pass a StateOverTime")
    return op, (d, d)


def _projector_table(basis: OperatorBasis):
    return [qmat.eigprojectors(g) for g in basis.elements]


_PROJECTORS: dict[str, list] = {}


def _cached_projectors(basis: OperatorBasis):
    key = f"{basis.label}:{basis.dim}"
    if key not in _PROJECTORS:
        _PROJECTORS[key] = _projector_table(basis)
    return _PROJECTORS[key]


def two_time_expectations(rho, e: ChoiOperator, basis: OperatorBasis) -> np.ndarray:
    """Matrix of ⟨G_i ⊗ G_j⟩ for the thought measurements of ``basis``."""
    g = basis.elements
    out = np.empty((len(g), len(g)))
    for i, spectral in enumerate(_cached_projectors(basis)):
        # Σ_a a · 𝓔(Π ρ Π), then contract with every G_j
        evolved = sum(a * propagate_choi(e, p @ rho @ p) for a, p in spectral)
        out[i] = np.einsum("ab,jba->j", evolved, g).real
    return out


def build_pdo(rho_a, ch: Channel, basis: OperatorBasis | None = None) -> StateOverTime:
    d = ch.dim
    basis = default_basis(d) if basis is None else basis
    if basis.dim != d or basis.label not in ("pauli", "wigner_qutrit"):
        raise DimensionError(
            f"build_pdo needs the Pauli (d=2) or phase-point (d=3) basis, got {basis.label} for d={d}"
        )
    rho = _check_state(rho_a, d)
    expect = two_time_expectations(rho, choi(ch), basis)
    g = basis.elements
    r = np.einsum("ij,iab,jcd->acbd", expect, g, g).reshape(d * d, d * d) / d**2
    return StateOverTime(qmat.hermitian(r), (d, d), "pdo", rho, ch, {"expectations": expect})


def build_wigner(rho_a, ch: Channel) -> StateOverTime:
    if ch.dim != 3:
        raise DimensionError("the phase-point construction is defined for qutrits only")
    d = 3
    rho = _check_state(rho_a, d)
    k = wigner_qutrit_basis().elements
    e = np.asarray(choi(ch).operator).reshape(d, d, d, d)
    r_i = np.einsum("ab,iba->i", rho, k).real / d
    # tr[E (K_i ⊗ K_j)] = Σ E[(a,c),(b,e)] K_i[b,a] K_j[e,c]
    r_ji = np.einsum("acbe,iba,jec->ij", e, k, k).real / d
    weights = r_ji * r_i[:, None]
    op = np.einsum("ij,iab,jcd->acbd", weights, k, k).reshape(d * d, d * d)
    extra = {"r_i": r_i, "r_j_given_i": r_ji}
    return StateOverTime(qmat.hermitian(op), (d, d), "wigner", rho, ch, extra)


def build(rho_a, ch: Channel, construction: str = "pdo") -> StateOverTime:
    if construction == "pdo":
        return build_pdo(rho_a, ch)
    if construction == "wigner":
        return build_wigner(rho_a, ch)
    raise ValueError(f"unknown construction {construction!r}")


def causality_f(r) -> float:
    """Trace norm minus one; zero exactly when a unit-trace R is positive semidefinite."""
    op, _ = as_operator(r)
    return max(qmat.trace_norm(op) - 1.0, 0.0)


@dataclass(frozen=True)
class NsitReport:
    satisfied: bool
    max_violation: float
    marginals: tuple
    reference: np.ndarray
    note: str = ""


def nsit_check(rho_a, ch: Channel, settings, tol: float = NSIT_TOL) -> NsitReport:
    """Compare Σ_a ρ̃_{a|x} with 𝓔(ρ_A) for every setting x (trace-norm distance)."""
    if len(settings) == 0:
        raise ValueError("nsit_check needs at least one measurement setting")
    rho = _check_state(rho_a, ch.dim)
    reference = qmat.hermitian(ch(rho))
    marginals = []
    worst = 0.0
    for pvm in settings:
        if pvm.dim != ch.dim:
            raise DimensionError(f"PVM dimension {pvm.dim} does not match channel dimension {ch.dim}")
        m = qmat.hermitian(sum(ch(p @ rho @ p) for p in pvm.projectors))
        marginals.append(m)
        worst = max(worst, qmat.trace_norm(m - reference))
    note = "single setting: compared against the unmeasured evolution only" if len(settings) == 1 else ""
    return NsitReport(worst <= tol, worst, tuple(marginals), reference, note)
