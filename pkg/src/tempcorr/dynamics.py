"""Noise channels on a qubit or qutrit and their Choi–Jamiołkowski operators.

Time enters only through the dimensionless product ``gamma_t`` (decay rate
times elapsed time); ``math.inf`` is accepted and gives the channel's
long-time limit.

Qubit maps:
    amplitude damping  Kraus {|0⟩⟨0| + √p|1⟩⟨1|, √(1-p)|0⟩⟨1|}, p = e^{-γt}
    phase damping      off-diagonals scaled by e^{-γt}
    depolarizing       ρ ↦ e^{-γt}ρ + (1 - e^{-γt}) I/2

Qutrit maps are the explicit element-wise forms (amplitude damping relaxes
towards |2⟩). The phase-damping (0,2) element uses ρ02.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat
from .errors import ConfigError, DimensionError

KINDS = ("amplitude_damping", "phase_damping", "depolarizing", "identity")
_ALIASES = {
    "ad": "amplitude_damping",
    "amplitude": "amplitude_damping",
    "pd": "phase_damping",
    "phase": "phase_damping",
    "dephasing": "phase_damping",
    "dep": "depolarizing",
    "depolarising": "depolarizing",
    "id": "identity",
}


@dataclass(frozen=True)
class Channel:
    kind: str
    dim: int
    gamma_t: float = 0.0

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        if kind != "identity" and self.dim not in (2, 3):
            raise DimensionError(f"{kind} is defined for d in {{2, 3}}, got {self.dim}")
        if self.dim < 1:
            raise DimensionError("channel dimension must be positive")
        if not (self.gamma_t >= 0):
            raise ValueError(f"gamma_t must be non-negative, got {self.gamma_t}")
        object.__setattr__(self, "gamma_t", float(self.gamma_t))

    @classmethod
    def from_spec(cls, spec: dict, dim: int) -> "Channel":
        """Build from ``{kind, gamma_t}`` or ``{kind, gamma, t}``."""
        spec = dict(spec)
        try:
            kind = spec.pop("kind")
        except KeyError:
            raise ConfigError("channel spec needs 'kind'") from None
        if "gamma_t" in spec:
            if "gamma" in spec or "t" in spec:
                raise ConfigError("give either gamma_t or gamma and t, not both")
            gt = float(spec.pop("gamma_t"))
        elif "gamma" in spec and "t" in spec:
            gt = float(spec.pop("gamma")) * float(spec.pop("t"))
        elif kind in ("identity", "id"):
            gt = 0.0
        else:
            raise ConfigError("channel spec needs gamma_t, or gamma and t")
        if spec:
            raise ConfigError(f"unknown channel spec keys: {sorted(spec)}")
        try:
            return cls(kind, dim, gt)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def at(self, gamma_t: float) -> "Channel":
        return Channel(self.kind, self.dim, gamma_t)

    def __call__(self, x) -> np.ndarray:
        """Linear action on an arbitrary d×d matrix (no state checks)."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise DimensionError(f"channel acts on {self.dim}x{self.dim}, got {x.shape}")
        if self.kind == "identity":
            return x.copy()
        e = math.exp(-self.gamma_t)
        if self.kind == "depolarizing":
            return e * x + (1 - e) * np.trace(x) * np.eye(self.dim) / self.dim
        if self.kind == "phase_damping":
            out = e * x
            np.fill_diagonal(out, np.diag(x))
            return out
        if self.dim == 2:
            return _qubit_amplitude_damping(x, e)
        return _qutrit_amplitude_damping(x, self.gamma_t)


def _qubit_amplitude_damping(x, p):
    out = np.empty((2, 2), dtype=complex)
    out[0, 0] = x[0, 0] + (1 - p) * x[1, 1]
    out[0, 1] = math.sqrt(p) * x[0, 1]
    out[1, 0] = math.sqrt(p) * x[1, 0]
    out[1, 1] = p * x[1, 1]
    return out


def _qutrit_amplitude_damping(x, gt):
    e1 = math.exp(-gt)
    e2 = math.exp(-2 * gt)
    eh = math.exp(-gt / 2)
    e3h = math.exp(-1.5 * gt)
    mix = math.sqrt(2) * (eh - e3h)
    out = np.empty((3, 3), dtype=complex)
    out[0, 0] = e2 * x[0, 0]
    out[0, 1] = e3h * x[0, 1]
    out[0, 2] = e1 * x[0, 2]
    out[1, 0] = e3h * x[1, 0]
    out[1, 1] = 2 * (e1 - e2) * x[0, 0] + e1 * x[1, 1]
    out[1, 2] = mix * x[0, 1] + eh * x[1, 2]
    out[2, 0] = e1 * x[2, 0]
    out[2, 1] = mix * x[1, 0] + eh * x[2, 1]
    out[2, 2] = (e2 - 2 * e1 + 1) * x[0, 0] + (1 - e1) * x[1, 1] + x[2, 2]
    return out


def _check_state(rho, d, tol=1e-10):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} state, got shape {rho.shape}")
    rho = qmat.hermitian(rho)
    if abs(np.trace(rho).real - 1) > tol or not qmat.is_psd(rho, tol):
        raise ValueError("input is not a density matrix (trace 1, positive semidefinite)")
    return rho


def apply(ch: Channel, rho) -> np.ndarray:
    """Evolve a density matrix through ``ch``."""
    rho = _check_state(rho, ch.dim)
    return qmat.hermitian(ch(rho))


@dataclass(frozen=True, eq=False)
class ChoiOperator:
    """``E = Σ_ij |i⟩⟨j| ⊗ 𝓔(|j⟩⟨i|)`` on the input ⊗ output space."""

    dims: tuple[int, int]
    operator: np.ndarray

    @property
    def standard(self) -> np.ndarray:
        """Partial transpose on the input factor: the positive Choi matrix of a CP map."""
        return qmat.partial_transpose(self.operator, self.dims, side="A")


def choi(ch: Channel) -> ChoiOperator:
    d = ch.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            ket_ij = np.zeros((d, d))
            ket_ij[i, j] = 1
            out += np.kron(ket_ij, ch(ket_ij.T))
    return ChoiOperator((d, d), qmat.hermitian(out))


def propagate_choi(e: ChoiOperator, rho) -> np.ndarray:
    """``tr_A[E (ρ ⊗ I)]``, which equals 𝓔(ρ) for this index convention."""
    da, db = e.dims
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (da, da):
        raise DimensionError(f"expected a {da}x{da} operator, got {rho.shape}")
    t = np.asarray(e.operator).reshape(da, db, da, db)
    # [E(ρ⊗I)]_{(i,k),(j,l)} = Σ_m E_{(i,k),(m,l)} ρ_{mj}; trace over i = j
    out = np.einsum("ikml,mi->kl", t, rho)
    return qmat.hermitian(out, tol=1e-8 * max(1.0, np.abs(out).max()))


def is_completely_positive(ch: Channel, tol: float = 1e-10) -> bool:
    return qmat.is_psd(choi(ch).standard, tol)
