"""Projective measurements, mutually unbiased bases and deterministic strategies."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import qmat
from .errors import CapacityError, DimensionError

MAX_STRATEGIES = 10_000


@dataclass(frozen=True, eq=False)
class Pvm:
    """Outcome projectors of one measurement setting, shape ``(o, d, d)``."""

    projectors: np.ndarray

    def __post_init__(self):
        p = np.array([qmat.hermitian(m) for m in self.projectors])
        if p.ndim != 3 or p.shape[1] != p.shape[2]:
            raise DimensionError(f"projectors must have shape (o, d, d), got {p.shape}")
        d = p.shape[1]
        if np.max(np.abs(p.sum(axis=0) - np.eye(d))) > 1e-10:
            raise ValueError("projectors do not sum to the identity")
        for a, pa in enumerate(p):
            for b, pb in enumerate(p):
                target = pa if a == b else 0
                if np.max(np.abs(pa @ pb - target)) > 1e-10:
                    raise ValueError("projectors are not orthogonal idempotents")
        p.setflags(write=False)
        object.__setattr__(self, "projectors", p)

    @classmethod
    def from_basis(cls, vectors) -> "Pvm":
        """Rank-1 PVM from the columns of a unitary matrix."""
        u = np.asarray(vectors, dtype=complex)
        return cls(np.einsum("ia,ja->aij", u, u.conj()))

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def outcomes(self) -> int:
        return self.projectors.shape[0]


def measurement_sqrt(m) -> np.ndarray:
    """√M: M itself for a projector, otherwise the spectral square root."""
    m = np.asarray(m, dtype=complex)
    if np.max(np.abs(m @ m - m)) <= 1e-10:
        return m
    w, v = qmat.eig_hermitian(m)
    return v @ np.diag(np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def mub_bases(d: int) -> list[np.ndarray]:
    """Eigenbases of Z, X, XZ, XZ² (d=3) or Z, X, Y (d=2), as unitary matrices."""
    if d == 2:
        s = 1 / np.sqrt(2)
        return [
            np.eye(2, dtype=complex),
            np.array([[s, s], [s, -s]], dtype=complex),
            np.array([[s, s], [1j * s, -1j * s]]),
        ]
    if d == 3:
        w = np.exp(2j * np.pi / 3)
        j = np.arange(3)
        out = [np.eye(3, dtype=complex)]
        # column k of basis m: Σ_j ω^{m j² + k j}|j⟩/√3, an eigenbasis of X Z^{2m}
        for m in (0, 2, 1):
            out.append(np.array([[w ** ((m * jj * jj + k * jj) % 3) for k in j] for jj in j]) / np.sqrt(3))
        return out
    raise DimensionError(f"MUB construction available for d in {{2, 3}}, got {d}")


def mub_pvms(d: int, count: int) -> list[Pvm]:
    if d not in (2, 3):
        raise DimensionError(f"MUB construction available for d in {{2, 3}}, got {d}")
    if not 1 <= count <= d + 1:
        raise ValueError(f"count must be between 1 and {d + 1}, got {count}")
    return [Pvm.from_basis(u) for u in mub_bases(d)[:count]]


@dataclass(frozen=True, eq=False)
class DeterministicStrategySet:
    """All maps λ: setting -> outcome, in lexicographic order of (λ(x1), λ(x2), ...)."""

    settings: int
    outcomes: int

    def __post_init__(self):
        if self.outcomes ** self.settings > MAX_STRATEGIES:
            raise CapacityError(
                f"{self.outcomes}^{self.settings} strategies exceed the cap of {MAX_STRATEGIES}"
            )

    @cached_property
    def strategies(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.outcomes), repeat=self.settings))

    @cached_property
    def table(self) -> np.ndarray:
        """``D[λ, x, a] = δ(a, λ(x))``."""
        lam = np.array(self.strategies, dtype=int).reshape(len(self), self.settings)
        t = (lam[:, :, None] == np.arange(self.outcomes)[None, None, :]).astype(float)
        t.setflags(write=False)
        return t

    def __len__(self):
        return self.outcomes ** self.settings
