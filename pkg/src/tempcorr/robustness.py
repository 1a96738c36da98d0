"""Robustness measures of temporal correlations.

* TER: temporal entanglement robustness of a state over time R: the least
  trace of a positive noise X with R + X ⪰ 0.  Equal to the sum of the
  magnitudes of the negative eigenvalues of R.
* ER: the same with the mixture additionally required to be PPT and the
  noise itself PPT (exact for 2⊗2, a lower bound for 3⊗3).
* TSR: temporal steering robustness of an assemblage ρ̃_{a|x}, an SDP over
  hidden-state ensembles ρ̃_λ indexed by deterministic strategies.
* TNR: temporal nonlocality robustness of a behaviour P(a,b|x,y), an LP over
  local deterministic strategies; ``tnr_lhv`` also asks the noise to be local.

``separability_g`` is the correlation-tensor criterion for 3⊗3 operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qmat
from .bases import expand, gellmann_basis
from .conic import ConicProgram, ConicSolution, SolverOptions, solve
from .dynamics import Channel, _check_state
from .errors import DimensionError, SolverError
from .measurements import DeterministicStrategySet, Pvm, measurement_sqrt, mub_pvms
from .sot import as_operator, causality_f

__all__ = [
    "Assemblage",
    "Behavior",
    "DeterministicStrategySet",
    "Pvm",
    "RobustnessResult",
    "er_ppt",
    "evaluate",
    "make_assemblage",
    "make_behavior",
    "mub_pvms",
    "separability_g",
    "ter_closed_form",
    "ter_sdp",
    "tnr",
    "tnr_lhv",
    "tsr",
]

SEPARABILITY_BOUND = 2 / 3


@dataclass(frozen=True)
class RobustnessResult:
    measure: str
    value: float
    gap: float = 0.0
    exactness: str = "exact"  # exact | ppt-lower-bound | infeasible
    strategies: int = 0
    iterations: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class Assemblage:
    """Subnormalized conditional states, ``elements[x, a] = ρ̃_{a|x}``."""

    elements: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.elements, dtype=complex)
        if e.ndim != 4 or e.shape[2] != e.shape[3]:
            raise DimensionError(f"assemblage needs shape (settings, outcomes, d, d), got {e.shape}")
        e = (e + np.conj(np.swapaxes(e, 2, 3))) / 2
        for x in range(e.shape[0]):
            if abs(np.einsum("aii->", e[x]).real - 1) > 1e-9:
                raise ValueError(f"assemblage traces do not sum to one for setting {x}")
            for a in range(e.shape[1]):
                if np.linalg.eigvalsh(e[x, a])[0] < -1e-10:
                    raise ValueError(f"assemblage element ({a}|{x}) is not positive semidefinite")
        e.setflags(write=False)
        object.__setattr__(self, "elements", e)

    @property
    def settings(self) -> int:
        return self.elements.shape[0]

    @property
    def outcomes(self) -> int:
        return self.elements.shape[1]

    @property
    def dim(self) -> int:
        return self.elements.shape[2]

    def marginals(self) -> np.ndarray:
        """``Σ_a ρ̃_{a|x}`` for every setting."""
        return self.elements.sum(axis=1)


@dataclass(frozen=True, eq=False)
class Behavior:
    """Two-time statistics, ``table[x, y, a, b] = P(a, b | x, y)``."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 4:
            raise DimensionError(f"behavior needs shape (sA, sB, oA, oB), got {t.shape}")
        if np.any(t < -1e-10):
            raise ValueError("behavior has negative probabilities")
        if np.max(np.abs(t.sum(axis=(2, 3)) - 1)) > 1e-9:
            raise ValueError("behavior is not normalized for every setting pair")
        t = np.clip(t, 0, None)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def settings(self) -> tuple[int, int]:
        return self.table.shape[0], self.table.shape[1]

    @property
    def outcomes(self) -> tuple[int, int]:
        return self.table.shape[2], self.table.shape[3]

    def is_signalling(self, tol: float = 1e-9) -> bool:
        """True when B's marginal depends on A's setting (or vice versa)."""
        pb = self.table.sum(axis=2)  # [x, y, b]
        pa = self.table.sum(axis=3)  # [x, y, a]
        return bool(np.ptp(pb, axis=0).max() > tol or np.ptp(pa, axis=1).max() > tol)


def _as_pvms(pvms, d) -> list[Pvm]:
    out = [p if isinstance(p, Pvm) else Pvm(np.asarray(p)) for p in pvms]
    if not out:
        raise ValueError("at least one measurement setting is needed")
    for p in out:
        if p.dim != d:
            raise DimensionError(f"PVM dimension {p.dim} does not match d={d}")
    if len({p.outcomes for p in out}) != 1:
        raise ValueError("all settings must have the same number of outcomes")
    return out


def _post_measurement(rho, ch: Channel, pvms):
    """``𝓔(√M ρ √M)`` for every setting and outcome, shape (s, o, d, d)."""
    out = []
    for p in pvms:
        roots = [measurement_sqrt(m) for m in p.projectors]
        out.append([ch(r @ rho @ r) for r in roots])
    return np.array(out)


def make_assemblage(rho_a, ch: Channel, pvms) -> Assemblage:
    rho = _check_state(rho_a, ch.dim)
    return Assemblage(_post_measurement(rho, ch, _as_pvms(pvms, ch.dim)))


def make_behavior(rho_a, ch: Channel, pvms_a, pvms_b) -> Behavior:
    rho = _check_state(rho_a, ch.dim)
    evolved = _post_measurement(rho, ch, _as_pvms(pvms_a, ch.dim))
    proj_b = np.array([p.projectors for p in _as_pvms(pvms_b, ch.dim)])
    # P[x, y, a, b] = tr(M_{b|y} ρ̃_{a|x})
    table = np.einsum("ybij,xaji->xyab", proj_b, evolved).real
    return Behavior(table)


def _unit_trace(r) -> tuple[np.ndarray, tuple[int, int]]:
    op, dims = as_operator(r)
    if abs(np.trace(op).real - 1) > 1e-9:
        raise ValueError("robustness measures need a unit-trace operator")
    return op, dims


def _require_optimal(sol: ConicSolution, measure: str) -> ConicSolution:
    if sol.status != "optimal":
        raise SolverError(f"{measure}: solver finished with status {sol.status!r}", solution=sol)
    return sol


# TER ---------------------------------------------------------------------------


def ter_closed_form(r) -> float:
    """Sum of the magnitudes of the negative eigenvalues."""
    op, _ = _unit_trace(r)
    w = qmat.eigvalsh(op)
    return max(0.0, float(-np.sum(w[w < 0])))


def _ter_sdp(r, opts=None) -> RobustnessResult:
    op, _ = _unit_trace(r)
    n = op.shape[0]
    p = ConicProgram()
    noise = p.add_psd(n, "noise")
    mixed = p.add_psd(n, "R+noise")
    p.set_objective(noise, np.eye(n))
    p.add_matrix_equality({mixed: 1.0, noise: -1.0}, op)
    sol = _require_optimal(solve(p, opts), "ter")
    return RobustnessResult("ter", max(sol.primal_objective, 0.0), sol.gap, iterations=sol.iterations)


def ter_sdp(r, opts: SolverOptions | None = None) -> float:
    return _ter_sdp(r, opts).value


# ER ----------------------------------------------------------------------------


def _er(r, noise_cone="ppt", opts=None) -> RobustnessResult:
    op, dims = _unit_trace(r)
    if noise_cone not in ("ppt", "psd"):
        raise ValueError("noise_cone must be 'ppt' or 'psd'")
    n = op.shape[0]

    def pt(m):
        return qmat.partial_transpose(m, dims, side="B")

    p = ConicProgram()
    noise = p.add_psd(n, "noise")
    mixed = p.add_psd(n, "R+noise")
    mixed_pt = p.add_psd(n, "(R+noise)^PT")
    p.set_objective(noise, np.eye(n))
    p.add_matrix_equality({mixed: 1.0, noise: -1.0}, op)
    p.add_matrix_equality({mixed_pt: 1.0, mixed: lambda m: -pt(m)}, np.zeros((n, n)))
    if noise_cone == "ppt":
        noise_pt = p.add_psd(n, "noise^PT")
        p.add_matrix_equality({noise_pt: 1.0, noise: lambda m: -pt(m)}, np.zeros((n, n)))
    sol = _require_optimal(solve(p, opts), "er")
    exact = "exact" if min(dims) == 2 and max(dims) <= 3 else "ppt-lower-bound"
    return RobustnessResult("er", max(sol.primal_objective, 0.0), sol.gap, exact, iterations=sol.iterations)


def er_ppt(r, noise_cone: str = "ppt", opts: SolverOptions | None = None) -> float:
    """PPT relaxation of the entanglement robustness.

    ``noise_cone="ppt"`` asks the noise to be PPT as well; ``"psd"`` only asks it
    to be positive (a weaker, generalized-robustness-like bound).
    """
    return _er(r, noise_cone, opts).value


# TSR ---------------------------------------------------------------------------


def _tsr(asm: Assemblage, opts=None) -> RobustnessResult:
    strat = DeterministicStrategySet(asm.settings, asm.outcomes)
    d = asm.dim
    p = ConicProgram()
    hidden = [p.add_psd(d, f"rho_{lam}") for lam in strat.strategies]
    for blk in hidden:
        p.set_objective(blk, np.eye(d))
    table = strat.table
    for x in range(asm.settings):
        for a in range(asm.outcomes):
            slack = p.add_psd(d, f"slack_{a}|{x}")
            terms = {blk: 1.0 for k, blk in enumerate(hidden) if table[k, x, a]}
            terms[slack] = -1.0
            p.add_matrix_equality(terms, asm.elements[x, a])
    sol = _require_optimal(solve(p, opts), "tsr")
    value = max(sol.primal_objective - 1.0, 0.0)
    return RobustnessResult("tsr", value, sol.gap, strategies=len(strat), iterations=sol.iterations)


def tsr(asm: Assemblage, opts: SolverOptions | None = None) -> float:
    return _tsr(asm, opts).value


# TNR ---------------------------------------------------------------------------


def _joint_table(b: Behavior):
    """Rows (x, y, a, b) by columns (μ, ν) of D(a|x,μ) D(b|y,ν)."""
    sa, sb = b.settings
    oa, ob = b.outcomes
    da = DeterministicStrategySet(sa, oa)
    db = DeterministicStrategySet(sb, ob)
    joint = np.einsum("mxa,nyb->xyabmn", da.table, db.table)
    return joint.reshape(sa * sb * oa * ob, len(da) * len(db)), len(da) * len(db)


def _tnr(b: Behavior, opts=None) -> RobustnessResult:
    dd, k = _joint_table(b)
    rows = dd.shape[0]
    p = ConicProgram()
    r = p.add_nonneg(k, "r")
    t = p.add_nonneg(rows, "surplus")
    total = b.table.sum()
    # Σ_{xyab} Σ_{μν} r̃ DD = r̃·(number of setting pairs)
    p.set_objective(r, dd.sum(axis=0) / total)
    p.add_vector_equality({r: dd, t: -np.eye(rows)}, b.table.reshape(-1))
    sol = _require_optimal(solve(p, opts), "tnr")
    return RobustnessResult("tnr", max(sol.primal_objective - 1.0, 0.0), sol.gap, strategies=k, iterations=sol.iterations)


def tnr(b: Behavior, opts: SolverOptions | None = None) -> float:
    return _tnr(b, opts).value


def _tnr_lhv(b: Behavior, opts=None) -> RobustnessResult:
    dd, k = _joint_table(b)
    p = ConicProgram()
    r = p.add_nonneg(k, "r")
    q = p.add_nonneg(k, "q")
    p.set_objective(r, dd.sum(axis=0) / b.table.sum())
    p.add_vector_equality({r: dd, q: -dd}, b.table.reshape(-1))
    sol = solve(p, opts)
    if sol.status == "infeasible":
        # a signed combination of local strategies is non-signalling; signalling data has no such form
        return RobustnessResult("tnr_lhv", math.inf, math.nan, "infeasible", strategies=k, iterations=sol.iterations)
    _require_optimal(sol, "tnr_lhv")
    return RobustnessResult("tnr_lhv", max(sol.primal_objective - 1.0, 0.0), sol.gap, strategies=k, iterations=sol.iterations)


def tnr_lhv(b: Behavior, opts: SolverOptions | None = None) -> float:
    """TNR with local noise; ``inf`` when no such decomposition exists (signalling behaviours)."""
    return _tnr_lhv(b, opts).value


# separability ------------------------------------------------------------------


def separability_g(r) -> float:
    """``max(0, ‖D₀ C D₀‖_tr − 2/3)`` for the Gell-Mann correlation tensor C of a 3⊗3 operator."""
    op, dims = as_operator(r)
    if tuple(dims) != (3, 3):
        raise DimensionError(f"separability_g is defined for 3⊗3 operators, got {dims}")
    for keep in ("A", "B"):
        if not qmat.is_psd(qmat.partial_trace(op, dims, keep=keep), 1e-9):
            raise ValueError(f"reduced operator on {keep} is not positive semidefinite")
    g = gellmann_basis(3)
    c = np.real(np.asarray(expand(op, g, g).coefficients)).copy()
    c[0, :] = 0
    c[:, 0] = 0
    # singular values of C are the positive eigenvalues of [[0, C], [Cᵀ, 0]]
    m = c.shape[0]
    dilation = np.zeros((2 * m, 2 * m))
    dilation[:m, m:] = c
    dilation[m:, :m] = c.T
    norm = qmat.trace_norm(dilation) / 2
    return max(0.0, norm - SEPARABILITY_BOUND)


# dispatch ----------------------------------------------------------------------


def evaluate(measure: str, obj, opts: SolverOptions | None = None) -> RobustnessResult:
    """Compute one measure and return it with solver metadata."""
    if measure == "ter":
        return RobustnessResult("ter", ter_closed_form(obj))
    if measure == "ter_sdp":
        return _ter_sdp(obj, opts)
    if measure == "er":
        return _er(obj, "ppt", opts)
    if measure == "tsr":
        return _tsr(obj, opts)
    if measure == "tnr":
        return _tnr(obj, opts)
    if measure == "tnr_lhv":
        return _tnr_lhv(obj, opts)
    if measure == "g":
        return RobustnessResult("g", separability_g(obj))
    if measure == "f":
        return RobustnessResult("f", causality_f(obj))
    raise ValueError(f"unknown measure {measure!r}")


MEASURES = ("ter", "ter_sdp", "er", "tsr", "tnr", "tnr_lhv", "g", "f")
