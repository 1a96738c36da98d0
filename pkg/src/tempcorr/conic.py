"""Dense primal-dual interior-point solver for small block conic programs.

Standard form::

    minimize    c·x
    subject to  A x = b,   x ∈ K = K_1 × … × K_p

where each K_k is either the cone of n×n complex Hermitian positive
semidefinite matrices or the nonnegative orthant of R^n.  A Hermitian block is
stored as a real vector of length n² through an isometric ``svec``: the
diagonal, then √2·Re and √2·Im of each upper off-diagonal entry in row-major
order.  With this coordinate map ``tr(F X) = svec(F)·svec(X)``.

The dual is ``maximize b·y  s.t.  Aᵀy + s = c,  s ∈ K``.

The iteration is an infeasible-start path-following method with
Nesterov–Todd scaling and Mehrotra's predictor-corrector; the Schur
complement ``A W Aᵀ`` is formed densely and factored with Cholesky.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .errors import SolverError

FORMAT = "tempcorr-conic/1"
_SQRT2 = np.sqrt(2.0)


@lru_cache(maxsize=None)
def _upper(n: int):
    return np.triu_indices(n, 1)


def svec(m) -> np.ndarray:
    """Hermitian matrix -> real coordinates (isometric)."""
    m = np.asarray(m)
    n = m.shape[0]
    iu = _upper(n)
    off = m[iu]
    out = np.empty(n * n)
    out[:n] = np.diag(m).real
    out[n::2] = _SQRT2 * off.real
    out[n + 1 :: 2] = _SQRT2 * off.imag
    return out


def smat(v, n: int) -> np.ndarray:
    """Inverse of :func:`svec`."""
    v = np.asarray(v, dtype=float)
    out = np.zeros((n, n), dtype=complex)
    iu = _upper(n)
    off = (v[n::2] + 1j * v[n + 1 :: 2]) / _SQRT2
    out[iu] = off
    out = out + out.conj().T
    out[np.diag_indices(n)] = v[:n]
    return out


@lru_cache(maxsize=None)
def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal Hermitian basis ordered like :func:`svec`, shape (n², n, n)."""
    basis = np.array([smat(e, n) for e in np.eye(n * n)])
    basis.setflags(write=False)
    return basis


@lru_cache(maxsize=None)
def _vec_basis(n: int) -> np.ndarray:
    # columns are row-major vec of the basis matrices
    return hermitian_basis(n).reshape(n * n, n * n).T.copy()


@dataclass(frozen=True)
class Block:
    index: int
    cone: str  # "psd" or "nonneg"
    size: int
    offset: int
    name: str = ""

    @property
    def length(self) -> int:
        return self.size * self.size if self.cone == "psd" else self.size


@dataclass(frozen=True)
class Constraint:
    rows: slice
    kind: str  # "scalar", "vector" or "matrix"
    size: int


Term = Callable | np.ndarray | float | str


class ConicProgram:
    """Builder for a block conic program in standard form."""

    def __init__(self):
        self.blocks: list[Block] = []
        self._c: dict[int, np.ndarray] = {}
        self._rows: list[np.ndarray] = []
        self._rhs: list[float] = []
        self._n = 0

    # variables -------------------------------------------------------------
    def _add(self, cone, size, name):
        if size < 1:
            raise ValueError("block size must be positive")
        blk = Block(len(self.blocks), cone, int(size), self._n, name)
        self.blocks.append(blk)
        self._n += blk.length
        for row in range(len(self._rows)):
            self._rows[row] = np.concatenate([self._rows[row], np.zeros(blk.length)])
        return blk

    def add_psd(self, n: int, name: str = "") -> Block:
        return self._add("psd", n, name)

    def add_nonneg(self, n: int, name: str = "") -> Block:
        return self._add("nonneg", n, name)

    @property
    def num_vars(self) -> int:
        return self._n

    @property
    def num_constraints(self) -> int:
        return len(self._rows)

    # data ------------------------------------------------------------------
    def _coefficients(self, blk: Block, coef) -> np.ndarray:
        if blk.cone == "psd":
            f = np.asarray(coef, dtype=complex)
            if f.ndim == 0:
                f = f * np.eye(blk.size)
            if f.shape != (blk.size, blk.size):
                raise ValueError(f"block {blk.name or blk.index} needs a {blk.size}x{blk.size} coefficient")
            if np.max(np.abs(f - f.conj().T), initial=0) > 1e-12 * max(1.0, np.abs(f).max()):
                raise ValueError("coefficient matrix must be Hermitian")
            return svec((f + f.conj().T) / 2)
        v = np.asarray(coef, dtype=float)
        if v.ndim == 0:
            v = np.full(blk.size, float(v))
        if v.shape != (blk.size,):
            raise ValueError(f"block {blk.name or blk.index} needs a length-{blk.size} coefficient")
        return v

    def set_objective(self, blk: Block, coef) -> None:
        """Objective contribution ``tr(C X)`` (PSD) or ``c·x`` (nonneg)."""
        c = self._coefficients(blk, coef)
        if not np.all(np.isfinite(c)):
            raise ValueError("objective must be finite")
        self._c[blk.index] = c

    def _append(self, rows, rhs, kind, size) -> Constraint:
        rows = np.atleast_2d(rows)
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        if not (np.all(np.isfinite(rows)) and np.all(np.isfinite(rhs))):
            raise ValueError("constraint data must be finite")
        start = len(self._rows)
        self._rows.extend(rows)
        self._rhs.extend(rhs)
        return Constraint(slice(start, len(self._rows)), kind, size)

    def add_constraint(self, terms: dict, rhs: float) -> Constraint:
        """Scalar equality ``Σ_k ⟨F_k, X_k⟩ = rhs``."""
        row = np.zeros(self._n)
        for blk, coef in terms.items():
            row[blk.offset : blk.offset + blk.length] += self._coefficients(blk, coef)
        return self._append(row, rhs, "scalar", 1)

    def _map_matrix(self, blk: Block, op, out_len, encode) -> np.ndarray:
        """Real matrix of a linear map from block coordinates to output coordinates."""
        if isinstance(op, str) and op == "identity":
            op = lambda z: z  # noqa: E731
        if blk.cone == "psd":
            inputs = hermitian_basis(blk.size)
        else:
            inputs = np.eye(blk.size)
        if callable(op):
            cols = [encode(op(e)) for e in inputs]
            return np.array(cols).T.reshape(out_len, blk.length)
        m = np.asarray(op)
        if m.ndim == 0:
            return float(m) * np.array([encode(e) for e in inputs]).T
        if blk.cone == "nonneg" and m.shape == (out_len, blk.size):
            return m.astype(float)
        raise ValueError("term must be a callable, 'identity', a scalar or a matrix for a nonneg block")

    def add_matrix_equality(self, terms: dict, rhs) -> Constraint:
        """Hermitian equality ``Σ_k L_k(X_k) = R``.

        Each ``L_k`` is a callable linear map (or a scalar multiple of the
        identity) taking Hermitian arguments to Hermitian d×d outputs.  One real
        equation is added per element of the output Hermitian basis.
        """
        r = np.asarray(rhs, dtype=complex)
        d = r.shape[0]
        if r.shape != (d, d) or np.max(np.abs(r - r.conj().T)) > 1e-10 * max(1.0, np.abs(r).max()):
            raise ValueError("right-hand side must be a square Hermitian matrix")

        def encode(y):
            y = np.asarray(y, dtype=complex)
            if y.shape != (d, d):
                raise ValueError(f"linear map must return a {d}x{d} matrix, got {y.shape}")
            if np.max(np.abs(y - y.conj().T)) > 1e-10 * max(1.0, np.abs(y).max()):
                raise ValueError("linear map is not Hermitian-preserving")
            return svec(y)

        rows = np.zeros((d * d, self._n))
        for blk, op in terms.items():
            rows[:, blk.offset : blk.offset + blk.length] += self._map_matrix(blk, op, d * d, encode)
        return self._append(rows, svec((r + r.conj().T) / 2), "matrix", d)

    def add_vector_equality(self, terms: dict, rhs) -> Constraint:
        """Real equality ``Σ_k M_k(x_k) = v``; ``M_k`` is a matrix (nonneg blocks) or a callable."""
        v = np.atleast_1d(np.asarray(rhs, dtype=float))
        m = v.shape[0]

        def encode(y):
            y = np.asarray(y)
            if np.iscomplexobj(y) and np.max(np.abs(y.imag), initial=0) > 1e-12:
                raise ValueError("linear map must be real-valued")
            y = np.real(y).reshape(-1)
            if y.shape != (m,):
                raise ValueError(f"linear map must return a length-{m} vector")
            return y

        rows = np.zeros((m, self._n))
        for blk, op in terms.items():
            rows[:, blk.offset : blk.offset + blk.length] += self._map_matrix(blk, op, m, encode)
        return self._append(rows, v, "vector", m)

    # assembled data ----------------------------------------------------------
    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self._n)
        for blk in self.blocks:
            if blk.index in self._c:
                c[blk.offset : blk.offset + blk.length] = self._c[blk.index]
        return c

    def matrices(self):
        a = np.array(self._rows).reshape(len(self._rows), self._n)
        return a, np.array(self._rhs, dtype=float), self.objective_vector()

    def scaled(self, factor: float) -> "ConicProgram":
        """Copy with the objective multiplied by ``factor``."""
        out = ConicProgram()
        out.blocks = list(self.blocks)
        out._n = self._n
        out._rows = [r.copy() for r in self._rows]
        out._rhs = list(self._rhs)
        out._c = {k: factor * v for k, v in self._c.items()}
        return out


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    step_fraction: float = 0.98
    infeas_tol: float = 1e-9
    polish: bool = True
    verbose: bool = False


@dataclass(eq=False)
class ConicSolution:
    status: str  # optimal | infeasible | max_iter
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    primal_objective: float
    dual_objective: float
    gap: float
    iterations: int
    primal_residual: float
    dual_residual: float
    blocks: list[Block] = field(default_factory=list)
    infeasible_side: str = ""
    history: list[dict] = field(default_factory=list)

    def _unpack(self, vec, blk: Block):
        part = vec[blk.offset : blk.offset + blk.length]
        return smat(part, blk.size) if blk.cone == "psd" else part.copy()

    def value(self, blk: Block):
        """Primal block as a Hermitian matrix or a vector."""
        return self._unpack(self.x, blk)

    def dual_slack(self, blk: Block):
        return self._unpack(self.s, blk)

    def dual_value(self, con: Constraint):
        """Multiplier of a constraint; a Hermitian matrix for matrix equalities."""
        part = self.y[con.rows]
        if con.kind == "matrix":
            return smat(part, con.size)
        return float(part[0]) if con.kind == "scalar" else part.copy()

    @property
    def blocks_values(self) -> list:
        return [self.value(b) for b in self.blocks]


def dual_certificate(sol: ConicSolution) -> float:
    """Dual objective of an optimal solution (a certified bound on the primal value)."""
    if sol.status != "optimal":
        raise SolverError(f"no dual certificate for a solution with status {sol.status!r}", solution=sol)
    return sol.dual_objective


# cone arithmetic -------------------------------------------------------------


class _Cone:
    def __init__(self, blocks: list[Block]):
        self.psd = [b for b in blocks if b.cone == "psd"]
        lp = [b for b in blocks if b.cone == "nonneg"]
        self.lp_idx = np.concatenate([np.arange(b.offset, b.offset + b.length) for b in lp]) if lp else np.zeros(0, int)
        self.nu = sum(b.size for b in blocks)

    def identity(self, n_total, scale_psd, scale_lp) -> np.ndarray:
        v = np.zeros(n_total)
        for b, sc in zip(self.psd, scale_psd):
            v[b.offset : b.offset + b.size] = sc
        v[self.lp_idx] = scale_lp
        return v


class _Scaling:
    """NT scaling data for the current iterate."""

    def __init__(self, cone: _Cone, x, s):
        self.cone = cone
        self.psd = []
        for b in cone.psd:
            sl = slice(b.offset, b.offset + b.length)
            xm, sm = smat(x[sl], b.size), smat(s[sl], b.size)
            l1 = np.linalg.cholesky(xm)
            l2 = np.linalg.cholesky(sm)
            u, lam, vh = np.linalg.svd(l2.conj().T @ l1)
            r = l1 @ vh.conj().T / np.sqrt(lam)
            rinv = (u.conj().T / np.sqrt(lam)[:, None]) @ l2.conj().T
            w = r @ r.conj().T
            q = _vec_basis(b.size)
            wmat = (q.conj().T @ np.kron(w, w.T) @ q).real
            self.psd.append((sl, b.size, l1, l2, r, rinv, lam, wmat))
        xi, si = x[cone.lp_idx], s[cone.lp_idx]
        self.lp_lam = np.sqrt(xi * si)
        self.lp_r = np.sqrt(xi / si)

    def lam_sq_sum(self):
        return sum(np.sum(p[6] ** 2) for p in self.psd) + np.sum(self.lp_lam**2)

    def schur(self, a) -> np.ndarray:
        m = np.zeros((a.shape[0], a.shape[0]))
        for sl, *_rest, wmat in self.psd:
            ab = a[:, sl]
            m += ab @ wmat @ ab.T
        if self.cone.lp_idx.size:
            al = a[:, self.cone.lp_idx]
            m += (al * self.lp_r**2) @ al.T
        return m

    def apply_w(self, v) -> np.ndarray:
        out = np.zeros_like(v)
        for sl, *_rest, wmat in self.psd:
            out[sl] = wmat @ v[sl]
        out[self.cone.lp_idx] = self.lp_r**2 * v[self.cone.lp_idx]
        return out

    def target(self, rc_psd, rc_lp) -> np.ndarray:
        """Unscaled R T R† from the complementarity right-hand side."""
        out = np.zeros(self.nvars)
        for (sl, n, _l1, _l2, r, _ri, lam, _w), rc in zip(self.psd, rc_psd):
            t = 2 * rc / (lam[:, None] + lam[None, :])
            out[sl] = svec(r @ t @ r.conj().T)
        out[self.cone.lp_idx] = self.lp_r * rc_lp / self.lp_lam
        return out

    def scaled_pair(self, dx, ds):
        """(dX̂, dŜ) per PSD block and for the LP part."""
        psd = []
        for sl, n, _l1, _l2, r, rinv, _lam, _w in self.psd:
            dxh = rinv @ smat(dx[sl], n) @ rinv.conj().T
            dsh = r.conj().T @ smat(ds[sl], n) @ r
            psd.append((dxh, dsh))
        i = self.cone.lp_idx
        return psd, (dx[i] / self.lp_r, ds[i] * self.lp_r)

    def max_steps(self, dx, ds):
        ap = ad = np.inf
        for sl, n, l1, l2, *_rest in self.psd:
            ap = min(ap, _psd_step(l1, smat(dx[sl], n)))
            ad = min(ad, _psd_step(l2, smat(ds[sl], n)))
        i = self.cone.lp_idx
        if i.size:
            ap = min(ap, _lp_step(self.lp_lam * self.lp_r, dx[i]))
            ad = min(ad, _lp_step(self.lp_lam / self.lp_r, ds[i]))
        return ap, ad


def _psd_step(l, d) -> float:
    linv = sla.solve_triangular(l, np.eye(l.shape[0]), lower=True)
    m = linv @ d @ linv.conj().T
    lo = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
    return np.inf if lo >= 0 else -1.0 / lo


def _interior(cone: _Cone, v) -> bool:
    if np.any(v[cone.lp_idx] <= 0):
        return False
    for b in cone.psd:
        try:
            np.linalg.cholesky(smat(v[b.offset : b.offset + b.length], b.size))
        except np.linalg.LinAlgError:
            return False
    return True


def _backtrack(cone: _Cone, v, d, alpha) -> float:
    """Shrink a step until the Cholesky factorization confirms it stays interior."""
    for _ in range(60):
        if _interior(cone, v + alpha * d):
            return alpha
        alpha *= 0.8
    return 0.0


def _lp_step(v, d) -> float:
    neg = d < 0
    return np.inf if not np.any(neg) else float(np.min(-v[neg] / d[neg]))


def _independent_rows(a, b):
    """Indices of a maximal independent row set and whether the dropped rows are consistent."""
    m = a.shape[0]
    if m == 0:
        return np.zeros(0, int), True
    _q, r, piv = sla.qr(a.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = max(a.shape) * np.finfo(float).eps * 10 * (diag[0] if diag.size else 0)
    rank = int(np.sum(diag > tol))
    keep = np.sort(piv[:rank])
    if rank == m:
        return keep, True
    ak = a[keep]
    coef, *_ = np.linalg.lstsq(ak.T, a.T, rcond=None)  # rows of a in terms of kept rows
    resid = b - coef.T @ b[keep]
    return keep, bool(np.max(np.abs(resid)) <= 1e-9 * (1 + np.max(np.abs(b))))


def _initial_point(cone: _Cone, a, b, c, n):
    psd_x, psd_s = [], []
    for blk in cone.psd:
        sl = slice(blk.offset, blk.offset + blk.length)
        an = np.linalg.norm(a[:, sl], axis=1) if a.shape[0] else np.zeros(1)
        rt = np.sqrt(blk.size)
        ratio = np.max((1 + np.abs(b)) / (1 + an)) if a.shape[0] else 1.0
        psd_x.append(max(10.0, rt, rt * ratio))
        psd_s.append(max(10.0, rt, np.max(an, initial=0), np.linalg.norm(c[sl])))
    if cone.lp_idx.size:
        al = a[:, cone.lp_idx]
        an = np.linalg.norm(al, axis=0) if a.shape[0] else np.zeros(1)
        ratio = np.max((1 + np.abs(b)) / (1 + np.linalg.norm(al, axis=1))) if a.shape[0] else 1.0
        lx = max(10.0, np.sqrt(cone.lp_idx.size) * ratio)
        ls = max(10.0, np.max(an, initial=0), np.linalg.norm(c[cone.lp_idx]))
    else:
        lx = ls = 0.0
    return cone.identity(n, psd_x, lx), cone.identity(n, psd_s, ls)


def _identity_rc(scal: _Scaling, scale):
    psd = [scale * np.eye(p[1]) for p in scal.psd]
    return psd, np.full(scal.lp_lam.size, scale)


def _solve_newton(scal, chol, a, rp, rd, rc_psd, rc_lp):
    g = scal.target(rc_psd, rc_lp)
    h = scal.apply_w(rd)
    rhs = rp - a @ (g - h)
    dy = sla.cho_solve(chol, rhs) if rhs.size else rhs
    ds = rd - a.T @ dy
    dx = g - scal.apply_w(ds)
    # refine against the primal equation; the other two stay exact
    for _ in range(3):
        err = rp - a @ dx
        if err.size == 0 or np.linalg.norm(err) <= 1e-15 * (1 + np.linalg.norm(rp)):
            break
        corr = sla.cho_solve(chol, err)
        dy = dy + corr
        step = a.T @ corr
        ds = ds - step
        dx = dx + scal.apply_w(step)
    return dx, dy, ds


def _factor(m):
    if m.size == 0:
        return None
    try:
        return sla.cho_factor(m, lower=True)
    except np.linalg.LinAlgError:
        pass
    reg = 1e-13 * max(1.0, np.max(np.diag(m)))
    try:
        return sla.cho_factor(m + reg * np.eye(m.shape[0]), lower=True)
    except np.linalg.LinAlgError:
        cond = np.linalg.cond(m)
        raise SolverError(f"Schur complement is not positive definite (condition estimate {cond:.3e})") from None


def _jordan_matrix(m, n) -> np.ndarray:
    """Real matrix of E ↦ (E M + M E)/2 in svec coordinates."""
    q = _vec_basis(n)
    eye = np.eye(n)
    op = (np.kron(eye, m.T) + np.kron(m, eye)) / 2
    return (q.conj().T @ op @ q).real


def _newton_polish(cone: _Cone, a, b, c, x, y, s, steps=6):
    """Full Newton steps on A x = b, Aᵀy + s = c, x∘s = 0 from a near-optimal point.

    Near a strictly complementary, nondegenerate solution the Jacobian of
    this square system is nonsingular, so the iteration converges
    quadratically and removes the O(√μ) drift that interior iterates keep
    along the optimal face.  Returns the sequence of iterates tried.
    """
    m, n = a.shape
    if 2 * n + m > 4000:
        return []
    jac = np.zeros((2 * n + m, 2 * n + m))
    jac[:m, :n] = a
    jac[m : m + n, n : n + m] = a.T
    jac[m : m + n, n + m :] = np.eye(n)
    out = []
    for _ in range(steps):
        comp = np.zeros(n)
        lower = jac[m + n :]
        lower[:] = 0
        for bl in cone.psd:
            sl = slice(bl.offset, bl.offset + bl.length)
            xm, sm = smat(x[sl], bl.size), smat(s[sl], bl.size)
            comp[sl] = svec((xm @ sm + sm @ xm) / 2)
            lower[sl, sl] = _jordan_matrix(sm, bl.size)
            lower[sl, n + m + bl.offset : n + m + bl.offset + bl.length] = _jordan_matrix(xm, bl.size)
        i = cone.lp_idx
        comp[i] = x[i] * s[i]
        lower[i, i] = s[i]
        lower[i, n + m + i] = x[i]
        rhs = np.concatenate([b - a @ x, c - a.T @ y - s, -comp])
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        x, y, s = x + step[:n], y + step[n : n + m], s + step[n + m :]
        out.append((x, y, s))
    return out


def _in_cone(cone: _Cone, v, tol=1e-12) -> bool:
    scale = 1 + np.max(np.abs(v), initial=0)
    if np.any(v[cone.lp_idx] < -tol * scale):
        return False
    for bl in cone.psd:
        if np.linalg.eigvalsh(smat(v[bl.offset : bl.offset + bl.length], bl.size))[0] < -tol * scale:
            return False
    return True


def _accept_polish(cone, a, b, c, x, y, s, full_y, measure, opts):
    """Keep the last Newton-polished point that is in the cone and meets the tolerances."""
    best = (x, y, s)
    base = measure(x, full_y(y), s)
    for cand in _newton_polish(cone, a, b, c, x, y, s):
        cx, cy, cs = cand
        # early Newton steps may dip just outside the cone before converging
        if not (_in_cone(cone, cx) and _in_cone(cone, cs)):
            continue
        pres, dres, gap = measure(cx, full_y(cy), cs)
        if pres <= opts.feas_tol and dres <= opts.feas_tol and gap <= max(opts.gap_tol, base[2]):
            best = cand
    return best


def solve(p: ConicProgram, opts: SolverOptions | None = None) -> ConicSolution:
    opts = opts or SolverOptions()
    a_full, b_full, c = p.matrices()
    n = p.num_vars
    cone = _Cone(p.blocks)

    def finish(status, x, y_full, s, it, side="", hist=None):
        pobj, dobj = float(c @ x), float(b_full @ y_full)
        pres = float(np.linalg.norm(a_full @ x - b_full) / (1 + np.linalg.norm(b_full))) if b_full.size else 0.0
        dres = float(np.linalg.norm(a_full.T @ y_full + s - c) / (1 + np.linalg.norm(c)))
        gap = abs(pobj - dobj) / (1 + abs(pobj))
        return ConicSolution(status, x, y_full, s, pobj, dobj, gap, it, pres, dres, list(p.blocks), side, hist or [])

    keep, consistent = _independent_rows(a_full, b_full)
    if not consistent:
        z = np.zeros(n)
        return finish("infeasible", z, np.zeros(b_full.size), z, 0, "primal")
    norms = np.linalg.norm(a_full[keep], axis=1)
    a = a_full[keep] / norms[:, None]
    b = b_full[keep] / norms

    def full_y(y):
        out = np.zeros(b_full.size)
        out[keep] = y / norms
        return out

    nb, nc = 1 + np.linalg.norm(b_full), 1 + np.linalg.norm(c)

    def measure(x, yf, s):
        pres = np.linalg.norm(a_full @ x - b_full) / nb if b_full.size else 0.0
        dres = np.linalg.norm(a_full.T @ yf + s - c) / nc
        pobj, dobj = c @ x, b_full @ yf
        return pres, dres, abs(pobj - dobj) / (1 + abs(pobj))

    x, s = _initial_point(cone, a, b, c, n)
    y = np.zeros(b.size)
    hist = []
    for it in range(opts.max_iter + 1):
        rp = b - a @ x
        rd = c - a.T @ y - s
        yf = full_y(y)
        pobj, dobj = c @ x, b_full @ yf
        pres = np.linalg.norm(a_full @ x - b_full) / nb if b_full.size else 0.0
        dres = np.linalg.norm(a_full.T @ yf + s - c) / nc
        gap = abs(pobj - dobj) / (1 + abs(pobj))
        mu = (x @ s) / cone.nu
        hist.append({"iter": it, "pobj": pobj, "dobj": dobj, "pres": pres, "dres": dres, "mu": mu})
        if opts.verbose:
            print(f"{it:3d} {pobj:+.9e} {dobj:+.9e} pres={pres:.1e} dres={dres:.1e} gap={gap:.1e}")
        if pres <= opts.feas_tol and dres <= opts.feas_tol and gap <= opts.gap_tol:
            if opts.polish:
                x, y, s = _accept_polish(cone, a, b, c, x, y, s, full_y, measure, opts)
                yf = full_y(y)
            return finish("optimal", x, yf, s, it, hist=hist)
        # certificates of infeasibility
        by = b @ y
        if by > 0 and np.linalg.norm(a.T @ y + s) / by <= opts.infeas_tol:
            return finish("infeasible", x, yf / (b_full @ yf), s / by, it, "primal", hist)
        cx = c @ x
        if cx < 0 and np.linalg.norm(a @ x) / -cx <= opts.infeas_tol:
            return finish("infeasible", x / -cx, yf, s, it, "dual", hist)
        if it == opts.max_iter:
            break
        try:
            scal = _Scaling(cone, x, s)
        except np.linalg.LinAlgError:
            raise SolverError("iterate left the cone interior", solution=finish("max_iter", x, yf, s, it, hist=hist)) from None
        scal.nvars = n
        chol = _factor(scal.schur(a))
        # predictor
        rc_psd = [-np.diag(p_[6] ** 2) for p_ in scal.psd]
        rc_lp = -(scal.lp_lam**2)
        dx, dy, ds = _solve_newton(scal, chol, a, rp, rd, rc_psd, rc_lp)
        ap, ad = scal.max_steps(dx, ds)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = ((x + ap * dx) @ (s + ad * ds)) / cone.nu
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3
        # corrector
        (pairs, (dxl, dsl)) = scal.scaled_pair(dx, ds)
        rc_psd = []
        for (sl, nn, *_r), (dxh, dsh) in zip(scal.psd, pairs):
            lam = _r[4]
            prod = dxh @ dsh
            rc_psd.append(sigma * mu * np.eye(nn) - np.diag(lam**2) - (prod + prod.conj().T) / 2)
        rc_lp = sigma * mu - scal.lp_lam**2 - dxl * dsl
        dx, dy, ds = _solve_newton(scal, chol, a, rp, rd, rc_psd, rc_lp)
        ap, ad = scal.max_steps(dx, ds)
        ap = _backtrack(cone, x, dx, min(1.0, opts.step_fraction * ap))
        ad = _backtrack(cone, s, ds, min(1.0, opts.step_fraction * ad))
        x = x + ap * dx
        y = y + ad * dy
        s = s + ad * ds
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise SolverError("non-finite iterate")
    return finish("max_iter", x, full_y(y), s, opts.max_iter, hist=hist)


# problem dump ------------------------------------------------------------------


def dump(p: ConicProgram, path) -> None:
    """Write a self-describing JSON dump (sparse triplets for A)."""
    a, b, c = p.matrices()
    r, k = np.nonzero(a)
    doc = {
        "format": FORMAT,
        "form": "minimize c.x subject to A x = b, x in K",
        "svec": "hermitian block: diagonal, then sqrt2*Re and sqrt2*Im of upper off-diagonals, row-major",
        "blocks": [{"name": bl.name, "cone": bl.cone, "size": bl.size} for bl in p.blocks],
        "c": c.tolist(),
        "b": b.tolist(),
        "A": {"shape": list(a.shape), "rows": r.tolist(), "cols": k.tolist(), "vals": a[r, k].tolist()},
    }
    Path(path).write_text(json.dumps(doc))


def load(path) -> ConicProgram:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} dump")
    p = ConicProgram()
    for bl in doc["blocks"]:
        p._add(bl["cone"], bl["size"], bl["name"])
    c = np.array(doc["c"], dtype=float)
    for bl in p.blocks:
        p._c[bl.index] = c[bl.offset : bl.offset + bl.length]
    m, nv = doc["A"]["shape"]
    a = np.zeros((m, nv))
    a[doc["A"]["rows"], doc["A"]["cols"]] = doc["A"]["vals"]
    p._rows = list(a)
    p._rhs = list(doc["b"])
    return p
