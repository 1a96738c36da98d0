"""Search over projective measurements for the largest TSR or TNR.

Each setting is a rank-1 PVM given by the columns of a unitary

    U = G(0,1) G(0,2) … G(0,d-1) G(1,2) … G(d-2,d-1)

with ``G(p,q)`` a complex Givens rotation on rows/columns p, q::

    [[cos θ, -e^{-iφ} sin θ],
     [e^{iφ} sin θ, cos θ]]

so one setting uses d(d-1) real parameters (θ, φ per pair).  Column phases are
dropped, which does not change the projectors.  Values are the best found by
Nelder–Mead from the MUB start plus seeded random restarts; they are not
certified global optima.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .dynamics import Channel, _check_state
from .errors import SolverError
from .measurements import Pvm, mub_bases
from .robustness import make_assemblage, make_behavior, tnr, tsr

MEASURES = ("tsr", "tnr")


def _pairs(d: int):
    return list(itertools.combinations(range(d), 2))


def _givens(d, p, q, theta, phi) -> np.ndarray:
    g = np.eye(d, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    g[p, p] = g[q, q] = c
    g[p, q] = -np.exp(-1j * phi) * s
    g[q, p] = np.exp(1j * phi) * s
    return g


@dataclass(frozen=True)
class PvmParameterization:
    dim: int
    settings: int
    params: tuple

    def __post_init__(self):
        want = self.settings * self.dim * (self.dim - 1)
        params = tuple(float(v) for v in np.asarray(self.params, dtype=float).reshape(-1))
        if len(params) != want:
            raise ValueError(f"expected {want} parameters for d={self.dim}, s={self.settings}, got {len(params)}")
        object.__setattr__(self, "params", params)

    @property
    def per_setting(self) -> int:
        return self.dim * (self.dim - 1)

    def unitaries(self) -> list[np.ndarray]:
        d = self.dim
        out = []
        for k in range(self.settings):
            chunk = self.params[k * self.per_setting : (k + 1) * self.per_setting]
            u = np.eye(d, dtype=complex)
            for (p, q), theta, phi in zip(_pairs(d), chunk[0::2], chunk[1::2]):
                u = u @ _givens(d, p, q, theta, phi)
            out.append(u)
        return out


def decode(params: PvmParameterization) -> list[Pvm]:
    return [Pvm.from_basis(u) for u in params.unitaries()]


def encode_unitary(u) -> np.ndarray:
    """Givens parameters whose decoded unitary has the same columns as ``u`` up to phases."""
    m = np.array(u, dtype=complex)
    d = m.shape[0]
    out = []
    for p, q in _pairs(d):
        alpha, beta = m[p, p], m[q, p]
        theta = math.atan2(abs(beta), abs(alpha))
        phi = (np.angle(beta) - np.angle(alpha)) if abs(beta) > 1e-15 else 0.0
        # G† zeroes entry (q, p) against the pivot row p
        m = _givens(d, p, q, theta, phi).conj().T @ m
        out += [theta, float(phi)]
    return np.array(out)


def encode(unitaries) -> PvmParameterization:
    us = [np.asarray(u) for u in unitaries]
    params = np.concatenate([encode_unitary(u) for u in us])
    return PvmParameterization(us[0].shape[0], len(us), tuple(params))


@dataclass(frozen=True)
class SearchOptions:
    restarts: int = 16
    seed: int = 0
    max_evals: int = 400
    xatol: float = 1e-5
    fatol: float = 1e-9
    initial_step: float = 0.2
    failure_budget: int = 20
    workers: int = 0  # 0: read TEMPCORR_WORKERS, default 1
    shared_settings: bool = True  # tnr: same PVMs at both times


@dataclass
class SearchResult:
    measure: str
    best_value: float
    best_pvms: list
    best_params: tuple
    mub_value: float
    restarts: int
    evaluations: int
    converged: bool
    failures: int = 0
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["best_pvms"] = [
            [[[[z.real, z.imag] for z in row] for row in proj] for proj in p.projectors] for p in self.best_pvms
        ]
        return out


class _Budget(Exception):
    pass


class _Objective:
    def __init__(self, measure, rho, ch, settings, opts):
        self.measure, self.rho, self.ch, self.settings, self.opts = measure, rho, ch, settings, opts
        self.failures = 0
        self.evaluations = 0

    def value(self, x) -> float:
        d, s = self.ch.dim, self.settings
        half = s * d * (d - 1)
        pvm_a = decode(PvmParameterization(d, s, tuple(x[:half])))
        if self.measure == "tsr":
            return tsr(make_assemblage(self.rho, self.ch, pvm_a))
        pvm_b = pvm_a if self.opts.shared_settings else decode(PvmParameterization(d, s, tuple(x[half:])))
        return tnr(make_behavior(self.rho, self.ch, pvm_a, pvm_b))

    def __call__(self, x) -> float:
        self.evaluations += 1
        try:
            return -self.value(x)
        except (SolverError, ArithmeticError):
            self.failures += 1
            if self.failures > self.opts.failure_budget:
                raise _Budget from None
            return math.inf


def _mub_start(d, s, rng) -> np.ndarray:
    bases = mub_bases(d) if d in (2, 3) else [np.eye(d)]
    us = [bases[k] if k < len(bases) else _random_unitary(rng, d) for k in range(s)]
    return np.array(encode(us).params)


def _random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _run_restart(args):
    measure, rho, ch, settings, opts, x0, label = args
    obj = _Objective(measure, rho, ch, settings, opts)
    n = x0.size
    simplex = np.vstack([x0] + [x0 + opts.initial_step * e for e in np.eye(n)])
    start_value = best = -obj(x0)
    best_x = x0
    status = "ok"
    try:
        res = minimize(
            obj,
            x0,
            method="Nelder-Mead",
            options={
                "maxfev": opts.max_evals,
                "xatol": opts.xatol,
                "fatol": opts.fatol,
                "initial_simplex": simplex,
                "adaptive": n > 4,
            },
        )
        if -res.fun > best:
            best, best_x = -res.fun, res.x
        converged = bool(res.success)
    except _Budget:
        converged, status = False, "failure budget exhausted"
    return {
        "start": label,
        "start_value": start_value,
        "value": best,
        "params": tuple(float(v) for v in best_x),
        "evaluations": obj.evaluations,
        "failures": obj.failures,
        "converged": converged,
        "status": status,
    }


def _starts(measure, ch, settings, opts):
    d = ch.dim
    root = np.random.SeedSequence(opts.seed)
    children = root.spawn(opts.restarts)
    # settings beyond the d+1 MUBs start from a unitary drawn off a separate stream
    extra = np.random.default_rng(np.random.SeedSequence(opts.seed, spawn_key=(2**32 - 1,)))
    mub = _mub_start(d, settings, extra)
    shared = measure == "tsr" or opts.shared_settings
    x_mub = mub if shared else np.concatenate([mub, mub])
    n = x_mub.size
    starts = [("mub", x_mub)]
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        x = np.empty(n)
        x[0::2] = rng.uniform(0, math.pi / 2, n // 2)
        x[1::2] = rng.uniform(0, 2 * math.pi, n // 2)
        starts.append((f"random-{k}", x))
    return starts


def maximize(measure: str, rho_a, ch: Channel, settings_count: int, opts: SearchOptions | None = None) -> SearchResult:
    """Largest TSR or TNR found over PVM settings; the MUB start is always included."""
    opts = opts or SearchOptions()
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}")
    if settings_count < 1:
        raise ValueError("settings_count must be at least 1")
    rho = _check_state(rho_a, ch.dim)
    jobs = [(measure, rho, ch, settings_count, opts, x0, label) for label, x0 in _starts(measure, ch, settings_count, opts)]
    workers = opts.workers or int(os.environ.get("TEMPCORR_WORKERS", "1"))
    trace = []
    failures = 0
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trace = list(pool.map(_run_restart, jobs))
        failures = sum(t["failures"] for t in trace)
    else:
        for job in jobs:
            t = _run_restart(job)
            trace.append(t)
            failures += t["failures"]
            if t["status"] != "ok":
                break
    best = max(trace, key=lambda t: t["value"])
    d = ch.dim
    half = settings_count * d * (d - 1)
    pvms = decode(PvmParameterization(d, settings_count, best["params"][:half]))
    return SearchResult(
        measure,
        best["value"],
        pvms,
        best["params"],
        trace[0]["start_value"],
        len(trace),
        sum(t["evaluations"] for t in trace),
        best["converged"],
        failures,
        trace,
    )
