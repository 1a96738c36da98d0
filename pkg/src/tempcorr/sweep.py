"""Time-grid sweeps, CSV output and SVG plots."""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .config import ExperimentConfig
from .errors import SolverError
from .measurements import mub_pvms
from .optmeas import SearchOptions, maximize
from .robustness import evaluate, make_assemblage, make_behavior
from .sot import build, nsit_check

log = logging.getLogger(__name__)

LINESTYLES = {"vacuum": "-", "balanced_superposition": "--", "maximally_mixed": ":"}
GAP_FLAG = 1e-6


@dataclass
class SweepRow:
    gamma_t: float
    values: dict
    nsit_violation: float = math.nan
    flags: list = field(default_factory=list)


def workers_from_env() -> int:
    try:
        return max(1, int(os.environ.get("TEMPCORR_WORKERS", "1")))
    except ValueError:
        return 1


def _columns(cfg: ExperimentConfig) -> list[str]:
    return [m for m in cfg.measures if m != "NSIT"]


def _search(measure, rho, ch, cfg, flags):
    opts = SearchOptions(restarts=cfg.restarts, seed=cfg.seed, max_evals=cfg.max_evals, workers=1)
    res = maximize(measure, rho, ch, cfg.settings_count, opts)
    if not res.converged:
        flags.append(f"{measure.upper()}:search-unconverged")
    return res.best_value


def _value(label, rho, ch, r, pvms, cfg, flags) -> float:
    if label == "f":
        return evaluate("f", r).value
    if label == "TER":
        return evaluate("ter", r).value
    if label == "g":
        return evaluate("g", r).value
    if label == "ER":
        res = evaluate("er", r)
    elif label in ("TSR", "TNR") and cfg.optimize:
        return _search(label.lower(), rho, ch, cfg, flags)
    elif label == "TSR":
        res = evaluate("tsr", make_assemblage(rho, ch, pvms))
    else:
        b = make_behavior(rho, ch, pvms, pvms)
        res = evaluate("tnr" if label == "TNR" else "tnr_lhv", b)
    if res.exactness != "exact":
        flags.append(f"{label}:{res.exactness}")
    if res.gap > GAP_FLAG:
        flags.append(f"{label}:gap={res.gap:.3g}")
    return res.value


def _point(args) -> SweepRow:
    cfg, state, gamma_t = args
    rho = cfg.state_matrix(state)
    ch = cfg.channel_at(gamma_t)
    r = build(rho, ch, cfg.construction)
    pvms = mub_pvms(cfg.dim, cfg.settings_count)
    row = SweepRow(float(gamma_t), {})
    for label in _columns(cfg):
        try:
            row.values[label] = float(_value(label, rho, ch, r, pvms, cfg, row.flags))
        except (SolverError, ArithmeticError) as exc:
            row.values[label] = math.nan
            row.flags.append(f"{label}:failed")
            log.warning("gamma_t=%g %s failed: %s", gamma_t, label, exc)
    if "NSIT" in cfg.measures:
        row.nsit_violation = nsit_check(rho, ch, pvms).max_violation
    return row


def run_sweep(cfg: ExperimentConfig, state: str | None = None, workers: int | None = None) -> list[SweepRow]:
    """One row per grid point for a single initial state (the first configured one by default)."""
    state = cfg.states[0] if state is None else state
    jobs = [(cfg, state, g) for g in cfg.grid()]
    workers = workers_from_env() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_point, jobs))  # map keeps grid order
    return [_point(j) for j in jobs]


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def csv_header(cfg: ExperimentConfig) -> list[str]:
    cols = ["gamma_t"] + _columns(cfg)
    if "NSIT" in cfg.measures:
        cols.append("nsit_violation")
    return cols + ["flags"]


def rows_to_csv(rows, cfg: ExperimentConfig) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(cfg))
    for row in rows:
        line = [_fmt(row.gamma_t)] + [_fmt(row.values[c]) for c in _columns(cfg)]
        if "NSIT" in cfg.measures:
            line.append(_fmt(row.nsit_violation))
        w.writerow(line + [";".join(row.flags)])
    return buf.getvalue()


def write_csv(rows, cfg: ExperimentConfig, path) -> str:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows, cfg))
    return str(path)


def emit_plots(batches: dict, cfg: ExperimentConfig, prefix) -> list[str]:
    """One SVG per measure with one curve per initial state; skipped for single-point grids."""
    if not batches or not any(batches.values()):
        raise ValueError("no rows to plot")
    if cfg.grid_points < 2:
        log.warning("single-point grid: plots skipped, CSV only")
        return []
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "tempcorr"
    panels = _columns(cfg) + (["nsit_violation"] if "NSIT" in cfg.measures else [])
    written = []
    for label in panels:
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for state, rows in batches.items():
            x = [r.gamma_t for r in rows]
            y = [r.nsit_violation if label == "nsit_violation" else r.values[label] for r in rows]
            ax.plot(x, y, LINESTYLES.get(state, "-."), color="black", label=_slug(state).replace("_", " "))
        ax.set_xlabel("γt")
        ax.set_ylabel(label)
        ax.set_title(f"{label}, d={cfg.dim}, {cfg.channel.replace('_', ' ')}")
        ax.legend(fontsize=7)
        fig.tight_layout()
        path = f"{prefix}-{label}.svg"
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"{path}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)
        written.append(path)
    return written


def _slug(state: str) -> str:
    return os.path.splitext(os.path.basename(state))[0]


def run_experiment(cfg: ExperimentConfig, prefix=None, plots: bool = True) -> list[str]:
    """Sweep every configured state; write CSVs (one per state) and the plots."""
    prefix = prefix or cfg.output
    batches = {state: run_sweep(cfg, state) for state in cfg.states}
    written = []
    for state, rows in batches.items():
        path = f"{prefix}.csv" if len(cfg.states) == 1 else f"{prefix}-{_slug(state)}.csv"
        try:
            written.append(write_csv(rows, cfg, path))
        except OSError as exc:
            raise OSError(f"{path}: {exc.strerror or exc}") from exc
    if plots:
        written += emit_plots(batches, cfg, prefix)
    return written
