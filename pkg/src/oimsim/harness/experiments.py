"""Seeded Monte Carlo experiment drivers.

Each grid point owns a random stream keyed by the point's parameters, and
trial ``t`` of that point draws from substream ``(t, attempt)``.  Statistics
are reduced in trial order, so results do not depend on worker scheduling
or on the order of grid points.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable

import numpy as np

from .. import analysis
from ..channel import NetworkConfig, draw_channels, draw_frequency_channels
from ..errors import ConfigError, DomainError, RankDeficient, ResourceError
from ..multicarrier import multicarrier_metrics
from ..receiver import build_filters, compute_sinr, leakage_after_zf, sum_rate
from ..rng import RandomStream, stable_key
from ..scheduling import (
    Mode,
    draw_interference_bases,
    metric_matrix,
    received_lif,
    select_users,
    two_step_select,
)
from .config import ExperimentRecord, ExperimentSpec

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 100

COLUMNS: dict[str, list[str]] = {
    "leakage-sweep": ["K", "M", "S", "N", "mode", "trials", "aborts", "mean_leakage",
                      "median_leakage", "mean_leakage_zf", "median_leakage_zf",
                      "mean_received_lif"],
    "cdf-check": ["K", "M", "S", "N", "mode", "samples", "shape", "sup_distance", "aborts"],
    "bounds-check": ["check", "K", "S", "z", "points", "holds", "min_lower_margin",
                     "min_upper_margin"],
    "dof-sweep": ["K", "M", "S", "snr", "N", "mode", "trials", "aborts", "mean_sum_rate",
                  "prelog", "p_oim", "mean_residual"],
    "upper-bound": ["K", "N", "M", "upper_bound", "genie_bound", "gap", "gap_formula"],
    "two-step": ["K", "M", "N", "window", "snr", "trials", "aborts", "mean_gain", "mean_lif",
                 "p95_lif", "mean_sum_rate"],
    "multicarrier-compare": ["K", "N", "Nsub", "S", "trials", "mean_selected_optimized",
                             "mean_selected_uniform", "instances_worse"],
}


def _num(x) -> Any:
    """Plain Python scalar; non-finite floats become None."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return x if math.isfinite(x) else None


def run_trials(spec: ExperimentSpec, point: dict[str, Any],
               body: Callable[[RandomStream], Any]) -> tuple[list[Any], int]:
    """Run ``spec.trials`` successful trials of ``body``; redraw on rank deficiency."""
    root = RandomStream(spec.seed).substream(*stable_key({"kind": spec.kind, **point}))
    results = []
    aborts = 0
    for t in range(spec.trials):
        for attempt in range(MAX_ATTEMPTS):
            try:
                results.append(body(root.substream(t, attempt)))
                break
            except RankDeficient:
                aborts += 1
        else:
            raise RuntimeError(f"trial {t} at {point} failed {MAX_ATTEMPTS} times")
    return results, aborts


def _mode_for(cfg: NetworkConfig) -> Mode:
    return Mode.OIN if cfg.is_oin else Mode.OIA


def _network(K, N, M, S, snr=1.0) -> NetworkConfig:
    return NetworkConfig(K=K, N=N, M=M, S=S, snr=snr)


def _scheduled_block(cfg: NetworkConfig, rng: RandomStream):
    channels = draw_channels(cfg, rng)
    bases = None if cfg.is_oin else draw_interference_bases(cfg, rng)
    mode = _mode_for(cfg)
    schedule = select_users(metric_matrix(channels, mode, bases), cfg.S)
    filters = build_filters(channels, schedule, bases)
    return channels, bases, mode, schedule, filters


# --- per-point workers (module level so they can be pickled) -------------

def _leakage_point(spec: ExperimentSpec, p: dict[str, Any]) -> dict[str, Any]:
    cfg = _network(p["K"], p["N"], p["M"], p["S"])

    def body(rng):
        channels, bases, mode, schedule, filters = _scheduled_block(cfg, rng)
        return (leakage_after_zf(filters, channels, schedule, "unit").mean(),
                leakage_after_zf(filters, channels, schedule, "desired").mean(),
                received_lif(channels, schedule, mode, bases).mean())

    res, aborts = run_trials(spec, p, body)
    unit, zf, lif = (np.array(c) for c in zip(*res))
    return dict(p, mode=_mode_for(cfg).value, trials=spec.trials, aborts=aborts,
                mean_leakage=_num(unit.mean()), median_leakage=_num(np.median(unit)),
                mean_leakage_zf=_num(zf.mean()), median_leakage_zf=_num(np.median(zf)),
                mean_received_lif=_num(lif.mean()))


def _cdf_point(spec: ExperimentSpec, p: dict[str, Any]) -> dict[str, Any]:
    cfg = _network(p["K"], p["N"], p["M"], p["S"])

    def body(rng):
        channels = draw_channels(cfg, rng)
        bases = None if cfg.is_oin else draw_interference_bases(cfg, rng)
        return metric_matrix(channels, _mode_for(cfg), bases).ravel()

    res, aborts = run_trials(spec, p, body)
    samples = np.concatenate(res)
    shape = analysis.metric_shape(cfg.K, cfg.S)
    dist = analysis.ecdf_sup_distance(samples, lambda l: analysis.lif_cdf(shape, l))
    return dict(p, mode=_mode_for(cfg).value, samples=int(samples.size), shape=shape,
                sup_distance=_num(dist), aborts=aborts)


def _dof_point(spec: ExperimentSpec, p: dict[str, Any]) -> dict[str, Any]:
    cfg = _network(p["K"], p["N"], p["M"], p["S"], p["snr"])

    def body(rng):
        channels, bases, mode, schedule, filters = _scheduled_block(cfg, rng)
        report = compute_sinr(filters, channels, schedule, cfg.snr)
        return sum_rate(report), received_lif(channels, schedule, mode, bases)

    res, aborts = run_trials(spec, p, body)
    rates = np.array([r[0] for r in res])
    lif = np.stack([r[1] for r in res])
    mean_rate = rates.mean()
    prelog = mean_rate / math.log2(cfg.snr) if cfg.snr != 1 else float("nan")
    return dict(p, mode=_mode_for(cfg).value, trials=spec.trials, aborts=aborts,
                mean_sum_rate=_num(mean_rate), prelog=_num(prelog),
                p_oim=_num(analysis.estimate_p_oim(lif, cfg.snr, spec.epsilon)),
                mean_residual=_num(np.mean(lif * cfg.snr)))


def _two_step_point(spec: ExperimentSpec, p: dict[str, Any]) -> dict[str, Any]:
    cfg = _network(p["K"], p["N"], p["M"], p["M"], p["snr"])

    def body(rng):
        channels = draw_channels(cfg, rng)
        decision = two_step_select(channels, p["window"], Mode.OIN)
        filters = build_filters(channels, decision)
        report = compute_sinr(filters, channels, decision, cfg.snr)
        gain = np.take_along_axis(channels.desired_gain(), decision.selected, axis=1)
        return gain.mean(), decision.metrics.mean(), sum_rate(report)

    res, aborts = run_trials(spec, p, body)
    gain, lif, rate = (np.array(c) for c in zip(*res))
    return dict(p, trials=spec.trials, aborts=aborts, mean_gain=_num(gain.mean()),
                mean_lif=_num(lif.mean()), p95_lif=_num(np.percentile(lif, 95)),
                mean_sum_rate=_num(rate.mean()))


def _multicarrier_point(spec: ExperimentSpec, p: dict[str, Any]) -> dict[str, Any]:
    cfg = _network(p["K"], p["N"], p["Nsub"], p["S"])

    def body(rng):
        fch = draw_frequency_channels(cfg.M, cfg.K, cfg.N, rng)
        bases = draw_interference_bases(cfg, rng)
        opt = select_users(multicarrier_metrics(fch, bases, "optimal"), cfg.S).metrics.mean()
        uni = select_users(multicarrier_metrics(fch, bases, "uniform"), cfg.S).metrics.mean()
        return opt, uni

    res, _ = run_trials(spec, p, body)
    opt, uni = (np.array(c) for c in zip(*res))
    return dict(p, trials=spec.trials, mean_selected_optimized=_num(opt.mean()),
                mean_selected_uniform=_num(uni.mean()),
                instances_worse=int(np.sum(opt > uni * (1 + 1e-12) + 1e-15)))


# --- grids ---------------------------------------------------------------

def _grid(spec: ExperimentSpec) -> list[dict[str, Any]]:
    k = spec.kind
    pts: list[dict[str, Any]] = []
    if k in ("leakage-sweep", "cdf-check"):
        for K, M, S, N in itertools.product(spec.cells, spec.antennas, spec.streams, spec.users):
            pts.append(dict(K=K, M=M, S=S, N=N))
    elif k == "dof-sweep":
        for K, M, S, snr in itertools.product(spec.cells, spec.antennas, spec.streams, spec.snr):
            if spec.users_scale is not None:
                n_req = spec.users_scale * snr ** ((K - 1) * S)
                if n_req > spec.max_users:
                    raise ResourceError(
                        f"N = {n_req:.3g} at K={K}, S={S}, snr={snr} exceeds cap {spec.max_users}")
                pts.append(dict(K=K, M=M, S=S, snr=snr, N=max(int(math.ceil(n_req)), S)))
            else:
                pts.extend(dict(K=K, M=M, S=S, snr=snr, N=N) for N in spec.users)
    elif k == "two-step":
        for K, M, N, w, snr in itertools.product(spec.cells, spec.antennas, spec.users,
                                                 spec.window, spec.snr):
            pts.append(dict(K=K, M=M, N=N, window=w, snr=snr))
    elif k == "multicarrier-compare":
        for K, N, Nsub, S in itertools.product(spec.cells, spec.users, spec.subcarriers,
                                               spec.streams):
            pts.append(dict(K=K, N=N, Nsub=Nsub, S=S))
    elif k == "upper-bound":
        for K, N, M in itertools.product(spec.cells, spec.users, spec.antennas):
            pts.append(dict(K=K, N=N, M=M))
    return pts


def _validate_points(spec: ExperimentSpec, pts: list[dict[str, Any]]) -> None:
    for p in pts:
        if "N" in p and p["N"] > spec.max_users:
            raise ResourceError(f"N={p['N']} exceeds cap {spec.max_users}")
        S = p.get("S", p.get("M"))
        M = p.get("Nsub", p.get("M"))
        if spec.kind in ("leakage-sweep", "cdf-check", "dof-sweep"):
            if S > M:
                raise ConfigError(f"S={S} exceeds M={M} at {p}")
            if S > p["N"]:
                raise ConfigError(f"S={S} exceeds N={p['N']} at {p}")
        if spec.kind == "cdf-check" and p["K"] < 2:
            raise ConfigError("cdf-check needs K >= 2 (the metric is identically 0 for K = 1)")
        if spec.kind == "two-step" and not p["M"] <= p["window"] <= p["N"]:
            raise ConfigError(f"window {p['window']} outside [M, N] = [{p['M']}, {p['N']}]")
        if spec.kind == "multicarrier-compare":
            if not S < M:
                raise ConfigError(f"multicarrier OIA needs S < Nsub, got S={S}, Nsub={M}")
            if S > p["N"]:
                raise ConfigError(f"S={S} exceeds N={p['N']}")


_WORKERS: dict[str, Callable[[ExperimentSpec, dict[str, Any]], dict[str, Any]]] = {
    "leakage-sweep": _leakage_point,
    "cdf-check": _cdf_point,
    "dof-sweep": _dof_point,
    "two-step": _two_step_point,
    "multicarrier-compare": _multicarrier_point,
}


def _run_points(spec, pts, fn, workers: int) -> list[dict[str, Any]]:
    if workers > 1 and len(pts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, [spec] * len(pts), pts))
    return [fn(spec, p) for p in pts]


# --- summaries -----------------------------------------------------------

def _group_slopes(rows, group_keys, x_key, y_key) -> list[dict[str, Any]]:
    out = []
    groups: dict[tuple, list] = {}
    for r in rows:
        groups.setdefault(tuple(r[k] for k in group_keys), []).append(r)
    for key, rs in groups.items():
        pts = [(r[x_key], r[y_key]) for r in rs]
        slope = None
        if len(pts) >= 3 and all(y is not None and y > 0 for _, y in pts):
            try:
                slope = analysis.fit_loglog_slope(pts)
            except DomainError:
                slope = None
        out.append(dict(zip(group_keys, key), slope=slope))
    return out


def _summarize(spec: ExperimentSpec, rows: list[dict[str, Any]]) -> dict[str, Any]:
    if spec.kind == "leakage-sweep":
        fits = _group_slopes(rows, ["K", "M", "S"], "N", "mean_leakage")
        for f in fits:
            f["target_slope"] = -1.0 / analysis.metric_shape(f["K"], f["S"]) if f["K"] > 1 else None
        return {"leakage_slopes": fits}
    if spec.kind == "dof-sweep":
        return {"residual_slopes": _group_slopes(rows, ["K", "M", "S"], "snr", "mean_residual")}
    if spec.kind == "two-step":
        incs = []
        groups: dict[tuple, list] = {}
        for r in rows:
            groups.setdefault((r["K"], r["M"], r["N"], r["snr"]), []).append(r)
        for (K, M, N, snr), rs in groups.items():
            rs = sorted(rs, key=lambda r: r["window"])
            incs.append(dict(K=K, M=M, N=N, snr=snr,
                             windows=[r["window"] for r in rs],
                             gain_increments=[_num(b["mean_gain"] - a["mean_gain"])
                                              for a, b in zip(rs, rs[1:])]))
        return {"gain_increments": incs}
    return {}


def _bounds_rows(spec: ExperimentSpec) -> list[dict[str, Any]]:
    rows = []
    l_grid = np.arange(1, 200) / 100.0
    x_grid = np.arange(1, 101) / 101.0
    for K, S in itertools.product(spec.cells, spec.streams):
        if K < 2:
            raise ConfigError("power-law cdf bounds need K >= 2")
        rep = analysis.check_lemma1(K, S, l_grid)
        rows.append(dict(check="cdf-power-law", K=K, S=S, z=analysis.metric_shape(K, S),
                         points=rep.points, holds=rep.holds,
                         min_lower_margin=_num(rep.min_lower_margin),
                         min_upper_margin=_num(rep.min_upper_margin)))
    for z in spec.gamma_shapes:
        rep = analysis.check_gamma_inequalities(z, x_grid)
        rows.append(dict(check="gamma", K=None, S=None, z=z, points=rep.points,
                         holds=rep.holds, min_lower_margin=_num(rep.min_lower_margin),
                         min_upper_margin=_num(rep.min_upper_margin)))
    return rows


def _upper_rows(spec: ExperimentSpec, pts) -> list[dict[str, Any]]:
    rows = []
    for p in pts:
        K, N, M = p["K"], p["N"], p["M"]
        ub = analysis.dof_upper_bound(K, N, M)
        km = analysis.genie_upper_bound(K, M)
        rows.append(dict(p, upper_bound=ub, genie_bound=km, gap=km - ub, gap_formula=K * M / (N + 1)))
    return rows


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentRecord:
    """Run every grid point of ``spec`` and collect an ``ExperimentRecord``."""
    start = time.perf_counter()
    if spec.kind == "bounds-check":
        rows = _bounds_rows(spec)
    else:
        pts = _grid(spec)
        _validate_points(spec, pts)
        if spec.kind == "upper-bound":
            rows = _upper_rows(spec, pts)
        else:
            rows = _run_points(spec, pts, _WORKERS[spec.kind], workers)
    cols = COLUMNS[spec.kind]
    rows = [{c: r.get(c) for c in cols} for r in rows]
    record = ExperimentRecord(spec, cols, rows, _summarize(spec, rows))
    record.elapsed_s = time.perf_counter() - start
    log.info("%s: %d grid points, %d aborts, %.2f s", spec.kind, len(rows), record.aborts,
             record.elapsed_s)
    return record


def run_leakage_sweep(spec: ExperimentSpec, workers: int = 1) -> ExperimentRecord:
    return run_experiment(_as_kind(spec, "leakage-sweep"), workers)


def run_cdf_check(spec: ExperimentSpec, workers: int = 1) -> ExperimentRecord:
    return run_experiment(_as_kind(spec, "cdf-check"), workers)


def run_dof_sweep(spec: ExperimentSpec, workers: int = 1) -> ExperimentRecord:
    return run_experiment(_as_kind(spec, "dof-sweep"), workers)


def run_two_step(spec: ExperimentSpec, workers: int = 1) -> ExperimentRecord:
    return run_experiment(_as_kind(spec, "two-step"), workers)


def run_multicarrier_compare(spec: ExperimentSpec, workers: int = 1) -> ExperimentRecord:
    return run_experiment(_as_kind(spec, "multicarrier-compare"), workers)


def _as_kind(spec: ExperimentSpec, kind: str) -> ExperimentSpec:
    if spec.kind != kind:
        raise ConfigError(f"expected a {kind} spec, got {spec.kind}")
    return spec
