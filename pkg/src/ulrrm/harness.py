"""Realization and sweep orchestration, metric aggregation, result output.

A realization is one drop of U users with their channel parameters, run
for N_T consecutive slots under each requested solution. Realizations are
independent and keyed by (master_seed, realization_index), so they can be
executed in any order, on any number of workers, and still aggregate to
the exact same result.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .beams import beam_alignment, build_codebook, effective_channels
from .channel import build_realization_channels
from .config import (SOLUTIONS, SweepPlan, SystemConfig, config_at_axis_value,
                     config_snapshot, validate)
from .schedulers import PfState, RealizationContext, pf_update, run_slot

COUNTER_KEYS = ("pbs_evals_max_beam", "pbs_evals_total", "wsrb_comparisons",
                "idd_checks_max_prb", "idd_checks_total", "idd_dropped_ues")


def geometric_mean(values: np.ndarray) -> float:
    """GM in the log domain; any zero entry collapses the product to zero."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("geometric mean of an empty set")
    if np.any(v < 0.0):
        raise ValueError("rates must be nonnegative")
    if np.any(v == 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(v))))


@dataclass(frozen=True)
class RealizationResult:
    """Per-solution outcome of one channel realization."""

    realization_index: int
    avg_rates: dict[str, np.ndarray]       # solution -> (U,) bps
    gm: dict[str, float]
    counters: dict[str, dict[str, int]]    # solution -> counter name -> value


@dataclass(frozen=True)
class SweepResult:
    """Aggregated sweep output: one (axis value, solution) row per curve point."""

    axis: str
    values: tuple[int, ...]
    solutions: tuple[str, ...]
    mean_gm: dict[tuple[int, str], float]
    stderr_gm: dict[tuple[int, str], float]
    realizations: int
    master_seed: int
    config: dict
    per_point: dict[int, tuple[RealizationResult, ...]]


def run_realization(cfg: SystemConfig, solutions: tuple[str, ...],
                    realization_index: int, master_seed: int,
                    trace_sink=None) -> RealizationResult:
    """Run every requested solution over one shared channel realization."""
    for sol in solutions:
        if sol not in SOLUTIONS:
            raise ValueError(f"unknown solution {sol!r}")
    rng = np.random.default_rng([master_seed, realization_index])
    _, _, channels = build_realization_channels(cfg, rng)
    bs_cb = build_codebook("bs", cfg.bs_antennas, cfg.bs_codebook_size)
    ue_cb = build_codebook("ue", cfg.ue_antennas, cfg.ue_codebook_size)
    assignment = beam_alignment(channels, bs_cb, ue_cb)
    eff = effective_channels(channels, assignment, bs_cb, ue_cb)
    ctx = RealizationContext.build(cfg, assignment, eff)

    avg_rates: dict[str, np.ndarray] = {}
    gm: dict[str, float] = {}
    counters: dict[str, dict[str, int]] = {}
    for sol in solutions:
        state = PfState.initial(cfg.num_ues, cfg.pf_initial_rate, cfg.pf_window)
        totals = np.zeros(cfg.num_ues)
        counts = dict.fromkeys(COUNTER_KEYS, 0)
        for slot in range(cfg.num_slots):
            sched = run_slot(ctx, sol, slot, state)
            totals += sched.slot_rates
            state = pf_update(state, sched.slot_rates)
            st = sched.stats
            counts["pbs_evals_max_beam"] = max(counts["pbs_evals_max_beam"],
                                               st.pbs_evals_max_beam)
            counts["pbs_evals_total"] += st.pbs_evals_total
            counts["wsrb_comparisons"] = max(counts["wsrb_comparisons"],
                                             st.wsrb_comparisons)
            counts["idd_checks_max_prb"] = max(counts["idd_checks_max_prb"],
                                               st.idd_checks_max_prb)
            counts["idd_checks_total"] += st.idd_checks_total
            counts["idd_dropped_ues"] += st.idd_dropped_ues
            if trace_sink is not None:
                trace_sink({
                    "realization": realization_index,
                    "solution": sol,
                    "slot": slot,
                    "beams": list(sched.selected_beams),
                    "prb_users": [list(users) for users in sched.prb_users],
                    "slot_rates": [float(r) for r in sched.slot_rates],
                })
        avg = totals / cfg.num_slots
        avg_rates[sol] = avg
        gm[sol] = geometric_mean(avg)
        counters[sol] = counts
    return RealizationResult(realization_index=realization_index,
                             avg_rates=avg_rates, gm=gm, counters=counters)


def complexity_counters(result: RealizationResult) -> dict[str, dict[str, int]]:
    """Per-solution instrumentation counts from one realization."""
    return {sol: dict(vals) for sol, vals in result.counters.items()}


def _sweep_task(args) -> tuple[int, int, RealizationResult]:
    value, cfg, solutions, realization_index, master_seed = args
    result = run_realization(cfg, solutions, realization_index, master_seed)
    return value, realization_index, result


def run_sweep(plan: SweepPlan, workers: int = 1, trace_sink=None) -> SweepResult:
    """Run the full (axis value, realization) grid and aggregate GM statistics.

    Results are keyed by (value, realization index) before aggregation, so
    parallel completion order never changes the output. The master seed is
    the base config's rng_seed; realization r of every axis value draws
    from stream (seed, r), giving common random numbers across the sweep.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    master_seed = plan.base_config.rng_seed
    tasks = []
    for value in plan.axis_values:
        cfg = config_at_axis_value(plan.base_config, plan.sweep_axis, value)
        problems = validate(cfg)
        if problems:
            raise ValueError(f"invalid config at {plan.sweep_axis}={value}: "
                             + "; ".join(problems))
        for r in range(plan.num_realizations):
            tasks.append((value, cfg, plan.solutions, r, master_seed))

    collected: dict[tuple[int, int], RealizationResult] = {}
    if workers == 1 or trace_sink is not None:
        for value, cfg, solutions, r, seed in tasks:
            result = run_realization(cfg, solutions, r, seed,
                                     trace_sink=trace_sink)
            collected[(value, r)] = result
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for value, r, result in pool.map(_sweep_task, tasks, chunksize=1):
                collected[(value, r)] = result

    mean_gm: dict[tuple[int, str], float] = {}
    stderr_gm: dict[tuple[int, str], float] = {}
    per_point: dict[int, tuple[RealizationResult, ...]] = {}
    for value in plan.axis_values:
        results = tuple(collected[(value, r)]
                        for r in range(plan.num_realizations))
        per_point[value] = results
        for sol in plan.solutions:
            gms = np.array([res.gm[sol] for res in results])
            mean_gm[(value, sol)] = float(gms.mean())
            if gms.size > 1:
                stderr_gm[(value, sol)] = float(gms.std(ddof=1)
                                                / np.sqrt(gms.size))
            else:
                stderr_gm[(value, sol)] = 0.0
    return SweepResult(axis=plan.sweep_axis, values=plan.axis_values,
                       solutions=plan.solutions, mean_gm=mean_gm,
                       stderr_gm=stderr_gm,
                       realizations=plan.num_realizations,
                       master_seed=master_seed,
                       config=config_snapshot(plan.base_config),
                       per_point=per_point)


def write_sweep_csv(path: str, result: SweepResult) -> None:
    """Emit the sweep table; float cells use repr so rereads are bit-exact."""
    lines = ["axis,value,solution,mean_gm,stderr_gm,realizations,seed"]
    for value in result.values:
        for sol in result.solutions:
            lines.append(",".join([
                result.axis,
                str(value),
                sol,
                repr(result.mean_gm[(value, sol)]),
                repr(result.stderr_gm[(value, sol)]),
                str(result.realizations),
                str(result.master_seed),
            ]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_run_meta(path: str, result: SweepResult, elapsed_s: float | None = None,
                   workers: int = 1) -> None:
    meta = {
        "package": "ulrrm",
        "version": __version__,
        "numpy_version": np.__version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "axis": result.axis,
        "values": list(result.values),
        "solutions": list(result.solutions),
        "realizations": result.realizations,
        "seed": result.master_seed,
        "workers": workers,
        "config": result.config,
    }
    if elapsed_s is not None:
        meta["elapsed_seconds"] = round(elapsed_s, 3)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


class TraceWriter:
    """JSON-lines sink for per-slot schedule traces."""

    def __init__(self, path: str):
        self._fh = open(path, "w", encoding="utf-8")

    def __call__(self, record: dict) -> None:
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
