"""Accuracy and timing benchmarks over synthetic trials."""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .._jit import BACKEND, kernel
from ..solver import MAX_SOLUTIONS, solve_into_k
from ..synthetic import gen_batch
from ..validity import GROUND_TRUTH_TOL
from .metrics import COUNTER_NAMES, classify_k

HIST_LOW = -16.0
HIST_HIGH = 0.0
HIST_WIDTH = 0.25
FAILURE_NOTE = (
    "error statistics exclude this solver's own failure trials "
    "(best xi_R + xi_t above the failure threshold, or no solution)"
)


@dataclass
class BenchConfig:
    samples: int = 100_000
    seed: int = 1
    threads: int = 1
    timing_reps: int = 100
    failure_threshold: float = GROUND_TRUTH_TOL
    out: Optional[str] = None
    csv: Optional[str] = None

    def validate(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.timing_reps < 1:
            raise ValueError("timing_reps must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if not self.failure_threshold > 0:
            raise ValueError("failure_threshold must be positive")


@kernel
def _row(a, i, j):
    return (a[i, j, 0], a[i, j, 1], a[i, j, 2])


@kernel(nogil=True)
def bench_chunk_k(world, bearings, R_gt, t_gt, lo, hi, counters, best, nsol):
    """Solve and classify trials ``lo .. hi-1``; results land at the trial index."""
    out_R = np.zeros((MAX_SOLUTIONS, 9))
    out_t = np.zeros((MAX_SOLUTIONS, 3))
    out_d = np.zeros((MAX_SOLUTIONS, 3))
    out_xy = np.zeros((MAX_SOLUTIONS, 2))
    for i in range(lo, hi):
        X1 = _row(world, i, 0)
        X2 = _row(world, i, 1)
        X3 = _row(world, i, 2)
        m1 = _row(bearings, i, 0)
        m2 = _row(bearings, i, 1)
        m3 = _row(bearings, i, 2)
        status, n = solve_into_k(X1, X2, X3, m1, m2, m3, out_R, out_t, out_d, out_xy)
        valid, unique, dup, good, none, gt, bad, err = classify_k(
            n, out_R, out_t, R_gt[i], t_gt[i], X1, X2, X3, m1, m2, m3
        )
        counters[i, 0] = valid
        counters[i, 1] = unique
        counters[i, 2] = dup
        counters[i, 3] = good
        counters[i, 4] = none
        counters[i, 5] = gt
        counters[i, 6] = bad
        best[i] = err
        nsol[i] = n


@kernel(nogil=True)
def repeat_solve_k(world, bearings, i, reps, out_R, out_t, out_d, out_xy):
    """Solve trial ``i`` ``reps`` times; returns a checksum so the work is kept."""
    sink = 0.0
    for _ in range(reps):
        status, n = solve_into_k(
            _row(world, i, 0), _row(world, i, 1), _row(world, i, 2),
            _row(bearings, i, 0), _row(bearings, i, 1), _row(bearings, i, 2),
            out_R, out_t, out_d, out_xy,
        )  # fmt: skip
        sink += n + out_R[0, 0]
    return sink


def _chunks(n, parts):
    parts = max(1, min(parts, n))
    edges = np.linspace(0, n, parts + 1).astype(np.int64)
    return [(int(edges[k]), int(edges[k + 1])) for k in range(parts)]


def evaluate_batch(batch, threads=1):
    """Per-trial counters (N, 7), best errors (N,) and solution counts (N,)."""
    n = len(batch)
    counters = np.zeros((n, 7), dtype=np.int64)
    best = np.full(n, np.inf)
    nsol = np.zeros(n, dtype=np.int64)
    R_gt = np.ascontiguousarray(batch.R_gt.reshape(n, 9))
    args = (batch.world, batch.bearings, R_gt, batch.t_gt)
    spans = _chunks(n, threads)
    if len(spans) == 1:
        bench_chunk_k(*args, 0, n, counters, best, nsol)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(bench_chunk_k, *args, lo, hi, counters, best, nsol) for lo, hi in spans
            ]
            for f in futures:
                f.result()
    return counters, best, nsol


def error_histogram(best):
    """Counts of log10(error) in fixed bins; out-of-range values are clamped to the end bins."""
    nbins = int(round((HIST_HIGH - HIST_LOW) / HIST_WIDTH))
    finite = best[np.isfinite(best)]
    with np.errstate(divide="ignore"):
        logs = np.log10(finite)
    idx = np.floor((logs - HIST_LOW) / HIST_WIDTH)
    idx = np.clip(np.nan_to_num(idx, neginf=0.0), 0, nbins - 1).astype(np.int64)
    counts = np.bincount(idx, minlength=nbins)
    return {"bin_low": HIST_LOW, "width": HIST_WIDTH, "counts": [int(c) for c in counts]}


def error_statistics(best, threshold):
    ok = best[np.isfinite(best) & (best <= threshold)]
    if ok.size == 0:
        stats = {"mean": None, "median": None, "max": None}
    else:
        stats = {
            "mean": float(np.mean(ok)),
            "median": float(np.median(ok)),
            "max": float(np.max(ok)),
        }
    stats["failures"] = int(best.size - ok.size)
    stats["note"] = FAILURE_NOTE
    return stats


def run_benchmark(cfg, batch=None):
    """Accuracy benchmark; returns the report dict (nothing is written here)."""
    cfg.validate()
    if batch is None:
        batch = gen_batch(cfg.seed, cfg.samples)
    counters, best, nsol = evaluate_batch(batch, cfg.threads)
    totals = counters.sum(axis=0)
    return {
        "errors": error_statistics(best, cfg.failure_threshold),
        "counters": {name: int(v) for name, v in zip(COUNTER_NAMES, totals)},
        "histogram": error_histogram(best),
        "timing": None,
        "config": _config_dict(cfg),
        "max_solutions_per_trial": int(nsol.max()) if nsol.size else 0,
    }


def run_timing(cfg, batch=None, warmup=1000):
    """Per-sample solve time (ns) averaged over ``timing_reps`` repetitions.

    Single-threaded; only the solve loop sits inside the clock. The returned
    checksum is accumulated so the solves cannot be dropped.
    """
    cfg.validate()
    if batch is None:
        batch = gen_batch(cfg.seed, cfg.samples)
    n = len(batch)
    out_R = np.zeros((MAX_SOLUTIONS, 9))
    out_t = np.zeros((MAX_SOLUTIONS, 3))
    out_d = np.zeros((MAX_SOLUTIONS, 3))
    out_xy = np.zeros((MAX_SOLUTIONS, 2))
    world, bearings = batch.world, batch.bearings
    reps = cfg.timing_reps
    sink = 0.0
    for i in range(min(n, warmup)):
        sink += repeat_solve_k(world, bearings, i, 1, out_R, out_t, out_d, out_xy)
    per_sample = np.empty(n)
    clock = time.perf_counter_ns
    for i in range(n):
        t0 = clock()
        sink += repeat_solve_k(world, bearings, i, reps, out_R, out_t, out_d, out_xy)
        per_sample[i] = (clock() - t0) / reps
    return {
        "timing": {
            "mean_ns": float(np.mean(per_sample)),
            "median_ns": float(np.median(per_sample)),
            "min_ns": float(np.min(per_sample)),
            "max_ns": float(np.max(per_sample)),
        },
        "config": _config_dict(cfg),
        "checksum": float(sink),
    }


def _config_dict(cfg):
    d = asdict(cfg)
    d["backend"] = BACKEND
    return d
