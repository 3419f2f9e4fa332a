"""Accuracy metrics and per-trial solution classification."""

from dataclasses import dataclass

import numpy as np

from .._jit import kernel
from ..validity import GROUND_TRUTH_TOL, DUPLICATE_TOL, pose_distance_k, pose_is_valid_k

COUNTER_NAMES = (
    "valid",
    "unique",
    "duplicates",
    "good",
    "no_solution",
    "ground_truth",
    "incorrect",
)


@dataclass(frozen=True)
class ErrorPair:
    xi_R: float
    xi_t: float

    @property
    def total(self):
        return self.xi_R + self.xi_t


@dataclass(frozen=True)
class TrialReport:
    valid: int
    unique: int
    duplicates: int
    good: int
    no_solution: int
    ground_truth: int
    incorrect: int
    best_error: float

    def counters(self):
        return {name: getattr(self, name) for name in COUNTER_NAMES}


def error_metrics(pose, R_gt, t_gt):
    """L1 rotation and translation errors against the ground truth."""
    xi_R = float(np.abs(np.asarray(R_gt) - pose.R).sum())
    xi_t = float(np.abs(np.asarray(t_gt) - pose.t).sum())
    return ErrorPair(xi_R, xi_t)


@kernel
def classify_k(n, Rs, ts, R_gt, t_gt, X1, X2, X3, m1, m2, m3):
    """Counters for one trial.

    ``Rs`` (n, 9) and ``ts`` (n, 3) hold the emitted poses. Returns
    ``(valid, unique, duplicates, good, no_solution, ground_truth, incorrect,
    best_error)``; ``incorrect`` counts emitted poses that are neither unique
    nor duplicates, so ``valid = unique + duplicates + incorrect``.
    """
    unique = 0
    duplicates = 0
    kept = (0, 0, 0, 0)
    best = np.inf
    for k in range(n):
        R = Rs[k]
        t = ts[k]
        err = pose_distance_k(R, t, R_gt, t_gt)
        if err < best:
            best = err
        if not pose_is_valid_k(
            (R[0], R[1], R[2], R[3], R[4], R[5], R[6], R[7], R[8]),
            (t[0], t[1], t[2]),
            X1, X2, X3, m1, m2, m3,
        ):  # fmt: skip
            continue
        dup = False
        for j in range(unique):
            if pose_distance_k(R, t, Rs[kept[j]], ts[kept[j]]) < DUPLICATE_TOL:
                dup = True
                break
        if dup:
            duplicates += 1
        else:
            kept = (
                k if unique == 0 else kept[0],
                k if unique == 1 else kept[1],
                k if unique == 2 else kept[2],
                k if unique == 3 else kept[3],
            )
            unique += 1
    good = 1 if unique > 0 else 0
    no_solution = 1 if unique == 0 and duplicates == 0 else 0
    ground_truth = 1 if best < GROUND_TRUTH_TOL else 0
    incorrect = n - unique - duplicates
    return n, unique, duplicates, good, no_solution, ground_truth, incorrect, best


def _rows(a):
    a = np.asarray(a, dtype=np.float64)
    return tuple(tuple(float(v) for v in r) for r in a)


def classify_trial(output, gt):
    """Classify a SolverOutput against a GroundTruthInstance."""
    n = len(output.solutions)
    Rs = np.zeros((max(n, 1), 9))
    ts = np.zeros((max(n, 1), 3))
    for k, sol in enumerate(output.solutions):
        Rs[k] = np.asarray(sol.pose.R).ravel()
        ts[k] = sol.pose.t
    X = _rows(gt.inst.world)
    m = _rows(gt.inst.bearings)
    R_gt = np.ascontiguousarray(gt.R_gt, dtype=np.float64).ravel()
    t_gt = np.ascontiguousarray(gt.t_gt, dtype=np.float64)
    res = classify_k(n, Rs, ts, R_gt, t_gt, *X, *m)
    return TrialReport(*(int(v) for v in res[:7]), float(res[7]))
