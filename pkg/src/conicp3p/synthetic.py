"""Noise-free synthetic P3P instances with known ground truth.

Each trial draws from its own counter-based stream (numpy's Philox keyed by
``(seed, index)``), so trial ``i`` is identical no matter how many trials are
generated, in which order, or on how many workers.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import kernel
from .conics import P3PInstance
from .geom import cross_k, dot_k, norm_k, sub_k

MAX_ATTEMPTS = 100
QUAT_MIN_NORM = 1e-6
IMAGE_AREA_MIN = 1e-10
WORLD_NORMAL_RTOL = 1e-10
DEPTH_RANGE = (0.1, 10.0)
IMAGE_RANGE = (-1.0, 1.0)

_MASK64 = (1 << 64) - 1


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GroundTruthInstance:
    inst: P3PInstance
    R_gt: np.ndarray
    t_gt: np.ndarray
    depths_gt: np.ndarray
    image: np.ndarray
    seed: int
    index: int


def trial_rng(seed, index):
    """Independent generator for trial ``index`` of run ``seed``."""
    key = np.array([int(index) & _MASK64, int(seed) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class _StreamFactory:
    """Re-keys a single Philox instance per trial (same streams as trial_rng, cheaper)."""

    def __init__(self, seed):
        self._bitgen = np.random.Philox(key=np.array([0, int(seed) & _MASK64], dtype=np.uint64))
        self._fresh = self._bitgen.state
        self._gen = np.random.Generator(self._bitgen)

    def __call__(self, index):
        state = dict(self._fresh)
        inner = dict(state["state"])
        key = inner["key"].copy()
        key[0] = int(index) & _MASK64
        inner["key"] = key
        state["state"] = inner
        self._bitgen.state = state
        return self._gen


@kernel
def _geometry_k(q, t, uv, depths, R, m, X):
    """Fill R, m, X from raw draws; returns True when the draw is degenerate."""
    w, x, y, z = q[0], q[1], q[2], q[3]
    R[0, 0] = 1.0 - 2.0 * (y * y + z * z)
    R[0, 1] = 2.0 * (x * y - w * z)
    R[0, 2] = 2.0 * (x * z + w * y)
    R[1, 0] = 2.0 * (x * y + w * z)
    R[1, 1] = 1.0 - 2.0 * (x * x + z * z)
    R[1, 2] = 2.0 * (y * z - w * x)
    R[2, 0] = 2.0 * (x * z - w * y)
    R[2, 1] = 2.0 * (y * z + w * x)
    R[2, 2] = 1.0 - 2.0 * (x * x + y * y)
    for i in range(3):
        u = uv[i, 0]
        v = uv[i, 1]
        n = math.sqrt(u * u + v * v + 1.0)
        m[i, 0] = u / n
        m[i, 1] = v / n
        m[i, 2] = 1.0 / n
        # X_i = R^T (d_i m_i - t)
        c0 = depths[i] * m[i, 0] - t[0]
        c1 = depths[i] * m[i, 1] - t[1]
        c2 = depths[i] * m[i, 2] - t[2]
        for k in range(3):
            X[i, k] = R[0, k] * c0 + R[1, k] * c1 + R[2, k] * c2
    e1u = uv[1, 0] - uv[0, 0]
    e1v = uv[1, 1] - uv[0, 1]
    e2u = uv[2, 0] - uv[0, 0]
    e2v = uv[2, 1] - uv[0, 1]
    if abs(0.5 * (e1u * e2v - e1v * e2u)) < IMAGE_AREA_MIN:
        return True
    X1 = (X[0, 0], X[0, 1], X[0, 2])
    X2 = (X[1, 0], X[1, 1], X[1, 2])
    X3 = (X[2, 0], X[2, 1], X[2, 2])
    e12 = sub_k(X1, X2)
    e13 = sub_k(X1, X3)
    e23 = sub_k(X2, X3)
    smax = max(dot_k(e12, e12), max(dot_k(e13, e13), dot_k(e23, e23)))
    nx = cross_k(e12, e13)
    return not norm_k(nx) >= WORLD_NORMAL_RTOL * smax


def _image_collinear(uv):
    e1 = uv[1] - uv[0]
    e2 = uv[2] - uv[0]
    return abs(0.5 * (e1[0] * e2[1] - e1[1] * e2[0])) < IMAGE_AREA_MIN


def _world_collinear(X):
    n = cross_k(sub_k(X[0], X[1]), sub_k(X[0], X[2]))
    e = (sub_k(X[0], X[1]), sub_k(X[0], X[2]), sub_k(X[1], X[2]))
    smax = max(dot_k(v, v) for v in e)
    return not norm_k(n) >= WORLD_NORMAL_RTOL * smax


def is_degenerate(inst):
    """True when the image points or the world points are collinear."""
    m = inst.bearings
    if np.all(m[:, 2] > 0.0):
        uv = m[:, :2] / m[:, 2:3]
        image_flat = _image_collinear(uv)
    else:
        image_flat = abs(np.linalg.det(m)) < IMAGE_AREA_MIN
    X = [tuple(float(v) for v in row) for row in inst.world]
    return bool(image_flat or _world_collinear(X))


def _draw(rng):
    while True:
        q = rng.standard_normal(4)
        qn = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
        if qn >= QUAT_MIN_NORM:
            break
    t = rng.standard_normal(3)
    uv = rng.uniform(IMAGE_RANGE[0], IMAGE_RANGE[1], size=(3, 2))
    depths = rng.uniform(DEPTH_RANGE[0], DEPTH_RANGE[1], size=3)
    return q / qn, t, uv, depths


def _generate(rng, seed, index, R, m, X):
    for _ in range(MAX_ATTEMPTS):
        q, t, uv, depths = _draw(rng)
        if not _geometry_k(q, t, uv, depths, R, m, X):
            return t, uv, depths
    raise GenerationError(
        "no non-degenerate instance after %d attempts (seed=%d, index=%d)"
        % (MAX_ATTEMPTS, seed, index)
    )


def gen_instance(seed, index):
    R = np.empty((3, 3))
    m = np.empty((3, 3))
    X = np.empty((3, 3))
    t, uv, depths = _generate(trial_rng(seed, index), seed, index, R, m, X)
    return GroundTruthInstance(P3PInstance(X, m), R, t, depths, uv, int(seed), int(index))


@dataclass
class InstanceBatch:
    """Struct-of-arrays view over trials ``start .. start + count - 1``."""

    seed: int
    start: int
    world: np.ndarray  # (N, 3, 3)
    bearings: np.ndarray  # (N, 3, 3)
    R_gt: np.ndarray  # (N, 3, 3)
    t_gt: np.ndarray  # (N, 3)
    depths: np.ndarray  # (N, 3)

    def __len__(self):
        return len(self.world)

    def instance(self, i):
        return GroundTruthInstance(
            P3PInstance(self.world[i], self.bearings[i]),
            self.R_gt[i],
            self.t_gt[i],
            self.depths[i],
            self.bearings[i, :, :2] / self.bearings[i, :, 2:3],
            self.seed,
            self.start + i,
        )


def gen_batch(seed, count, start=0):
    """Trials ``start .. start + count - 1`` as stacked arrays."""
    world = np.empty((count, 3, 3))
    bearings = np.empty((count, 3, 3))
    R_gt = np.empty((count, 3, 3))
    t_gt = np.empty((count, 3))
    depths = np.empty((count, 3))
    streams = _StreamFactory(seed)
    for i in range(count):
        t, _, d = _generate(streams(start + i), seed, start + i, R_gt[i], bearings[i], world[i])
        t_gt[i] = t
        depths[i] = d
    return InstanceBatch(int(seed), int(start), world, bearings, R_gt, t_gt, depths)
