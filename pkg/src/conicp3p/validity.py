"""Pose quality tests shared by the solver's output filter and the benchmark.

A pose is accepted when

1. ``|det(R R^T) - 1| < 1e-6``
2. ``|det(R) - 1| < 1e-6``
3. the quaternion extracted from R has ``| |q| - 1 | < 1e-5``
4. every world point reprojects onto its bearing within ``1e-4``

and two poses are duplicates when ``xi_R + xi_t < 1e-5`` (L1 distances).
"""

import math

from ._jit import kernel
from .geom import det3_k, matmul_k, matvec_k, transpose_k

DET_TOL = 1e-6
QUAT_TOL = 1e-5
REPROJ_TOL = 1e-4
DUPLICATE_TOL = 1e-5
GROUND_TRUTH_TOL = 1e-6


@kernel
def quaternion_norm_k(R):
    """Norm of the (unnormalized) quaternion read off R by Shepperd's method."""
    r00, r01, r02, r10, r11, r12, r20, r21, r22 = R
    tr = r00 + r11 + r22
    if tr > 0.0:
        s = 2.0 * math.sqrt(tr + 1.0)
        w = 0.25 * s
        x = (r21 - r12) / s
        y = (r02 - r20) / s
        z = (r10 - r01) / s
    elif r00 > r11 and r00 > r22:
        s = 2.0 * math.sqrt(max(0.0, 1.0 + r00 - r11 - r22))
        if s == 0.0:
            return 0.0
        w = (r21 - r12) / s
        x = 0.25 * s
        y = (r01 + r10) / s
        z = (r02 + r20) / s
    elif r11 > r22:
        s = 2.0 * math.sqrt(max(0.0, 1.0 + r11 - r00 - r22))
        if s == 0.0:
            return 0.0
        w = (r02 - r20) / s
        x = (r01 + r10) / s
        y = 0.25 * s
        z = (r12 + r21) / s
    else:
        s = 2.0 * math.sqrt(max(0.0, 1.0 + r22 - r00 - r11))
        if s == 0.0:
            return 0.0
        w = (r10 - r01) / s
        x = (r02 + r20) / s
        y = (r12 + r21) / s
        z = 0.25 * s
    return math.sqrt(w * w + x * x + y * y + z * z)


@kernel
def _bearing_error(R, t, X, m):
    P = matvec_k(R, X)
    P = (P[0] + t[0], P[1] + t[1], P[2] + t[2])
    n = math.sqrt(P[0] * P[0] + P[1] * P[1] + P[2] * P[2])
    if not n > 0.0:
        return math.inf
    e0 = P[0] / n - m[0]
    e1 = P[1] / n - m[1]
    e2 = P[2] / n - m[2]
    return math.sqrt(e0 * e0 + e1 * e1 + e2 * e2)


@kernel
def reprojection_error_k(R, t, X1, X2, X3, m1, m2, m3):
    """Largest distance between a bearing and the direction of ``R X_i + t``."""
    e = _bearing_error(R, t, X1, m1)
    e = max(e, _bearing_error(R, t, X2, m2))
    return max(e, _bearing_error(R, t, X3, m3))


@kernel
def pose_is_valid_k(R, t, X1, X2, X3, m1, m2, m3):
    for i in range(9):
        if not math.isfinite(R[i]):
            return False
    RRt = matmul_k(R, transpose_k(R))
    if not abs(det3_k(RRt) - 1.0) < DET_TOL:
        return False
    if not abs(det3_k(R) - 1.0) < DET_TOL:
        return False
    if not abs(quaternion_norm_k(R) - 1.0) < QUAT_TOL:
        return False
    return reprojection_error_k(R, t, X1, X2, X3, m1, m2, m3) < REPROJ_TOL


@kernel
def pose_distance_k(R1, t1, R2, t2):
    """``xi_R + xi_t``: entrywise L1 distance of rotations plus L1 of translations."""
    s = 0.0
    for i in range(9):
        s += abs(R1[i] - R2[i])
    for i in range(3):
        s += abs(t1[i] - t2[i])
    return s
