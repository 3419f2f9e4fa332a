"""Fixed-size 3-vector / 3x3-matrix primitives.

Kernels (``*_k``) operate on plain tuples so that the compiled path never
touches the heap: a vector is a 3-tuple, a matrix a row-major 9-tuple.
The un-suffixed functions are convenience wrappers taking array-likes and
returning numpy arrays; they raise instead of returning status codes.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import kernel
from .errors import ST_OK, ST_SINGULAR_MATRIX, ST_ZERO_VECTOR, raise_for_status

PIVOT_RTOL = 1e-13
_SPLITTER = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class Pose:
    """World-to-camera rigid motion: ``x_cam = R @ x_world + t``."""

    R: np.ndarray
    t: np.ndarray


@kernel
def dot_k(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


@kernel
def cross_k(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


@kernel
def sub_k(u, v):
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


@kernel
def scale_k(s, u):
    return (s * u[0], s * u[1], s * u[2])


@kernel
def norm_k(u):
    return math.sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2])


@kernel
def normalize_k(v):
    n = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if not n > 0.0:
        return ST_ZERO_VECTOR, (0.0, 0.0, 0.0)
    return ST_OK, (v[0] / n, v[1] / n, v[2] / n)


@kernel
def two_sum_k(a, b):
    """``a + b`` as ``(s, e)`` with ``s + e`` exact (Knuth)."""
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@kernel
def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@kernel
def two_prod_k(a, b):
    """``a * b`` as ``(p, e)`` with ``p + e`` exact (Dekker, no FMA needed)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@kernel
def prod3_k(a, b, c):
    """``a * b * c`` as an unevaluated sum ``hi + lo`` to about eps^2."""
    p, pe = two_prod_k(b, c)
    q, qe = two_prod_k(a, p)
    return q, qe + a * pe


@kernel
def matvec_k(A, v):
    return (
        A[0] * v[0] + A[1] * v[1] + A[2] * v[2],
        A[3] * v[0] + A[4] * v[1] + A[5] * v[2],
        A[6] * v[0] + A[7] * v[1] + A[8] * v[2],
    )


@kernel
def matmul_k(A, B):
    return (
        A[0] * B[0] + A[1] * B[3] + A[2] * B[6],
        A[0] * B[1] + A[1] * B[4] + A[2] * B[7],
        A[0] * B[2] + A[1] * B[5] + A[2] * B[8],
        A[3] * B[0] + A[4] * B[3] + A[5] * B[6],
        A[3] * B[1] + A[4] * B[4] + A[5] * B[7],
        A[3] * B[2] + A[4] * B[5] + A[5] * B[8],
        A[6] * B[0] + A[7] * B[3] + A[8] * B[6],
        A[6] * B[1] + A[7] * B[4] + A[8] * B[7],
        A[6] * B[2] + A[7] * B[5] + A[8] * B[8],
    )


@kernel
def transpose_k(A):
    return (A[0], A[3], A[6], A[1], A[4], A[7], A[2], A[5], A[8])


@kernel
def columns_k(c0, c1, c2):
    """Matrix whose columns are the three given vectors."""
    return (c0[0], c1[0], c2[0], c0[1], c1[1], c2[1], c0[2], c1[2], c2[2])


@kernel
def congruence_k(H, C):
    """H^T C H."""
    CH = matmul_k(C, H)
    return matmul_k(transpose_k(H), CH)


@kernel
def det3_k(A):
    return (
        A[0] * (A[4] * A[8] - A[5] * A[7])
        - A[1] * (A[3] * A[8] - A[5] * A[6])
        + A[2] * (A[3] * A[7] - A[4] * A[6])
    )


@kernel
def maxabs9_k(A):
    m = 0.0
    for i in range(9):
        v = abs(A[i])
        if v > m:
            m = v
    return m


@kernel
def lu3_k(A):
    """Partial-pivot LU of a 3x3 matrix.

    Returns ``(status, lu, perm)``: ``lu`` packs the unit-lower multipliers
    below the diagonal and U on and above it; ``perm`` maps factor rows to
    original rows. Status is ST_SINGULAR_MATRIX when a pivot falls below
    PIVOT_RTOL times the largest absolute entry of A.
    """
    r0 = (A[0], A[1], A[2])
    r1 = (A[3], A[4], A[5])
    r2 = (A[6], A[7], A[8])
    p0, p1, p2 = 0, 1, 2
    tol = PIVOT_RTOL * maxabs9_k(A)
    zero = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    if abs(r1[0]) > abs(r0[0]):
        r0, r1 = r1, r0
        p0, p1 = p1, p0
    if abs(r2[0]) > abs(r0[0]):
        r0, r2 = r2, r0
        p0, p2 = p2, p0
    if not abs(r0[0]) > tol:
        return ST_SINGULAR_MATRIX, zero, (0, 1, 2)
    l1 = r1[0] / r0[0]
    l2 = r2[0] / r0[0]
    r1 = (l1, r1[1] - l1 * r0[1], r1[2] - l1 * r0[2])
    r2 = (l2, r2[1] - l2 * r0[1], r2[2] - l2 * r0[2])
    if abs(r2[1]) > abs(r1[1]):
        r1, r2 = r2, r1
        p1, p2 = p2, p1
    if not abs(r1[1]) > tol:
        return ST_SINGULAR_MATRIX, zero, (0, 1, 2)
    l3 = r2[1] / r1[1]
    r2 = (r2[0], l3, r2[2] - l3 * r1[2])
    if not abs(r2[2]) > tol:
        return ST_SINGULAR_MATRIX, zero, (0, 1, 2)
    lu = (r0[0], r0[1], r0[2], r1[0], r1[1], r1[2], r2[0], r2[1], r2[2])
    return ST_OK, lu, (p0, p1, p2)


@kernel
def lu3_solve_k(lu, perm, b):
    y0 = b[perm[0]]
    y1 = b[perm[1]] - lu[3] * y0
    y2 = b[perm[2]] - lu[6] * y0 - lu[7] * y1
    x2 = y2 / lu[8]
    x1 = (y1 - lu[5] * x2) / lu[4]
    x0 = (y0 - lu[1] * x1 - lu[2] * x2) / lu[0]
    return (x0, x1, x2)


@kernel
def solve3_k(A, rhs):
    status, lu, perm = lu3_k(A)
    if status != ST_OK:
        return status, (0.0, 0.0, 0.0)
    return ST_OK, lu3_solve_k(lu, perm, rhs)


@kernel
def invert3_k(A):
    status, lu, perm = lu3_k(A)
    if status != ST_OK:
        return status, (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    c0 = lu3_solve_k(lu, perm, (1.0, 0.0, 0.0))
    c1 = lu3_solve_k(lu, perm, (0.0, 1.0, 0.0))
    c2 = lu3_solve_k(lu, perm, (0.0, 0.0, 1.0))
    return ST_OK, columns_k(c0, c1, c2)


# -- array-friendly wrappers ------------------------------------------------


def as_vec(v):
    a = np.asarray(v, dtype=np.float64).reshape(3)
    return (float(a[0]), float(a[1]), float(a[2]))


def as_mat(A):
    a = np.asarray(A, dtype=np.float64).reshape(9)
    return tuple(float(x) for x in a)


def to_array(t, shape=None):
    out = np.array(t, dtype=np.float64)
    return out.reshape(shape) if shape is not None else out


def cross(u, v):
    return to_array(cross_k(as_vec(u), as_vec(v)))


def normalize(v):
    status, out = normalize_k(as_vec(v))
    raise_for_status(status, "cannot normalize a zero vector")
    return to_array(out)


def solve3(A, rhs):
    """Solve ``A s = rhs`` for a 3x3 ``A``; raises SingularMatrix."""
    status, s = solve3_k(as_mat(A), as_vec(rhs))
    raise_for_status(status, "matrix is singular to working precision")
    return to_array(s)


def invert3(A):
    status, inv = invert3_k(as_mat(A))
    raise_for_status(status, "matrix is singular to working precision")
    return to_array(inv, (3, 3))
