"""P3P by conic transformation: from three correspondences to up to four poses."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import kernel
from .conics import conics_k, invariants_k
from .errors import (
    DIAGNOSTICS,
    ST_DEGENERATE_DEPTH,
    ST_DEGENERATE_INSTANCE,
    ST_NO_POSITIVE_INTERSECTION,
    ST_OK,
    ST_SINGULAR_GEOMETRY,
    raise_for_status,
)
from .geom import (
    Pose,
    as_vec,
    columns_k,
    cross_k,
    dot_k,
    invert3_k,
    matmul_k,
    matvec_k,
    normalize_k,
    prod3_k,
    scale_k,
    solve3_k,
    sub_k,
    transpose_k,
    two_prod_k,
    two_sum_k,
)
from .quartic import QUARTIC_DEGREE_RTOL, _put4, solve_quartic_k
from .transform import frame_k, transform_conic_k
from .validity import DUPLICATE_TOL, pose_distance_k, pose_is_valid_k

MAX_SOLUTIONS = 4
W_RTOL = 1e-12
INTERSECTION_RTOL = 1e-6
ROOT_POLISH_ITER = 2
XY_POLISH_ITER = 3
DEPTH_RADICAND_MIN = 1e-20
COLLINEAR_RTOL = 1e-10
GN_MAX_ITER = 3
GN_STOP_RTOL = 1e-24
ORTHO_TOL = 1e-6


@dataclass(frozen=True)
class DepthTriple:
    d1: float
    d2: float
    d3: float

    def astuple(self):
        return (self.d1, self.d2, self.d3)


@dataclass(frozen=True)
class PoseSolution:
    pose: Pose
    depths: DepthTriple
    intersection: tuple


@dataclass(frozen=True)
class SolverOutput:
    solutions: list = field(default_factory=list)
    diagnostic: str = "Ok"

    def __len__(self):
        return len(self.solutions)


# -- kernels -----------------------------------------------------------------


@kernel
def _conic_residuals(a, b, m12, m13, m23, x, y):
    r1 = x * x - 2.0 * m12 * x * y + (1.0 - a) * y * y + 2.0 * a * m23 * y - a
    r2 = x * x - b * y * y - 2.0 * m13 * x + 2.0 * b * m23 * y + 1.0 - b
    return r1, r2


@kernel
def _acc(s, c, hi, lo):
    t, e = two_sum_k(s, hi)
    return t, c + (e + lo)


@kernel
def conic_residuals_dd_k(a, b, m12, m13, m23, x, y):
    """Both conic residuals, products and sums carried in double-double.

    Coefficients are rounded exactly as in ``conics_k``; the result is the
    residual of the stored conics to roughly eps^2 of the largest term. Far
    from the origin the plain evaluation is all rounding noise.
    """
    ca = 1.0 - a
    cb = 1.0 - b
    e1 = 2.0 * (a * m23)
    e2 = 2.0 * (b * m23)
    xx, xxe = two_prod_k(x, x)
    h, l = prod3_k(-2.0 * m12, x, y)
    s, c = _acc(xx, xxe, h, l)
    h, l = prod3_k(ca, y, y)
    s, c = _acc(s, c, h, l)
    h, l = two_prod_k(e1, y)
    s, c = _acc(s, c, h, l)
    s, c = _acc(s, c, -a, 0.0)
    r1 = s + c
    yy, yye = prod3_k(-b, y, y)
    s, c = _acc(xx, xxe, yy, yye)
    h, l = two_prod_k(-2.0 * m13, x)
    s, c = _acc(s, c, h, l)
    h, l = two_prod_k(e2, y)
    s, c = _acc(s, c, h, l)
    s, c = _acc(s, c, cb, 0.0)
    return r1, s + c


@kernel
def _newton_xy(a, b, m12, m13, m23, x, y):
    """Joint Newton on both conics; each step is kept only if it lowers the residual.

    Far-away intersections come out of the back-transform divided by a small
    homogeneous w, which costs a few digits; these steps recover them. The
    residuals are compensated, otherwise they are too noisy to steer by.
    """
    r1, r2 = conic_residuals_dd_k(a, b, m12, m13, m23, x, y)
    for _ in range(XY_POLISH_ITER):
        j11 = 2.0 * (x - m12 * y)
        j12 = 2.0 * (-m12 * x + (1.0 - a) * y + a * m23)
        j21 = 2.0 * (x - m13)
        j22 = 2.0 * (-b * y + b * m23)
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            break
        xn = x - (j22 * r1 - j12 * r2) / det
        yn = y - (j11 * r2 - j21 * r1) / det
        s1, s2 = conic_residuals_dd_k(a, b, m12, m13, m23, xn, yn)
        if not abs(s1) + abs(s2) < abs(r1) + abs(r2):
            break
        x, y, r1, r2 = xn, yn, s1, s2
    return x, y


@kernel
def _accept_point(a, b, m12, m13, m23, x, y):
    if not (x > 0.0 and y > 0.0):
        return False
    if not (math.isfinite(x) and math.isfinite(y)):
        return False
    r1, r2 = _conic_residuals(a, b, m12, m13, m23, x, y)
    tol = INTERSECTION_RTOL * (1.0 + a + b) * (1.0 + x * x + y * y)
    return abs(r1) <= tol and abs(r2) <= tol


@kernel
def _pull_back(C, H, v):
    """``(Hv)^T C (Hv)`` and ``Hv``."""
    P = matvec_k(H, v)
    return dot_k(P, matvec_k(C, P)), P


@kernel
def _polish_root(C2, H, xp):
    """Newton on the second conic pulled back along the parabola.

    The expanded quartic coefficients lose precision to cancellation when H is
    badly conditioned; evaluating C2 at H (x', x'^2, 1) directly does not.
    Large roots are polished in u = 1/x' on (u, 1, u^2). Only steps that reduce
    the residual are taken.
    """
    inv = abs(xp) > 1.0
    u = 1.0 / xp if inv else xp
    for _ in range(ROOT_POLISH_ITER):
        v = (u, 1.0, u * u) if inv else (u, u * u, 1.0)
        dv = (1.0, 0.0, 2.0 * u) if inv else (1.0, 2.0 * u, 0.0)
        g, P = _pull_back(C2, H, v)
        dg = 2.0 * dot_k(matvec_k(H, dv), matvec_k(C2, P))
        if g == 0.0 or dg == 0.0:
            break
        un = u - g / dg
        vn = (un, 1.0, un * un) if inv else (un, un * un, 1.0)
        gn, _ = _pull_back(C2, H, vn)
        if not abs(gn) < abs(g):
            break
        u = un
    return 1.0 / u if inv else u


@kernel
def intersect_k(a, b, m12, m13, m23):
    """Positive-quadrant intersections of the two conics.

    Returns ``(status, n, xs, ys)`` with up to four points in 4-tuples.
    """
    xs = (0.0, 0.0, 0.0, 0.0)
    ys = (0.0, 0.0, 0.0, 0.0)
    C1, C2 = conics_k(a, b, m12, m13, m23)
    status, H, p1 = frame_k(C1, a, m12, m23)
    if status != ST_OK:
        return status, 0, xs, ys
    a2, b2, c2, d2, e2, f2 = transform_conic_k(C2, H)
    st, nr, roots = solve_quartic_k(c2, b2, a2 + e2, d2, f2)
    n = 0
    for j in range(nr):
        xp = _polish_root(C2, H, roots[j])
        # (x', x'^2, 1) rescaled to stay bounded for large roots
        if abs(xp) > 1.0:
            v = (1.0 / xp, 1.0, 1.0 / (xp * xp))
        else:
            v = (xp, xp * xp, 1.0)
        P = matvec_k(H, v)
        w = P[2]
        if not abs(w) > W_RTOL * math.sqrt(P[0] * P[0] + P[1] * P[1] + w * w):
            continue
        x, y = _newton_xy(a, b, m12, m13, m23, P[0] / w, P[1] / w)
        if _accept_point(a, b, m12, m13, m23, x, y):
            xs = _put4(xs, n, x)
            ys = _put4(ys, n, y)
            n += 1
    # p1 itself is the image of x' = infinity; it is lost when the quartic
    # drops degree, so test it directly in that case
    cmax = max(max(max(abs(c2), abs(b2)), max(abs(a2 + e2), abs(d2))), abs(f2))
    if n < 4 and not abs(c2) > QUARTIC_DEGREE_RTOL * cmax:
        if _accept_point(a, b, m12, m13, m23, p1[0], p1[1]):
            xs = _put4(xs, n, p1[0])
            ys = _put4(ys, n, p1[1])
            n += 1
    if n == 0:
        return ST_NO_POSITIVE_INTERSECTION, 0, xs, ys
    return ST_OK, n, xs, ys


@kernel
def recover_depths_k(x, y, m23, s23):
    """Depths from the ratios using the (2, 3) distance constraint."""
    rad = y * y - 2.0 * m23 * y + 1.0
    if not rad > DEPTH_RADICAND_MIN:
        return ST_DEGENERATE_DEPTH, 0.0, 0.0, 0.0
    d3 = math.sqrt(s23 / rad)
    return ST_OK, x * d3, y * d3, d3


@kernel
def _depth_residuals(d1, d2, d3, m12, m13, m23, s12, s13, s23):
    r1 = d1 * d1 - 2.0 * d1 * d2 * m12 + d2 * d2 - s12
    r2 = d1 * d1 - 2.0 * d1 * d3 * m13 + d3 * d3 - s13
    r3 = d2 * d2 - 2.0 * d2 * d3 * m23 + d3 * d3 - s23
    return r1, r2, r3


@kernel
def refine_depths_k(d1, d2, d3, m12, m13, m23, s12, s13, s23):
    """Gauss-Newton on the three squared-distance residuals.

    Full steps, at most GN_MAX_ITER of them; a step that does not lower the
    residual sum of squares is rejected and the previous iterate returned.
    """
    scale = max(s12, max(s13, s23))
    stop = GN_STOP_RTOL * scale * scale
    r1, r2, r3 = _depth_residuals(d1, d2, d3, m12, m13, m23, s12, s13, s23)
    cost = r1 * r1 + r2 * r2 + r3 * r3
    for _ in range(GN_MAX_ITER):
        if cost < stop:
            break
        J = (
            2.0 * (d1 - d2 * m12), 2.0 * (d2 - d1 * m12), 0.0,
            2.0 * (d1 - d3 * m13), 0.0, 2.0 * (d3 - d1 * m13),
            0.0, 2.0 * (d2 - d3 * m23), 2.0 * (d3 - d2 * m23),
        )  # fmt: skip
        status, step = solve3_k(J, (r1, r2, r3))
        if status != ST_OK:
            break
        n1 = d1 - step[0]
        n2 = d2 - step[1]
        n3 = d3 - step[2]
        q1, q2, q3 = _depth_residuals(n1, n2, n3, m12, m13, m23, s12, s13, s23)
        new_cost = q1 * q1 + q2 * q2 + q3 * q3
        if not new_cost < cost:
            break
        d1, d2, d3 = n1, n2, n3
        r1, r2, r3 = q1, q2, q3
        cost = new_cost
    return d1, d2, d3


@kernel
def recover_pose_k(d1, d2, d3, X1, X2, X3, m1, m2, m3):
    """``R = Y X^-1`` from edge vectors plus their normals; ``t = d1 m1 - R X1``."""
    e12 = sub_k(X1, X2)
    e13 = sub_k(X1, X3)
    nx = cross_k(e12, e13)
    f1 = scale_k(d1, m1)
    f12 = sub_k(f1, scale_k(d2, m2))
    f13 = sub_k(f1, scale_k(d3, m3))
    ny = cross_k(f12, f13)
    status, Xinv = invert3_k(columns_k(e12, e13, nx))
    if status != ST_OK:
        return ST_SINGULAR_GEOMETRY, Xinv, (0.0, 0.0, 0.0)
    R = matmul_k(columns_k(f12, f13, ny), Xinv)
    RX1 = matvec_k(R, X1)
    t = (f1[0] - RX1[0], f1[1] - RX1[1], f1[2] - RX1[2])
    return ST_OK, R, t


@kernel
def _orthonormal(R):
    RRt = matmul_k(R, transpose_k(R))
    for i in range(9):
        target = 1.0 if i % 4 == 0 else 0.0
        if not abs(RRt[i] - target) < ORTHO_TOL:
            return False
    return True


@kernel
def world_collinear_k(X1, X2, X3):
    e12 = sub_k(X1, X2)
    e13 = sub_k(X1, X3)
    e23 = sub_k(X2, X3)
    smax = max(dot_k(e12, e12), max(dot_k(e13, e13), dot_k(e23, e23)))
    nx = cross_k(e12, e13)
    return not math.sqrt(dot_k(nx, nx)) > COLLINEAR_RTOL * smax


@kernel
def solve_into_k(X1, X2, X3, y1, y2, y3, out_R, out_t, out_d, out_xy):
    """Full solve; writes up to four poses into the output arrays.

    ``out_R`` is (4, 9) row-major, ``out_t`` and ``out_d`` are (4, 3),
    ``out_xy`` is (4, 2). Returns ``(status, n)``; status is ST_OK whenever
    n > 0, otherwise the first failure met along the way.
    """
    s1, m1 = normalize_k(y1)
    s2, m2 = normalize_k(y2)
    s3, m3 = normalize_k(y3)
    if s1 != ST_OK or s2 != ST_OK or s3 != ST_OK:
        return ST_DEGENERATE_INSTANCE, 0
    if world_collinear_k(X1, X2, X3):
        return ST_SINGULAR_GEOMETRY, 0
    status, a, b, m12, m13, m23 = invariants_k(X1, X2, X3, m1, m2, m3)
    if status != ST_OK:
        return status, 0
    status, ni, xs, ys = intersect_k(a, b, m12, m13, m23)
    if status != ST_OK:
        return status, 0
    e12 = sub_k(X1, X2)
    e13 = sub_k(X1, X3)
    e23 = sub_k(X2, X3)
    s12 = dot_k(e12, e12)
    s13 = dot_k(e13, e13)
    s23 = dot_k(e23, e23)
    first_failure = ST_OK
    n = 0
    for j in range(ni):
        st, d1, d2, d3 = recover_depths_k(xs[j], ys[j], m23, s23)
        if st != ST_OK:
            if first_failure == ST_OK:
                first_failure = st
            continue
        d1, d2, d3 = refine_depths_k(d1, d2, d3, m12, m13, m23, s12, s13, s23)
        st, R, t = recover_pose_k(d1, d2, d3, X1, X2, X3, m1, m2, m3)
        if st != ST_OK:
            if first_failure == ST_OK:
                first_failure = st
            continue
        if not (_orthonormal(R) and pose_is_valid_k(R, t, X1, X2, X3, m1, m2, m3)):
            continue
        duplicate = False
        for k in range(n):
            if pose_distance_k(R, t, out_R[k], out_t[k]) < DUPLICATE_TOL:
                duplicate = True
                break
        if duplicate:
            continue
        for i in range(9):
            out_R[n, i] = R[i]
        out_t[n, 0] = t[0]
        out_t[n, 1] = t[1]
        out_t[n, 2] = t[2]
        out_d[n, 0] = d1
        out_d[n, 1] = d2
        out_d[n, 2] = d3
        out_xy[n, 0] = xs[j]
        out_xy[n, 1] = ys[j]
        n += 1
    if n == 0:
        if first_failure == ST_OK:
            first_failure = ST_NO_POSITIVE_INTERSECTION
        return first_failure, 0
    return ST_OK, n


# -- Python-facing API -------------------------------------------------------


def _inst_rows(inst):
    X = tuple(as_vec(r) for r in inst.world)
    m = tuple(as_vec(r) for r in inst.bearings)
    return X, m


def intersect_conics(pair):
    """Positive depth-ratio pairs ``(x, y)`` where the two conics meet.

    Raises PointSelectionFailure (and the other frame errors) when no
    homography can be built; returns an empty list when every real
    intersection lies outside the positive quadrant.
    """
    inv = pair.inv
    status, n, xs, ys = intersect_k(inv.a, inv.b, inv.m12, inv.m13, inv.m23)
    if status == ST_NO_POSITIVE_INTERSECTION:
        return []
    raise_for_status(status)
    return [(float(xs[j]), float(ys[j])) for j in range(n)]


def recover_depths(x, y, inst, inv):
    X, _ = _inst_rows(inst)
    e23 = sub_k(X[1], X[2])
    status, d1, d2, d3 = recover_depths_k(float(x), float(y), inv.m23, dot_k(e23, e23))
    raise_for_status(status, "depth ratio makes bearings 2 and 3 coincide")
    return DepthTriple(d1, d2, d3)


def _squared_distances(X):
    e12 = sub_k(X[0], X[1])
    e13 = sub_k(X[0], X[2])
    e23 = sub_k(X[1], X[2])
    return dot_k(e12, e12), dot_k(e13, e13), dot_k(e23, e23)


def refine_depths(d, inst):
    X, m = _inst_rows(inst)
    s12, s13, s23 = _squared_distances(X)
    out = refine_depths_k(
        d.d1, d.d2, d.d3, dot_k(m[0], m[1]), dot_k(m[0], m[2]), dot_k(m[1], m[2]), s12, s13, s23
    )
    return DepthTriple(*(float(v) for v in out))


def depth_cost(d, inst):
    """Sum of squared distance-constraint residuals at depths ``d``."""
    X, m = _inst_rows(inst)
    s12, s13, s23 = _squared_distances(X)
    r = _depth_residuals(
        d.d1, d.d2, d.d3, dot_k(m[0], m[1]), dot_k(m[0], m[2]), dot_k(m[1], m[2]), s12, s13, s23
    )
    return float(sum(v * v for v in r))


def recover_pose(d, inst):
    X, m = _inst_rows(inst)
    status, R, t = recover_pose_k(d.d1, d.d2, d.d3, *X, *m)
    raise_for_status(status, "world points are collinear")
    return Pose(np.array(R).reshape(3, 3), np.array(t))


def solve_raw(world, bearings):
    """Solve from (3, 3) arrays; returns ``(status, R (n,3,3), t (n,3), d (n,3), xy (n,2))``."""
    world = np.asarray(world, dtype=np.float64)
    bearings = np.asarray(bearings, dtype=np.float64)
    out_R = np.zeros((MAX_SOLUTIONS, 9))
    out_t = np.zeros((MAX_SOLUTIONS, 3))
    out_d = np.zeros((MAX_SOLUTIONS, 3))
    out_xy = np.zeros((MAX_SOLUTIONS, 2))
    X = tuple(as_vec(r) for r in world)
    y = tuple(as_vec(r) for r in bearings)
    status, n = solve_into_k(*X, *y, out_R, out_t, out_d, out_xy)
    return status, out_R[:n].reshape(n, 3, 3), out_t[:n], out_d[:n], out_xy[:n]


def solve_p3p(inst):
    """All valid, distinct camera poses consistent with a P3P instance."""
    status, Rs, ts, ds, xys = solve_raw(inst.world, inst.bearings)
    solutions = [
        PoseSolution(Pose(Rs[k].copy(), ts[k].copy()), DepthTriple(*ds[k]), tuple(xys[k]))
        for k in range(len(Rs))
    ]
    return SolverOutput(solutions, DIAGNOSTICS[status])
