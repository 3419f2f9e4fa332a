"""Projective change of coordinates that turns the first conic into ``y' = x'^2``.

Three real points p1, p2, p3 are picked on C1, p0 is the pole of the line
p1 p2 (intersection of the polars of p1 and p2), and H maps the canonical
frame e0=(1,0,0), e1=(0,1,0), e2=(0,0,1), e3=(1,1,1) onto p0..p3. In the new
coordinates C1 is proportional to [[2,0,0],[0,0,-1],[0,-1,0]] and only the
transformed C2 has to be computed.

Point selection. p2, p3 = (+-sqrt(a), 0) always lie on C1. p1 is taken on a
vertical line x = x0 whose position depends on the conic type (sign of
``4 (m12^2 + a - 1)``): x0 = 0 for ellipses and parabolas, x0 = sqrt(a) + 1
for hyperbolas, with a short ladder of further abscissae when the line
misses the curve. Of the two roots on that line the one farther from the x
axis is used, unless its polar is nearly parallel to the polar of p2 (C1
close to a line pair) and the other root's is not.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import kernel
from .errors import (
    ST_COLLINEAR_REFERENCE,
    ST_DEGENERATE_POLE,
    ST_OK,
    ST_POINT_SELECTION_FAILURE,
    ST_ZERO_SCALE,
    raise_for_status,
)
from .geom import (
    as_mat,
    as_vec,
    columns_k,
    congruence_k,
    cross_k,
    matvec_k,
    norm_k,
    scale_k,
    solve3_k,
)

HYPERBOLA = 0
ELLIPSE = 1
PARABOLA = 2
KIND_NAMES = {HYPERBOLA: "Hyperbola", ELLIPSE: "Ellipse", PARABOLA: "Parabola"}

DELTA_RTOL = 1e-12
LINEAR_RTOL = 1e-14
DISTINCT_RTOL = 1e-8
POLE_RTOL = 1e-12
SCALE_RTOL = 1e-12
POLAR_SIN_MIN = 1e-2


@dataclass(frozen=True)
class ConicClass:
    discriminant: float
    kind: int

    @property
    def name(self):
        return KIND_NAMES[self.kind]


@dataclass(frozen=True)
class ReferencePoints:
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray


@dataclass(frozen=True)
class Homography:
    H: np.ndarray
    scales: tuple
    points: ReferencePoints


@dataclass(frozen=True)
class TransformedConic:
    """Coefficients of ``a x^2 + b x y + c y^2 + d x + e y + f`` in the new frame."""

    a2p: float
    b2p: float
    c2p: float
    d2p: float
    e2p: float
    f2p: float

    def quartic(self):
        """(c4, c3, c2, c1, c0) after substituting ``y' = x'^2``."""
        return (self.c2p, self.b2p, self.a2p + self.e2p, self.d2p, self.f2p)


@kernel
def classify_k(a, m12):
    delta = 4.0 * (m12 * m12 + a - 1.0)
    tau = DELTA_RTOL * max(1.0, 4.0 * a)
    if delta > tau:
        return delta, HYPERBOLA
    if delta < -tau:
        return delta, ELLIPSE
    return delta, PARABOLA


@kernel
def restricted_roots_k(a, m12, m23, x0):
    """y on C1 along the line x = x0; returns ``(n, y_main, y_alt)``.

    Both roots come from the cancellation-free quadratic formula. ``y_main`` is
    the one of larger magnitude (ties go to positive y) so that p1 sits as far
    as possible from p2 and p3 on the x axis.
    """
    qa = 1.0 - a
    qb = 2.0 * a * m23 - 2.0 * m12 * x0
    qc = x0 * x0 - a
    scale = max(max(abs(qa), abs(qb)), abs(qc))
    if not abs(qa) > LINEAR_RTOL * scale:
        if not abs(qb) > LINEAR_RTOL * scale:
            return 0, 0.0, 0.0
        return 1, -qc / qb, 0.0
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return 0, 0.0, 0.0
    if qb == 0.0:
        r = math.sqrt(disc) / (2.0 * abs(qa))
        return 2, r, -r
    q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
    return 2, q / qa, qc / q


@kernel
def polar_sine_k(a, m12, m23, x, y):
    """Sine of the angle between the polars of (x, y) and p2 = (sqrt(a), 0)."""
    ra = math.sqrt(a)
    l1 = (x - m12 * y, -m12 * x + (1.0 - a) * y + a * m23, a * m23 * y - a)
    l2 = (ra, -m12 * ra + a * m23, -a)
    n = norm_k(l1) * norm_k(l2)
    if not n > 0.0:
        return 0.0
    return norm_k(cross_k(l1, l2)) / n


@kernel
def _distinct(a, x0, y):
    ra = math.sqrt(a)
    tol = DISTINCT_RTOL * (1.0 + ra)
    d2 = math.hypot(x0 - ra, y)
    d3 = math.hypot(x0 + ra, y)
    return d2 > tol and d3 > tol


@kernel
def select_points_k(a, m12, m23, kind):
    """Return ``(status, p1x, p1y)``; p2, p3 are ``(+-sqrt(a), 0)``."""
    ra = math.sqrt(a)
    if kind == HYPERBOLA:
        ladder = (ra + 1.0, ra + 2.0, ra + 4.0, -ra - 1.0, -ra - 2.0, 0.0)
        count = 5
    else:
        # x0 = 0 always meets an ellipse; the rest only covers near-parabolic
        # conics that slipped past the classification tolerance
        ladder = (0.0, ra + 1.0, ra + 2.0, ra + 4.0, -ra - 1.0, -ra - 2.0)
        count = 6
    for i in range(count):
        x0 = ladder[i]
        n, y, y_alt = restricted_roots_k(a, m12, m23, x0)
        if n == 0:
            continue
        if n == 2 and math.isfinite(y_alt) and _distinct(a, x0, y_alt):
            # near a line pair, p1 and p2 can sit on the same line; their
            # polars are then almost parallel and the pole is ill-conditioned
            s = polar_sine_k(a, m12, m23, x0, y)
            if s < POLAR_SIN_MIN and polar_sine_k(a, m12, m23, x0, y_alt) > s:
                y = y_alt
        if math.isfinite(y) and _distinct(a, x0, y):
            return ST_OK, x0, y
    return ST_POINT_SELECTION_FAILURE, 0.0, 0.0


@kernel
def polar_intersection_k(C1, p1, p2):
    """Pole of the chord p1 p2: ``(C1 p1) x (C1 p2)``, scaled to unit norm."""
    l1 = matvec_k(C1, p1)
    l2 = matvec_k(C1, p2)
    p0 = cross_k(l1, l2)
    n = norm_k(p0)
    if not n > POLE_RTOL * norm_k(l1) * norm_k(l2):
        return ST_DEGENERATE_POLE, (0.0, 0.0, 0.0)
    return ST_OK, scale_k(1.0 / n, p0)


@kernel
def solve_scales_k(p0, p1, p2, p3):
    status, lam = solve3_k(columns_k(p0, p1, p2), p3)
    if status != ST_OK:
        return ST_COLLINEAR_REFERENCE, lam
    lmax = max(max(abs(lam[0]), abs(lam[1])), abs(lam[2]))
    lmin = min(min(abs(lam[0]), abs(lam[1])), abs(lam[2]))
    if not lmin >= SCALE_RTOL * lmax or not lmax > 0.0:
        return ST_ZERO_SCALE, lam
    return ST_OK, lam


@kernel
def homography_k(p0, p1, p2, lam):
    return columns_k(scale_k(lam[0], p0), scale_k(lam[1], p1), scale_k(lam[2], p2))


@kernel
def transform_conic_k(C, H):
    """Coefficients (a', b', c', d', e', f') of ``H^T C H``."""
    M = congruence_k(H, C)
    return (M[0], 2.0 * M[1], M[4], 2.0 * M[2], 2.0 * M[5], M[8])


@kernel
def frame_k(C1, a, m12, m23):
    """Reference points and homography for C1; ``(status, H, p1)``."""
    delta, kind = classify_k(a, m12)
    status, x0, y0 = select_points_k(a, m12, m23, kind)
    zero9 = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    p1 = (x0, y0, 1.0)
    if status != ST_OK:
        return status, zero9, p1
    ra = math.sqrt(a)
    p2 = (ra, 0.0, 1.0)
    p3 = (-ra, 0.0, 1.0)
    status, p0 = polar_intersection_k(C1, p1, p2)
    if status != ST_OK:
        return status, zero9, p1
    status, lam = solve_scales_k(p0, p1, p2, p3)
    if status != ST_OK:
        return status, zero9, p1
    return ST_OK, homography_k(p0, p1, p2, lam), p1


# -- Python-facing API -------------------------------------------------------


def classify_conic(inv):
    delta, kind = classify_k(float(inv.a), float(inv.m12))
    return ConicClass(delta, kind)


def select_points(inv, cls=None):
    """p1, p2, p3 on C1 as homogeneous 3-vectors (p0 left as None)."""
    if cls is None:
        cls = classify_conic(inv)
    status, x0, y0 = select_points_k(float(inv.a), float(inv.m12), float(inv.m23), cls.kind)
    raise_for_status(status, "no real point found on the first conic")
    ra = math.sqrt(inv.a)
    return ReferencePoints(
        None, np.array([x0, y0, 1.0]), np.array([ra, 0.0, 1.0]), np.array([-ra, 0.0, 1.0])
    )


def polar_intersection(C1, p1, p2):
    status, p0 = polar_intersection_k(as_mat(C1), as_vec(p1), as_vec(p2))
    raise_for_status(status, "polar lines coincide")
    return np.array(p0)


def solve_scales(p0, p1, p2, p3):
    status, lam = solve_scales_k(as_vec(p0), as_vec(p1), as_vec(p2), as_vec(p3))
    raise_for_status(status, "reference points do not form a projective frame")
    return lam


def build_homography(points):
    """Homography whose columns are ``lambda_i p_i``; fills in p0 when missing."""
    p0 = points.p0
    if p0 is None:
        raise ValueError("p0 must be set; use reference_frame() for the full pipeline")
    lam = solve_scales(p0, points.p1, points.p2, points.p3)
    H = homography_k(as_vec(p0), as_vec(points.p1), as_vec(points.p2), lam)
    return Homography(np.array(H).reshape(3, 3), lam, points)


def reference_frame(pair):
    """Select points on ``pair.C1``, add the pole p0 and build the homography."""
    pts = select_points(pair.inv)
    p0 = polar_intersection(pair.C1, pts.p1, pts.p2)
    return build_homography(ReferencePoints(p0, pts.p1, pts.p2, pts.p3))


def transform_conic2(C2, H):
    return TransformedConic(*transform_conic_k(as_mat(C2), as_mat(H)))
