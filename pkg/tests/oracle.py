"""Slow, independent reference implementations used only by the tests.

Real roots come from Sturm-sequence isolation plus bisection, not from any
closed form. Conic intersection eliminates x (not the transformed x' the
solver uses) and works on a quartic in y.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

BISECT_WIDTH = 1e-12
ZERO_RTOL = 1e-13
NEWTON_ITERS = 8


class OracleInconclusive(RuntimeError):
    pass


@dataclass(frozen=True)
class IsolatingInterval:
    lo: float
    hi: float
    sign_changes: int


@numba.njit(cache=True)
def _horner(p, deg, x):
    # p holds coefficients high-to-low in p[0..deg]
    v = 0.0
    for i in range(deg + 1):
        v = v * x + p[i]
    return v


def _primitive(p):
    g = math.gcd(*p)
    return [v // g for v in p] if g > 1 else p


def _sturm_chain(c):
    """Sturm chain of c (high-to-low) built in exact integer arithmetic.

    Row k holds a polynomial of degree degs[k], scaled to unit max and rounded
    to float only at the end. A float long division by a remainder with a tiny
    leading term cancels away the next remainder.
    """
    n = len(c) - 1
    ratios = [float(v).as_integer_ratio() for v in c]
    den = max(d for _, d in ratios)  # all powers of two
    rows = [_primitive([num * (den // d) for num, d in ratios])]
    if n >= 1:
        rows.append(_primitive([(n - i) * rows[0][i] for i in range(n)]))
    while len(rows) >= 2 and len(rows[-1]) > 1:
        a, b = list(rows[-2]), rows[-1]
        # pseudo-remainder scaled by |lead(b)|^k > 0, so signs survive
        lead = abs(b[0])
        sgn = 1 if b[0] > 0 else -1
        for i in range(len(a) - len(b) + 1):
            f = a[i] * sgn
            a = [v * lead for v in a]
            for j in range(len(b)):
                a[i + j] -= f * b[j]
        rem = a[len(a) - len(b) + 1 :]
        while rem and rem[0] == 0:
            rem.pop(0)
        if not rem:
            break  # exact division: chain ends at the gcd
        rows.append(_primitive([-v for v in rem]))
    chain = np.zeros((n + 1, n + 1))
    degs = np.full(n + 1, -1)
    for k, row in enumerate(rows):
        big = max(abs(v) for v in row)
        chain[k, : len(row)] = [v / big for v in row]
        degs[k] = len(row) - 1
    return chain, degs, len(rows)


@numba.njit(cache=True)
def _variations(chain, degs, count, x):
    v = 0
    last = 0.0
    for k in range(count):
        f = _horner(chain[k], degs[k], x)
        if f != 0.0:
            if last != 0.0 and (f > 0.0) != (last > 0.0):
                v += 1
            last = f
    return v


@numba.njit(cache=True)
def _newton(c, deg, x):
    fx = _horner(c, deg, x)
    for _ in range(NEWTON_ITERS):
        d = 0.0
        for i in range(deg):
            d = d * x + (deg - i) * c[i]
        if d == 0.0:
            break
        xn = x - fx / d
        fn = _horner(c, deg, xn)
        if not abs(fn) < abs(fx):
            break
        x, fx = xn, fn
    return x


@numba.njit(cache=True)
def _sturm_roots(c, chain, degs, count, lo, hi):
    """Distinct real roots of c in (lo, hi), ascending, plus the isolating intervals."""
    deg = len(c) - 1
    out = np.zeros(deg)
    ivl = np.zeros((deg, 3))
    if deg <= 0:
        return out[:0], ivl[:0]
    stack_lo = np.zeros(256)
    stack_hi = np.zeros(256)
    stack_lo[0] = lo
    stack_hi[0] = hi
    top = 1
    n = 0
    while top > 0:
        top -= 1
        a = stack_lo[top]
        b = stack_hi[top]
        va = _variations(chain, degs, count, a)
        vb = _variations(chain, degs, count, b)
        k = va - vb
        if k <= 0:
            continue
        width = b - a
        if k == 1 or width <= BISECT_WIDTH * max(1.0, abs(a)):
            # single root (or an unresolvable cluster reported once)
            x = _refine(c, deg, chain, degs, count, a, b)
            out[n] = _newton(c, deg, x)
            ivl[n, 0] = a
            ivl[n, 1] = b
            ivl[n, 2] = k
            n += 1
            continue
        mid = 0.5 * (a + b)
        if _horner(c, deg, mid) == 0.0:
            mid += 0.25 * width * 1e-3
        if top + 2 > 256:
            continue
        stack_lo[top] = mid
        stack_hi[top] = b
        stack_lo[top + 1] = a
        stack_hi[top + 1] = mid
        top += 2
    order = np.argsort(out[:n])
    return out[:n][order], ivl[:n][order]


@numba.njit(cache=True)
def _refine(c, deg, chain, degs, count, a, b):
    """Bisect an isolating interval down to BISECT_WIDTH."""
    fa = _horner(c, deg, a)
    fb = _horner(c, deg, b)
    use_sign = fa != 0.0 and fb != 0.0 and (fa > 0.0) != (fb > 0.0)
    vb = _variations(chain, degs, count, b)
    while b - a > BISECT_WIDTH * max(1.0, abs(a)):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if use_sign:
            fm = _horner(c, deg, m)
            if fm == 0.0:
                return m
            if (fm > 0.0) == (fa > 0.0):
                a, fa = m, fm
            else:
                b = m
        else:
            # even multiplicity: follow the Sturm count instead of the sign
            if _variations(chain, degs, count, m) - vb > 0:
                a = m
            else:
                b = m
    return 0.5 * (a + b)


def _strip(coeffs):
    """Scale to unit max-coefficient and drop leading coefficients below ZERO_RTOL."""
    c = np.asarray(coeffs, dtype=np.float64)
    big = np.max(np.abs(c)) if c.size else 0.0
    if big == 0.0:
        raise OracleInconclusive("zero polynomial")
    c = c / big
    k = 0
    while k < len(c) - 1 and abs(c[k]) <= ZERO_RTOL:
        k += 1
    return c[k:]


def root_bound(coeffs):
    """Twice the Cauchy bound: every real root lies well inside (-B, B).

    The plain bound is strict only in exact arithmetic; a root near 1/c[0]
    can sit within rounding of it.
    """
    c = _strip(coeffs)
    if len(c) == 1:
        return 1.0
    return 2.0 * (1.0 + float(np.max(np.abs(c[1:] / c[0]))))


def sturm_real_roots(coeffs, lo=None, hi=None, intervals=False):
    """All distinct real roots of a polynomial (coefficients high-to-low) in (lo, hi).

    Endpoints that hit a root exactly are nudged outward by 1e-12.
    """
    c = _strip(coeffs)
    if lo is None or hi is None:
        B = root_bound(c)
        lo = -B if lo is None else lo
        hi = B if hi is None else hi
    lo, hi = float(lo), float(hi)
    for _ in range(4):
        if np.polyval(c, lo) != 0.0:
            break
        lo -= 1e-12 * max(1.0, abs(lo))
    for _ in range(4):
        if np.polyval(c, hi) != 0.0:
            break
        hi += 1e-12 * max(1.0, abs(hi))
    roots, ivl = _sturm_roots(c, *_sturm_chain(c), lo, hi)
    if intervals:
        return [float(r) for r in roots], [IsolatingInterval(a, b, int(k)) for a, b, k in ivl]
    return [float(r) for r in roots]


def near_multiple_root(coeffs, rtol=1e-7):
    """True if some critical point c of p has |p(c)| < rtol * max|coeff|.

    Those polynomials sit within rounding of a root-count boundary, where no
    double-precision method can decide the count.
    """
    c = _strip(coeffs)
    scale = 1.0
    if len(c) < 3:
        return False
    dc = np.polyder(c)
    if np.count_nonzero(dc) == 0:
        return False
    for x in sturm_real_roots(dc):
        if abs(np.polyval(c, x)) < rtol * scale:
            return True
    return False


# -- conic intersection by elimination ---------------------------------------


def _normalized(C):
    C = np.asarray(C, dtype=np.float64)
    C = 0.5 * (C + C.T)
    if C[0, 0] == 0.0:
        raise OracleInconclusive("conic has no x^2 term")
    return C / C[0, 0]


def _residual(C, x, y):
    p = np.array([x, y, 1.0])
    return float(p @ C @ p)


def _exact_residual(C, x, y):
    """p^T C p in exact rational arithmetic, rounded once at the end."""
    p = (Fraction(x), Fraction(y), Fraction(1))
    return float(sum(Fraction(C[i, j]) * p[i] * p[j] for i in range(3) for j in range(3)))


def _exact_steps(C1, C2, x, y, iters=3):
    """Newton steered by exact residuals.

    Far from the origin the float residuals are pure rounding noise, which
    caps the float polish at roughly noise / smallest singular value of J.
    """
    f = np.array([_exact_residual(C1, x, y), _exact_residual(C2, x, y)])
    for _ in range(iters):
        p = np.array([x, y, 1.0])
        J = np.array([2.0 * (C1 @ p)[:2], 2.0 * (C2 @ p)[:2]])
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            break
        xn, yn = x - step[0], y - step[1]
        fn = np.array([_exact_residual(C1, xn, yn), _exact_residual(C2, xn, yn)])
        if not np.sum(np.abs(fn)) < np.sum(np.abs(f)):
            break
        x, y, f = xn, yn, fn
    return x, y


def _polish(C1, C2, x, y, iters=10):
    """Joint Newton on both conic equations, finished with exact residuals."""
    best = (x, y)
    best_r = abs(_residual(C1, x, y)) + abs(_residual(C2, x, y))
    for _ in range(iters):
        p = np.array([x, y, 1.0])
        g1 = 2.0 * (C1 @ p)[:2]
        g2 = 2.0 * (C2 @ p)[:2]
        J = np.array([g1, g2])
        f = np.array([p @ C1 @ p, p @ C2 @ p])
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            break
        x, y = x - step[0], y - step[1]
        r = abs(_residual(C1, x, y)) + abs(_residual(C2, x, y))
        if not np.isfinite(r):
            break
        if r < best_r:
            best, best_r = (x, y), r
    return _exact_steps(C1, C2, *best)


def eliminate_intersect(C1, C2, linear_rtol=1e-9):
    """All real affine intersection points of two conics.

    Subtracting the conics (scaled to a unit x^2 coefficient) cancels x^2 and
    leaves ``x * L(y) + N(y) = 0``. Substituting ``x = -N/L`` into the second
    conic times ``L^2`` gives a quartic in y.
    """
    A = _normalized(C1)
    B = _normalized(C2)
    D = A - B
    # x * (2 D01 y + 2 D02) + D11 y^2 + 2 D12 y + D22 = 0
    L = np.array([2.0 * D[0, 1], 2.0 * D[0, 2]])
    N = np.array([D[1, 1], 2.0 * D[1, 2], D[2, 2]])
    # B: x^2 + 2 B01 x y + 2 B02 x + B11 y^2 + 2 B12 y + B22
    Bx1 = np.array([2.0 * B[0, 1], 2.0 * B[0, 2]])  # coefficient of x, linear in y
    B0 = np.array([B[1, 1], 2.0 * B[1, 2], B[2, 2]])
    # N^2 - Bx1 N L + B0 L^2 = 0
    q = np.polysub(
        np.polyadd(np.polymul(N, N), np.polymul(B0, np.polymul(L, L))),
        np.polymul(Bx1, np.polymul(N, L)),
    )
    if np.max(np.abs(q)) == 0.0:
        raise OracleInconclusive("eliminant vanishes identically")
    points = []
    lscale = max(np.max(np.abs(L)), 1.0)

    def accept(x, y):
        x, y = _polish(A, B, x, y)
        scale = 1.0 + x * x + y * y
        if abs(_residual(A, x, y)) < 1e-10 * scale and abs(_residual(B, x, y)) < 1e-10 * scale:
            points.append((float(x), float(y)))
            return True
        return False

    for y in _eliminant_roots(q):
        Ly = np.polyval(L, y)
        degenerate = abs(Ly) <= linear_rtol * lscale * (1.0 + abs(y))
        if not degenerate and accept(-np.polyval(N, y) / Ly, y):
            continue
        # L(y) ~ 0 (two intersections share this y): x from the second conic
        bx = np.polyval(Bx1, y)
        s = math.sqrt(max(bx * bx - 4.0 * np.polyval(B0, y), 0.0))
        hits = [accept(0.5 * (-bx + s), y), accept(0.5 * (-bx - s), y)]
        if not any(hits) and degenerate:
            raise OracleInconclusive("linear coefficient vanishes at y=%r" % y)
    return _dedupe(points)


def _eliminant_roots(q, rtol=1e-11):
    """Sturm roots of q, plus critical points where q vanishes to rounding.

    Two intersections sharing a y value make a double root of q; rounding can
    merge it into one Sturm root or lift it off the axis entirely.
    """
    ys = sturm_real_roots(q)
    dq = np.polyder(q)
    if np.count_nonzero(dq):
        absq = np.abs(q)
        for c in sturm_real_roots(dq):
            if abs(np.polyval(q, c)) <= rtol * np.polyval(absq, abs(c)):
                ys.append(c)
    return ys


def _dedupe(points, tol=1e-9):
    out = []
    for p in sorted(points):
        if not any(
            abs(p[0] - q[0]) <= tol * (1 + abs(p[0])) and abs(p[1] - q[1]) <= tol * (1 + abs(p[1]))
            for q in out
        ):
            out.append(p)
    return out


def p3p_conics(a, b, m12, m13, m23):
    """The two depth-ratio conics, built from scratch (not from the package)."""
    C1 = np.array([[1.0, -m12, 0.0], [-m12, 1.0 - a, a * m23], [0.0, a * m23, -a]])
    C2 = np.array([[1.0, 0.0, -m13], [0.0, -b, b * m23], [-m13, b * m23, 1.0 - b]])
    return C1, C2
