"""Real roots of polynomials up to degree four, in closed form.

Only real branches are ever evaluated: every square-root argument is checked
for sign first and negative branches are dropped, so no complex arithmetic
appears anywhere. Quartics go through Ferrari's method (depress, resolvent
cubic, split into two real quadratics).

Root sets are returned as ``(count, (r0, r1, r2, r3))`` with the first
``count`` slots ascending and the rest zero-filled. Roots closer than
``MERGE_RTOL * (1 + |r|)`` are reported once.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import kernel
from .errors import ST_IDENTICALLY_ZERO, ST_OK, raise_for_status

MERGE_RTOL = 1e-9
CUBIC_DEGREE_RTOL = 1e-14
QUARTIC_DEGREE_RTOL = 1e-13
POLISH_MAX_ITER = 4
DEFLATE_RTOL = 1e-2
# backward error allowed in the equation a deflation leaves unused
DEFLATE_CHECK_RTOL = 1e-12
PEEL_MAX_ITER = 40
PEEL_CONVERGED = 4e-16


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients of ``c4 x^4 + c3 x^3 + c2 x^2 + c1 x + c0``."""

    c4: float
    c3: float
    c2: float
    c1: float
    c0: float


@dataclass(frozen=True)
class RealRoots:
    count: int
    roots: tuple

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return self.count


@kernel
def _put4(t, i, v):
    return (
        v if i == 0 else t[0],
        v if i == 1 else t[1],
        v if i == 2 else t[2],
        v if i == 3 else t[3],
    )


@kernel
def _insert_sorted(n, t, v):
    """Insert ``v`` into the first ``n`` (sorted) slots of ``t``, merging near-duplicates."""
    for i in range(n):
        if abs(t[i] - v) <= MERGE_RTOL * (1.0 + abs(v)):
            return n, t
    k = n
    while k > 0 and t[k - 1] > v:
        t = _put4(t, k, t[k - 1])
        k -= 1
    t = _put4(t, k, v)
    return n + 1, t


@kernel
def solve_quadratic_k(a, b, c):
    """Real roots of ``a x^2 + b x + c``; returns ``(status, count, r0, r1)``."""
    if a == 0.0:
        if b == 0.0:
            if c == 0.0:
                return ST_IDENTICALLY_ZERO, 0, 0.0, 0.0
            return ST_OK, 0, 0.0, 0.0
        return ST_OK, 1, -c / b, 0.0
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return ST_OK, 0, 0.0, 0.0
    if disc == 0.0:
        return ST_OK, 1, -0.5 * b / a, 0.0
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    r0 = q / a
    r1 = c / q
    if r0 > r1:
        r0, r1 = r1, r0
    if abs(r1 - r0) <= MERGE_RTOL * (1.0 + abs(r0)):
        return ST_OK, 1, 0.5 * (r0 + r1), 0.0
    return ST_OK, 2, r0, r1


@kernel
def solve_cubic_k(a, b, c, d):
    """Real roots of ``a x^3 + b x^2 + c x + d``; returns ``(status, count, roots4)``."""
    roots = (0.0, 0.0, 0.0, 0.0)
    scale = max(max(abs(a), abs(b)), max(abs(c), abs(d)))
    if not abs(a) > CUBIC_DEGREE_RTOL * scale:
        status, n, r0, r1 = solve_quadratic_k(b, c, d)
        return status, n, (r0, r1, 0.0, 0.0)
    # a small ``a`` pushes one root far out and leaves the others to
    # cancellation, so every root gets the guarded polish
    A = b / a
    B = c / a
    C = d / a
    Q = (A * A - 3.0 * B) / 9.0
    R = (A * (2.0 * A * A - 9.0 * B) + 27.0 * C) / 54.0
    shift = A / 3.0
    n = 0
    if Q > 0.0 and R * R <= Q * Q * Q:
        sq = math.sqrt(Q)
        cosarg = R / (sq * Q)
        if cosarg > 1.0:
            cosarg = 1.0
        elif cosarg < -1.0:
            cosarg = -1.0
        theta = math.acos(cosarg)
        for k in range(3):
            x = -2.0 * sq * math.cos((theta + 2.0 * math.pi * k) / 3.0) - shift
            x = _quartic_newton(0.0, a, b, c, d, x)
            n, roots = _insert_sorted(n, roots, x)
    else:
        S = -math.copysign(1.0, R) * math.pow(abs(R) + math.sqrt(R * R - Q * Q * Q), 1.0 / 3.0)
        T = Q / S if S != 0.0 else 0.0
        x = _quartic_newton(0.0, a, b, c, d, S + T - shift)
        n, roots = _insert_sorted(n, roots, x)
    return ST_OK, n, roots


@kernel
def _largest_cubic_root(p2, p1, p0):
    """Largest real root of the monic cubic ``m^3 + p2 m^2 + p1 m + p0``."""
    Q = (p2 * p2 - 3.0 * p1) / 9.0
    R = (p2 * (2.0 * p2 * p2 - 9.0 * p1) + 27.0 * p0) / 54.0
    shift = p2 / 3.0
    if Q > 0.0 and R * R <= Q * Q * Q:
        sq = math.sqrt(Q)
        cosarg = R / (sq * Q)
        if cosarg > 1.0:
            cosarg = 1.0
        elif cosarg < -1.0:
            cosarg = -1.0
        m = -2.0 * sq * math.cos((math.acos(cosarg) + 2.0 * math.pi) / 3.0) - shift
    else:
        S = -math.copysign(1.0, R) * math.pow(abs(R) + math.sqrt(R * R - Q * Q * Q), 1.0 / 3.0)
        T = Q / S if S != 0.0 else 0.0
        m = S + T - shift
    # two Newton steps; the resolvent root feeds every later square root
    for _ in range(2):
        f = ((m + p2) * m + p1) * m + p0
        df = (3.0 * m + 2.0 * p2) * m + p1
        if df == 0.0:
            break
        step = f / df
        if not math.isfinite(step):
            break
        m -= step
    return m


@kernel
def _quartic_newton(c4, c3, c2, c1, c0, x):
    """Newton polish on the original quartic, keeping only residual-reducing steps.

    Roots with |x| > 1 are polished as 1/x on the reversed polynomial, which
    keeps the arithmetic well scaled.
    """
    if abs(x) > 1.0:
        return 1.0 / _newton_steps(c0, c1, c2, c3, c4, 1.0 / x)
    return _newton_steps(c4, c3, c2, c1, c0, x)


@kernel
def _newton_steps(c4, c3, c2, c1, c0, x):
    f = (((c4 * x + c3) * x + c2) * x + c1) * x + c0
    for _ in range(POLISH_MAX_ITER):
        if f == 0.0:
            break
        df = ((4.0 * c4 * x + 3.0 * c3) * x + 2.0 * c2) * x + c1
        if df == 0.0:
            break
        xn = x - f / df
        fn = (((c4 * xn + c3) * xn + c2) * xn + c1) * xn + c0
        if not abs(fn) < abs(f):
            break
        x = xn
        f = fn
    return x


@kernel
def _poly_root(e, deg, x):
    """Newton to convergence on ``e`` (high-to-low, degree ``deg``); returns ``(x, ok)``."""
    for _ in range(PEEL_MAX_ITER):
        f = 0.0
        df = 0.0
        mag = 0.0
        ax = abs(x)
        for i in range(deg + 1):
            df = df * x + f
            f = f * x + e[i]
            mag = mag * ax + abs(e[i])
        if abs(f) <= PEEL_CONVERGED * mag:
            return x, True
        if df == 0.0:
            return x, False
        x -= f / df
        if not math.isfinite(x):
            return x, False
    return x, False


@kernel
def _peel(c4, c3, c2, c1, c0):
    """Roots of a quartic whose extreme coefficients are both tiny.

    Such a quartic has roots spread over many orders of magnitude and Ferrari's
    shift destroys the middle ones. A huge root (a small root of the reversed
    polynomial) is found by Newton and removed by backward deflation, a tiny
    root by Newton and forward deflation; what is left goes to the closed forms.
    A deflation whose unused equation is off by more than DEFLATE_CHECK_RTOL
    is dropped.
    Returns unpolished ``(n, roots4)``.
    """
    e = np.empty(5)
    e[0] = c4
    e[1] = c3
    e[2] = c2
    e[3] = c1
    e[4] = c0
    q = np.empty(5)
    deg = 4
    n = 0
    roots = (0.0, 0.0, 0.0, 0.0)
    while deg > 2:
        sc = 0.0
        for i in range(deg + 1):
            sc = max(sc, abs(e[i]))
        if abs(e[0]) >= DEFLATE_RTOL * sc or e[1] == 0.0:
            break
        rev = e[: deg + 1][::-1].copy()
        z, ok = _poly_root(rev, deg, -e[0] / e[1])
        if not ok or z == 0.0:
            break
        R = 1.0 / z
        q[deg - 1] = -e[deg] / R
        for k in range(deg - 1, 0, -1):
            q[k - 1] = (q[k] - e[k]) / R
        # Newton may land on a moderate root when no huge one exists
        if abs(q[0] - e[0]) > DEFLATE_CHECK_RTOL * sc:
            break
        for i in range(deg):
            e[i] = q[i]
        deg -= 1
        roots = _put4(roots, n, R)
        n += 1
    while deg > 2:
        sc = 0.0
        for i in range(deg + 1):
            sc = max(sc, abs(e[i]))
        if abs(e[deg]) >= DEFLATE_RTOL * sc or e[deg - 1] == 0.0:
            break
        r, ok = _poly_root(e, deg, -e[deg] / e[deg - 1])
        if not ok:
            break
        q[0] = e[0]
        for k in range(1, deg):
            q[k] = e[k] + r * q[k - 1]
        if abs(e[deg] + r * q[deg - 1]) > DEFLATE_CHECK_RTOL * sc:
            break
        for i in range(deg):
            e[i] = q[i]
        deg -= 1
        roots = _put4(roots, n, r)
        n += 1
    if deg == 4:
        k, rest = _ferrari(e[0], e[1], e[2], e[3], e[4])
    elif deg == 3:
        st, k, rest = solve_cubic_k(e[0], e[1], e[2], e[3])
    else:
        st, k, r0, r1 = solve_quadratic_k(e[0], e[1], e[2])
        rest = (r0, r1, 0.0, 0.0)
    for j in range(k):
        roots = _put4(roots, n, rest[j])
        n += 1
    return n, roots


@kernel
def _ferrari(c4, c3, c2, c1, c0):
    """Unpolished real roots of a quartic with a non-negligible leading coefficient."""
    A = c3 / c4
    B = c2 / c4
    C = c1 / c4
    D = c0 / c4
    # depressed quartic z^4 + p z^2 + q z + r with x = z - A/4
    A2 = A * A
    p = B - 0.375 * A2
    q = C - 0.5 * A * B + 0.125 * A2 * A
    r = D - 0.25 * A * C + 0.0625 * A2 * B - 0.01171875 * A2 * A2
    shift = 0.25 * A

    # resolvent: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0, want its largest root (>= 0)
    m = _largest_cubic_root(p, 0.25 * p * p - r, -0.125 * q * q)

    n = 0
    roots = (0.0, 0.0, 0.0, 0.0)
    if m > 0.0:
        s = math.sqrt(2.0 * m)
        t = q / (2.0 * s)
        base = 0.5 * p + m
        # z^2 - s z + (base + t) = 0  and  z^2 + s z + (base - t) = 0
        for sgn in (-1.0, 1.0):
            st, k, z0, z1 = solve_quadratic_k(1.0, sgn * s, base - sgn * t)
            if k >= 1:
                roots = _put4(roots, n, z0 - shift)
                n += 1
            if k == 2:
                roots = _put4(roots, n, z1 - shift)
                n += 1
    else:
        # q == 0: biquadratic in z
        st, k, w0, w1 = solve_quadratic_k(1.0, p, r)
        for j in range(k):
            w = w0 if j == 0 else w1
            if w >= 0.0:
                z = math.sqrt(w)
                roots = _put4(roots, n, z - shift)
                roots = _put4(roots, n + 1, -z - shift)
                n += 2
    return n, roots


@kernel
def solve_quartic_k(c4, c3, c2, c1, c0):
    """Real roots of ``c4 x^4 + c3 x^3 + c2 x^2 + c1 x + c0``.

    Returns ``(status, count, roots4)``. A leading coefficient below
    QUARTIC_DEGREE_RTOL of the largest coefficient drops to the cubic path.
    When |c0| > |c4| the reversed polynomial (roots 1/x) is solved instead:
    dividing by a small c4 would smear the large roots' magnitude over the
    others, while the reversed form sees them as small roots near zero.
    """
    scale = max(max(max(abs(c4), abs(c3)), max(abs(c2), abs(c1))), abs(c0))
    if scale == 0.0:
        return ST_IDENTICALLY_ZERO, 0, (0.0, 0.0, 0.0, 0.0)
    if not abs(c4) > QUARTIC_DEGREE_RTOL * scale:
        return solve_cubic_k(c3, c2, c1, c0)

    flip = abs(c0) > abs(c4)
    lead = abs(c0) if flip else abs(c4)
    if lead < DEFLATE_RTOL * scale:
        flip = False
        k, raw = _peel(c4, c3, c2, c1, c0)
    elif flip:
        k, raw = _ferrari(c0, c1, c2, c3, c4)
    else:
        k, raw = _ferrari(c4, c3, c2, c1, c0)
    n = 0
    roots = (0.0, 0.0, 0.0, 0.0)
    for j in range(k):
        x = raw[j]
        if flip:
            if x == 0.0:
                continue
            x = 1.0 / x
        x = _quartic_newton(c4, c3, c2, c1, c0, x)
        n, roots = _insert_sorted(n, roots, x)
    return ST_OK, n, roots


# -- Python-facing API -------------------------------------------------------


def _pack(status, n, roots, what):
    raise_for_status(status, "%s is identically zero" % what)
    return RealRoots(n, tuple(float(r) for r in roots[:n]))


def solve_quadratic_real(a, b, c):
    status, n, r0, r1 = solve_quadratic_k(float(a), float(b), float(c))
    return _pack(status, n, (r0, r1), "quadratic")


def solve_cubic_real(a, b, c, d):
    status, n, roots = solve_cubic_k(float(a), float(b), float(c), float(d))
    return _pack(status, n, roots, "cubic")


def solve_quartic_real(q):
    """Real roots of a quartic given as QuarticCoeffs or a 5-sequence (c4..c0)."""
    if isinstance(q, QuarticCoeffs):
        coeffs = (q.c4, q.c3, q.c2, q.c1, q.c0)
    else:
        coeffs = tuple(q)
    status, n, roots = solve_quartic_k(*(float(c) for c in coeffs))
    return _pack(status, n, roots, "quartic")
