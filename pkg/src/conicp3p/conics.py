"""Two-conic formulation of a P3P instance.

Dividing the three law-of-cosines constraints by the one on the pair (2, 3)
leaves two conics in the depth ratios ``x = d1/d3`` and ``y = d2/d3``::

    C1:  x^2 - 2 m12 x y + (1 - a) y^2 + 2 a m23 y - a = 0
    C2:  x^2 - b y^2 - 2 m13 x + 2 b m23 y + 1 - b = 0

with ``a = |X1-X2|^2 / |X2-X3|^2``, ``b = |X1-X3|^2 / |X2-X3|^2`` and
``m_ij`` the dot products of the unit bearings.
"""

from dataclasses import dataclass

import numpy as np

from ._jit import kernel
from .errors import ST_DEGENERATE_INSTANCE, ST_OK, raise_for_status
from .geom import dot_k, sub_k

DEGENERATE_RTOL = 1e-20


@dataclass(frozen=True)
class P3PInstance:
    """Three world points (rows of ``world``) and their unit bearings."""

    world: np.ndarray
    bearings: np.ndarray

    def __post_init__(self):
        world = np.array(self.world, dtype=np.float64).reshape(3, 3)
        bearings = np.array(self.bearings, dtype=np.float64).reshape(3, 3)
        norms = np.linalg.norm(bearings, axis=1)
        if np.any(norms == 0.0) or not np.all(np.isfinite(bearings)):
            raise ValueError("bearing vectors must be finite and non-zero")
        # m_i^T m_i = 1 is assumed by the conic coefficients, so renormalize
        bearings = bearings / norms[:, None]
        world.setflags(write=False)
        bearings.setflags(write=False)
        object.__setattr__(self, "world", world)
        object.__setattr__(self, "bearings", bearings)


@dataclass(frozen=True)
class ConicInvariants:
    a: float
    b: float
    m12: float
    m13: float
    m23: float

    def astuple(self):
        return (self.a, self.b, self.m12, self.m13, self.m23)


@dataclass(frozen=True)
class ConicPair:
    C1: np.ndarray
    C2: np.ndarray
    inv: ConicInvariants


def from_image_points(world, image):
    """Build an instance from world points and normalized image points (u, v)."""
    uv = np.asarray(image, dtype=np.float64).reshape(3, 2)
    lifted = np.column_stack([uv, np.ones(3)])
    return P3PInstance(world, lifted)


@kernel
def invariants_k(X1, X2, X3, m1, m2, m3):
    """Return ``(status, a, b, m12, m13, m23)``."""
    d12 = sub_k(X1, X2)
    d13 = sub_k(X1, X3)
    d23 = sub_k(X2, X3)
    s12 = dot_k(d12, d12)
    s13 = dot_k(d13, d13)
    s23 = dot_k(d23, d23)
    smax = max(s12, max(s13, s23))
    if not s23 > DEGENERATE_RTOL * smax:
        return ST_DEGENERATE_INSTANCE, 0.0, 0.0, 0.0, 0.0, 0.0
    return ST_OK, s12 / s23, s13 / s23, dot_k(m1, m2), dot_k(m1, m3), dot_k(m2, m3)


@kernel
def conics_k(a, b, m12, m13, m23):
    """Row-major matrices of the two conics (exactly symmetric)."""
    C1 = (1.0, -m12, 0.0, -m12, 1.0 - a, a * m23, 0.0, a * m23, -a)
    C2 = (1.0, 0.0, -m13, 0.0, -b, b * m23, -m13, b * m23, 1.0 - b)
    return C1, C2


def _rows(inst):
    X = inst.world
    m = inst.bearings
    return tuple(tuple(float(v) for v in row) for row in X) + tuple(
        tuple(float(v) for v in row) for row in m
    )


def compute_invariants(inst):
    status, a, b, m12, m13, m23 = invariants_k(*_rows(inst))
    raise_for_status(status, "world points 2 and 3 coincide")
    return ConicInvariants(a, b, m12, m13, m23)


def build_conics(inv):
    C1, C2 = conics_k(inv.a, inv.b, inv.m12, inv.m13, inv.m23)
    return ConicPair(np.array(C1).reshape(3, 3), np.array(C2).reshape(3, 3), inv)


def conic_residuals(inv, x, y):
    """Left-hand sides of both conic equations at ``(x, y)``."""
    a, b, m12, m13, m23 = inv.astuple()
    r1 = x * x - 2 * m12 * x * y + (1 - a) * y * y + 2 * a * m23 * y - a
    r2 = x * x - b * y * y - 2 * m13 * x + 2 * b * m23 * y + 1 - b
    return r1, r2
