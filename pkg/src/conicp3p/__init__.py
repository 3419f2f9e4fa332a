"""P3P camera pose from three point correspondences via a conic transformation.

The two distance constraints on the depth ratios are conics; one is mapped to
the canonical parabola ``y = x^2`` by a projective change of coordinates, which
turns the intersection into a single quartic solved in closed form.

Set ``CONICP3P_DISABLE_NUMBA=1`` before import to run the kernels as plain
Python instead of numba-compiled code.
"""

from ._jit import BACKEND
from .conics import (
    ConicInvariants,
    ConicPair,
    P3PInstance,
    build_conics,
    compute_invariants,
    from_image_points,
)
from .errors import P3PError
from .geom import Pose
from .quartic import QuarticCoeffs, RealRoots, solve_quartic_real
from .solver import (
    DepthTriple,
    PoseSolution,
    SolverOutput,
    intersect_conics,
    recover_depths,
    recover_pose,
    refine_depths,
    solve_p3p,
)
from .transform import classify_conic, reference_frame, transform_conic2

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConicInvariants",
    "ConicPair",
    "DepthTriple",
    "P3PError",
    "P3PInstance",
    "Pose",
    "PoseSolution",
    "QuarticCoeffs",
    "RealRoots",
    "SolverOutput",
    "build_conics",
    "classify_conic",
    "compute_invariants",
    "from_image_points",
    "intersect_conics",
    "recover_depths",
    "recover_pose",
    "refine_depths",
    "reference_frame",
    "solve_p3p",
    "solve_quartic_real",
    "transform_conic2",
]
