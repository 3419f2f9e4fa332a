"""Exception types and the integer status codes used inside compiled kernels.

Kernels never raise; they return one of the ``ST_*`` codes below. The thin
Python wrappers translate a non-zero code into the matching exception.
"""

ST_OK = 0
ST_SINGULAR_MATRIX = 1
ST_ZERO_VECTOR = 2
ST_DEGENERATE_INSTANCE = 3
ST_POINT_SELECTION_FAILURE = 4
ST_DEGENERATE_POLE = 5
ST_COLLINEAR_REFERENCE = 6
ST_ZERO_SCALE = 7
ST_NO_POSITIVE_INTERSECTION = 8
ST_DEGENERATE_DEPTH = 9
ST_SINGULAR_GEOMETRY = 10
ST_IDENTICALLY_ZERO = 11


class P3PError(Exception):
    """Base class for all errors raised by conicp3p."""

    status = -1


class SingularMatrix(P3PError):
    status = ST_SINGULAR_MATRIX


class ZeroVector(P3PError):
    status = ST_ZERO_VECTOR


class DegenerateInstance(P3PError):
    status = ST_DEGENERATE_INSTANCE


class PointSelectionFailure(P3PError):
    status = ST_POINT_SELECTION_FAILURE


class DegeneratePole(P3PError):
    status = ST_DEGENERATE_POLE


class CollinearReferencePoints(P3PError):
    status = ST_COLLINEAR_REFERENCE


class ZeroScale(P3PError):
    status = ST_ZERO_SCALE


class NoPositiveIntersection(P3PError):
    status = ST_NO_POSITIVE_INTERSECTION


class DegenerateDepth(P3PError):
    status = ST_DEGENERATE_DEPTH


class SingularGeometry(P3PError):
    status = ST_SINGULAR_GEOMETRY


class IdenticallyZero(P3PError):
    status = ST_IDENTICALLY_ZERO


_BY_STATUS = {
    cls.status: cls
    for cls in (
        SingularMatrix,
        ZeroVector,
        DegenerateInstance,
        PointSelectionFailure,
        DegeneratePole,
        CollinearReferencePoints,
        ZeroScale,
        NoPositiveIntersection,
        DegenerateDepth,
        SingularGeometry,
        IdenticallyZero,
    )
}

# Diagnostic names reported by the solver for each status code.
DIAGNOSTICS = {
    ST_OK: "Ok",
    ST_SINGULAR_MATRIX: "SingularMatrix",
    ST_ZERO_VECTOR: "ZeroVector",
    ST_DEGENERATE_INSTANCE: "DegenerateInstance",
    ST_POINT_SELECTION_FAILURE: "PointSelectionFailure",
    ST_DEGENERATE_POLE: "DegeneratePole",
    ST_COLLINEAR_REFERENCE: "CollinearReferencePoints",
    ST_ZERO_SCALE: "ZeroScale",
    ST_NO_POSITIVE_INTERSECTION: "NoPositiveIntersection",
    ST_DEGENERATE_DEPTH: "DegenerateDepth",
    ST_SINGULAR_GEOMETRY: "SingularGeometry",
    ST_IDENTICALLY_ZERO: "IdenticallyZero",
}


def raise_for_status(status, message=""):
    """Raise the exception matching a kernel status code (no-op for ST_OK)."""
    if status == ST_OK:
        return
    cls = _BY_STATUS.get(status, P3PError)
    raise cls(message or DIAGNOSTICS.get(status, "error %d" % status))
