"""JSON / CSV serialization for instances, solutions and benchmark reports."""

import csv
import json
import math

import numpy as np

from ..conics import from_image_points

REPORT_KEYS = ("errors", "counters", "histogram", "timing", "config")


class FormatError(ValueError):
    """Input file does not follow the expected schema."""


def _matrix(obj, key, shape):
    try:
        arr = np.asarray(obj[key], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("missing or non-numeric field %r" % key) from exc
    if arr.shape != shape:
        raise FormatError("field %r must have shape %s, got %s" % (key, shape, arr.shape))
    if not np.all(np.isfinite(arr)):
        raise FormatError("field %r contains non-finite values" % key)
    return arr


def instance_from_dict(obj):
    """``{"world": [[x,y,z]]*3, "image": [[u,v]]*3}`` -> P3PInstance."""
    if not isinstance(obj, dict):
        raise FormatError("instance must be a JSON object")
    return from_image_points(_matrix(obj, "world", (3, 3)), _matrix(obj, "image", (3, 2)))


def instance_to_dict(inst):
    m = inst.bearings
    return {
        "world": inst.world.tolist(),
        "image": (m[:, :2] / m[:, 2:3]).tolist(),
    }


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError("invalid JSON: %s" % exc) from exc
    return instance_from_dict(obj)


def solution_to_dict(output):
    return {
        "solutions": [
            {
                "R": [float(v) for v in np.asarray(s.pose.R).ravel()],
                "t": [float(v) for v in s.pose.t],
                "depths": [float(v) for v in s.depths.astuple()],
            }
            for s in output.solutions
        ],
        "diagnostic": output.diagnostic,
    }


def _clean(obj):
    """Replace non-finite floats with None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def report_skeleton(**parts):
    rep = {key: None for key in REPORT_KEYS}
    rep.update(parts)
    return rep


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_clean(obj), fh, indent=2, allow_nan=False)
        fh.write("\n")


def histogram_rows(hist):
    lo, w = hist["bin_low"], hist["width"]
    return [(lo + (k + 0.5) * w, c) for k, c in enumerate(hist["counts"])]


def write_histogram_csv(path, hist):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["bin_center_log10", "count"])
        for center, count in histogram_rows(hist):
            out.writerow(["%.3f" % center, count])
