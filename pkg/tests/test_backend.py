"""The pure-Python fallback must give the same answers as the compiled kernels."""

import json
import os
import subprocess
import sys

import numpy as np

from conicp3p.bench.runner import evaluate_batch
from conicp3p.synthetic import gen_batch

SCRIPT = """
import json
from conicp3p import BACKEND
from conicp3p.bench.runner import evaluate_batch
from conicp3p.synthetic import gen_batch
counters, best, nsol = evaluate_batch(gen_batch(17, 150))
print(json.dumps({"backend": BACKEND, "counters": counters.tolist(), "best": best.tolist()}))
"""


def _run(disable):
    env = dict(os.environ)
    env.pop("CONICP3P_DISABLE_NUMBA", None)
    if disable:
        env["CONICP3P_DISABLE_NUMBA"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout)


def test_python_backend_matches_compiled():
    py = _run(disable=True)
    assert py["backend"] == "python"
    counters, best, _ = evaluate_batch(gen_batch(17, 150))
    assert py["counters"] == counters.tolist()
    # same IEEE operations in the same order; allow for libm differences only
    np.testing.assert_allclose(py["best"], best, rtol=0, atol=1e-13)


def test_flag_selects_backend():
    assert _run(disable=False)["backend"] == "numba"
