"""Compare the numba-compiled kernels with the pure-Python fallback.

The backend is fixed at import time, so each one runs in its own
interpreter. Both solve the same seeded trials; the script reports the
per-solve time of each and checks that the per-trial counters agree.

    python benchmarks/bench_backends.py --samples 2000 --reps 5
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from conicp3p import BACKEND
from conicp3p.bench.runner import BenchConfig, evaluate_batch, run_timing
from conicp3p.synthetic import gen_batch

samples, reps, seed = (int(v) for v in sys.argv[1:4])
batch = gen_batch(seed, samples)
t0 = time.perf_counter()
counters, best, _ = evaluate_batch(batch)
accuracy_s = time.perf_counter() - t0
timing = run_timing(BenchConfig(samples=samples, seed=seed, timing_reps=reps), batch,
                    warmup=min(samples, 200))["timing"]
print(json.dumps({
    "backend": BACKEND,
    "accuracy_pass_s": accuracy_s,
    "timing": timing,
    "counters": counters.sum(axis=0).tolist(),
    "checksum": float(np.sum(best[np.isfinite(best)])),
}))
"""


def run_backend(disable, samples, reps, seed):
    env = dict(os.environ)
    env.pop("CONICP3P_DISABLE_NUMBA", None)
    if disable:
        env["CONICP3P_DISABLE_NUMBA"] = "1"
    cmd = [sys.executable, "-c", WORKER, str(samples), str(reps), str(seed)]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--json", help="also write the results here")
    args = p.parse_args(argv)

    results = [run_backend(flag, args.samples, args.reps, args.seed) for flag in (False, True)]
    print("%-8s %14s %14s %12s" % ("backend", "mean ns/solve", "median ns", "accuracy s"))
    for r in results:
        t = r["timing"]
        print("%-8s %14.1f %14.1f %12.3f" % (r["backend"], t["mean_ns"], t["median_ns"],
                                             r["accuracy_pass_s"]))  # fmt: skip
    fast, slow = results
    print("speedup (mean): %.1fx" % (slow["timing"]["mean_ns"] / fast["timing"]["mean_ns"]))
    same = fast["counters"] == slow["counters"]
    print("counters agree: %s" % same)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
