"""Oracle kernels: numba vs pure numpy.

Times the per-stage expansion kernel on synthetic state tables and the full
oracle on random instances, once per backend.  Each backend runs in a fresh
interpreter because the choice is made at import time from
``PFFB_DISABLE_NUMBA``.

    python3 benchmarks/bench_oracle.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, random, sys, time
from fractions import Fraction
import numpy as np
from pffb import _kernels
from pffb.model import Instance
from pffb.oracle import _encode, optimal_permutation_schedule

repeat = int(sys.argv[1])
rng = np.random.default_rng(1)
out = {"backend": _kernels.backend()}

block_last, block_of = _encode(9, 3)
avail = np.sort(rng.integers(0, 10_000, size=(4_000, 9)), axis=1).astype(np.int64)
_kernels.expand_stage(avail[:2], block_last, block_of, 2, 37)  # compile
best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    _kernels.expand_stage(avail, block_last, block_of, 2, 37)
    best = min(best, time.perf_counter() - t0)
out["expand_stage_s"] = best

r = random.Random(9)
insts = []
for _ in range(20):
    s = r.randint(2, 3)
    insts.append(Instance.build([r.randint(1, 2) for _ in range(s)],
                                [r.randint(2, 3) for _ in range(s)],
                                [r.randint(1, 6) for _ in range(s)],
                                sorted(Fraction(r.randint(0, 24), 4) for _ in range(9))))
optimal_permutation_schedule(insts[0], "sumf")
best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    for inst in insts:
        optimal_permutation_schedule(inst, "sumf")
    best = min(best, time.perf_counter() - t0)
out["oracle_20_instances_s"] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, PFFB_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", CHILD, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    print(f"{'metric':<24}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for key in ("expand_stage_s", "oracle_20_instances_s"):
        print(f"{key:<24}{fast[key]:>12.4f}{slow[key]:>12.4f}{slow[key] / fast[key]:>9.1f}x")


if __name__ == "__main__":
    main()
