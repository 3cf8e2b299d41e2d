"""Time the hot kernels on the numba path and on the plain Python fallback.

Each path runs in its own interpreter, since the switch is read at import.
Results from both paths are compared before any timing is reported.

    python3 benchmarks/bench_kernels.py --tmax 400 --repeat 3
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import hashlib, json, sys, time
import numpy as np
from lengthspec import _jit, _kernels
from lengthspec.forms import _spf_for, class_numbers

tmax, repeat = int(sys.argv[1]), int(sys.argv[2])
ds = sorted({t * t - 4 for t in range(3, tmax + 1)})
spf = _spf_for(max(ds))
arr = np.asarray(ds, dtype=np.int64)
dk = ds[-1]

def timed(fn):
    fn()  # compile / warm caches
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out

res = {"numba": _jit.HAVE_NUMBA}
t, hs = timed(lambda: _kernels.count_cycles_batch(arr, spf))
res["class_numbers"] = t
res["h_digest"] = hashlib.sha1(np.asarray(hs, dtype=np.int64).tobytes()).hexdigest()
t, row = timed(lambda: _kernels.kronecker_row(np.int64(dk), dk))
res["kronecker_row"] = t
res["chi_digest"] = hashlib.sha1(np.asarray(row, dtype=np.int8).tobytes()).hexdigest()
t, _ = timed(lambda: _kernels.spf_sieve(1 << 18))
res["spf_sieve"] = t
print(json.dumps(res))
"""


def run(no_numba, tmax, repeat):
    env = dict(os.environ, LENGTHSPEC_NO_NUMBA="1" if no_numba else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, str(tmax), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tmax", type=int, default=400, help="discriminants t^2 - 4 for t <= tmax")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="print raw timings as JSON")
    args = ap.parse_args(argv)

    jit = run(False, args.tmax, args.repeat)
    py = run(True, args.tmax, args.repeat)
    if not jit["numba"]:
        print("numba unavailable; both runs used the Python path", file=sys.stderr)
    if (jit["h_digest"], jit["chi_digest"]) != (py["h_digest"], py["chi_digest"]):
        print("numba and Python paths disagree", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps({"numba": jit, "python": py}, indent=1))
        return 0
    print(f"{'kernel':<16}{'numba s':>12}{'python s':>12}{'speedup':>10}")
    for k in ("class_numbers", "kronecker_row", "spf_sieve"):
        print(f"{k:<16}{jit[k]:>12.5f}{py[k]:>12.5f}{py[k] / jit[k]:>10.1f}")
    print(f"outputs identical ({args.tmax - 2} discriminants)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
