"""Compare the compiled kernels against the pure-Python fallback.

Runs the same three ensemble workloads in two subprocesses, one with
QCTRANS_NO_NUMBA=1, and prints a wall-time table.  The first pass in each
child is a warm-up (it absorbs JIT compilation) and is not timed.

Usage: python3 benchmarks/bench_modes.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

_CHILD = r"""
import json, sys, time
import qctrans as qt

repeat = int(sys.argv[1])

def scenario(name, **patch):
    doc = qt.preset_doc(name)
    for key, val in patch.items():
        sec, _, leaf = key.partition(".")
        doc.setdefault(sec, {})[leaf] = val
    return qt.build_scenario(doc, name=name)

cases = {
    # finite-difference force, no closed Q available
    "double_slit_fd_force": scenario("fig1_quantum"),
    # closed-form force on the entangled-state quantum potential
    "oscillator_closed_force": scenario("fig3_meso_a"),
    # long-span Coulomb transition, closed force, tight tolerances
    "hydrogen_transition": scenario(
        "fig8", **{"time.end": 250.0, "time.n_outputs": 251,
                   "coupling.t0": 125.0}
    ),
}

out = {"numba": qt.NUMBA_ENABLED, "times": {}}
for name, sc in cases.items():
    qt.run_ensemble(sc, compute_metrics=False)  # warm-up, absorbs JIT
    best = min(
        (lambda t0: (qt.run_ensemble(sc, compute_metrics=False), time.perf_counter() - t0)[1])(
            time.perf_counter()
        )
        for _ in range(repeat)
    )
    out["times"][name] = best
print(json.dumps(out))
"""


def _run(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env["QCTRANS_NO_NUMBA"] = "1" if no_numba else "0"
    proc = subprocess.run(
        [sys.executable, "-c", _CHILD, str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="timed passes per case (best-of)")
    args = ap.parse_args()

    jit = _run(no_numba=False, repeat=args.repeat)
    pure = _run(no_numba=True, repeat=args.repeat)
    if not jit["numba"]:
        print("warning: numba unavailable, both columns run the fallback", file=sys.stderr)

    w = max(len(k) for k in jit["times"])
    print(f"{'case':<{w}}  {'numba':>10}  {'pure-python':>12}  {'speedup':>8}")
    for name, tj in jit["times"].items():
        tp = pure["times"][name]
        print(f"{name:<{w}}  {tj:>9.3f}s  {tp:>11.3f}s  {tp / tj:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
