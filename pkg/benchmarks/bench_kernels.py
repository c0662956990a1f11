"""Timing comparison of the compiled kernels against the pure-Python twins.

Two workloads, chosen because they are the only loops the library runs
per circuit node or per assignment:

* maxplus_pass   one bottom-up max-plus evaluation of a large budget
                 circuit, the inner step of every AMC decision
* sat_masks      model enumeration sweep over all assignments of a
                 compiled random CNF

Run as `python benchmarks/bench_kernels.py [--repeats N]`.
"""

from __future__ import annotations

import argparse
import random
import statistics
import time
from array import array

from jagg import BudgetSpec, CnfFormula, compile_cnf_to_dnnf, encode_budget
from jagg._kernels import _core_py
from jagg.amc import _flat_labels, kemeny_labels
from jagg.model import Profile, default_issues

try:
    from jagg._kernels import _core
except ImportError:
    _core = None


def time_call(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def maxplus_workload():
    rng = random.Random(11)
    n, budget = 80, 300
    circ = encode_budget(BudgetSpec(tuple(rng.randint(1, 9) for _ in range(n)), budget))
    issues = default_issues(n)
    prof = Profile(issues, tuple(
        tuple(rng.randint(0, 1) for _ in range(n)) for _ in range(15)))
    lam = _flat_labels(circ, kemeny_labels(prof))
    kinds, lits, starts, flat = circ.flat()
    out = array("q", [0]) * len(kinds)

    def run(mod):
        return lambda: mod.maxplus_pass(kinds, lits, starts, flat, lam, out)

    label = f"maxplus_pass  budget n={n} B={budget} ({circ.node_count} nodes)"
    return label, run


def sat_masks_workload():
    rng = random.Random(12)
    n = 18
    f = CnfFormula(n, tuple(
        frozenset(rng.choice((1, -1)) * v
                  for v in rng.sample(range(1, n + 1), rng.choice((2, 3))))
        for _ in range(24)))
    circ = compile_cnf_to_dnnf(f)
    kinds, lits, starts, flat = circ.flat()

    def run(mod):
        return lambda: mod.sat_masks(kinds, lits, starts, flat, n, 0, 1 << n)

    label = f"sat_masks     cnf n={n} sweep of {1 << n} assignments"
    return label, run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if _core is None:
        print("compiled kernel not built; showing pure-Python timings only")
    rows = []
    for label, run in (maxplus_workload(), sat_masks_workload()):
        pure = time_call(run(_core_py), args.repeats)
        if _core is not None:
            comp = time_call(run(_core), args.repeats)
            rows.append((label, pure, comp, pure / comp))
        else:
            rows.append((label, pure, None, None))

    width = max(len(r[0]) for r in rows)
    header = f"{'workload':<{width}}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, pure, comp, speedup in rows:
        if comp is None:
            print(f"{label:<{width}}  {pure * 1000:>8.2f}ms  {'n/a':>10}  {'n/a':>8}")
        else:
            print(f"{label:<{width}}  {pure * 1000:>8.2f}ms  {comp * 1000:>8.2f}ms  "
                  f"{speedup:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
