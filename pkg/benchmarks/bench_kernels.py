"""Timing comparison of the numba and pure-python kernel backends.

Each workload runs in a fresh subprocess with SPREADLAB_BACKEND forced, so
the import-time backend choice is honored.  Usage:

    python3 benchmarks/bench_kernels.py [--repeat N] [--backends numba,python]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKLOADS = {
    "normal_scan_desarguesian_3_2_3": """
        from spreadlab.fieldreduction import desarguesian_spread
        from spreadlab import spreads
        S = desarguesian_spread(3, 2, 3)
        spreads.validate_spread(S)
        t0 = time.perf_counter()
        n = len(spreads.normal_indices(S))
        dt = time.perf_counter() - t0
        assert n == 91
    """,
    "additive_search_order_16": """
        from spreadlab import spreadsets
        t0 = time.perf_counter()
        res = spreadsets.search_closed_spread_sets(2, 4, "addition")
        dt = time.perf_counter() - t0
        assert len(res) == 56
    """,
    "sperner_line_scan_s3_dickson": """
        from spreadlab import sperner, spreads, spreadsets
        M = spreadsets.spread_set_from_quasifield(spreadsets.dickson_nearfield(3, 2))
        T = sperner.build_sperner(spreads.construct_S_r(M, 3))
        t0 = time.perf_counter()
        rows = sperner.normal_line_scan(T)
        dt = time.perf_counter() - t0
        assert sum(r["normal"] for r in rows) == 3
    """,
    "closure_full_plane_pg2_25": """
        from spreadlab.closure import closure
        from spreadlab.gf import gf_of_order
        f = gf_of_order(25)
        t0 = time.perf_counter()
        pts = closure(f, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 5, 0)])
        dt = time.perf_counter() - t0
        assert len(pts) == 651
    """,
}


def run_one(backend: str, body: str, repeat: int) -> dict:
    script = "import time\nbest = None\nfor _ in range(%d):\n" % repeat
    script += textwrap.indent(textwrap.dedent(body).strip(), "    ") + "\n"
    script += "    best = dt if best is None else min(best, dt)\n"
    script += "print(__import__('json').dumps({'seconds': best}))\n"
    env = dict(os.environ, SPREADLAB_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", script], env=env,
                          capture_output=True, text=True, timeout=1800)
    if proc.returncode != 0:
        raise RuntimeError(f"{backend} run failed:\n{proc.stderr}")
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2,
                    help="runs per workload; best time wins (default 2)")
    ap.add_argument("--backends", default="numba,python")
    args = ap.parse_args(argv)
    backends = [b.strip() for b in args.backends.split(",") if b.strip()]

    width = max(len(k) for k in WORKLOADS)
    header = f"{'workload'.ljust(width)}  " + "  ".join(f"{b:>10}" for b in backends)
    if len(backends) == 2:
        header += "  " + f"{'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, body in WORKLOADS.items():
        times = []
        for b in backends:
            times.append(run_one(b, body, args.repeat)["seconds"])
        row = f"{name.ljust(width)}  " + "  ".join(f"{t:>9.3f}s" for t in times)
        if len(times) == 2 and times[0] > 0:
            row += f"  {times[1] / times[0]:>7.1f}x"
        print(row, flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
