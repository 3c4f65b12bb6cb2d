"""Time the numba and numpy kernels on identical inputs and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json]

The first numba call includes compilation, so it is reported separately
("warmup") and excluded from the timed runs.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from pencil_lab import _kernels
from pencil_lab.fixtures import load_fixture

# (fixture, q): desk-scale sizes where numpy's chunked broadcasting is on par,
# then larger fields (and one extension field) where the compiled scan pulls ahead
CASES = [
    ("generic-odd-5", 7),
    ("nodal-even-6", 7),
    ("generic-even-6", 11),
    ("generic-even-6", 31),
    ("generic-odd-5", 81),
    ("generic-odd-5", 101),
]


def _time(fn, repeat: int) -> tuple[float, object]:
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_case(name: str, q: int, repeat: int) -> dict:
    p = load_fixture(name, q)
    F = p.field
    A1, A2 = p.a1, p.a2

    t0 = time.perf_counter()
    _kernels.base_locus_scan(F, A1, A2, use_numba=True)
    warmup = time.perf_counter() - t0

    t_numba, pts_numba = _time(lambda: _kernels.base_locus_scan(F, A1, A2, use_numba=True), repeat)
    t_numpy, pts_numpy = _time(lambda: _kernels.base_locus_scan(F, A1, A2, use_numba=False), repeat)
    scan_equal = np.array_equal(pts_numba, pts_numpy)

    rows1 = F.matmul(pts_numpy, A1)
    rows2 = F.matmul(pts_numpy, A2)
    w = pts_numpy[0] if len(pts_numpy) else np.zeros(p.N, dtype=np.int64)
    _kernels.orth_mask(F, rows1, rows2, w, use_numba=True)
    t_orth_numba, m_numba = _time(lambda: _kernels.orth_mask(F, rows1, rows2, w, use_numba=True), repeat)
    t_orth_numpy, m_numpy = _time(lambda: _kernels.orth_mask(F, rows1, rows2, w, use_numba=False), repeat)

    return {
        "fixture": name,
        "q": q,
        "N": p.N,
        "points": int(len(pts_numpy)),
        "scan_numba_s": round(t_numba, 6),
        "scan_numpy_s": round(t_numpy, 6),
        "scan_speedup": round(t_numpy / t_numba, 2) if t_numba > 0 else None,
        "orth_numba_s": round(t_orth_numba, 6),
        "orth_numpy_s": round(t_orth_numpy, 6),
        "numba_warmup_s": round(warmup, 3),
        "identical": bool(scan_equal and np.array_equal(m_numba, m_numpy)),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", action="store_true", help="print one JSON document instead of a table")
    args = parser.parse_args()
    if not _kernels._HAVE_NUMBA:
        print("numba is not importable; nothing to compare")
        return 1
    results = [bench_case(name, q, args.repeat) for name, q in CASES]
    if args.json:
        print(json.dumps(results, indent=2))
    else:
        header = f"{'fixture':<16}{'q':>4}{'N':>3}{'points':>8}{'numba s':>11}{'numpy s':>11}{'x':>8}  same"
        print(header)
        for r in results:
            print(
                f"{r['fixture']:<16}{r['q']:>4}{r['N']:>3}{r['points']:>8}"
                f"{r['scan_numba_s']:>11.4f}{r['scan_numpy_s']:>11.4f}{r['scan_speedup']:>8}  {r['identical']}"
            )
    return 0 if all(r["identical"] for r in results) else 1


if __name__ == "__main__":
    raise SystemExit(main())
