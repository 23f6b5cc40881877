"""Throughput comparison: compiled decoder kernels vs the NumPy fallback.

Run:  python3 benchmarks/bench_kernels.py [--blocks B] [--list-size L]

Both backends are imported directly so one process measures both; the
workloads are identical arrays, and outputs are cross-checked for equality
before timing is reported (a benchmark of two implementations that disagree
would be meaningless).
"""

import argparse
import time

import numpy as np

from semlink._kernels import _polar_py
from semlink.polar import construct_code

try:
    from semlink._kernels import _polar_c
except ImportError:
    _polar_c = None


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--blocks", type=int, default=256,
                        help="blocks per batched call (default 256)")
    parser.add_argument("--list-size", type=int, default=8,
                        help="list size for the list-decoder row (default 8)")
    parser.add_argument("--n", type=int, default=1024,
                        help="code length (default 1024)")
    args = parser.parse_args()

    code = construct_code(args.n, args.n // 2)
    rng = np.random.default_rng(1)
    u = np.zeros((args.blocks, code.n_codeword), dtype=np.uint8)
    u[:, code.info_set] = rng.integers(
        0, 2, size=(args.blocks, code.info_set.size), dtype=np.uint8)
    x = _polar_py.encode_blocks(u)
    llrs = 2.0 * ((1.0 - 2.0 * x) + 0.7 * rng.standard_normal(x.shape)) / 0.49

    backends = [("python", _polar_py)]
    if _polar_c is not None:
        backends.append(("compiled", _polar_c))
    else:
        print("compiled extension not built; showing fallback only")

    results = {}
    for name, impl in backends:
        enc = _time(lambda: impl.encode_blocks(u))
        sc = _time(lambda: impl.sc_decode_blocks(llrs, code.frozen_mask))
        scl = _time(lambda: [
            impl.scl_decode(llrs[i], code.frozen_mask, args.list_size)
            for i in range(min(args.blocks, 16))])
        results[name] = (enc, sc, scl)

    if len(backends) == 2:
        a = _polar_py.sc_decode_blocks(llrs, code.frozen_mask)
        b = _polar_c.sc_decode_blocks(llrs, code.frozen_mask)
        assert np.array_equal(a, b), "backends disagree; timings are invalid"

    bits = args.blocks * code.n_codeword
    scl_blocks = min(args.blocks, 16)
    print(f"\nN={code.n_codeword} K={code.k_info} "
          f"batch={args.blocks} blocks, SCL L={args.list_size} "
          f"on {scl_blocks} blocks\n")
    header = f"{'kernel':<22}{'python':>14}{'compiled':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    rows = [
        ("encode (Mbit/s)", 0, lambda t: bits / t / 1e6),
        ("SC decode (Mbit/s)", 1, lambda t: bits / t / 1e6),
        ("SCL decode (blk/s)", 2, lambda t: scl_blocks / t),
    ]
    for label, idx, rate in rows:
        py = rate(results["python"][idx])
        if "compiled" in results:
            comp = rate(results["compiled"][idx])
            ratio = comp / py
            print(f"{label:<22}{py:>14.1f}{comp:>14.1f}{ratio:>9.1f}x")
        else:
            print(f"{label:<22}{py:>14.1f}{'-':>14}{'-':>10}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
