"""Time one full-length modexp on the compiled and pure-Python kernels.

    python3 benchmarks/compare_backends.py --bits 512 1024 2048 4096
"""
import argparse
import json

from pmkrsa import _backend
from pmkrsa.bench import compare_backends
from pmkrsa.primegen import Drbg


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--bits", type=int, nargs="+", default=[512, 1024, 2048, 4096])
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    rows = compare_backends(args.bits, reps=args.reps, rng=Drbg(bytes(32)))
    if args.json:
        print(json.dumps({"active": _backend.NAME, "rows": rows}, indent=2))
        return
    print(f"active backend: {_backend.NAME}")
    print(f"{'bits':>6} {'cython (ms)':>12} {'python (ms)':>12} {'speed-up':>9}")
    for row in rows:
        cy = row.get("cython_s")
        print(f"{row['bits']:>6} {cy * 1e3 if cy else float('nan'):>12.3f} "
              f"{row['python_s'] * 1e3:>12.3f} {row.get('speedup', float('nan')):>9.1f}")


if __name__ == "__main__":
    main()
