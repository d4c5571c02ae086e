#!/usr/bin/env python3
"""Run the full law suite and print one table row per criterion."""

import argparse
import sys

from moritakit import lawsuite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--scale", choices=sorted(lawsuite._SCALES), default="small")
    args = ap.parse_args()

    results = lawsuite.run_all(seed=args.seed, scale=args.scale)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "ok  " if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  {r.seconds:6.2f}s  {r.detail}")
        failed += not r.passed
    print(f"\n{len(results) - failed}/{len(results)} criteria passed "
          f"(seed {args.seed}, scale {args.scale})")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
