#!/usr/bin/env python3
"""Reduce a handful of named group representations along both routes.

Prints one row per (group, carrier, constraint) cell: the reduced dimension,
the independent averaging-projector rank, and the worst certificate residual
across the two pipelines.
"""

import argparse
import sys

from moritakit.groups import cyclic, klein_four, symmetric
from moritakit.reduction import (
    cstar_reduce,
    pauli_rep,
    regular_rep,
    sign_rep,
    trivial_rep,
    wstar_reduce,
)


def cells():
    h2, h3, k4, s3 = cyclic(2), cyclic(3), klein_four(), symmetric(3)
    yield "Z/2", regular_rep(h2), trivial_rep(h2), "regular / trivial"
    yield "Z/3", regular_rep(h3), trivial_rep(h3), "regular / trivial"
    yield "S3", regular_rep(s3), trivial_rep(s3), "regular / trivial"
    yield "S3", regular_rep(s3), sign_rep(s3), "regular / sign"
    yield "Z/2xZ/2", regular_rep(k4), trivial_rep(k4), "regular / trivial"
    p = pauli_rep()
    yield "Z/2xZ/2", p, p, "pauli / pauli (projective)"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()

    print(f"{'group':<9} {'cell':<28} {'dim':>3} {'oracle':>6} {'residual':>10}")
    bad = 0
    for name, u, chi, label in cells():
        c = cstar_reduce(u, chi, args.tol)
        w = wstar_reduce(u, chi, args.tol)
        resid = max(c.residual, w.residual)
        ok = c.dim == w.dim == c.oracle_dim and resid <= args.tol
        bad += not ok
        flag = "" if ok else "  <-- MISMATCH"
        print(f"{name:<9} {label:<28} {c.dim:>3} {c.oracle_dim:>6} {resid:>10.2e}{flag}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
