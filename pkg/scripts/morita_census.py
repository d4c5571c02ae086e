#!/usr/bin/env python3
"""Partition the small-groupoid catalog into Morita classes.

Enumerates every groupoid up to the given size bounds (one per isomorphism
class), groups them by Morita equivalence, and prints each class with the
arrow counts of its members.  Classes are decided by the bibundle search,
so each merge is certified by an explicit biprincipal witness.
"""

import argparse
import sys

from moritakit.groupoids import groupoid_catalog, morita_equivalent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-objects", type=int, default=2)
    ap.add_argument("--max-arrows", type=int, default=8)
    args = ap.parse_args()

    cat = groupoid_catalog(args.max_objects, args.max_arrows)
    classes: list[list] = []
    for g in cat:
        for cls in classes:
            if morita_equivalent(cls[0], g) is not None:
                cls.append(g)
                break
        else:
            classes.append([g])

    print(f"{len(cat)} groupoids with <= {args.max_objects} objects and "
          f"<= {args.max_arrows} arrows fall into {len(classes)} Morita classes\n")
    for i, cls in enumerate(sorted(classes, key=len, reverse=True)):
        shapes = ", ".join(
            f"{len(g.objects)}obj/{len(g.arrows)}arr" for g in cls
        )
        print(f"class {i + 1:>2} ({len(cls)} member{'s' if len(cls) > 1 else ''}): {shapes}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
