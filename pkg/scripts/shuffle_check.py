"""Exhaustive comparison of the two shuffle checkers (s <= 1, r <= 1, lambda length <= 2)."""

import argparse
import sys
import time
from pathlib import Path

from rtlmosaic.formula import closure, desugar, parse
from rtlmosaic.mosaic import MosaicSpace

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
import shuffle_exhaustive  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("formulas", nargs="*", default=["p", "U(p,q)"])
    args = ap.parse_args()
    failed = False
    for text in args.formulas:
        sp = MosaicSpace(closure(desugar(parse(text))))
        t0 = time.perf_counter()
        rep = shuffle_exhaustive.run(sp)
        dt = time.perf_counter() - t0
        print(f"Cl({text}): {rep.specs} specs, {rep.definitional_calls} definitional calls, "
              f"{rep.agree_true} both true, {len(rep.disagreements)} disagreements, {dt:.1f}s")
        for d in rep.disagreements:
            print("  ", d)
        failed |= bool(rep.disagreements)
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
