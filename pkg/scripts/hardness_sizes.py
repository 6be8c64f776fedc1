"""Encode machine descriptions, report formula sizes and check them on the intended run."""

import argparse
import time

from rtlmosaic.hardness import canonical_run, encode_parts, formula_size, parse_tm, simulate
from rtlmosaic.oracle import eval_word


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("machines", nargs="+", help="machine description files")
    args = ap.parse_args()
    for path in args.machines:
        with open(path, encoding="utf-8") as fh:
            spec = parse_tm(fh.read())
        t0 = time.perf_counter()
        run = simulate(spec)
        word = canonical_run(spec)
        parts = encode_parts(spec)
        values = [eval_word(word, f)[1] for f in parts]
        size = sum(formula_size(f) for f in parts)
        failing = [k + 1 for k, ok in enumerate(values) if not ok]
        print(f"{path}: S={spec.space} B={spec.time} halts at {run.halted_at} "
              f"({'accept' if run.accepted else 'reject'}); size {size}; "
              f"word {len(word.regions)}+{len(word.loop)} regions; "
              f"false conjuncts {failing or 'none'}; {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
