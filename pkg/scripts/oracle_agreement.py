"""Compare decide_sat with bounded interval-word search on random core formulas."""

import argparse
import random
import sys
import time
from pathlib import Path

from rtlmosaic.formula import to_text
from rtlmosaic.oracle import sat_search
from rtlmosaic.rms import decide_sat

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from strategies import random_core_formula  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--max-length", type=int, default=7)
    ap.add_argument("--max-regions", type=int, default=5)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    counts = {"SAT": 0, "UNSAT": 0}
    modelled = disagree = 0
    t0 = time.perf_counter()
    for i in range(args.count):
        f = random_core_formula(rng, rng.randint(1, args.max_length))
        found = sat_search(f, args.max_regions)
        v = decide_sat(f, certificate=False)
        counts[v.status] += 1
        if found is not None:
            modelled += 1
            if v.status != "SAT":
                disagree += 1
                print(f"DISAGREE {to_text(f)} model {found[0]}", flush=True)
        if args.verbose:
            print(f"{i:4} {v.status:5} {'model' if found else '-':5} {to_text(f)}", flush=True)
    dt = time.perf_counter() - t0
    print(f"{args.count} formulas: {counts['SAT']} SAT, {counts['UNSAT']} UNSAT; "
          f"{modelled} with a word model, {disagree} disagreements; {dt:.1f}s")
    sys.exit(1 if disagree else 0)


if __name__ == "__main__":
    main()
