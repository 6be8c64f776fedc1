"""Decide the verdict corpus and the cut formula, printing verdicts and timings."""

import argparse
import time

from rtlmosaic.rms import decide_sat, decide_valid

CORPUS = [
    ("sat", "p"),
    ("sat", "p & !p"),
    ("sat", "U(p, p & !p)"),
    ("sat", "F p & G !p"),
    ("valid", "F p -> F F p"),
    ("valid", "U(p,q) -> F p"),
]
CUT = "p & F !p & U(p,p) & G(!p -> G !p) & G((p & F !p) -> U(p,p)) & G(!p -> S(!p,!p))"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--skip-cut", action="store_true", help="leave out the slow cut formula")
    args = ap.parse_args()
    jobs = CORPUS + ([] if args.skip_cut else [("sat", CUT)])
    for mode, text in jobs:
        t0 = time.perf_counter()
        v = (decide_sat if mode == "sat" else decide_valid)(text, certificate=False)
        dt = time.perf_counter() - t0
        print(f"{mode:5} {v.status:7} {dt:8.2f}s  ledger={v.stats['ledger_size']:<6} "
              f"last={v.stats['last_tag']:<3} {text}", flush=True)


if __name__ == "__main__":
    main()
