#!/usr/bin/env python3
"""Run z3 on dumped .smt2 queries and print one verdict per file.

With --expect, every verdict must equal it. With --match-header, each
file's first comment line ("; loop name: verdict") must agree with z3
unless it says unknown. Exit 1 on a mismatch, 77 when z3 is missing.
"""
import argparse
import sys

try:
    import z3
except ImportError:
    print("z3 not available")
    sys.exit(77)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("files", nargs="+")
    ap.add_argument("--expect", choices=["sat", "unsat"])
    ap.add_argument("--match-header", action="store_true")
    args = ap.parse_args()
    bad = 0
    for path in args.files:
        s = z3.Solver()
        s.from_file(path)
        verdict = str(s.check())
        print(f"{verdict} {path}")
        if args.expect and verdict != args.expect:
            bad += 1
        if args.match_header:
            with open(path) as f:
                ours = f.readline().rsplit(":", 1)[-1].strip()
            if ours != "unknown" and ours != verdict:
                print(f"  mismatch: ours {ours}")
                bad += 1
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
