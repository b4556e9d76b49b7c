#!/usr/bin/env python3
"""Regenerate (or check) the golden corpus.

Usage:
    python scripts/make_corpus.py            # rewrite corpus/ in place
    python scripts/make_corpus.py --check    # verify only; nonzero exit on mismatch
"""
import argparse
import sys

from tclean.goldens import check_goldens, default_corpus_dir, write_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check", action="store_true", help="verify instead of rewriting")
    parser.add_argument("--dir", default=None, help="corpus directory (default: repo corpus/)")
    args = parser.parse_args()
    target = args.dir or default_corpus_dir()
    if not args.check:
        write_corpus(target)
        print(f"wrote corpus to {target}")
    failures = 0
    for result in check_goldens(target):
        status = "PASS" if result.ok else "FAIL"
        print(f"{status} {result.name}" + ("" if result.ok else f": {result.message}"))
        failures += not result.ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
