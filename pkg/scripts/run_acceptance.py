#!/usr/bin/env python3
"""Run the acceptance suite and show one pass/fail line per criterion."""
import subprocess
import sys
from pathlib import Path


def main() -> int:
    tests = Path(__file__).resolve().parents[1] / "tests" / "test_acceptance.py"
    return subprocess.call([sys.executable, "-m", "pytest", str(tests), "-v", "-s"])


if __name__ == "__main__":
    sys.exit(main())
