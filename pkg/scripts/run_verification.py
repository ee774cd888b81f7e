#!/usr/bin/env python3
"""Run the full seeded verification battery and print its JSON report.

Exit code 0 means every applicable identity passed; 1 means at least one
failed; 2 means the input could not be processed.  Extra arguments are
passed through to the CLI, so e.g.

    python3 scripts/run_verification.py --seed 7 --format text

runs the same battery with a different curve sample.  The per-claim
acceptance battery lives in tests/test_acceptance.py and is run with
pytest, not with this script.
"""

import sys

from secondkind.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", "--suite", "full", *sys.argv[1:]]))
