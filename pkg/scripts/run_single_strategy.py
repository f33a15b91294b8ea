#!/usr/bin/env python3
"""Pure-population baselines: selfish, flexible without ledger, flexible
with ledger. Produces the three bundles behind the single-strategy
comparison heatmaps.

Usage: python scripts/run_single_strategy.py [out_root] [seed]
"""

import sys

from slotswap.cli import main

RUNS = [
    ("selfish", ["--scenario", "selfish", "--social-capital", "on"]),
    ("social-no-ledger", ["--scenario", "social", "--social-capital", "off"]),
    ("social-ledger", ["--scenario", "social", "--social-capital", "on"]),
]

if __name__ == "__main__":
    out_root = sys.argv[1] if len(sys.argv) > 1 else "output/single-strategy"
    seed = sys.argv[2] if len(sys.argv) > 2 else "42"
    for name, extra in RUNS:
        code = main(
            ["--out-dir", f"{out_root}/{name}", "--seed", seed,
             "--learning-rates", "0", *extra]
        )
        if code != 0:
            sys.exit(code)
    sys.exit(0)
