#!/usr/bin/env python3
"""Full mixed-population sweep with both ledger arms.

Writes the complete default-grid bundle (5 exchange levels x 3 learning
rates x ledger on/off x 50 runs x 500 days) plus the final-day
significance table. Takes roughly a quarter hour on one core.

Usage: python scripts/run_full_grid.py [out_dir] [seed]
"""

import sys

from slotswap.cli import main

if __name__ == "__main__":
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "output/full-grid"
    seed = sys.argv[2] if len(sys.argv) > 2 else "42"
    sys.exit(main(["--out-dir", out_dir, "--seed", seed]))
