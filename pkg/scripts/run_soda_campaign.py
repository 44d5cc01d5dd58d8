#!/usr/bin/env python3
"""Soda machine campaign with every criterion applied, artifacts under
out/soda/.

The report's findings reproduce the machine's missing cases: a product
requested with insufficient money, and coins inserted while the machine
is finishing or cancelling an operation.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from devs_scc.cli import main

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

if __name__ == "__main__":
    sys.exit(main([
        "campaign",
        "--model", str(FIXTURES / "soda.devs"),
        "--bounds", str(FIXTURES / "soda.bounds"),
        "--criteria", "cases",
        "--criteria", "extensional state:m",
        "--criteria", "extensional input",
        "--criteria", "standard >= dext:2,3 ops:>=",
        "--criteria", "time chain:0,Tchg,Tret,Tincr",
        "--probe-k", "4",
        "--out", str(ROOT / "out" / "soda"),
    ]))
