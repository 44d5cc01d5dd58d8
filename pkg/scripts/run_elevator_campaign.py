#!/usr/bin/env python3
"""Full elevator campaign: all four criteria plus the worked combination
plan, artifacts under out/elevator/.

Expected shape: 88 base classes (35 cases + 31 extensional + 12 standard
partition + 10 time), 4 combinations numbered from 89, and two
undefined-transition findings in the output function (no case covers the
door-closed timer expiring while the called floor equals the current
one).
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
        "--model", str(FIXTURES / "elevator.devs"),
        "--bounds", str(FIXTURES / "elevator.bounds"),
        "--parts", str(FIXTURES / "elevator.parts"),
        "--plan", str(FIXTURES / "elevator.plan.json"),
        "--criteria", "cases",
        "--criteria", "extensional input",
        "--criteria", "extensional state:eng,d,ws,ds,a,sw,fc,nt",
        "--criteria", "standard ordcmp dint:6,7,13,14",
        "--criteria", "time chain:0,TD1,TD2,TA,TGF",
        "--out", str(ROOT / "out" / "elevator"),
    ]))
