import pathlib

import hypothesis
import pytest

from devs_scc.campaign import load_tables
from devs_scc.parser import parse_bounds_file, parse_model_file

hypothesis.settings.register_profile("ci", deadline=None, max_examples=60)
hypothesis.settings.load_profile("ci")

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

ELEVATOR_SELECTIONS = [
    "cases",
    "extensional input",
    "extensional state:eng,d,ws,ds,a,sw,fc,nt",
    "standard ordcmp dint:6,7,13,14",
    "time chain:0,TD1,TD2,TA,TGF",
]

SODA_SELECTIONS = [
    "cases",
    "extensional state:m",
    "extensional input",
    "standard >= dext:2,3 ops:>=",
    "time chain:0,Tchg,Tret,Tincr",
]


@pytest.fixture(scope="session")
def soda():
    model, report = parse_model_file(str(FIXTURES / "soda.devs"))
    assert report.usable, report.errors
    return model


@pytest.fixture(scope="session")
def soda_bounds():
    return parse_bounds_file(str(FIXTURES / "soda.bounds"))


@pytest.fixture(scope="session")
def elevator():
    model, report = parse_model_file(str(FIXTURES / "elevator.devs"))
    assert report.usable, report.errors
    return model


@pytest.fixture(scope="session")
def elevator_bounds():
    return parse_bounds_file(str(FIXTURES / "elevator.bounds"))


@pytest.fixture(scope="session")
def elevator_tables():
    tables, notes = load_tables([str(FIXTURES / "elevator.parts")])
    assert notes == []
    return tables


@pytest.fixture(scope="session")
def toggle():
    model, report = parse_model_file(str(FIXTURES / "toggle.devs"))
    assert report.usable, report.errors
    return model


@pytest.fixture(scope="session")
def toggle_bounds():
    return parse_bounds_file(str(FIXTURES / "toggle.bounds"))
