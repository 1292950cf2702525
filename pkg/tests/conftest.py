import pathlib

import pytest

from cqa_engine.core import Database, Query, load_database, load_query
from cqa_engine.mgraph import MCycle

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture_query(name: str) -> Query:
    return load_query(str(FIXTURES / name))


def fixture_db(name: str, q: Query) -> Database:
    return load_database(str(FIXTURES / name), q.schemas)


@pytest.fixture
def c3() -> Query:
    return fixture_query("c3.cqa")


@pytest.fixture
def c3_cycle(c3: Query) -> MCycle:
    return MCycle.of(c3, ["R", "S", "T"])


@pytest.fixture
def dbgt(c3: Query) -> Database:
    return fixture_db("fig1.facts", c3)


@pytest.fixture
def q1() -> Query:
    return fixture_query("q1.cqa")


@pytest.fixture
def dbq1(q1: Query) -> Database:
    return fixture_db("fig3.facts", q1)


@pytest.fixture
def rs() -> Query:
    return fixture_query("rs.cqa")


@pytest.fixture
def rs_cycle(rs: Query) -> MCycle:
    return MCycle.of(rs, ["R", "S"])


@pytest.fixture
def rs_db(rs: Query) -> Database:
    return fixture_db("rs.facts", rs)


@pytest.fixture
def qsat() -> Query:
    return fixture_query("qsat.cqa")


@pytest.fixture
def mov() -> Query:
    return fixture_query("mov.cqa")


@pytest.fixture
def strong_pair() -> Query:
    return fixture_query("strong_pair.cqa")


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES
