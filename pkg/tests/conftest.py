import pytest

from mcde.specdsl import parse_expr, parse_monomial, parse_spec
from mcde.suite import HEADER


def spec(*statements: str, header: str = HEADER):
    return parse_spec(header + "\n".join(statements))


@pytest.fixture
def base():
    return spec()


def E(rules, text):
    return parse_expr(rules, text)


def M(rules, text):
    return parse_monomial(rules, text)
