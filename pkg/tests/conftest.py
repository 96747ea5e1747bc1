from __future__ import annotations

import pytest

from loceff.loader import load
from loceff.parser import parse_comp, parse_template, parse_type, parse_value
from loceff.syntax import BOOL, UNIT, Signature

CHOOSE = Signature.of({"choose": (UNIT, BOOL)})
YIELD = Signature.of({"yield": (BOOL, UNIT)})


@pytest.fixture(scope="session")
def nondet():
    return load("nondet.lae")


@pytest.fixture(scope="session")
def pickleft():
    return load("pickleft.lae")


@pytest.fixture(scope="session")
def yieldall():
    return load("yieldall.lae")


@pytest.fixture(scope="session")
def collect():
    return load("collect.lae")


def C(text, prog=None):
    return parse_comp(text, getattr(prog, "program", prog))


def V(text, prog=None):
    return parse_value(text, getattr(prog, "program", prog))


def T(text, prog=None):
    return parse_type(text, getattr(prog, "program", prog))


def TM(text, prog=None):
    return parse_template(text, getattr(prog, "program", prog))


def closed(loaded, text):
    """An inline computation with program definitions substituted."""
    return loaded.program.closed(parse_comp(text, loaded.program))
