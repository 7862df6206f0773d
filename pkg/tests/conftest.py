import math

import numpy as np
import pytest
from hypothesis import settings

from diracosc import ModelParams, PacketSpec, initial_state

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def p05():
    return ModelParams(0.5)


@pytest.fixture
def linear_zeta2():
    """Linear packet with zeta = 2 (z0 = 2 sqrt 2), tilted spin."""
    return PacketSpec.linear(2 * math.sqrt(2), 0.0, 1.1)


def make_state(spec, rep="dirac"):
    return initial_state(spec, rep)


def grid(tmax, n):
    return np.linspace(0.0, tmax, n)


ACCEPTANCE = []


def report(label, ok, detail=""):
    """Record one acceptance line; printed in the terminal summary."""
    ACCEPTANCE.append(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip())
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
