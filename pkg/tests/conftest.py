import warnings

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from resonator_synth.dispersive import SystemParams
from resonator_synth.fock import HilbertSpace, StateVector

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def scan_p():
    return SystemParams.from_cyclic(6.3, 7.7, 7.0, 70.0, 70.0, 7.0, 5, 5)


@pytest.fixture
def scan_small():
    return SystemParams.from_cyclic(6.3, 7.7, 7.0, 70.0, 70.0, 7.0, 2, 2)


def quiet_params(*args, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SystemParams.from_cyclic(*args, **kw)


spaces = st.builds(HilbertSpace, st.integers(0, 4), st.integers(0, 4))


@st.composite
def states(draw, space=None):
    space = space or draw(spaces)
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return StateVector(space, v / np.linalg.norm(v))


def random_state(space, rng):
    v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return StateVector(space, v / np.linalg.norm(v))


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
