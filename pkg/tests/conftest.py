import numpy as np
import pytest

from diracphase.model import DiracModel, MomentumGrid, default_potential


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_model():
    return DiracModel.build(MomentumGrid(nmax=4), 1.0, default_potential(0.1, 1.0))


@pytest.fixture(scope="session")
def small_path(small_model):
    from diracphase.evolve import evolve_schrodinger, interaction_picture
    sp = evolve_schrodinger(small_model.D0, small_model.V, 1.0, tol=1e-11)
    return interaction_picture(sp)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
