import numpy as np
import pytest

from metaori.config import evaluate_design, preset_config
from metaori.integrate import integrate
from metaori.mechanics import MaterialParams, metashell_fd


@pytest.fixture(scope="session")
def paper():
    return preset_config("paper")


@pytest.fixture(scope="session")
def biseg():
    return preset_config("paper-biseg")


@pytest.fixture(scope="session")
def paper_eval(paper):
    return evaluate_design(paper)


@pytest.fixture(scope="session")
def paper_meta_fd(paper):
    return metashell_fd(paper.metashell, paper.material)


@pytest.fixture(scope="session")
def paper_assembly(paper):
    return integrate(paper.metashell, paper.kresling, paper.integration,
                     validate=True)


@pytest.fixture(scope="session")
def biseg_sequence(biseg):
    from metaori.mechanics import simulate_sequence
    return simulate_sequence(biseg.segments, biseg.material, n_steps=300)
