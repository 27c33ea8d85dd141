import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from saddlelab import builtin_surface
from saddlelab.experiments import growth_fit
from saddlelab.surface import BUILTIN_NAMES


@pytest.fixture(scope="session")
def torus():
    return builtin_surface("square-torus")


@pytest.fixture(scope="session")
def octagon():
    return builtin_surface("regular-octagon")


@pytest.fixture(scope="session")
def l_surface():
    return builtin_surface("L-shaped(2,2)")


@pytest.fixture(scope="session")
def double_pentagon():
    return builtin_surface("double-pentagon")


@pytest.fixture(scope="session")
def all_builtins():
    return [builtin_surface(name) for name in BUILTIN_NAMES]


_FIT_CACHE = {}


@pytest.fixture(scope="session")
def fitted_constants():
    """Per-surface envelope constants (c1, c2), fitted once per session."""

    def fit(surface):
        if surface.name not in _FIT_CACHE:
            _FIT_CACHE[surface.name] = growth_fit(surface, (10.0, 15.0, 22.0, 33.0, 50.0))
        return _FIT_CACHE[surface.name]

    return fit
