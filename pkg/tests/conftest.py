from __future__ import annotations

import pytest
from hypothesis import settings

settings.register_profile("kvh", max_examples=25, deadline=None)
settings.load_profile("kvh")


@pytest.fixture(scope="session")
def ho():
    from kvh import harmonic

    return harmonic()


@pytest.fixture(scope="session")
def quart():
    from kvh import quartic

    return quartic()
