import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from phicoin import epoch as ep  # noqa: E402


@pytest.fixture(scope="session")
def desk_ctx():
    return ep.build_light_cache(ep.DESK, 0)


@pytest.fixture(scope="session")
def desk_full(desk_ctx):
    return desk_ctx.materialize()


@pytest.fixture(scope="session")
def desk_ctx1():
    return ep.build_light_cache(ep.DESK, 1)
