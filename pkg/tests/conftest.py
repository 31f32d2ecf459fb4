import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from awcd import _accel  # noqa: E402


@pytest.fixture(params=[True, False], ids=["numba", "numpy"])
def backend(request):
    """Run a test once per kernel backend."""
    prev = _accel.use_numba(request.param)
    yield request.param
    _accel.use_numba(prev)
