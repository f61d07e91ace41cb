import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from multiorder import tiling

BUILTIN_NAMES = ["dyadic_standard", "dyadic_alternating", "hilbert"]


@pytest.fixture(scope="session")
def builtins():
    return {name: tiling.builtin(name) for name in BUILTIN_NAMES}


@pytest.fixture(scope="session")
def data_dir():
    return Path(__file__).parent / "data"
