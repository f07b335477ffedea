import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from toric_kahler import catalog  # noqa: E402

SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"

VALID = ["simplex", "halfspace", "interval01", "square", "wps112", "cone-square"]


@pytest.fixture(params=VALID)
def example(request):
    return catalog.EXAMPLES[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def spec_dir():
    return SPEC_DIR
