import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from zenoprop import recursion


@pytest.fixture(scope="session")
def default_run():
    """The full 20-projection recursion at the default grid, shared by the
    saw-tooth acceptance checks (it is the expensive fixture of the suite).
    Yields (config, envelope curve, wall-clock seconds of the run)."""
    cfg = recursion.default_config()
    start = time.monotonic()
    curve = recursion.run_recursion(cfg)
    elapsed = time.monotonic() - start
    return cfg, curve, elapsed


@pytest.fixture(scope="session")
def coarse_run():
    """A budget recursion for unit-level checks: coarser grid, 6 projections."""
    cfg = recursion.default_config(n_max=6, spacing_scale=4e-3)
    return cfg, recursion.run_recursion(cfg)
