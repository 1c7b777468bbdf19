import logging

import numpy as np
import pytest

from finsler.norms import QNorm, quadratic


@pytest.fixture(autouse=True)
def _detach_log_handlers():
    """Entry points attach handlers bound to the current stderr; drop them per test."""
    yield
    for name in ("finsler", "finsler.analyze", "finsler.suite"):
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def diag41():
    return quadratic([[4.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def sym53():
    return quadratic([[5.0, 3.0], [3.0, 5.0]])


@pytest.fixture
def diag411():
    return quadratic(np.diag([4.0, 1.0, 1.0]))


@pytest.fixture
def q4():
    return QNorm(4.0, 2)

