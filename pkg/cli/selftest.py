import logging
from pathlib import Path

import pytest

logger = logging.getLogger(__name__)

TESTS_DIR = Path(__file__).parent.parent.absolute() / "tests"


def run_selftest(include_slow: bool = False) -> int:
    """Run the pytest suite in-process; returns pytest's exit status."""
    args = [str(TESTS_DIR), "-q"]
    if not include_slow:
        args += ["-m", "not slow"]
    logger.info(f"Running test suite in {TESTS_DIR}")
    return int(pytest.main(args))
