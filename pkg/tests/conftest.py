import os

# Tests never write log files; set before app.utils.config is first imported.
os.environ["SINGINT_LOG_TO_FILE"] = "false"

from pathlib import Path

import pytest

from app.core.geometric import builtin_theory, load_theory
from app.services.selftest import GOLDEN_DIR, load_golden

THEORIES_DIR = Path(__file__).parent.parent / "app" / "theories"


@pytest.fixture
def g():
    return builtin_theory("G")


@pytest.fixture
def g_eq():
    return builtin_theory("G_eq")


@pytest.fixture
def spo():
    return builtin_theory("SPO")


@pytest.fixture
def two_preds():
    return load_theory(str(THEORIES_DIR / "two_preds.thy"))


@pytest.fixture(scope="session")
def golden():
    return load_golden()


@pytest.fixture
def golden_text():
    def read(name):
        return (GOLDEN_DIR / name).read_text(encoding="utf-8")
    return read
