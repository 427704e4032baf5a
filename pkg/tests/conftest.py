import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qsci.corpus import corpus_path
from qsci.integrals import load_fcidump


@pytest.fixture(scope="session")
def h2_store():
    return load_fcidump(corpus_path("h2_sto3g.fcidump"))


@pytest.fixture(scope="session")
def h4_store():
    """Equilibrium-spacing H4 chain."""
    return load_fcidump(corpus_path("h4_r0.90.fcidump"))


@pytest.fixture(scope="session")
def h4_stretched_store():
    """H4 chain at twice the equilibrium spacing."""
    return load_fcidump(corpus_path("h4_r1.80.fcidump"))


@pytest.fixture(scope="session")
def lih_store():
    return load_fcidump(corpus_path("lih_sto3g.fcidump"))


@pytest.fixture(scope="session")
def beh2_store():
    return load_fcidump(corpus_path("beh2_sto3g.fcidump"))
