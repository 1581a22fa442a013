import pytest
from mpmath import mp


@pytest.fixture(autouse=True)
def _fixed_precision():
    old = mp.prec
    mp.prec = 128
    yield
    mp.prec = old
