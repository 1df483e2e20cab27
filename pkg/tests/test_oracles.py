import pytest

from . import frozen, oracles


@pytest.fixture(scope="module")
def fresh():
    return oracles.compute_all()


@pytest.mark.parametrize("name", ["GAP_CONST_03", "GAP_CONST_025", "TC_CONST_03",
                                  "TC_CONST_025", "TC_SEP", "C_SEP"])
def test_frozen_values_reproduce(fresh, name):
    assert fresh[name] == pytest.approx(getattr(frozen, name), rel=1e-12)


def test_universal_constants_consistent():
    assert frozen.GAP_RATIO == pytest.approx(1.7638769, rel=1e-7)
    assert frozen.UNIVERSAL_RATIO == pytest.approx(5.9426, rel=1e-4)
