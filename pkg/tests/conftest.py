import pytest

from goevar import make_polynomial_testfn, make_weight


@pytest.fixture(scope="session")
def tf21():
    """The default test function: fhat = (1 - xi^2)^2 on [-1, 1]."""
    return make_polynomial_testfn(2, 1.0)


@pytest.fixture(scope="session")
def bspline4():
    return make_weight("bspline4")


@pytest.fixture(scope="session")
def fejer():
    return make_weight("fejer")
