import pytest

from normlift.padic_core import field_make


@pytest.fixture(scope="session")
def q3():
    """Z_3 at precision 8, sized for series up to T^32."""
    return field_make(3, N=8, series_order=32)


@pytest.fixture(scope="session")
def q2():
    return field_make(2, N=8, series_order=24)


@pytest.fixture(scope="session")
def q5():
    return field_make(5, N=8, series_order=24)


@pytest.fixture(scope="session")
def q9():
    """Unramified quadratic extension of Z_3, u^2 = -1."""
    return field_make(3, f=2, unram_poly=[1, 0, 1], N=6, series_order=16)


@pytest.fixture(scope="session")
def ram3():
    """Z_3[pi] with pi^2 = 3."""
    return field_make(3, e=2, eis_poly=[-3, 0, 1], N=8, series_order=16)
