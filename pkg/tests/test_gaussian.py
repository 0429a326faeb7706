"""Normal-kernel tests against high-precision frozen oracles."""
import math

import pytest

from hyperberry import gaussian
from hyperberry.lattice import phi_dd_abs_integral, phi_dd_abs_integral_simpson

# frozen at 30 significant digits with mpmath
PHI_AT_0 = 0.3989422804014327
PHI_AT_1 = 0.24197072451914335
PHI_CDF_AT_2 = 0.9772498680518208
ABS_PHI_DD_TOTAL = 0.9678828980765734  # 4 * phi(1)


def test_phi_values():
    assert gaussian.phi(0.0) == pytest.approx(PHI_AT_0, abs=1e-15)
    assert gaussian.phi(1.0) == pytest.approx(PHI_AT_1, abs=1e-15)


def test_phi_even():
    for x in (0.3, 1.7, 4.2):
        assert gaussian.phi(x) == gaussian.phi(-x)


def test_Phi_values():
    assert gaussian.Phi(0.0) == 0.5
    assert gaussian.Phi(2.0) == pytest.approx(PHI_CDF_AT_2, abs=1e-15)
    assert gaussian.Phi(-2.0) == pytest.approx(1.0 - PHI_CDF_AT_2, abs=1e-15)


def test_Phi_symmetry_and_monotone():
    xs = [-8 + 0.05 * i for i in range(321)]
    for x in xs:
        assert gaussian.Phi(x) + gaussian.Phi(-x) == pytest.approx(1.0, abs=1e-15)
    values = [gaussian.Phi(x) for x in xs]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_phi_dd_values():
    assert gaussian.phi_dd(1.0) == 0.0
    assert gaussian.phi_dd(0.0) == pytest.approx(-PHI_AT_0, abs=1e-15)
    s3 = math.sqrt(3.0)
    assert gaussian.phi_dd(s3) == pytest.approx(2.0 * gaussian.phi(s3), rel=1e-14)


def test_mills_values():
    assert gaussian.mills_upper_tail(2.0) == pytest.approx(
        gaussian.phi(2.0) / 2.0, rel=1e-15
    )
    assert gaussian.mills_upper_tail(1.0) == pytest.approx(PHI_AT_1, rel=1e-14)
    with pytest.raises(ValueError):
        gaussian.mills_upper_tail(0.0)
    with pytest.raises(ValueError):
        gaussian.mills_upper_tail(-1.0)


def test_mills_dominates_tail():
    for i in range(1, 1001):
        x = 0.01 * i
        # cancellation-free upper-tail probability
        tail = 0.5 * math.erfc(x / math.sqrt(2.0))
        assert gaussian.mills_upper_tail(x) >= tail


def test_abs_phi_dd_integral_total():
    # whole-line value, closed form vs step-halving Simpson cross-check
    closed = phi_dd_abs_integral(-12.0, 12.0)
    assert closed == pytest.approx(ABS_PHI_DD_TOTAL, abs=1e-12)
    simpson = phi_dd_abs_integral_simpson(-12.0, 12.0, rtol=1e-10)
    assert simpson == pytest.approx(closed, abs=1e-9)
