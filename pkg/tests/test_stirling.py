"""Certified-enclosure machinery: standardization, the factorial sandwich,
applicability gating, and enclosure containment against the exact oracle."""
import math

import mpmath
import pytest

from hyperberry import exact, stirling
from hyperberry.grids import round_count
from hyperberry.params import HypParams


def exact_stirling_eps(m: int) -> float:
    """Arbitrary-precision log m! minus the Stirling main term."""
    with mpmath.workdps(60):
        v = mpmath.log(mpmath.factorial(m)) - (
            0.5 * mpmath.log(2 * mpmath.pi) - m + (m + mpmath.mpf(0.5)) * mpmath.log(m)
        )
        return float(v)


class TestStandardize:
    def test_center_instance(self):
        s = stirling.standardize(HypParams(100, 100, 200), 55)
        assert s.x_kn == pytest.approx(1.0, abs=1e-14)
        assert s.a_kn == pytest.approx(0.4, abs=1e-14)
        assert s.x_tilde == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_zero_at_mean(self):
        s = stirling.standardize(HypParams(100, 100, 200), 50)
        assert s.x_kn == 0.0 and s.a_kn == 0.0 and s.x_tilde == 0.0

    def test_small_instance(self):
        s = stirling.standardize(HypParams(2, 2, 4), 2)
        assert s.x_kn == pytest.approx(math.sqrt(2.0), rel=1e-14)
        assert s.x_tilde == pytest.approx(2.0, rel=1e-14)

    def test_coordinate_identities(self):
        params = HypParams(37, 61, 150)
        root_npq = math.sqrt(params.npq)
        for k in range(params.support_min, params.support_max + 1):
            s = stirling.standardize(params, k)
            assert s.a_kn * (1 - params.f) * root_npq == pytest.approx(
                s.x_kn, rel=1e-13, abs=1e-15
            )
            assert s.x_tilde == pytest.approx(
                s.x_kn / math.sqrt(1 - params.f), rel=1e-14, abs=1e-15
            )
            assert s.x_tilde * params.sigma + params.mean == pytest.approx(
                k, rel=1e-12
            )


class TestStirlingEps:
    def test_first_values(self):
        b1 = stirling.stirling_eps_bounds(1)
        assert (b1.lo, b1.hi) == (1 / 13, 1 / 12)
        assert b1.lo < exact_stirling_eps(1) == pytest.approx(0.081061466795, rel=1e-10)
        assert exact_stirling_eps(1) < b1.hi
        b2 = stirling.stirling_eps_bounds(2)
        assert (b2.lo, b2.hi) == (1 / 25, 1 / 24)
        assert b2.lo < exact_stirling_eps(2) < b2.hi

    def test_sandwich_up_to_500(self):
        for m in range(1, 501):
            b = stirling.stirling_eps_bounds(m)
            assert b.lo < exact_stirling_eps(m) < b.hi

    def test_limit_behavior(self):
        assert stirling.stirling_eps_bounds(10**6).hi < 1e-7

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            stirling.stirling_eps_bounds(0)
        with pytest.raises(ValueError):
            stirling.stirling_eps_bounds(-3)


class TestApplicability:
    def test_center_passes(self):
        flags = stirling.check_applicability(HypParams(100, 100, 200), 55, 0.5)
        assert flags.ok

    def test_far_point_fails_window(self):
        flags = stirling.check_applicability(HypParams(100, 100, 200), 80, 0.5)
        assert not flags.a_within_delta
        assert flags.failed() == ["a_within_delta"]

    def test_tiny_np_still_passes_condition(self):
        # np = 0.5, 6*min(np, nq) = 3 >= 1
        flags = stirling.check_applicability(HypParams(2, 1, 4), 1, 0.5)
        assert flags.min_npnq_ok

    def test_delta_domain(self):
        p = HypParams(100, 100, 200)
        with pytest.raises(ValueError):
            stirling.check_applicability(p, 50, 0.0)
        with pytest.raises(ValueError):
            stirling.check_applicability(p, 50, 0.6)

    def test_refusal_names_gate(self):
        with pytest.raises(stirling.ApplicabilityError) as err:
            stirling.certified_pmf(HypParams(100, 100, 200), 80, 0.5)
        assert "a_within_delta" in str(err.value)


class TestCertifiedPmf:
    def test_center_spot_value(self):
        params = HypParams(100, 100, 200)
        cert = stirling.certified_pmf(params, 50, 0.5)
        assert cert.rem_bound == pytest.approx(2 / 75, rel=1e-9)
        assert cert.value == pytest.approx(1 / math.sqrt(2 * math.pi * 12.5), rel=1e-14)
        v = float(exact.pmf_fraction(params, 50))
        assert cert.lo <= v <= cert.hi

    def test_containment_nearby(self):
        params = HypParams(100, 100, 200)
        cert = stirling.certified_pmf(params, 55, 0.5)
        assert cert.lo <= float(exact.pmf_fraction(params, 55)) <= cert.hi

    def test_containment_small_grid(self):
        for N in (50, 100, 200):
            for pv in (0.1, 0.3, 0.5):
                for fv in (0.1, 0.3, 0.5):
                    params = HypParams(
                        n=round_count(fv, N), M=round_count(pv, N), N=N
                    )
                    for delta in (0.05, 0.25, 0.5):
                        for k in range(params.support_min, params.support_max + 1):
                            if not stirling.check_applicability(params, k, delta).ok:
                                continue
                            cert = stirling.certified_pmf(params, k, delta)
                            v = float(exact.pmf_fraction(params, k))
                            assert cert.lo <= v <= cert.hi, (params, k, delta)

    def test_monotone_degradation(self):
        params = HypParams(500, 500, 1000)
        center = params.n * params.M // params.N
        prev = -1.0
        for k in range(center, params.support_max + 1):
            if not stirling.check_applicability(params, k, 0.5).ok:
                break
            rem = stirling.remainder_bound(params, k, 0.5)
            assert rem >= prev
            prev = rem

    def test_rate_content_at_mode(self):
        # at the center the remainder is O(1/sigma^2)
        for N in (100, 400, 1000, 2000):
            params = HypParams(N // 2, N // 2, N)
            m = exact.mode(params)
            rem = stirling.remainder_bound(params, m, 0.5)
            assert rem * params.sigma2 < 3.0


class TestMainTerm:
    def test_gaussian_identity(self):
        params = HypParams(150, 60, 300)
        for k in range(params.support_min, params.support_max + 1):
            lhs = math.exp(stirling.log_main_term(params, k))
            rhs = stirling.gaussian_main_term(params, k)
            if rhs > 0:
                assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_center_values(self):
        assert stirling.gaussian_main_term(HypParams(100, 100, 200), 50) == (
            pytest.approx(0.1128379167, rel=1e-9)
        )
        assert stirling.gaussian_main_term(HypParams(2, 2, 4), 1) == pytest.approx(
            0.7978845608, rel=1e-9
        )
