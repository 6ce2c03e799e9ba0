import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hetcomp import analysis as an
from hetcomp.model import TierConfig, reference_tiers


def test_distance_ratio_moment_values(rng):
    assert an.distance_ratio_moment(1, 2.7) == pytest.approx(1.0)
    assert an.distance_ratio_moment(2, 2.0) == pytest.approx(1 / 3)
    y = np.cumsum(rng.standard_exponential((10**6, 5)), axis=1)
    assert an.distance_ratio_moment(5, 1.75) == pytest.approx(np.mean((y[:, 0] / y[:, 4]) ** 1.75), rel=0.01)


def test_expected_distance_values(rng):
    lam = 3e-4
    assert an.expected_mth_distance(1, lam) == pytest.approx(1 / (2 * math.sqrt(lam)))
    y = np.cumsum(rng.standard_exponential((10**6, 2)), axis=1)
    assert an.expected_mth_distance(2, 1 / math.pi) == pytest.approx(1.32934, rel=1e-5)
    assert an.expected_mth_distance(2, 1 / math.pi) == pytest.approx(np.sqrt(y[:, 1]).mean(), rel=3e-3)


def test_dominance_constant():
    assert an.dominance_constant(3, 3.5, 1.0) == pytest.approx(3**-3.5)
    assert an.dominance_constant(0, 4.0, 1.0) == pytest.approx(1 / 81)
    assert an.dominance_constant(1, 4.0, 0.125) == pytest.approx(0.125 / 81 + 0.875 / 625, rel=1e-12)
    assert an.dominance_constant(1, 4.0, 0.125) == pytest.approx(0.0029433, rel=1e-4)


@pytest.mark.parametrize("a", [1.5, 1.75, 2.0, 2.5])
def test_closed_form_tail_vs_brute_force(a):
    n = 7
    i = np.arange(n + 1, 10**6 + 1, dtype=float)
    from scipy.special import gammaln

    terms = np.exp(gammaln(i) - gammaln(i + a))
    # remainder beyond 1e6 by the integral of i^-a
    brute = terms[::-1].sum() + (10**6 + 0.5) ** (1 - a) / (a - 1)
    assert an.gamma_ratio_tail(n, a) == pytest.approx(brute, rel=1e-6)
    assert an.gamma_ratio_tail(0, 2.0) == pytest.approx(1.0)


def test_series_with_explicit_split():
    rho = {2: 0.125, 3: 0.5}
    v = [an.rho_weighted_series(rho, 2.0, 2, n).value for n in (None, 5, 50, 500)]
    np.testing.assert_allclose(v, v[0], rtol=1e-12)
    # full sum from i = 2 with rho = 1 is 1 - Gamma(1)/Gamma(3) = 1/2
    assert an.rho_weighted_series({}, 2.0, 2).value == pytest.approx(0.5)


def test_upper_bound_small_beta_and_first_term():
    q = an.BoundQuery(1e-9, 8, 1, 4.0, rho={2: 0.125})
    assert an.ub_cdf_1tier(q) < 1e-9
    # first series term at i = 2, alpha = 4
    assert math.gamma(2) / math.gamma(4) * math.gamma(3) == pytest.approx(1 / 3)


def test_upper_bound_golden_value():
    # N = 8, L = 1, alpha = 4, rho_2 = 1/8, beta = 1:
    # (1/6) * Gamma(3) * [1/8 * 1/6 + sum_{i>=3} 1/(i(i+1))] = (1/3) * (1/48 + 1/3)
    q = an.BoundQuery(1.0, 8, 1, 4.0, subset_size=1, rho_min=0.125, rho={2: 0.125})
    assert an.ub_cdf_1tier(q) == pytest.approx((1 / 3) * (1 / 48 + 1 / 3), rel=1e-12)
    assert an.ub_cdf_1tier(q, n_terms=10**4) == pytest.approx(an.ub_cdf_1tier(q), rel=1e-12)


def test_lower_bound_domain_faults():
    with pytest.raises(an.DomainFault, match="pole"):
        an.lb_cdf_1tier(an.BoundQuery(1.0, 8, 1, 4.0))
    with pytest.raises(an.DomainFault, match="not positive"):
        an.lb_cdf_1tier(an.BoundQuery(1.0, 8, 1, 3.0))
    with pytest.raises(an.DomainFault):
        an.lb_cdf_ktier(an.BoundQuery(1.0, 8, 1), reference_tiers(), 0)
    with pytest.raises(an.DomainFault):
        an.lb_cdf_ktier(an.BoundQuery(1.0, 2, 1), reference_tiers(), 2)


@settings(max_examples=40, deadline=None)
@given(st.floats(4.05, 5.95), st.floats(-20, 20), st.floats(0.1, 10))
def test_lower_bound_monotone_where_defined(alpha, beta_db, step_db):
    lo, hi = 10 ** (beta_db / 10), 10 ** ((beta_db + step_db) / 10)
    a = an.lb_cdf_1tier(an.BoundQuery(lo, 8, 1, alpha, 1, 0.125))
    b = an.lb_cdf_1tier(an.BoundQuery(hi, 8, 1, alpha, 1, 0.125))
    assert 0.0 <= a <= b <= 1.0


def test_ktier_single_tier_reductions():
    tier = TierConfig(1.0, 8, 4.5, 2e-4, 21)
    q = an.BoundQuery(0.7, 8, 1, 4.5, 1, 0.125, {(0, 2): 0.125})
    q1 = an.BoundQuery(0.7, 8, 1, 4.5, 1, 0.125, {2: 0.125})
    assert an.ub_cdf_ktier(q, (tier,), 0) == pytest.approx(an.ub_cdf_1tier(q1), rel=1e-14)
    # the K-tier lower bound carries an extra (pi lambda)^(1 - alpha/alpha_max) = 1 prefactor at K = 1
    assert an.lb_cdf_ktier(q, (tier,), 0) == pytest.approx(an.lb_cdf_1tier(q1), rel=1e-14)


def test_ktier_equal_tiers_by_hand():
    t = TierConfig(1.0, 8, 4.0, 1e-4)
    q = an.BoundQuery(0.1, 8, 0, 4.0)
    # own tier: Gamma(3) * 1/2; second tier: Gamma(3) * sum_{i>=1} 1/(i(i+1)) = Gamma(3) * 1
    expected = 0.1 / 7 * 2.0 * (0.5 + 1.0)
    assert an.ub_cdf_ktier(q, (t, t), 0) == pytest.approx(expected, rel=1e-12)


def test_query_validation():
    with pytest.raises(ValueError):
        an.BoundQuery(0.0, 8, 1)
    with pytest.raises(ValueError):
        an.BoundQuery(1.0, 8, 1, rho_min=0.0)
    with pytest.raises(ValueError):
        an.ub_cdf_1tier(an.BoundQuery(1.0, 2, 1))
