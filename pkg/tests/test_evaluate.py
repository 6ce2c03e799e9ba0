import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hetcomp import evaluate as ev
from hetcomp import overhead as oh
from hetcomp.model import Policy, RateMapping, reference_network, reference_tiers

from conftest import single_tier

COVERAGE = RateMapping.coverage(3.0)
SHANNON = RateMapping.shannon(3.0)
NET = reference_network(2)


@pytest.fixture(scope="module")
def log():
    return ev.run_trials(NET, 8000, seed=11)


def test_rate_mappings():
    target = COVERAGE.target_sir
    assert ev.rate(target, COVERAGE) == 1.0
    assert ev.rate(1.0, COVERAGE) == 0.0
    assert ev.rate_coverage(target, RateMapping.coverage(3.0, 2.5)) == 2.5
    assert ev.rate(0.0, SHANNON) == 0.0
    assert ev.rate(SHANNON.shannon_gap, SHANNON) == pytest.approx(1.0)
    assert ev.rate(10.0, SHANNON) == pytest.approx(math.log2(1 + 10 / 1.9952623149688795))
    assert ev.rate(10.0, SHANNON) == pytest.approx(2.5879, abs=1e-4)


def test_zero_delay_equals_ideal_exactly(log):
    over = oh.OverheadModel(ev.DEFAULT_COHERENCE, oh.DelayModel())
    for m in (COVERAGE, SHANNON):
        a = ev.long_term_throughput(NET, over, m, log=log)
        b = ev.ideal_throughput(NET, m, log=log)
        assert a == b


def test_no_cooperation_equals_reduced_dimension_baseline():
    # tau = 0: nobody ever nulls, but the server still spends L dimensions
    L, trials, seed = 2, 6000, 5
    never = ev.long_term_throughput(NET, oh.TimeFractions.uniform(0.0, 3), SHANNON, trials, seed)
    base = ev.run_trials(NET.replace(num_coordinated=0), trials, seed, serving_dims=8 - L)
    # the L = 0 run sees the same layouts and fading; only the member set differs, which does not matter at rho = 1
    direct = ev.rate(base.sirs[:, 0], SHANNON).mean()
    assert never.mean == pytest.approx(direct, rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1.0))
def test_linear_in_tau_for_single_member(tau):
    net = reference_network(1)
    log = ev.run_trials(net, 2000, seed=3)
    at = lambda t: ev.long_term_throughput(net, oh.TimeFractions.uniform(t, 3), SHANNON, log=log).mean  # noqa: E731
    assert at(tau) == pytest.approx((1 - tau) * at(0.0) + tau * at(1.0), rel=1e-12)


def test_determinism_and_chunking():
    a = ev.run_trials(NET, ev.CHUNK + 17, seed=99)
    b = ev.run_trials(NET, ev.CHUNK + 17, seed=99)
    np.testing.assert_array_equal(a.sirs, b.sirs)
    c = ev.run_trials(NET, ev.CHUNK, seed=99)
    np.testing.assert_array_equal(a.sirs[: ev.CHUNK], c.sirs)
    assert not np.array_equal(a.sirs[:100], ev.run_trials(NET, 100, seed=100).sirs)


def test_common_random_numbers_across_l():
    lo = ev.run_trials(reference_network(1), 500, seed=4)
    hi = ev.run_trials(reference_network(3), 500, seed=4)
    # with nobody cooperating, adding members changes only the serving gain dimension count
    assert np.mean(hi.sirs[:, 0] <= lo.sirs[:, 0]) == 1.0


@pytest.mark.parametrize("delay", [0.005, 0.030, 0.070])
def test_ideal_dominates_long_term(log, delay):
    over = ev.erlang_overhead(delay)
    for m in (COVERAGE, SHANNON):
        assert ev.ideal_throughput(NET, m, log=log).mean >= ev.long_term_throughput(NET, over, m, log=log).mean


def test_ideal_cancellation_helps_coverage():
    net = reference_network(0).replace(tiers=reference_tiers([500, 500, 500]))
    a = ev.ideal_throughput(net, COVERAGE, 20000, 2)
    b = ev.ideal_throughput(net.replace(num_coordinated=1), COVERAGE, 20000, 2)
    assert b.mean >= a.mean


def test_small_optimal_l_under_ideal_overhead():
    net = reference_network(1).replace(tiers=reference_tiers([200, 200, 200]))
    vals = [ev.ideal_throughput(net.replace(num_coordinated=L), SHANNON, 20000, 1).mean for L in range(6)]
    assert int(np.argmax(vals)) <= 2


def test_delay_sweep_zero_row_is_ideal():
    rows = ev.delay_sweep(NET, [COVERAGE], [0.0, 0.04], 3000, 8)[ev.Metric.COVERAGE]
    assert rows[0].result.mean == ev.ideal_throughput(NET, COVERAGE, 3000, 8).mean
    assert rows[0].tau == 1.0 and rows[1].result.mean <= rows[0].result.mean
    assert rows[0].baseline.mean == ev.ideal_throughput(NET.replace(num_coordinated=0), COVERAGE, 3000, 8).mean


def test_results_carry_metadata(log):
    r = ev.long_term_throughput(NET, ev.erlang_overhead(0.02), COVERAGE, log=log)
    assert r.metric is ev.Metric.COVERAGE and 0 <= r.mean <= 1 and r.std_error > 0
    assert r.trials == 8000 and r.seed == 11 and len(r.config_digest) == 16


def test_single_tier_has_no_intratier_loss():
    net = single_tier(num_coordinated=2)
    rows = ev.intratier_loss(net, [SHANNON], "L", [1, 2], 2000, 0)[ev.Metric.THROUGHPUT]
    assert all(r.loss == 0.0 and r.loss_se == 0.0 for r in rows)


def test_intratier_loss_nonnegative():
    rows = ev.intratier_loss(NET, [SHANNON, COVERAGE], "delay", [0.0, 0.04], 4000, 1)
    for metric_rows in rows.values():
        for r in metric_rows:
            assert r.loss >= -2 * r.loss_se
    with pytest.raises(ValueError):
        ev.intratier_loss(NET, [SHANNON], "bits", [1])


def test_intra_tier_members_stay_in_serving_tier():
    log = ev.run_trials(NET.replace(coordination_policy=Policy.INTRA_TIER), 500, 0)
    assert np.all(log.member_tier == 0)
