import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hindsight.core.exceptions import LengthMismatchError
from hindsight.core.types import CostModel, Objective, ReturnSeries, Strategy
from hindsight.services.metrics import (
    DrawdownSummary,
    EquityCurve,
    EventTag,
    batch_objective,
    ddr,
    equity_curve,
    evaluate,
    max_drawdown,
    perf_report,
    sharpe,
    ssr,
    sterling,
    total_return,
)

SERIES = ReturnSeries([1.0, -2.0, 3.0])
QUARTER = CostModel(0.25)
FREE = CostModel(0.0)


def _pairwise_mdd(values):
    best = 0.0
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            best = max(best, values[i] - values[j])
    return best


class TestEquityCurve:
    def test_event_order(self):
        curve = equity_curve(SERIES, Strategy([1, 0, 1]), QUARTER)
        assert curve.values.tolist() == [0, -0.25, 0.75, 0.5, 0.5, 0.25, 3.25, 3.0]
        assert curve.tags[:4] == (EventTag.START, EventTag.COST, EventTag.RETURN, EventTag.COST)
        assert curve.cost_events == 4

    def test_zero_cost_has_no_cost_events(self):
        curve = equity_curve(SERIES, Strategy([1, 1, 1]), FREE)
        assert curve.values.tolist() == [0, 1, -1, 2]
        assert curve.cost_events == 0

    def test_empty_strategy_is_flat(self):
        curve = equity_curve(SERIES, Strategy.empty(3), QUARTER)
        assert curve.values.tolist() == [0, 0, 0, 0]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            equity_curve(SERIES, Strategy([1, 0]), QUARTER)

    def test_final_value_is_total_return(self, rng, make_series):
        for _ in range(1000):
            n = int(rng.integers(0, 500))
            series = make_series(rng, n, zeros=True)
            strategy = Strategy(rng.integers(0, 2, size=n))
            cost = CostModel(float(rng.choice([0.0, 0.1, 0.5])))
            curve = equity_curve(series, strategy, cost)
            assert curve.final == pytest.approx(total_return(series, strategy, cost), abs=1e-9)
            if cost.transition_cost > 0:
                assert curve.cost_events == 2 * strategy.n_trades


class TestTotalReturn:
    @pytest.mark.parametrize(
        "positions, expected",
        [([1, 0, 1], 3.0), ([1, 1, 1], 1.5), ([0, 0, 0], 0.0)],
    )
    def test_examples(self, positions, expected):
        assert total_return(SERIES, Strategy(positions), QUARTER) == pytest.approx(expected)


class TestMaxDrawdown:
    def test_examples(self):
        assert max_drawdown(EquityCurve.from_values([0, 1, 0.5, 2])) == 0.5
        assert max_drawdown(EquityCurve.from_values([0, 1, 1, 3])) == 0.0
        assert max_drawdown(equity_curve(SERIES, Strategy([1, 0, 1]), QUARTER)) == pytest.approx(0.5)

    def test_matches_pairwise_scan(self, rng):
        for _ in range(50):
            values = np.cumsum(rng.normal(size=int(rng.integers(1, 400))))
            assert max_drawdown(EquityCurve.from_values(values)) == _pairwise_mdd(values.tolist())

    def test_trade_count_lower_bounds(self, rng, make_series):
        for _ in range(300):
            n = int(rng.integers(1, 40))
            series = make_series(rng, n)
            strategy = Strategy(rng.integers(0, 2, size=n))
            cost = CostModel(float(rng.choice([0.05, 0.25])))
            mdd = max_drawdown(equity_curve(series, strategy, cost))
            assert mdd >= 0
            if strategy.n_trades >= 1:
                assert mdd >= cost.transition_cost - 1e-12
            if strategy.n_trades >= 2:
                assert mdd >= cost.spread - 1e-12


class TestRatios:
    def test_sterling(self):
        assert sterling(SERIES, Strategy([0, 0, 1]), QUARTER).value == pytest.approx(10.0)
        assert sterling(SERIES, Strategy.empty(3), QUARTER) == sterling(SERIES, Strategy.empty(3), FREE)
        assert sterling(SERIES, Strategy.empty(3), QUARTER).by_convention
        infinite = sterling(ReturnSeries([2, 3, -1, -2, 4]), Strategy([1, 1, 0, 0, 1]), FREE)
        assert infinite.is_infinite

    def test_sterling_negative_return(self):
        value = sterling(ReturnSeries([-1.0, 2.0]), Strategy([1, 0]), QUARTER)
        assert value.value == pytest.approx(-1.0)

    def test_sharpe(self):
        assert sharpe(SERIES, Strategy.empty(3), QUARTER).value == 0.0
        assert sharpe(ReturnSeries([1.0, 1.0]), Strategy([1, 1]), FREE).is_infinite
        assert sharpe(SERIES, Strategy([1, 1, 1]), FREE).value == pytest.approx((2 / 3) / math.sqrt(38 / 9))

    def test_sharpe_charges_costs_to_edge_periods(self):
        # one-period trades carry both of their costs: net profits [0.5, 0, 2.5]
        value = sharpe(SERIES, Strategy([1, 0, 1]), QUARTER).value
        net = np.array([0.5, 0.0, 2.5])
        assert value == pytest.approx(net.mean() / net.std())

    def test_ssr(self):
        assert ssr(SERIES, Strategy([0, 0, 1]), QUARTER).value == pytest.approx(2.5 / math.sqrt(2))
        assert ssr(SERIES, Strategy.empty(3), QUARTER).value == 0.0
        assert ssr(ReturnSeries([2, 2, -1]), Strategy([1, 1, 0]), FREE).value == pytest.approx(4.242640687)

    def test_ddr(self):
        assert ddr(SERIES, Strategy([1, 1, 1]), FREE).value == pytest.approx(2 / math.sqrt(4 / 3))
        assert ddr(SERIES, Strategy([0, 0, 1]), FREE).is_infinite
        assert ddr(SERIES, Strategy.empty(3), FREE).value == 0.0

    def test_ssr_is_n_times_sharpe_without_costs(self, rng, make_series):
        for _ in range(200):
            n = int(rng.integers(1, 60))
            series = make_series(rng, n)
            strategy = Strategy(rng.integers(0, 2, size=n))
            s = sharpe(series, strategy, FREE).value
            if math.isfinite(s):
                assert ssr(series, strategy, FREE).value == pytest.approx(n * s, rel=1e-12, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.integers(-640, 640).map(lambda k: k / 64), min_size=1, max_size=40),
        st.lists(st.integers(0, 1), min_size=40, max_size=40),
        st.sampled_from([0.0, 0.05, 0.5]),
        st.sampled_from([0.125, 0.5, 2.0, 8.0]),
    )
    def test_scale_invariance(self, returns, bits, f, scale):
        n = len(returns)
        strategy = Strategy(bits[:n])
        base = ReturnSeries(returns)
        scaled = ReturnSeries(np.array(returns) * scale)
        cost, scaled_cost = CostModel(f), CostModel(f * scale)
        assert total_return(scaled, strategy, scaled_cost) == pytest.approx(
            scale * total_return(base, strategy, cost), rel=1e-12, abs=1e-300
        )
        for objective in (Objective.STERLING, Objective.SHARPE, Objective.SSR, Objective.DDR):
            a = evaluate(base, strategy, cost, objective).value
            b = evaluate(scaled, strategy, scaled_cost, objective).value
            assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


class TestBatch:
    def test_batch_matches_scalar(self, rng, make_series):
        series = make_series(rng, 12)
        rows = rng.integers(0, 2, size=(64, 12))
        for objective in Objective:
            values, _ = batch_objective(series.returns, rows, 0.1, objective)
            for row, value in zip(rows, values):
                expected = evaluate(series, Strategy(row), CostModel(0.1), objective).value
                assert value == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_empty_series(self):
        values, flags = batch_objective(np.zeros(0), np.zeros((1, 0)), 0.1, Objective.STERLING)
        assert values.tolist() == [0.0]
        assert flags.tolist() == [True]


class TestDrawdownSummary:
    def test_combine_matches_concatenation(self, rng):
        for _ in range(200):
            steps = rng.normal(size=int(rng.integers(0, 30)))
            cut = int(rng.integers(0, steps.size + 1))
            joined = DrawdownSummary.of_steps(steps[:cut]).combine(DrawdownSummary.of_steps(steps[cut:]))
            whole = DrawdownSummary.of_steps(steps)
            assert joined.delta == pytest.approx(whole.delta, abs=1e-9)
            assert joined.mdd == pytest.approx(whole.mdd, abs=1e-9)
            assert joined.peak == pytest.approx(whole.peak, abs=1e-9)
            assert joined.trough == pytest.approx(whole.trough, abs=1e-9)

    def test_fold_of_single_steps(self):
        steps = [1.0, -0.5, 2.0, -3.0]
        folded = DrawdownSummary.fold(DrawdownSummary.of_step(s) for s in steps)
        assert folded.mdd == pytest.approx(3.0)
        assert folded.delta == pytest.approx(-0.5)


def test_perf_report():
    report = perf_report(SERIES, Strategy([1, 0, 1]), QUARTER)
    assert report.total_return == pytest.approx(3.0)
    assert report.mdd == pytest.approx(0.5)
    assert report.sterling.value == pytest.approx(6.0)
    assert report.n_trades == 2
    assert report.invested_periods == 2
    assert set(report.to_dict()) == {
        "total_return", "mdd", "sterling", "sharpe", "ssr", "ddr", "n_trades", "invested_periods",
    }
