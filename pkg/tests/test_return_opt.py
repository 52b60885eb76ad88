import numpy as np
import pytest

from hindsight.core.exceptions import ConfigError
from hindsight.core.types import CostModel, Objective, ReturnSeries, Strategy, Trade
from hindsight.services.contraction import contract
from hindsight.services.metrics import total_return
from hindsight.services.oracle import dp_return_k, exhaustive_best
from hindsight.services.return_opt import (
    MergeKind,
    maximal_return_optimal,
    optimal_return_k,
    optimal_return_unconstrained,
    reduction_sequence,
    return_frontier,
)


class TestUnconstrained:
    @pytest.mark.parametrize(
        "returns, f, positions, mu",
        [
            ([1, -2, 3], 0.25, [1, 0, 1], 3.0),
            ([-1, -3], 0.0, [0, 0], 0.0),
            ([-1, -3], 0.4, [0, 0], 0.0),
            ([2, 3, -1, -2, 4], 0.0, [1, 1, 0, 0, 1], 9.0),
        ],
    )
    def test_examples(self, returns, f, positions, mu):
        series = ReturnSeries(returns)
        strategy = optimal_return_unconstrained(series, CostModel(f))
        assert strategy == Strategy(positions)
        assert total_return(series, strategy, CostModel(f)) == pytest.approx(mu)

    def test_prefers_fewer_shorter_trades_on_ties(self):
        # [1, 1] and [0, 1] both earn 0.5
        assert optimal_return_unconstrained(ReturnSeries([0, 1]), CostModel(0.25)) == Strategy([0, 1])

    def test_empty_series(self):
        assert len(optimal_return_unconstrained(ReturnSeries([]), CostModel(0.1))) == 0

    def test_matches_exhaustive(self, rng, make_series):
        for trial in range(300):
            n = int(rng.integers(1, 13))
            series = make_series(rng, n, zeros=True, integers=bool(trial % 3 == 0))
            cost = CostModel(float(rng.choice([0.0, 0.05, 0.3])))
            _, expected = exhaustive_best(series, cost, Objective.RETURN)
            mu = total_return(series, optimal_return_unconstrained(series, cost), cost)
            assert mu == pytest.approx(expected.value, rel=1e-12, abs=1e-12), (
                f"trial={trial} returns={series.returns.tolist()} f={cost.transition_cost}"
            )

    def test_trades_sit_on_positive_run_boundaries(self, rng, make_series):
        for _ in range(200):
            series = make_series(rng, int(rng.integers(1, 60)))
            cost = CostModel(float(rng.choice([0.05, 0.3])))
            runs = contract(series)
            positive = runs.positive_runs()
            starts, ends = set(runs.starts[positive].tolist()), set(runs.ends[positive].tolist())
            for trade in optimal_return_unconstrained(series, cost).trades:
                assert trade.start in starts and trade.end in ends
                net = series.returns[trade.start:trade.end].sum() - cost.spread
                assert net >= -1e-12


class TestMaximal:
    def test_extends_over_zero(self):
        assert maximal_return_optimal(ReturnSeries([0, 1]), CostModel(0.25)) == Strategy([1, 1])

    def test_no_free_extension(self):
        assert maximal_return_optimal(ReturnSeries([1, -2, 3]), CostModel(0.25)) == Strategy([1, 0, 1])

    def test_all_negative(self):
        assert maximal_return_optimal(ReturnSeries([-1, -2]), CostModel(0.1)) == Strategy([0, 0])

    def test_joins_across_zero_cost_gap(self):
        # the -1 gap costs exactly the saved round trip
        assert maximal_return_optimal(ReturnSeries([4, -1, 4]), CostModel(0.5)) == Strategy([1, 1, 1])

    def test_is_return_optimal_and_not_enlargeable(self, rng, make_series):
        for trial in range(300):
            n = int(rng.integers(1, 40))
            series = make_series(rng, n, zeros=True, integers=bool(trial % 2))
            cost = CostModel(float(rng.choice([0.0, 0.05, 0.3])))
            strategy = maximal_return_optimal(series, cost)
            mu = total_return(series, strategy, cost)
            best = total_return(series, optimal_return_unconstrained(series, cost), cost)
            assert mu == pytest.approx(best, rel=1e-12, abs=1e-12)

            positions = strategy.positions
            trades = strategy.trades
            for i, trade in enumerate(trades):
                assert series.returns[trade.start:trade.end].sum() >= cost.spread - 1e-9
                for a, b in ((trade.start - 1, trade.end), (trade.start, trade.end + 1)):
                    if a < 0 or b > n:
                        continue
                    wider = positions.copy()
                    wider[a:b] = 1
                    assert total_return(series, Strategy(wider), cost) < mu - 1e-12, (
                        f"trial={trial} returns={series.returns.tolist()} trade={trade}"
                    )
                if i + 1 < len(trades):
                    joined = positions.copy()
                    joined[trade.start:trades[i + 1].end] = 1
                    assert total_return(series, Strategy(joined), cost) < mu - 1e-12


class TestAtMostK:
    def test_drop_beats_merge(self):
        series = ReturnSeries([1, -2, 3])
        strategy = optimal_return_k(series, CostModel(0.25), 1)
        assert strategy == Strategy([0, 0, 1])
        assert total_return(series, strategy, CostModel(0.25)) == pytest.approx(2.5)

    def test_free_merge(self):
        series = ReturnSeries([4, -1, 4, -3, 4])
        cost = CostModel(0.5)
        two = optimal_return_k(series, cost, 2)
        assert two.trades == [Trade(0, 3), Trade(4, 5)]
        assert total_return(series, two, cost) == pytest.approx(9.0)
        one = optimal_return_k(series, cost, 1)
        assert one.trades == [Trade(0, 5)]
        assert total_return(series, one, cost) == pytest.approx(7.0)

    def test_zero_trades(self):
        assert optimal_return_k(ReturnSeries([1, 2]), CostModel(0.1), 0) == Strategy([0, 0])

    def test_large_k_is_unconstrained(self):
        series = ReturnSeries([1, -2, 3, -2, 1])
        cost = CostModel(0.1)
        assert optimal_return_k(series, cost, 10) == maximal_return_optimal(series, cost)

    def test_negative_k(self):
        with pytest.raises(ConfigError):
            optimal_return_k(ReturnSeries([1.0]), CostModel(0.0), -1)

    def test_reduction_sequence_steps_down_by_one(self):
        sequence = reduction_sequence(ReturnSeries([3, -1, 3, -1, 3]), CostModel(0.1), 0)
        assert sorted(sequence) == [0, 1, 2, 3]
        assert all(len(trades) == count for count, trades in sequence.items())

    def test_merge_kinds_order_merges_first(self):
        assert list(MergeKind)[0] is MergeKind.MERGE_GAP

    def test_matches_dp(self, rng, make_series):
        for trial in range(400):
            n = int(rng.integers(1, 65))
            k = int(rng.integers(0, 7))
            series = make_series(rng, n, zeros=True, integers=bool(trial % 2))
            cost = CostModel(float(rng.choice([0.0, 0.05, 0.3])))
            mu = total_return(series, optimal_return_k(series, cost, k), cost)
            assert mu == pytest.approx(dp_return_k(series, cost, k), rel=1e-12, abs=1e-12), (
                f"trial={trial} returns={series.returns.tolist()} f={cost.transition_cost} k={k}"
            )

    def test_frontier_is_nondecreasing_and_flat_after_t(self, rng, make_series):
        for _ in range(100):
            series = make_series(rng, int(rng.integers(1, 50)))
            cost = CostModel(0.1)
            frontier = return_frontier(series, cost, 8)
            values = [frontier[k] for k in range(9)]
            assert values[0] == 0.0
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
            t = maximal_return_optimal(series, cost).n_trades
            for k in range(t, 9):
                assert values[k] == pytest.approx(values[t])


@pytest.mark.slow
def test_matches_oracles_at_scale():
    rng = np.random.default_rng(11)
    for trial in range(2000):
        n = int(rng.integers(1, 17))
        series = ReturnSeries(rng.normal(size=n))
        cost = CostModel(float(rng.choice([0.0, 0.05, 0.3])))
        _, expected = exhaustive_best(series, cost, Objective.RETURN)
        assert total_return(series, optimal_return_unconstrained(series, cost), cost) == pytest.approx(
            expected.value, rel=1e-12, abs=1e-12
        )
        assert dp_return_k(series, cost, n) == pytest.approx(expected.value, rel=1e-12, abs=1e-12)
    for trial in range(2000):
        n = int(rng.integers(1, 65))
        k = int(rng.integers(0, 7))
        series = ReturnSeries(rng.normal(size=n))
        cost = CostModel(float(rng.choice([0.0, 0.05, 0.3])))
        mu = total_return(series, optimal_return_k(series, cost, k), cost)
        assert mu == pytest.approx(dp_return_k(series, cost, k), rel=1e-12, abs=1e-12), f"trial={trial}"
