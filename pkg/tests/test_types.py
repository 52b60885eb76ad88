import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hindsight.core.exceptions import ConfigError, InputError, InvalidStrategyError
from hindsight.core.types import (
    CostModel,
    ObjectiveValue,
    ReturnSeries,
    SingleTradeResult,
    Strategy,
    Trade,
    best_candidate_index,
    single_trade_rank,
    strategy_of,
    trades_of,
)


class TestReturnSeries:
    def test_rejects_non_finite_with_row(self):
        with pytest.raises(InputError) as excinfo:
            ReturnSeries([0.1, math.nan, 0.2])
        assert excinfo.value.row == 2

    def test_rejects_label_length_mismatch(self):
        with pytest.raises(InputError):
            ReturnSeries([0.1, 0.2], labels=("a",))

    def test_is_read_only(self):
        series = ReturnSeries([1.0, 2.0])
        with pytest.raises(ValueError):
            series.returns[0] = 5.0

    def test_prefix_sums(self):
        assert ReturnSeries([1.0, -2.0, 3.0]).prefix_sums().tolist() == [0.0, 1.0, -1.0, 2.0]

    def test_empty(self):
        series = ReturnSeries([])
        assert len(series) == 0
        assert series.label(0) is None


class TestCostModel:
    def test_spread_is_twice_the_transition_cost(self):
        cost = CostModel.from_spread(0.5)
        assert cost.transition_cost == 0.25
        assert cost.spread == 0.5

    @pytest.mark.parametrize("bad", [-0.1, math.inf, math.nan])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ConfigError):
            CostModel(bad)


class TestTrades:
    @pytest.mark.parametrize(
        "positions, expected",
        [
            ([1, 0, 1], [Trade(0, 1), Trade(2, 3)]),
            ([0, 0, 0], []),
            ([1, 1, 1], [Trade(0, 3)]),
            ([], []),
        ],
    )
    def test_trades_of(self, positions, expected):
        assert trades_of(Strategy(positions)) == expected

    def test_strategy_of(self):
        assert strategy_of([Trade(0, 1), Trade(2, 3)], 3) == Strategy([1, 0, 1])
        assert strategy_of([], 4) == Strategy([0, 0, 0, 0])

    def test_touching_trades_name_the_pair(self):
        with pytest.raises(InvalidStrategyError) as excinfo:
            strategy_of([Trade(0, 2), Trade(2, 3)], 3)
        assert excinfo.value.pair == (Trade(0, 2), Trade(2, 3))
        assert "touching" in str(excinfo.value)

    def test_overlapping_trades(self):
        with pytest.raises(InvalidStrategyError, match="overlapping"):
            strategy_of([Trade(0, 3), Trade(1, 4)], 5)

    def test_out_of_range_trade(self):
        with pytest.raises(InvalidStrategyError) as excinfo:
            strategy_of([Trade(1, 5)], 4)
        assert excinfo.value.pair == (Trade(1, 5), 4)

    def test_invalid_trade_bounds(self):
        with pytest.raises(InvalidStrategyError):
            Trade(3, 3)

    def test_non_binary_positions(self):
        with pytest.raises(InvalidStrategyError):
            Strategy([0, 2, 1])

    def test_to_dict_labels_last_invested_period(self):
        labels = ("d1", "d2", "d3")
        assert Trade(1, 3).to_dict(labels) == {"start": 1, "end": 3, "start_label": "d2", "end_label": "d3"}
        assert Trade(0, 1).to_dict()["end_label"] is None

    @given(st.lists(st.integers(0, 1), max_size=1000))
    def test_round_trip(self, bits):
        strategy = Strategy(bits)
        assert strategy_of(trades_of(strategy), len(bits)) == strategy

    @given(st.lists(st.integers(0, 1), max_size=200))
    def test_trade_count_is_entry_count(self, bits):
        padded = np.concatenate(([0], bits)).astype(int)
        assert Strategy(bits).n_trades == int(np.sum(np.diff(padded) == 1))


class TestObjectiveValue:
    def test_conventions(self):
        assert ObjectiveValue.ratio(1.0, 0.0).is_infinite
        assert ObjectiveValue.ratio(0.0, 0.0) == ObjectiveValue(0.0, by_convention=True)
        assert ObjectiveValue.ratio(-1.0, 0.0) == ObjectiveValue(0.0, by_convention=True)
        assert ObjectiveValue.ratio(-1.0, 2.0).value == -0.5

    def test_json(self):
        assert ObjectiveValue(math.inf).to_json() == "inf"
        assert ObjectiveValue(2.5).to_json() == 2.5

    def test_single_trade_rank_prefers_larger_return_among_infinities(self):
        assert single_trade_rank(math.inf, 2.0, 5, 1) > single_trade_rank(math.inf, 1.0, 0, 1)
        assert single_trade_rank(3.0, 2.0, 5, 1) < single_trade_rank(3.0, 1.0, 0, 1)
        assert single_trade_rank(3.0, 0.0, 0, 1) > single_trade_rank(3.0, 0.0, 0, 2)

    def test_best_candidate_index(self):
        assert best_candidate_index(np.array([1.0, math.inf, math.inf]), np.array([0.0, 1.0, 2.0])) == 2
        assert best_candidate_index(np.array([2.0, 2.0]), np.array([5.0, 1.0])) == 0
        assert best_candidate_index(np.array([0.0, -1.0]), np.array([0.0, 0.0])) is None
        assert best_candidate_index(np.array([]), np.array([])) is None

    def test_empty_single_trade_result(self):
        result = SingleTradeResult.none()
        assert result.trade is None
        assert result.value.value == 0.0
        assert result.strategy(3) == Strategy.empty(3)
