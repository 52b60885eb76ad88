"""
Core Types - shared value types of the optimizers
核心类型 - 收益序列、成本模型、策略与交易区间

Index convention: 0-based, half-open intervals everywhere. A Trade(start, end)
is invested over periods start .. end-1.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hindsight.core.exceptions import ConfigError, InputError, InvalidStrategyError


class Objective(str, Enum):
    """优化目标"""
    RETURN = "return"
    STERLING = "sterling"
    SHARPE = "sharpe"
    SSR = "ssr"
    DDR = "ddr"


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Per-period additive (log) returns, optionally labelled."""
    returns: np.ndarray
    labels: Optional[Tuple] = None

    def __post_init__(self):
        arr = _frozen_array(self.returns, float)
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise InputError(f"return {arr[bad[0]]} is not finite", row=int(bad[0]) + 1)
        object.__setattr__(self, "returns", arr)

        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != arr.size:
                raise InputError(
                    f"labels length {len(labels)} does not match returns length {arr.size}"
                )
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.returns.size)

    @property
    def n(self) -> int:
        return len(self)

    def prefix_sums(self) -> np.ndarray:
        """A_0..A_n with A_j - A_i = sum of returns over (i, j]."""
        return np.concatenate(([0.0], np.cumsum(self.returns)))

    def label(self, index: int):
        if self.labels is None:
            return None
        return self.labels[index]


@dataclass(frozen=True)
class CostModel:
    """
    Transaction cost charged once per position change.

    transition_cost is f; one round-trip trade costs the spread 2f.
    """
    transition_cost: float = 0.0

    def __post_init__(self):
        f = float(self.transition_cost)
        if not math.isfinite(f) or f < 0:
            raise ConfigError(f"transition cost must be finite and >= 0, got {self.transition_cost}")
        object.__setattr__(self, "transition_cost", f)

    @classmethod
    def from_spread(cls, spread: float) -> "CostModel":
        return cls(transition_cost=float(spread) / 2.0)

    @property
    def spread(self) -> float:
        return 2.0 * self.transition_cost


@dataclass(frozen=True, order=True)
class Trade:
    """Invested over periods [start, end)."""
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise InvalidStrategyError(f"invalid trade [{self.start}, {self.end})", pair=(self, None))

    @property
    def length(self) -> int:
        return self.end - self.start

    def to_dict(self, labels: Optional[Sequence] = None) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "start_label": labels[self.start] if labels is not None else None,
            "end_label": labels[self.end - 1] if labels is not None else None,
        }


@dataclass(frozen=True, eq=False)
class Strategy:
    """All-or-nothing position vector: 1 = fully invested, 0 = flat."""
    positions: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.positions).reshape(-1)
        if raw.size and not np.all((raw == 0) | (raw == 1)):
            bad = int(np.flatnonzero((raw != 0) & (raw != 1))[0])
            raise InvalidStrategyError(f"position {raw[bad]} at period {bad} is not 0 or 1")
        object.__setattr__(self, "positions", _frozen_array(raw, np.int8))

    @classmethod
    def empty(cls, n: int) -> "Strategy":
        return cls(np.zeros(n, dtype=np.int8))

    def __len__(self) -> int:
        return int(self.positions.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Strategy):
            return NotImplemented
        return np.array_equal(self.positions, other.positions)

    def __hash__(self) -> int:
        return hash(self.positions.tobytes())

    def __repr__(self) -> str:
        return f"Strategy({self.positions.tolist()})"

    @cached_property
    def trades(self) -> List[Trade]:
        return trades_of(self)

    @property
    def n_trades(self) -> int:
        return len(self.trades)


def trades_of(strategy: Strategy) -> List[Trade]:
    """Maximal runs of 1s, in index order."""
    padded = np.concatenate(([0], strategy.positions, [0])).astype(np.int8)
    steps = np.diff(padded)
    starts = np.flatnonzero(steps == 1)
    ends = np.flatnonzero(steps == -1)
    return [Trade(int(s), int(e)) for s, e in zip(starts, ends)]


def strategy_of(trades: Iterable[Trade], n: int) -> Strategy:
    """
    Inverse of trades_of.

    Trades must be sorted, inside [0, n) and separated by at least one flat
    period; touching trades must be merged by the caller.
    """
    positions = np.zeros(n, dtype=np.int8)
    previous: Optional[Trade] = None
    for trade in trades:
        if trade.end > n:
            raise InvalidStrategyError(
                f"trade [{trade.start}, {trade.end}) exceeds series length {n}", pair=(trade, n)
            )
        if previous is not None and trade.start <= previous.end:
            kind = "touching" if trade.start == previous.end else "overlapping or unsorted"
            raise InvalidStrategyError(
                f"{kind} trades [{previous.start}, {previous.end}) and [{trade.start}, {trade.end})",
                pair=(previous, trade),
            )
        positions[trade.start:trade.end] = 1
        previous = trade
    return Strategy(positions)


@dataclass(frozen=True)
class ObjectiveValue:
    """
    Extended-real objective value.

    +inf only from a zero denominator with a positive numerator; a zero
    denominator with a nonpositive numerator maps to 0 with by_convention set.
    """
    value: float
    by_convention: bool = False

    @classmethod
    def ratio(cls, numerator: float, denominator: float) -> "ObjectiveValue":
        if denominator > 0:
            return cls(numerator / denominator)
        if numerator > 0:
            return cls(math.inf)
        return cls(0.0, by_convention=True)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def __float__(self) -> float:
        return self.value

    def to_json(self):
        return "inf" if self.is_infinite else self.value


def single_trade_rank(value: float, mu: float, start: int, length: int) -> Tuple:
    """
    Sort key for single-trade candidates, larger is better.

    Highest value first; among +inf values the larger return; then earliest
    start, then shortest trade.
    """
    return (value, mu if math.isinf(value) else 0.0, -start, -length)


@dataclass(frozen=True)
class SingleTradeResult:
    """Best strategy with at most one trade; trade is None for the empty strategy."""
    trade: Optional[Trade]
    value: ObjectiveValue
    mu: float = 0.0

    @classmethod
    def none(cls) -> "SingleTradeResult":
        return cls(trade=None, value=ObjectiveValue(0.0, by_convention=True))

    def strategy(self, n: int) -> Strategy:
        return strategy_of([self.trade] if self.trade is not None else [], n)


def best_candidate_index(values: np.ndarray, mu: np.ndarray) -> Optional[int]:
    """
    Index of the best positive-valued candidate among trades that share a
    start and are ordered by increasing length, or None.
    """
    if values.size == 0:
        return None
    top = values.max()
    if not top > 0:
        return None
    tied = np.flatnonzero(values == top)
    if math.isinf(top):
        tied = tied[mu[tied] == mu[tied].max()]
    return int(tied[0])
