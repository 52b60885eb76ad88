"""
Metrics Module - Strategy Performance Evaluation
绩效模块 - 权益曲线、收益、最大回撤与各类比率

Profit model: additive returns, a cost f charged at every position change
(entry and exit), so one round trip costs the spread 2f. The equity curve is
transaction granular: a cost event is a separate point from the period's
return, which is what makes two trades cost at least a 2f drawdown.

All evaluators are vectorized over a batch of position rows; the scalar
functions below are one-row views of the same code, so the oracles and the
optimizers share one definition of every objective.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Dict, Iterable, Tuple

import numpy as np

from hindsight.core.exceptions import LengthMismatchError
from hindsight.core.types import CostModel, Objective, ObjectiveValue, ReturnSeries, Strategy


class EventTag(str, Enum):
    """权益曲线事件类型"""
    START = "start"
    COST = "cost"
    RETURN = "period-return"


@dataclass(frozen=True, eq=False)
class EquityCurve:
    """Cumulative profit after each event, starting with (start, 0)."""
    tags: Tuple[EventTag, ...]
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "EquityCurve":
        """A curve with untagged return events, for drawdown calculations."""
        arr = np.asarray(list(values), dtype=float)
        tags = (EventTag.START,) + (EventTag.RETURN,) * max(arr.size - 1, 0)
        return cls(tags=tags, values=arr)

    @property
    def final(self) -> float:
        return float(self.values[-1])

    @property
    def cost_events(self) -> int:
        return sum(1 for tag in self.tags if tag is EventTag.COST)


@dataclass
class PerfReport:
    """一个 (序列, 策略, 成本) 组合的全部绩效指标"""
    total_return: float
    mdd: float
    sterling: ObjectiveValue
    sharpe: ObjectiveValue
    ssr: ObjectiveValue
    ddr: ObjectiveValue
    n_trades: int
    invested_periods: int = 0

    def to_dict(self) -> Dict:
        return {
            "total_return": self.total_return,
            "mdd": self.mdd,
            "sterling": self.sterling.to_json(),
            "sharpe": self.sharpe.to_json(),
            "ssr": self.ssr.to_json(),
            "ddr": self.ddr.to_json(),
            "n_trades": self.n_trades,
            "invested_periods": self.invested_periods,
        }


@dataclass(frozen=True)
class DrawdownSummary:
    """
    Drawdown statistics of a curve piece, relative to the piece's start value.

    Pieces combine associatively, so the MDD of a spliced curve is the fold of
    its pieces' summaries.
    """
    delta: float = 0.0
    peak: float = 0.0
    trough: float = 0.0
    mdd: float = 0.0

    @classmethod
    def of_steps(cls, steps) -> "DrawdownSummary":
        steps = np.asarray(steps, dtype=float)
        if steps.size == 0:
            return cls()
        cums = np.concatenate(([0.0], np.cumsum(steps)))
        running = np.maximum.accumulate(cums)
        return cls(
            delta=float(cums[-1]),
            peak=float(cums.max()),
            trough=float(cums.min()),
            mdd=float((running - cums).max()),
        )

    @classmethod
    def of_step(cls, step: float) -> "DrawdownSummary":
        return cls(delta=step, peak=max(step, 0.0), trough=min(step, 0.0), mdd=max(-step, 0.0))

    def combine(self, other: "DrawdownSummary") -> "DrawdownSummary":
        return DrawdownSummary(
            delta=self.delta + other.delta,
            peak=max(self.peak, self.delta + other.peak),
            trough=min(self.trough, self.delta + other.trough),
            mdd=max(self.mdd, other.mdd, self.peak - (self.delta + other.trough)),
        )

    @classmethod
    def fold(cls, pieces: Iterable["DrawdownSummary"]) -> "DrawdownSummary":
        return reduce(cls.combine, pieces, cls())


# ---------------------------------------------------------------------------
# batched kernels, positions shaped (m, n)
# ---------------------------------------------------------------------------

def _as_rows(positions) -> np.ndarray:
    rows = np.asarray(positions, dtype=np.int8)
    return rows.reshape(1, -1) if rows.ndim == 1 else rows


def _transitions(rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Entry mask (0->1 before the period) and exit mask (1->0 after it)."""
    m, n = rows.shape
    if n == 0:
        return rows.copy(), rows.copy()
    flat = np.zeros((m, 1), dtype=np.int8)
    previous = np.concatenate((flat, rows[:, :-1]), axis=1)
    following = np.concatenate((rows[:, 1:], flat), axis=1)
    return rows & (1 - previous), rows & (1 - following)


def _event_steps(returns: np.ndarray, rows: np.ndarray, f: float) -> np.ndarray:
    """Per-period (entry cost, return, exit cost) steps, shape (m, n, 3)."""
    entries, exits = _transitions(rows)
    return np.stack((-f * entries, rows * returns, -f * exits), axis=2)


def _dense_curves(returns: np.ndarray, rows: np.ndarray, f: float) -> np.ndarray:
    """Curves with a slot for every possible event; absent events add 0."""
    steps = _event_steps(returns, rows, f).reshape(rows.shape[0], -1)
    start = np.zeros((rows.shape[0], 1))
    return np.concatenate((start, np.cumsum(steps, axis=1)), axis=1)


def _drawdowns(curves: np.ndarray) -> np.ndarray:
    running = np.maximum.accumulate(curves, axis=1)
    return np.maximum((running - curves).max(axis=1), 0.0)


def ratios(numerator: np.ndarray, denominator: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Elementwise ratio with the 0/0 -> 0 and x/0 -> +inf conventions."""
    positive = denominator > 0
    safe = np.where(positive, denominator, 1.0)
    values = np.where(positive, numerator / safe, np.where(numerator > 0, math.inf, 0.0))
    return values, ~positive & (numerator <= 0)


def _pop_std(values: np.ndarray) -> np.ndarray:
    """Population standard deviation per row, exactly 0 for constant rows."""
    if values.shape[1] == 0:
        return np.zeros(values.shape[0])
    mean = values.mean(axis=1, keepdims=True)
    std = np.sqrt(((values - mean) ** 2).mean(axis=1))
    return np.where(np.ptp(values, axis=1) == 0, 0.0, std)


def batch_total_return(returns: np.ndarray, rows: np.ndarray, f: float) -> np.ndarray:
    entries, _ = _transitions(rows)
    return (rows * returns).sum(axis=1) - 2.0 * f * entries.sum(axis=1)


def batch_trade_counts(rows: np.ndarray) -> np.ndarray:
    entries, _ = _transitions(rows)
    return entries.sum(axis=1)


def batch_objective(
    returns: np.ndarray, positions, f: float, objective: Objective
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Objective values of many strategies at once.

    Args:
        returns: period returns, shape (n,)
        positions: 0/1 rows, shape (m, n)
        f: per-transition cost
        objective: which objective to evaluate

    Returns:
        (values, by_convention) arrays of shape (m,)
    """
    rows = _as_rows(positions)
    m, n = rows.shape
    mu = batch_total_return(returns, rows, f)
    if objective is Objective.RETURN:
        return mu, np.zeros(m, dtype=bool)
    if n == 0:
        return np.zeros(m), np.ones(m, dtype=bool)

    if objective is Objective.STERLING:
        return ratios(mu, _drawdowns(_dense_curves(returns, rows, f)))

    gross = rows * returns
    if objective is Objective.SHARPE:
        entries, exits = _transitions(rows)
        net = gross - f * (entries + exits)
        return ratios(net.mean(axis=1), _pop_std(net))
    if objective is Objective.SSR:
        return ratios(mu, _pop_std(gross))
    if objective is Objective.DDR:
        downside = np.sqrt((np.minimum(gross, 0.0) ** 2).mean(axis=1))
        return ratios(mu, downside)
    raise ValueError(f"unknown objective {objective!r}")


# ---------------------------------------------------------------------------
# scalar API
# ---------------------------------------------------------------------------

def _check(series: ReturnSeries, strategy: Strategy) -> None:
    if len(strategy) != len(series):
        raise LengthMismatchError("strategy", len(series), len(strategy))


def _objective(series: ReturnSeries, strategy: Strategy, cost: CostModel, objective: Objective) -> ObjectiveValue:
    _check(series, strategy)
    values, flags = batch_objective(series.returns, strategy.positions, cost.transition_cost, objective)
    return ObjectiveValue(float(values[0]), by_convention=bool(flags[0]))


def equity_curve(series: ReturnSeries, strategy: Strategy, cost: CostModel) -> EquityCurve:
    """
    Transaction-granular cumulative profit.

    Per period: an entry cost event if a 0->1 transition precedes it, the
    period-return event, then an exit cost event if a 1->0 transition (or the
    end of the series) follows. Cost events are only emitted when f > 0.
    """
    _check(series, strategy)
    rows = _as_rows(strategy.positions)
    f = cost.transition_cost
    n = len(series)
    steps = _event_steps(series.returns, rows, f)[0]
    entries, exits = _transitions(rows)

    present = np.ones((n, 3), dtype=bool)
    present[:, 0] = (entries[0] == 1) & (f > 0)
    present[:, 2] = (exits[0] == 1) & (f > 0)
    kinds = np.array([EventTag.COST, EventTag.RETURN, EventTag.COST], dtype=object)

    mask = present.reshape(-1)
    values = np.concatenate(([0.0], np.cumsum(steps.reshape(-1)[mask])))
    tags = (EventTag.START,) + tuple(np.tile(kinds, n)[mask])
    values.setflags(write=False)
    return EquityCurve(tags=tags, values=values)


def total_return(series: ReturnSeries, strategy: Strategy, cost: CostModel) -> float:
    """μ = Σ positions·r − 2f·(trade count)"""
    _check(series, strategy)
    rows = _as_rows(strategy.positions)
    return float(batch_total_return(series.returns, rows, cost.transition_cost)[0])


def max_drawdown(curve: EquityCurve) -> float:
    """Largest peak-to-trough decline, one pass with a running maximum."""
    if len(curve) == 0:
        return 0.0
    return float(_drawdowns(curve.values.reshape(1, -1))[0])


def sterling(series: ReturnSeries, strategy: Strategy, cost: CostModel) -> ObjectiveValue:
    return _objective(series, strategy, cost, Objective.STERLING)


def sharpe(series: ReturnSeries, strategy: Strategy, cost: CostModel) -> ObjectiveValue:
    """
    mean / population stdev of per-period net profits.

    Entry costs are charged to a trade's first period, exit costs to its last.
    """
    return _objective(series, strategy, cost, Objective.SHARPE)


def ssr(series: ReturnSeries, strategy: Strategy, cost: CostModel) -> ObjectiveValue:
    """
    Simplified Sharpe ratio: net total return over the stdev of gross invested
    returns. Costs never enter a squared term.
    """
    return _objective(series, strategy, cost, Objective.SSR)


def ddr(series: ReturnSeries, strategy: Strategy, cost: CostModel) -> ObjectiveValue:
    """Net total return over sqrt(mean of squared negative gross returns) over all n periods."""
    return _objective(series, strategy, cost, Objective.DDR)


def evaluate(series: ReturnSeries, strategy: Strategy, cost: CostModel, objective: Objective) -> ObjectiveValue:
    if objective is Objective.RETURN:
        return ObjectiveValue(total_return(series, strategy, cost))
    return _objective(series, strategy, cost, objective)


def perf_report(series: ReturnSeries, strategy: Strategy, cost: CostModel) -> PerfReport:
    curve = equity_curve(series, strategy, cost)
    return PerfReport(
        total_return=total_return(series, strategy, cost),
        mdd=max_drawdown(curve),
        sterling=sterling(series, strategy, cost),
        sharpe=sharpe(series, strategy, cost),
        ssr=ssr(series, strategy, cost),
        ddr=ddr(series, strategy, cost),
        n_trades=strategy.n_trades,
        invested_periods=int(strategy.positions.sum()),
    )
