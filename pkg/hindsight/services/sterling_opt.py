"""
Sterling Optimization - Sterling-ratio optimal strategies
Sterling 最优策略：单笔交易、无约束、至多 K 笔交易

Sterling = μ / MDD on the transaction-granular equity curve. A strategy with
two or more trades has MDD >= 2f, and a Sterling optimum with two or more
trades has MDD exactly 2f, so it is a return optimum. The unconstrained
optimum is therefore one of: the maximal return optimum, the best single
trade, or the empty strategy.
"""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from hindsight.core.exceptions import ConfigError
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
)
from hindsight.services.contraction import contract, trimmed_ends, widened_starts
from hindsight.services.metrics import DrawdownSummary, ratios, sterling, total_return
from hindsight.services.return_opt import MergeKind, maximal_return_optimal, reduction_sequence

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# single trade
# ---------------------------------------------------------------------------

def best_single_trade_sterling(series: ReturnSeries, cost: CostModel) -> SingleTradeResult:
    """
    Best Sterling ratio over single-trade strategies and the empty strategy.

    Entries are restricted to starts of positive contracted runs, widened over
    the zeros before them, and exits to the last nonzero return of a positive
    run. For an entry, every exit is scored at once from the running prefix
    extremes of the run sums:

        MDD = max(f - min P, internal drawdown, 2f - P_L, f + max P - P_L)

    Entries whose best conceivable ratio, (max P - 2f) / f, cannot beat the
    incumbent are skipped.
    """
    f = cost.transition_cost
    runs = contract(series)
    sums = runs.sums
    entries = widened_starts(series, runs.starts)
    exits = trimmed_ends(series, runs.ends)

    best_key: Optional[Tuple] = None
    best_trade: Optional[Trade] = None
    pruned = 0
    for k in runs.positive_runs():
        cum = np.cumsum(sums[k:])
        # runs alternate in sign, so positive exits sit at even offsets
        offsets = np.arange(0, cum.size, 2)
        if f > 0 and best_key is not None:
            bound = (cum[offsets].max() - 2.0 * f) / f
            if bound <= best_key[0]:
                pruned += 1
                continue

        peak = np.maximum.accumulate(np.maximum(cum, 0.0))
        trough = np.minimum.accumulate(np.minimum(cum, 0.0))
        inner = np.maximum.accumulate(peak - cum)
        level = cum[offsets]
        mdd = np.maximum.reduce([
            f - trough[offsets],
            inner[offsets],
            2.0 * f - level,
            f + peak[offsets] - level,
        ])
        mu = level - 2.0 * f
        values, _ = ratios(mu, mdd)

        j = best_candidate_index(values, mu)
        if j is None:
            continue
        start = int(entries[k])
        end = int(exits[k + offsets[j]])
        key = single_trade_rank(float(values[j]), float(mu[j]), start, end - start)
        if best_key is None or key > best_key:
            best_key = key
            best_trade = Trade(start, end)

    logger.debug(
        f"[STERLING_OPT] single | n={len(series)} | runs={len(runs)} | pruned={pruned} | trade={best_trade}"
    )
    if best_trade is None:
        return SingleTradeResult.none()
    strategy = strategy_of([best_trade], len(series))
    value = sterling(series, strategy, cost)
    return SingleTradeResult(trade=best_trade, value=value, mu=total_return(series, strategy, cost))


# ---------------------------------------------------------------------------
# unconstrained
# ---------------------------------------------------------------------------

def optimal_sterling_unconstrained(series: ReturnSeries, cost: CostModel) -> Strategy:
    """
    argmax of Sterling over three candidates: the maximal return optimum,
    the best single trade and the empty strategy. Ties prefer the single
    trade, then the empty strategy.
    """
    n = len(series)
    single = best_single_trade_sterling(series, cost)
    best, best_value = single.strategy(n), single.value.value

    maximal = maximal_return_optimal(series, cost)
    maximal_value = sterling(series, maximal, cost).value
    if maximal_value > best_value and maximal_value > 0:
        best, best_value = maximal, maximal_value

    logger.debug(
        f"[STERLING_OPT] unconstrained | n={n} | single={single.value.value:.6g} "
        f"| maximal={maximal_value:.6g} | trades={best.n_trades}"
    )
    return best


# ---------------------------------------------------------------------------
# at most K trades
# ---------------------------------------------------------------------------

def _greedy_sterling_records(series: ReturnSeries, cost: CostModel, trades: List[Trade]) -> Dict[int, List[Trade]]:
    """
    Greedy reduction by resulting Sterling ratio, down to one trade.

    Each candidate (merge an adjacent pair across its gap, or drop a trade)
    is scored in O(1) from prefix and suffix folds of per-trade drawdown
    summaries.
    """
    r = series.returns
    f = cost.transition_cost
    fee = DrawdownSummary.of_step(-f) if f > 0 else DrawdownSummary()

    def framed(raw: DrawdownSummary) -> DrawdownSummary:
        return fee.combine(raw).combine(fee)

    spans = [(t.start, t.end) for t in trades]
    raws = [DrawdownSummary.of_steps(r[a:b]) for a, b in spans]
    gaps = [DrawdownSummary.of_steps(r[spans[i][1]:spans[i + 1][0]]) for i in range(len(spans) - 1)]
    records = {len(spans): list(trades)}

    while len(spans) > 1:
        count = len(spans)
        curves = [framed(raw) for raw in raws]
        prefix = [DrawdownSummary()]
        for piece in curves:
            prefix.append(prefix[-1].combine(piece))
        suffix = [DrawdownSummary()] * (count + 1)
        for i in range(count - 1, -1, -1):
            suffix[i] = curves[i].combine(suffix[i + 1])

        best = None
        for i in range(count - 1):
            joined = raws[i].combine(gaps[i]).combine(raws[i + 1])
            total = prefix[i].combine(framed(joined)).combine(suffix[i + 2])
            value = ObjectiveValue.ratio(total.delta, total.mdd).value
            key = (value, 1, -spans[i][0])
            if best is None or key > best[0]:
                best = (key, MergeKind.MERGE_GAP, i, joined)
        for i in range(count):
            total = prefix[i].combine(suffix[i + 1])
            value = ObjectiveValue.ratio(total.delta, total.mdd).value
            key = (value, 0, -spans[i][0])
            if key > best[0]:
                best = (key, MergeKind.DROP_TRADE, i, None)

        (value, _, _), kind, i, joined = best
        if kind is MergeKind.MERGE_GAP:
            spans[i] = (spans[i][0], spans[i + 1][1])
            raws[i] = joined
            del spans[i + 1], raws[i + 1], gaps[i]
        else:
            if 0 < i < count - 1:
                gaps[i - 1] = gaps[i - 1].combine(raws[i]).combine(gaps[i])
                del gaps[i]
            elif i == 0:
                del gaps[0]
            else:
                del gaps[i - 1]
            del spans[i], raws[i]
        logger.debug(
            f"[STERLING_OPT] greedy | kind={kind.value} | target={i} | sterling={value:.6g} | trades={len(spans)}"
        )
        records[len(spans)] = [Trade(a, b) for a, b in spans]
    return records


class _Candidates:
    """Strategies with known trade counts, evaluated once each."""

    def __init__(self, series: ReturnSeries, cost: CostModel):
        self.series = series
        self.cost = cost
        self.items: List[Tuple[int, Strategy, float]] = []

    def add(self, strategy: Strategy) -> None:
        value = sterling(self.series, strategy, self.cost).value
        self.items.append((strategy.n_trades, strategy, value))

    def best(self, max_trades: int) -> Tuple[Strategy, float]:
        """First-added candidate with the strictly largest value among those within budget."""
        chosen, chosen_value = None, -math.inf
        for n_trades, strategy, value in self.items:
            if n_trades <= max_trades and value > chosen_value:
                chosen, chosen_value = strategy, value
        return chosen, chosen_value


def _k_candidates(series: ReturnSeries, cost: CostModel) -> Tuple[_Candidates, int]:
    n = len(series)
    candidates = _Candidates(series, cost)
    candidates.add(best_single_trade_sterling(series, cost).strategy(n))
    candidates.add(Strategy.empty(n))

    maximal = maximal_return_optimal(series, cost)
    greedy = _greedy_sterling_records(series, cost, maximal.trades)
    # the return-greedy path is a second source of records at every count
    by_return = reduction_sequence(series, cost, 1) if maximal.n_trades > 1 else {}
    for count in sorted(set(greedy) | set(by_return)):
        for source in (greedy, by_return):
            if count in source:
                candidates.add(strategy_of(source[count], n))
    return candidates, maximal.n_trades


def optimal_sterling_k(series: ReturnSeries, cost: CostModel, max_trades: int) -> Strategy:
    """
    Maximizes Sterling over strategies with at most max_trades trades.

    Raises:
        ConfigError: max_trades is negative
    """
    if max_trades < 0:
        raise ConfigError(f"max_trades must be >= 0, got {max_trades}")
    n = len(series)
    if max_trades == 0:
        return Strategy.empty(n)
    if maximal_return_optimal(series, cost).n_trades <= max_trades:
        return optimal_sterling_unconstrained(series, cost)

    candidates, _ = _k_candidates(series, cost)
    best, value = candidates.best(max_trades)
    logger.debug(f"[STERLING_OPT] k | n={n} | k={max_trades} | sterling={value:.6g} | trades={best.n_trades}")
    return best


def sterling_frontier(series: ReturnSeries, cost: CostModel, max_trades: int) -> Dict[int, float]:
    """Best Sterling ratio with at most k trades, for k = 0..max_trades."""
    if max_trades < 0:
        raise ConfigError(f"max_trades must be >= 0, got {max_trades}")
    candidates, top = _k_candidates(series, cost)
    unconstrained = sterling(series, optimal_sterling_unconstrained(series, cost), cost).value
    frontier = {0: 0.0}
    for k in range(1, max_trades + 1):
        frontier[k] = unconstrained if k >= top else candidates.best(k)[1]
    return frontier
