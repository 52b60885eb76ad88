"""
Objective dispatch and output documents.
"""
import logging
import math
import time
from typing import Dict, Optional

from hindsight.cli.models import RunConfig, RunObjective
from hindsight.core.exceptions import ConfigError, LengthMismatchError
from hindsight.core.tasklog import log_task_end, log_task_error, log_task_start
from hindsight.core.types import CostModel, ReturnSeries, Strategy
from hindsight.services.fractional import ddr_optimal_single_trade, ssr_optimal_single_trade
from hindsight.services.metrics import PerfReport, equity_curve, perf_report, sterling, total_return
from hindsight.services.return_opt import optimal_return_k, optimal_return_unconstrained, return_frontier
from hindsight.services.sterling_opt import optimal_sterling_k, optimal_sterling_unconstrained, sterling_frontier

logger = logging.getLogger(__name__)

_SINGLE_TRADE = {
    RunObjective.SSR: ssr_optimal_single_trade,
    RunObjective.DDR: ddr_optimal_single_trade,
}


def optimize(series: ReturnSeries, cost: CostModel, objective: RunObjective, max_trades: Optional[int]) -> Strategy:
    n = len(series)
    if objective is RunObjective.RETURN:
        if max_trades is None:
            return optimal_return_unconstrained(series, cost)
        return optimal_return_k(series, cost, max_trades)
    if objective is RunObjective.STERLING:
        if max_trades is None:
            return optimal_sterling_unconstrained(series, cost)
        return optimal_sterling_k(series, cost, max_trades)
    if objective in _SINGLE_TRADE:
        # single-trade class: any K >= 1 admits the same optimum
        if max_trades == 0:
            return Strategy.empty(n)
        return _SINGLE_TRADE[objective](series, cost).strategy(n)
    raise ConfigError(f"objective {objective.value} does not optimize")


def frontier(series: ReturnSeries, cost: CostModel, objective: RunObjective, max_trades: int) -> Dict[int, float]:
    """Best value with at most k trades, k = 0..max_trades."""
    if objective is RunObjective.RETURN:
        return return_frontier(series, cost, max_trades)
    if objective is RunObjective.STERLING:
        return sterling_frontier(series, cost, max_trades)
    best = _SINGLE_TRADE[objective](series, cost).value.value
    return {k: (best if k >= 1 else 0.0) for k in range(max_trades + 1)}


def _efficiency(value: float, best: float, tolerance: float) -> Optional[float]:
    if not (math.isfinite(value) and math.isfinite(best)) or abs(best) <= tolerance:
        return None
    return value / best


def benchmark(series: ReturnSeries, cost: CostModel, report: PerfReport, tolerance: float) -> Dict:
    """How a given strategy compares with the a-posteriori optima."""
    mu_star = total_return(series, optimal_return_unconstrained(series, cost), cost)
    sterling_star = sterling(series, optimal_sterling_unconstrained(series, cost), cost)
    return {
        "optimal_total_return": mu_star,
        "optimal_sterling": sterling_star.to_json(),
        "return_efficiency": _efficiency(report.total_return, mu_star, tolerance),
        "sterling_efficiency": _efficiency(report.sterling.value, sterling_star.value, tolerance),
    }


def run(config: RunConfig, series: ReturnSeries, positions: Optional[Strategy] = None, source: Optional[str] = None) -> Dict:
    """
    Build the output document for one series.

    Keys: config, strategy, metrics, frontier (when max_trades is set and an
    optimizer ran), equity_curve, and benchmark for objective=report.
    """
    cost = config.cost
    objective = config.objective
    log_task_start(logger, "OPTIMIZE", source=source, objective=objective.value, n=len(series), k=config.max_trades)
    start_time = time.time()
    try:
        if objective is RunObjective.REPORT:
            if positions is None:
                raise ConfigError("objective=report needs a positions column")
            if len(positions) != len(series):
                raise LengthMismatchError("positions", len(series), len(positions))
            strategy = positions
        else:
            strategy = optimize(series, cost, objective, config.max_trades)

        report = perf_report(series, strategy, cost)
        document = {"config": dict(config.echo(), input=source)}
        document["strategy"] = [trade.to_dict(series.labels) for trade in strategy.trades]
        document["metrics"] = report.to_dict()
        if config.max_trades is not None and objective is not RunObjective.REPORT:
            values = frontier(series, cost, objective, config.max_trades)
            document["frontier"] = {str(k): v for k, v in values.items()}
        document["equity_curve"] = equity_curve(series, strategy, cost).values.tolist()
        if objective is RunObjective.REPORT:
            document["benchmark"] = benchmark(series, cost, report, config.tolerance)
    except Exception as e:
        log_task_error(logger, "OPTIMIZE", e, source=source)
        raise

    duration_ms = int((time.time() - start_time) * 1000)
    log_task_end(logger, "OPTIMIZE", duration_ms, True, source=source, trades=strategy.n_trades)
    return document
