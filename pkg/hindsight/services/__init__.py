"""
Hindsight Services Module
"""
from hindsight.services.contraction import ContractedSeries, contract, lift
from hindsight.services.fractional import (
    DenominatorTransform,
    IntervalFractionalProblem,
    IntervalOptimum,
    ddr_optimal_single_trade,
    max_concave_fractional_interval,
    max_linear_fractional_interval,
    ssr_optimal_single_trade,
)
from hindsight.services.metrics import (
    DrawdownSummary,
    EquityCurve,
    EventTag,
    PerfReport,
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
from hindsight.services.oracle import OracleBudget, dp_return_k, exhaustive_best, quadratic_single_trade
from hindsight.services.return_opt import (
    MergeCandidate,
    MergeKind,
    maximal_return_optimal,
    optimal_return_k,
    optimal_return_unconstrained,
    return_frontier,
)
from hindsight.services.sterling_opt import (
    best_single_trade_sterling,
    optimal_sterling_k,
    optimal_sterling_unconstrained,
    sterling_frontier,
)

__all__ = [
    "ContractedSeries",
    "contract",
    "lift",
    "DenominatorTransform",
    "IntervalFractionalProblem",
    "IntervalOptimum",
    "ddr_optimal_single_trade",
    "max_concave_fractional_interval",
    "max_linear_fractional_interval",
    "ssr_optimal_single_trade",
    "DrawdownSummary",
    "EquityCurve",
    "EventTag",
    "PerfReport",
    "ddr",
    "equity_curve",
    "evaluate",
    "max_drawdown",
    "perf_report",
    "sharpe",
    "ssr",
    "sterling",
    "total_return",
    "OracleBudget",
    "dp_return_k",
    "exhaustive_best",
    "quadratic_single_trade",
    "MergeCandidate",
    "MergeKind",
    "maximal_return_optimal",
    "optimal_return_k",
    "optimal_return_unconstrained",
    "return_frontier",
    "best_single_trade_sterling",
    "optimal_sterling_k",
    "optimal_sterling_unconstrained",
    "sterling_frontier",
]
