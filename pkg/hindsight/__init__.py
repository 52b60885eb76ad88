"""
Hindsight
事后最优交易策略 - 收益、Sterling、SSR 与 DDR 最优的全仓/空仓策略
"""

__version__ = "0.1.0"
__author__ = "Hindsight Team"

from hindsight.core.types import CostModel, Objective, ReturnSeries, Strategy, Trade
from hindsight.services.metrics import evaluate, perf_report
from hindsight.services.return_opt import optimal_return_k, optimal_return_unconstrained
from hindsight.services.sterling_opt import optimal_sterling_k, optimal_sterling_unconstrained

__all__ = [
    "CostModel",
    "Objective",
    "ReturnSeries",
    "Strategy",
    "Trade",
    "evaluate",
    "perf_report",
    "optimal_return_k",
    "optimal_return_unconstrained",
    "optimal_sterling_k",
    "optimal_sterling_unconstrained",
]
