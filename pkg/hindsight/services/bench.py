"""
Bench - scaling measurements for the optimizers
基准测试：按规模测量中位耗时并拟合增长指数

Inputs are generated from a seed, so every timing row can be reproduced.
Growth is reported as the slope of log(time) against log(n), which makes
results comparable across machines.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from hindsight.core.exceptions import ConfigError, UnknownOperationError
from hindsight.core.tasklog import log_task_end, log_task_start
from hindsight.core.types import CostModel, ReturnSeries
from hindsight.services.contraction import contract
from hindsight.services.fractional import (
    IntervalFractionalProblem,
    ddr_optimal_single_trade,
    max_linear_fractional_interval,
    ssr_optimal_single_trade,
)
from hindsight.services.return_opt import maximal_return_optimal, optimal_return_k, optimal_return_unconstrained
from hindsight.services.sterling_opt import best_single_trade_sterling, optimal_sterling_unconstrained

logger = logging.getLogger(__name__)

_SCALE = 0.01
_DRIFT = 0.0005


class BenchGenerator(str, Enum):
    IID_GAUSSIAN = "iid-gaussian"
    TRENDING = "trending"
    ALTERNATING = "alternating"


@dataclass(frozen=True)
class BenchCase:
    """A reproducible synthetic return series."""
    generator: BenchGenerator = BenchGenerator.IID_GAUSSIAN
    n: int = 1000
    seed: int = 0
    transition_cost: float = 5e-5

    def generate(self) -> ReturnSeries:
        rng = np.random.default_rng(self.seed)
        if self.generator is BenchGenerator.IID_GAUSSIAN:
            returns = rng.normal(0.0, _SCALE, self.n)
        elif self.generator is BenchGenerator.TRENDING:
            returns = rng.normal(_DRIFT, _SCALE, self.n)
        else:
            signs = np.where(np.arange(self.n) % 2 == 0, 1.0, -1.0)
            returns = signs * np.abs(rng.normal(0.0, _SCALE, self.n)) + rng.normal(0.0, _SCALE / 10, self.n)
        return ReturnSeries(returns)

    @property
    def cost(self) -> CostModel:
        return CostModel(self.transition_cost)


def _hull(series: ReturnSeries, cost: CostModel):
    problem = IntervalFractionalProblem.from_returns(series.returns, penalty=cost.spread)
    return max_linear_fractional_interval(problem)


OPERATIONS: Dict[str, Callable[[ReturnSeries, CostModel], object]] = {
    "contract": lambda series, cost: contract(series),
    "optimal_return_unconstrained": optimal_return_unconstrained,
    "maximal_return_optimal": maximal_return_optimal,
    "optimal_return_k": lambda series, cost: optimal_return_k(series, cost, 10),
    "best_single_trade_sterling": best_single_trade_sterling,
    "optimal_sterling_unconstrained": optimal_sterling_unconstrained,
    "max_linear_fractional_interval": _hull,
    "ssr_optimal_single_trade": ssr_optimal_single_trade,
    "ddr_optimal_single_trade": ddr_optimal_single_trade,
}


@dataclass(frozen=True)
class ScalingRow:
    n: int
    median_seconds: float
    repetitions: int


@dataclass
class ScalingTable:
    op_name: str
    generator: BenchGenerator
    rows: List[ScalingRow] = field(default_factory=list)

    @property
    def growth_exponent(self) -> Optional[float]:
        """Least-squares slope of log(time) over log(n); None with fewer than two timed sizes."""
        points = [(row.n, row.median_seconds) for row in self.rows if row.n > 0 and row.median_seconds > 0]
        if len(points) < 2:
            return None
        n, seconds = np.log(np.array(points, dtype=float)).T
        slope, _ = np.polyfit(n, seconds, 1)
        return float(slope)

    def ratio(self, small: int, large: int) -> float:
        times = {row.n: row.median_seconds for row in self.rows}
        return times[large] / times[small] if times[small] > 0 else math.inf

    def to_dict(self) -> Dict:
        return {
            "op": self.op_name,
            "generator": self.generator.value,
            "rows": [
                {"n": row.n, "median_seconds": row.median_seconds, "repetitions": row.repetitions}
                for row in self.rows
            ],
            "growth_exponent": self.growth_exponent,
        }


def run_scaling(
    op_name: str,
    sizes: Iterable[int],
    repetitions: int = 3,
    generator: BenchGenerator = BenchGenerator.IID_GAUSSIAN,
    seed: int = 0,
    transition_cost: float = 5e-5,
) -> ScalingTable:
    """
    Median wall time of a registered operation for each size, run serially.

    Sizes below 1 are skipped.

    Raises:
        UnknownOperationError: op_name is not registered
        ConfigError: repetitions < 1
    """
    operation = OPERATIONS.get(op_name)
    if operation is None:
        raise UnknownOperationError(f"unknown op {op_name!r}; registered: {', '.join(sorted(OPERATIONS))}")
    if repetitions < 1:
        raise ConfigError(f"repetitions must be >= 1, got {repetitions}")

    table = ScalingTable(op_name=op_name, generator=BenchGenerator(generator))
    for n in sizes:
        if n < 1:
            continue
        case = BenchCase(generator=table.generator, n=int(n), seed=seed, transition_cost=transition_cost)
        series, cost = case.generate(), case.cost

        log_task_start(logger, "BENCH", op=op_name, n=n, reps=repetitions)
        start_time = time.time()
        timings = []
        for _ in range(repetitions):
            tick = time.perf_counter()
            operation(series, cost)
            timings.append(time.perf_counter() - tick)
        median = float(np.median(timings))
        duration_ms = int((time.time() - start_time) * 1000)
        log_task_end(logger, "BENCH", duration_ms, True, op=op_name, n=n, median=f"{median:.6f}s")

        table.rows.append(ScalingRow(n=int(n), median_seconds=median, repetitions=repetitions))

    exponent = table.growth_exponent
    if exponent is not None:
        logger.info(f"[BENCH] {op_name} | growth_exponent={exponent:.3f}")
    return table
