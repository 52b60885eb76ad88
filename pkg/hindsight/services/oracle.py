"""
Oracles - slow reference optimizers for small instances

Every objective is evaluated through hindsight.services.metrics, so an
oracle and a fast optimizer can only disagree about the search, never about
what a value means.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from hindsight.core.config import get_settings
from hindsight.core.exceptions import BudgetExceededError, ConfigError
from hindsight.core.types import (
    CostModel,
    Objective,
    ObjectiveValue,
    ReturnSeries,
    SingleTradeResult,
    Strategy,
    Trade,
    best_candidate_index,
    single_trade_rank,
)
from hindsight.services.metrics import batch_objective, batch_total_return, batch_trade_counts

logger = logging.getLogger(__name__)

# position rows evaluated per batch_objective call
_CHUNK_ROWS = 1 << 13


@dataclass(frozen=True)
class OracleBudget:
    """Largest n for 2ⁿ enumeration and largest n·K for the return DP."""
    max_n: int = 20
    max_nk: int = 1_000_000

    def __post_init__(self):
        if self.max_n <= 0 or self.max_nk <= 0:
            raise ConfigError(f"oracle budget must be positive, got max_n={self.max_n}, max_nk={self.max_nk}")

    @classmethod
    def from_settings(cls) -> "OracleBudget":
        settings = get_settings()
        return cls(max_n=settings.oracle_max_n, max_nk=settings.oracle_max_nk)


def _all_positions(n: int, lo: int, hi: int) -> np.ndarray:
    """Rows lo..hi-1 of the 2ⁿ enumeration; bit t of the row number is period t."""
    codes = np.arange(lo, hi, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)


def exhaustive_best(
    series: ReturnSeries,
    cost: CostModel,
    objective: Objective,
    max_trades: Optional[int] = None,
    budget: Optional[OracleBudget] = None,
) -> Tuple[Strategy, ObjectiveValue]:
    """
    Best of all 2ⁿ position vectors, optionally limited to max_trades trades.

    Ties prefer: among +inf values the larger return, then fewer trades,
    the earliest first invested period, and fewer invested periods.

    Raises:
        BudgetExceededError: n > budget.max_n
    """
    budget = budget or OracleBudget.from_settings()
    n = len(series)
    if n > budget.max_n:
        raise BudgetExceededError(f"exhaustive search over n={n} exceeds max_n={budget.max_n}")
    if max_trades is not None and max_trades < 0:
        raise ConfigError(f"max_trades must be >= 0, got {max_trades}")
    if n == 0:
        return Strategy.empty(0), ObjectiveValue(0.0, by_convention=objective is not Objective.RETURN)

    r = series.returns
    f = cost.transition_cost
    values, flags, mus, counts, firsts, sizes = [], [], [], [], [], []
    for lo in range(0, 1 << n, _CHUNK_ROWS):
        rows = _all_positions(n, lo, min(lo + _CHUNK_ROWS, 1 << n))
        value, flag = batch_objective(r, rows, f, objective)
        invested = rows.sum(axis=1)
        values.append(value)
        flags.append(flag)
        mus.append(batch_total_return(r, rows, f))
        counts.append(batch_trade_counts(rows))
        firsts.append(np.where(invested > 0, np.argmax(rows, axis=1), n))
        sizes.append(invested)

    value, flag, mu, count, first, size = (
        np.concatenate(parts) for parts in (values, flags, mus, counts, firsts, sizes)
    )
    if max_trades is not None:
        value = np.where(count <= max_trades, value, -np.inf)
    inf_mu = np.where(np.isinf(value) & (value > 0), mu, 0.0)
    best = int(np.lexsort((-size, -first, -count, inf_mu, value))[-1])

    strategy = Strategy(_all_positions(n, best, best + 1)[0])
    logger.debug(
        f"[ORACLE] exhaustive | n={n} | objective={objective.value} | k={max_trades} | value={value[best]:.12g}"
    )
    return strategy, ObjectiveValue(float(value[best]), by_convention=bool(flag[best]))


def dp_return_k(
    series: ReturnSeries,
    cost: CostModel,
    max_trades: int,
    budget: Optional[OracleBudget] = None,
) -> float:
    """
    Best total return with at most max_trades trades.

    O(n·K) dynamic program over (period, trades used, flat/invested), one
    numpy vector over the trade count per period.

    Raises:
        ConfigError: max_trades < 0
        BudgetExceededError: n·K > budget.max_nk
    """
    budget = budget or OracleBudget.from_settings()
    if max_trades < 0:
        raise ConfigError(f"max_trades must be >= 0, got {max_trades}")
    n = len(series)
    if n * max_trades > budget.max_nk:
        raise BudgetExceededError(f"n*K={n * max_trades} exceeds max_nk={budget.max_nk}")
    if max_trades == 0 or n == 0:
        return 0.0

    f = cost.transition_cost
    # index k: at most k trades started so far
    flat = np.zeros(max_trades + 1)
    inv = np.full(max_trades + 1, -np.inf)
    for ret in series.returns:
        entered = np.concatenate(([-np.inf], flat[:-1] - f))
        new_inv = np.maximum(inv, entered) + ret
        flat = np.maximum(flat, inv - f)
        inv = new_inv
    return float(max(flat[-1], inv[-1] - f))


def quadratic_single_trade(
    series: ReturnSeries,
    cost: CostModel,
    objective: Objective,
    max_n: Optional[int] = None,
) -> SingleTradeResult:
    """
    Best single trade over all n(n+1)/2 period-level intervals.

    Each start's trades are evaluated as one batch of position rows.

    Raises:
        BudgetExceededError: n > max_n (settings.quadratic_max_n by default)
    """
    limit = get_settings().quadratic_max_n if max_n is None else max_n
    n = len(series)
    if n > limit:
        raise BudgetExceededError(f"quadratic scan over n={n} exceeds max_n={limit}")

    r = series.returns
    f = cost.transition_cost
    periods = np.arange(n)
    best_key, best = None, SingleTradeResult.none()
    for start in range(n):
        ends = np.arange(start + 1, n + 1)
        values, mus = [], []
        for lo in range(0, ends.size, _CHUNK_ROWS // 4):
            chunk = ends[lo:lo + _CHUNK_ROWS // 4]
            rows = ((periods[None, :] >= start) & (periods[None, :] < chunk[:, None])).astype(np.int8)
            value, _ = batch_objective(r, rows, f, objective)
            values.append(value)
            mus.append(batch_total_return(r, rows, f))
        value, mu = np.concatenate(values), np.concatenate(mus)

        e = best_candidate_index(value, mu)
        if e is None:
            continue
        end = int(ends[e])
        key = single_trade_rank(float(value[e]), float(mu[e]), start, end - start)
        if best_key is None or key > best_key:
            best_key = key
            best = SingleTradeResult(trade=Trade(start, end), value=ObjectiveValue(float(value[e])), mu=float(mu[e]))
    return best
