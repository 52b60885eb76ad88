"""
Fractional Optimization - quotients maximized over intervals of a sequence
分式优化：区间上的比值最大化（线性分母用凸包，凹分母用 Dinkelbach）

A problem is given by prefix arrays A (numerator) and B (denominator) and a
constant penalty c; interval (i, j] scores

    (A_j - A_i - c) / g(B_j - B_i)

with g the identity or the square root. The SSR and DDR single-trade
optimizers at the bottom of this module are concrete scans over such
intervals.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from hindsight.core.config import get_settings
from hindsight.core.exceptions import ConfigError, InfeasibleProblemError
from hindsight.core.types import (
    CostModel,
    ReturnSeries,
    SingleTradeResult,
    Trade,
    best_candidate_index,
    single_trade_rank,
    strategy_of,
)
from hindsight.services.contraction import contract, trimmed_ends, widened_starts
from hindsight.services.metrics import ddr, ratios, ssr, total_return

logger = logging.getLogger(__name__)

# rows of the (i, j) score matrix evaluated per numpy block
_BLOCK_ROWS = 256


class DenominatorTransform(str, Enum):
    IDENTITY = "identity"
    SQRT = "sqrt"

    def apply(self, x):
        return np.sqrt(x) if self is DenominatorTransform.SQRT else x


@dataclass(frozen=True, eq=False)
class IntervalFractionalProblem:
    """
    Maximize (A_j - A_i - penalty) / g(B_j - B_i) over j - i >= min_length.

    numerator and denominator are the prefix arrays A_0..A_n and B_0..B_n;
    B must be strictly increasing.
    """
    numerator: np.ndarray
    denominator: np.ndarray
    penalty: float = 0.0
    transform: DenominatorTransform = DenominatorTransform.IDENTITY
    min_length: int = 1

    def __post_init__(self):
        a = np.asarray(self.numerator, dtype=float).reshape(-1)
        b = np.asarray(self.denominator, dtype=float).reshape(-1)
        if a.size != b.size or a.size == 0:
            raise InfeasibleProblemError(
                f"prefix arrays must be non-empty and equally long, got {a.size} and {b.size}"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InfeasibleProblemError("prefix arrays must be finite")
        if np.any(np.diff(b) <= 0):
            raise InfeasibleProblemError("denominator prefix must be strictly increasing")
        if not math.isfinite(self.penalty) or self.penalty < 0:
            raise InfeasibleProblemError(f"penalty must be finite and >= 0, got {self.penalty}")
        if self.min_length < 1:
            raise InfeasibleProblemError(f"min_length must be >= 1, got {self.min_length}")
        object.__setattr__(self, "numerator", a)
        object.__setattr__(self, "denominator", b)
        object.__setattr__(self, "transform", DenominatorTransform(self.transform))

    @classmethod
    def from_returns(
        cls,
        returns,
        penalty: float = 0.0,
        transform: DenominatorTransform = DenominatorTransform.IDENTITY,
        min_length: int = 1,
    ) -> "IntervalFractionalProblem":
        """(sum - penalty) / g(length) over intervals of a return sequence."""
        r = np.asarray(returns, dtype=float).reshape(-1)
        return cls(
            numerator=np.concatenate(([0.0], np.cumsum(r))),
            denominator=np.arange(r.size + 1, dtype=float),
            penalty=penalty,
            transform=transform,
            min_length=min_length,
        )

    @property
    def n(self) -> int:
        return int(self.numerator.size) - 1

    def interval_numerator(self, i: int, j: int) -> float:
        return float(self.numerator[j] - self.numerator[i] - self.penalty)

    def interval_denominator(self, i: int, j: int) -> float:
        return float(self.transform.apply(self.denominator[j] - self.denominator[i]))

    def objective(self, i: int, j: int) -> float:
        return self.interval_numerator(i, j) / self.interval_denominator(i, j)

    def require_feasible(self) -> None:
        if self.n < self.min_length:
            raise InfeasibleProblemError(
                f"series of length {self.n} has no interval of length >= {self.min_length}"
            )

    def scan(self) -> "IntervalOptimum":
        """Direct O(n²) ratio scan; ties go to the earliest i, then the smallest j."""
        self.require_feasible()
        value, i, j = _best_interval(self, lambda num, den: num / den)
        return IntervalOptimum(start=i, end=j, value=value)


@dataclass(frozen=True)
class IntervalOptimum:
    """Best interval (start, end]; start and end are None when no interval qualifies."""
    start: Optional[int]
    end: Optional[int]
    value: float
    iterations: int = 0
    lambdas: Tuple[float, ...] = ()

    @property
    def found(self) -> bool:
        return self.start is not None


def _best_interval(
    problem: IntervalFractionalProblem,
    score: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> Tuple[float, int, int]:
    """
    argmax of score(numerator, denominator) over all admissible intervals.

    Rows are i, columns j; np.argmax returns the first maximum in row-major
    order, which is the earliest i and then the smallest j.
    """
    a, b = problem.numerator, problem.denominator
    n, min_len = problem.n, problem.min_length
    cols = np.arange(n + 1)
    best = (-math.inf, -1, -1)
    for lo in range(0, n - min_len + 1, _BLOCK_ROWS):
        rows = np.arange(lo, min(lo + _BLOCK_ROWS, n - min_len + 1))
        valid = cols[None, :] - rows[:, None] >= min_len
        num = a[None, :] - a[rows, None] - problem.penalty
        span = np.where(valid, b[None, :] - b[rows, None], 1.0)
        scores = np.where(valid, score(num, problem.transform.apply(span)), -math.inf)
        flat = int(np.argmax(scores))
        top = float(scores.flat[flat])
        if top > best[0]:
            r, c = divmod(flat, scores.shape[1])
            best = (top, int(rows[r]), int(c))
    return best


# ---------------------------------------------------------------------------
# linear denominator: lower convex hull
# ---------------------------------------------------------------------------

def max_linear_fractional_interval(problem: IntervalFractionalProblem) -> IntervalOptimum:
    """
    Exact maximum of (A_j - A_i - c) / (B_j - B_i) in O(n log n).

    For a fixed j the best i is the tangent point from P_j = (B_j, A_j - c)
    to the lower convex hull of Q_i = (B_i, A_i), i <= j - L. The hull grows
    by one point per j; the tangent is found by binary search on the slope
    from P_j, which is unimodal along the hull.

    Raises:
        ConfigError: the problem uses a non-linear denominator
        InfeasibleProblemError: n < min_length
    """
    if problem.transform is not DenominatorTransform.IDENTITY:
        raise ConfigError("the hull method needs an identity denominator transform")
    problem.require_feasible()

    a, b, c = problem.numerator, problem.denominator, problem.penalty
    hull_x, hull_y, hull_i = [], [], []
    best_value, best_i, best_j = -math.inf, -1, -1

    for j in range(problem.min_length, problem.n + 1):
        k = j - problem.min_length
        x, y = b[k], a[k]
        # collinear middle points go, so a tied tangent lands on the earliest index
        while len(hull_x) >= 2:
            cross = (hull_x[-1] - hull_x[-2]) * (y - hull_y[-2]) - (hull_y[-1] - hull_y[-2]) * (x - hull_x[-2])
            if cross > 0:
                break
            hull_x.pop()
            hull_y.pop()
            hull_i.pop()
        hull_x.append(x)
        hull_y.append(y)
        hull_i.append(k)

        px, py = b[j], a[j] - c
        lo, hi = 0, len(hull_x) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            here = (py - hull_y[mid]) / (px - hull_x[mid])
            after = (py - hull_y[mid + 1]) / (px - hull_x[mid + 1])
            if after > here:
                lo = mid + 1
            else:
                hi = mid
        i = hull_i[lo]
        value = (a[j] - a[i] - c) / (b[j] - b[i])
        if value > best_value or (value == best_value and i < best_i):
            best_value, best_i, best_j = float(value), i, j

    logger.debug(
        f"[FRACTIONAL] hull | n={problem.n} | interval=({best_i}, {best_j}] | value={best_value:.12g}"
    )
    return IntervalOptimum(start=best_i, end=best_j, value=best_value)


# ---------------------------------------------------------------------------
# concave denominator: Dinkelbach iteration
# ---------------------------------------------------------------------------

def max_concave_fractional_interval(
    problem: IntervalFractionalProblem,
    tolerance: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> IntervalOptimum:
    """
    Dinkelbach's parametric method.

    v(λ) = max over intervals of N - λ·D is evaluated by a full O(n²) scan;
    the next λ is the ratio of the interval attaining v(λ). λ starts at the
    full-interval ratio floored at 0 and never decreases. The iteration
    stops once v(λ) <= tolerance.

    Returns value 0 and no interval when no interval has a positive
    numerator.

    Raises:
        ConfigError: tolerance <= 0
        InfeasibleProblemError: n < min_length
    """
    settings = get_settings()
    eps = settings.tolerance if tolerance is None else float(tolerance)
    if not eps > 0:
        raise ConfigError(f"tolerance must be > 0, got {tolerance}")
    limit = settings.dinkelbach_max_iter if max_iter is None else int(max_iter)
    if limit < 1:
        raise ConfigError(f"max_iter must be >= 1, got {max_iter}")
    problem.require_feasible()

    top_numerator, _, _ = _best_interval(problem, lambda num, den: num)
    if not top_numerator > 0:
        return IntervalOptimum(start=None, end=None, value=0.0)

    lam = max(0.0, problem.objective(0, problem.n))
    lambdas = [lam]
    for iterations in range(1, limit + 1):
        v, i, j = _best_interval(problem, lambda num, den, lam=lam: num - lam * den)
        ratio = problem.objective(i, j)
        logger.debug(f"[FRACTIONAL] dinkelbach | iter={iterations} | lambda={lam:.12g} | v={v:.3e}")
        if v <= eps:
            break
        lam = ratio
        lambdas.append(lam)
    else:
        logger.warning(f"[FRACTIONAL] dinkelbach | no convergence after {limit} iterations | v={v:.3e}")

    return IntervalOptimum(start=i, end=j, value=ratio, iterations=iterations, lambdas=tuple(lambdas))


# ---------------------------------------------------------------------------
# single-trade SSR and DDR
# ---------------------------------------------------------------------------

def _pick_single_trade(
    starts: np.ndarray,
    ends: np.ndarray,
    score: Callable[[int, np.ndarray], Tuple[np.ndarray, np.ndarray]],
) -> Optional[Trade]:
    """
    Best trade [starts[k], ends[e]) over candidate entries and exits.

    score(k, exits) returns (values, mu) for entry k against the exit ends
    not before it, in increasing order.
    """
    best_key, best_trade = None, None
    for k, start in enumerate(starts):
        exits = ends[ends > start]
        if exits.size == 0:
            continue
        values, mu = score(k, exits)
        e = best_candidate_index(values, mu)
        if e is None:
            continue
        end = int(exits[e])
        key = single_trade_rank(float(values[e]), float(mu[e]), int(start), end - int(start))
        if best_key is None or key > best_key:
            best_key, best_trade = key, Trade(int(start), end)
    return best_trade


def ssr_optimal_single_trade(series: ReturnSeries, cost: CostModel) -> SingleTradeResult:
    """
    Best simplified Sharpe ratio over single trades and the empty strategy.

    Trades end on a positive return and start on one, or on the zeros right
    before it: trimming a non-positive return from either edge never lowers
    a positive SSR. Every remaining pair is scored from prefix sums of r and
    r².
    """
    r = series.returns
    n = r.size
    f = cost.transition_cost
    positive = np.flatnonzero(r > 0)
    if positive.size == 0:
        return SingleTradeResult.none()

    s1 = np.concatenate(([0.0], np.cumsum(r)))
    s2 = np.concatenate(([0.0], np.cumsum(r * r)))
    constant = np.ptp(r) == 0
    starts, ends = widened_starts(series, positive), positive + 1

    def score(k, exits):
        a = starts[k]
        total = s1[exits] - s1[a]
        mean = total / n
        var = np.maximum((s2[exits] - s2[a]) / n - mean * mean, 0.0)
        std = np.sqrt(var)
        if constant:
            std = np.where((a == 0) & (exits == n), 0.0, std)
        mu = total - 2.0 * f
        values, _ = ratios(mu, std)
        return values, mu

    trade = _pick_single_trade(starts, ends, score)
    logger.debug(f"[FRACTIONAL] ssr single | n={n} | candidates={positive.size} | trade={trade}")
    if trade is None:
        return SingleTradeResult.none()
    strategy = strategy_of([trade], n)
    return SingleTradeResult(trade=trade, value=ssr(series, strategy, cost), mu=total_return(series, strategy, cost))


def ddr_optimal_single_trade(series: ReturnSeries, cost: CostModel) -> SingleTradeResult:
    """
    Best downside deviation ratio over single trades and the empty strategy.

    Entries are starts of positive contracted runs, widened over preceding
    zeros, and exits follow their last nonzero return. A trade over no negative return has zero downside
    and scores +inf when its return is positive.
    """
    r = series.returns
    n = r.size
    f = cost.transition_cost
    runs = contract(series)
    positive = runs.positive_runs()
    if positive.size == 0:
        return SingleTradeResult.none()

    s1 = np.concatenate(([0.0], np.cumsum(r)))
    down = np.concatenate(([0.0], np.cumsum(np.minimum(r, 0.0) ** 2)))
    starts = widened_starts(series, runs.starts[positive])
    ends = trimmed_ends(series, runs.ends[positive])

    def score(k, exits):
        a = starts[k]
        mu = s1[exits] - s1[a] - 2.0 * f
        deviation = np.sqrt((down[exits] - down[a]) / n)
        values, _ = ratios(mu, deviation)
        return values, mu

    trade = _pick_single_trade(starts, ends, score)
    logger.debug(f"[FRACTIONAL] ddr single | n={n} | runs={len(runs)} | trade={trade}")
    if trade is None:
        return SingleTradeResult.none()
    strategy = strategy_of([trade], n)
    return SingleTradeResult(trade=trade, value=ddr(series, strategy, cost), mu=total_return(series, strategy, cost))
