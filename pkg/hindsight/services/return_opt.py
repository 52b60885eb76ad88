"""
Return Optimization - total-return optimal strategies
收益最优策略：无约束、极大（区间不可扩展）、至多 K 笔交易

The K-constrained search starts from the maximal return-optimal strategy and
reduces the trade count greedily. Trades and the gaps between them form an
alternating chain; with weights

    trade  : net return      = sum - 2f
    gap    : merge loss      = -sum - 2f

every reduction either drops a trade or merges across a gap, loses exactly
that element's weight, and replaces the element and its two neighbours by
one element whose weight is left + right - own. Taking the lightest element
first is exact on such chains.
"""
import heapq
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import count
from typing import Dict, List, Optional, Tuple

import numpy as np

from hindsight.core.exceptions import ConfigError
from hindsight.core.types import CostModel, ReturnSeries, Strategy, Trade, strategy_of
from hindsight.services.metrics import total_return

logger = logging.getLogger(__name__)


class MergeKind(str, Enum):
    """Greedy reduction actions; the declaration order is the tie-break order."""
    MERGE_GAP = "merge-gap"
    DROP_TRADE = "drop-trade"


@dataclass(frozen=True)
class MergeCandidate:
    """Applying the candidate changes μ by delta_mu (never positive on a return optimum)."""
    kind: MergeKind
    target: int
    delta_mu: float


# ---------------------------------------------------------------------------
# unconstrained
# ---------------------------------------------------------------------------

def _two_state_dp(r: np.ndarray, f: float, prefer_invested: bool) -> List[Trade]:
    """
    O(n) flat/invested dynamic program with a cost f per transition.

    States carry (μ, trades, invested periods) and are compared
    lexicographically; prefer_invested decides the secondary keys. False keeps
    trades as few and then as short as possible, True keeps as many periods
    invested as possible.
    """
    n = r.size
    if n == 0:
        return []

    if prefer_invested:
        def key(state):
            return state[0], state[2], -state[1]
    else:
        def key(state):
            return state[0], -state[1], -state[2]

    # stay[t][s]: at period t in state s, the predecessor state was also s
    stay_flat = np.zeros(n, dtype=bool)
    stay_inv = np.zeros(n, dtype=bool)
    flat = (0.0, 0, 0)
    inv = None
    for t in range(n):
        enter = (flat[0] - f, flat[1] + 1, flat[2])
        stay_inv[t] = inv is not None and key(inv) >= key(enter)
        base = inv if stay_inv[t] else enter
        new_inv = (base[0] + float(r[t]), base[1], base[2] + 1)
        stay_flat[t] = inv is None or key(flat) >= key((inv[0] - f, inv[1], inv[2]))
        new_flat = flat if stay_flat[t] else (inv[0] - f, inv[1], inv[2])
        flat, inv = new_flat, new_inv

    final_exit = (inv[0] - f, inv[1], inv[2])
    invested = key(final_exit) > key(flat)

    positions = np.zeros(n, dtype=np.int8)
    for t in range(n - 1, -1, -1):
        positions[t] = 1 if invested else 0
        invested = stay_inv[t] if invested else not stay_flat[t]
    return Strategy(positions).trades


def optimal_return_unconstrained(series: ReturnSeries, cost: CostModel) -> Strategy:
    """Maximizes total return; ties go to fewer, then shorter trades."""
    trades = _two_state_dp(series.returns, cost.transition_cost, prefer_invested=False)
    logger.debug(f"[RETURN_OPT] unconstrained | n={len(series)} | trades={len(trades)}")
    return strategy_of(trades, len(series))


def _absorb_zero_marginals(r: np.ndarray, f: float, trades: List[Trade]) -> List[Trade]:
    """Extend or join trades while doing so does not lower μ."""
    n = r.size
    prefix = np.concatenate(([0.0], np.cumsum(r)))
    spans = [[t.start, t.end] for t in trades]
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(spans):
            start, end = spans[i]
            left_bound = spans[i - 1][1] if i > 0 else 0
            right_bound = spans[i + 1][0] if i + 1 < len(spans) else n
            # a one-period extension that would touch a neighbour is a join, handled below
            if start > left_bound and (i == 0 or start - 1 > left_bound) and r[start - 1] >= 0:
                spans[i][0] -= 1
                changed = True
                continue
            if end < right_bound and (i + 1 == len(spans) or end + 1 < right_bound) and r[end] >= 0:
                spans[i][1] += 1
                changed = True
                continue
            if i + 1 < len(spans):
                gap_sum = prefix[right_bound] - prefix[end]
                if gap_sum + 2.0 * f >= 0:
                    spans[i][1] = spans[i + 1][1]
                    del spans[i + 1]
                    changed = True
                    continue
            i += 1
    return [Trade(a, b) for a, b in spans]


def _maximal_trades(series: ReturnSeries, cost: CostModel) -> List[Trade]:
    r = series.returns
    f = cost.transition_cost
    trades = _two_state_dp(r, f, prefer_invested=True)
    return _absorb_zero_marginals(r, f, trades)


def maximal_return_optimal(series: ReturnSeries, cost: CostModel) -> Strategy:
    """
    A return-optimal strategy none of whose trades can be extended by a
    period, or joined with a neighbour, without strictly lowering μ.
    """
    trades = _maximal_trades(series, cost)
    logger.debug(f"[RETURN_OPT] maximal | n={len(series)} | trades={len(trades)}")
    return strategy_of(trades, len(series))


# ---------------------------------------------------------------------------
# at most K trades
# ---------------------------------------------------------------------------

@dataclass
class _Element:
    """A trade or gap in the alternating chain."""
    is_trade: bool
    start: int
    end: int
    total: float
    prev: Optional["_Element"] = None
    next: Optional["_Element"] = None
    alive: bool = True

    def weight(self, f: float) -> float:
        if self.is_trade:
            return self.total - 2.0 * f
        return -self.total - 2.0 * f


class _ReductionChain:
    """Trades and interior gaps as a linked list, reduced lightest element first."""

    def __init__(self, r: np.ndarray, f: float, trades: List[Trade]):
        self.f = f
        self._heap: List[Tuple] = []
        self._ids = count()
        prefix = np.concatenate(([0.0], np.cumsum(r)))
        self.head: Optional[_Element] = None
        previous: Optional[_Element] = None
        for i, trade in enumerate(trades):
            if i > 0:
                gap = _Element(False, trades[i - 1].end, trade.start,
                               float(prefix[trade.start] - prefix[trades[i - 1].end]))
                previous = self._link(previous, gap)
            element = _Element(True, trade.start, trade.end,
                               float(prefix[trade.end] - prefix[trade.start]))
            previous = self._link(previous, element)
        self.n_trades = len(trades)

    def _link(self, previous: Optional[_Element], element: _Element) -> _Element:
        element.prev = previous
        if previous is None:
            self.head = element
        else:
            previous.next = element
        self._push(element)
        return element

    def _push(self, element: _Element) -> None:
        kind = MergeKind.DROP_TRADE if element.is_trade else MergeKind.MERGE_GAP
        order = list(MergeKind).index(kind)
        heapq.heappush(self._heap, (element.weight(self.f), order, element.start, next(self._ids), element))

    def trades(self) -> List[Trade]:
        out = []
        node = self.head
        while node is not None:
            if node.is_trade:
                out.append(Trade(node.start, node.end))
            node = node.next
        return out

    def reduce_once(self) -> MergeCandidate:
        """Apply the lightest valid candidate; stale heap entries are skipped."""
        while True:
            weight, _, _, _, node = heapq.heappop(self._heap)
            if node.alive:
                break
        left, right = node.prev, node.next
        if node.is_trade:
            candidate = MergeCandidate(MergeKind.DROP_TRADE, node.start, -weight)
            self.n_trades -= 1
            if left is not None and right is not None:
                self._replace(left, right, False)
            else:
                # an edge trade takes its only gap with it
                node.alive = False
                self._unlink(node)
                for gap in (left, right):
                    if gap is not None:
                        gap.alive = False
                        self._unlink(gap)
        else:
            candidate = MergeCandidate(MergeKind.MERGE_GAP, node.start, -weight)
            self.n_trades -= 1
            self._replace(left, right, True)
        return candidate

    def _replace(self, left: _Element, right: _Element, is_trade: bool) -> None:
        total = 0.0
        node = left
        while True:
            total += node.total
            node.alive = False
            if node is right:
                break
            node = node.next
        merged = _Element(is_trade, left.start, right.end, total, prev=left.prev, next=right.next)
        if left.prev is None:
            self.head = merged
        else:
            left.prev.next = merged
        if right.next is not None:
            right.next.prev = merged
        self._push(merged)

    def _unlink(self, node: _Element) -> None:
        if node.prev is None:
            self.head = node.next
        else:
            node.prev.next = node.next
        if node.next is not None:
            node.next.prev = node.prev


def reduction_sequence(series: ReturnSeries, cost: CostModel, k_min: int) -> Dict[int, List[Trade]]:
    """Trade lists along the greedy reduction, keyed by trade count, down to k_min."""
    trades = _maximal_trades(series, cost)
    chain = _ReductionChain(series.returns, cost.transition_cost, trades)
    sequence = {chain.n_trades: trades}
    while chain.n_trades > k_min:
        candidate = chain.reduce_once()
        logger.debug(
            f"[RETURN_OPT] reduce | kind={candidate.kind.value} | target={candidate.target} "
            f"| delta_mu={candidate.delta_mu:.6g} | trades={chain.n_trades}"
        )
        sequence[chain.n_trades] = chain.trades()
    return sequence


def optimal_return_k(series: ReturnSeries, cost: CostModel, max_trades: int) -> Strategy:
    """
    Maximizes μ over strategies with at most max_trades trades.

    Raises:
        ConfigError: max_trades is negative
    """
    if max_trades < 0:
        raise ConfigError(f"max_trades must be >= 0, got {max_trades}")
    sequence = reduction_sequence(series, cost, max_trades)
    return strategy_of(sequence[min(max_trades, max(sequence))], len(series))


def return_frontier(series: ReturnSeries, cost: CostModel, max_trades: int) -> Dict[int, float]:
    """Best total return with at most k trades, for k = 0..max_trades."""
    if max_trades < 0:
        raise ConfigError(f"max_trades must be >= 0, got {max_trades}")
    sequence = reduction_sequence(series, cost, 0)
    top = max(sequence)
    frontier = {}
    for k in range(max_trades + 1):
        trades = sequence[min(k, top)]
        frontier[k] = total_return(series, strategy_of(trades, len(series)), cost)
    return frontier
