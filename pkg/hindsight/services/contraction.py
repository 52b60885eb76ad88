"""
Contraction - alternating-sign run compression

No optimal trade exits inside a run of positive returns or enters inside a
run of negative returns, so maximal same-sign runs can be summed into single
returns without changing any optimum. Zero returns join the preceding run
(the following run at the start of the series).
"""
from dataclasses import dataclass

import numpy as np

from hindsight.core.exceptions import LengthMismatchError
from hindsight.core.types import ReturnSeries, Strategy


@dataclass(frozen=True, eq=False)
class ContractedSeries:
    """Runs (sum, start, end) partitioning [0, n); run sums alternate in sign."""
    sums: np.ndarray
    starts: np.ndarray
    ends: np.ndarray
    n: int

    def __len__(self) -> int:
        return int(self.sums.size)

    @property
    def runs(self):
        return [(float(s), int(a), int(b)) for s, a, b in zip(self.sums, self.starts, self.ends)]

    @property
    def lengths(self) -> np.ndarray:
        return self.ends - self.starts

    def positive_runs(self) -> np.ndarray:
        """Indices of runs with a positive sum; the only possible entry/exit runs."""
        return np.flatnonzero(self.sums > 0)

    def as_series(self) -> ReturnSeries:
        return ReturnSeries(self.sums)

    def lift(self, run_strategy: Strategy) -> Strategy:
        return lift(self, run_strategy)


def contract(series: ReturnSeries) -> ContractedSeries:
    """Aggregate maximal same-sign runs."""
    r = series.returns
    n = r.size
    if n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return ContractedSeries(sums=np.zeros(0), starts=empty, ends=empty, n=0)

    signs = np.sign(r)
    nonzero = np.flatnonzero(signs)
    if nonzero.size == 0:
        # all-zero series: one sign-negative run of sum 0
        return ContractedSeries(
            sums=np.array([0.0]), starts=np.array([0]), ends=np.array([n]), n=n
        )

    # forward-fill zeros from the preceding nonzero sign, back-fill leading zeros
    carrier = np.maximum.accumulate(np.where(signs != 0, np.arange(n), -1))
    carrier[carrier < 0] = nonzero[0]
    filled = signs[carrier]

    starts = np.concatenate(([0], np.flatnonzero(np.diff(filled)) + 1))
    ends = np.concatenate((starts[1:], [n]))
    sums = np.add.reduceat(r, starts)
    return ContractedSeries(sums=sums, starts=starts, ends=ends, n=n)


def widened_starts(series: ReturnSeries, starts: np.ndarray) -> np.ndarray:
    """Each start moved back over the zero returns right before it."""
    nonzero = np.flatnonzero(series.returns)
    starts = np.asarray(starts)
    if nonzero.size == 0:
        return starts
    previous = np.searchsorted(nonzero, starts) - 1
    return np.where(previous >= 0, nonzero[np.maximum(previous, 0)] + 1, 0)


def trimmed_ends(series: ReturnSeries, ends: np.ndarray) -> np.ndarray:
    """Each end moved back past trailing zero returns."""
    nonzero = np.flatnonzero(series.returns)
    if nonzero.size == 0:
        return np.asarray(ends)
    return nonzero[np.searchsorted(nonzero, ends) - 1] + 1


def lift(contracted: ContractedSeries, run_strategy: Strategy) -> Strategy:
    """Expand a strategy over runs to a strategy over the original periods."""
    if len(run_strategy) != len(contracted):
        raise LengthMismatchError("run strategy", len(contracted), len(run_strategy))
    return Strategy(np.repeat(run_strategy.positions, contracted.lengths))
