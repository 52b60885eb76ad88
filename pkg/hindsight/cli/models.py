"""
CLI request models.

Validated with pydantic; a ValidationError is turned into ConfigError by
the command-line entry point.
"""
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from hindsight.core.config import get_settings
from hindsight.core.types import CostModel, Objective


class SeriesKind(str, Enum):
    PRICE = "price"
    RETURN = "return"


class RunObjective(str, Enum):
    """What `optimize` computes; report evaluates a given positions column."""
    RETURN = "return"
    STERLING = "sterling"
    SSR = "ssr"
    DDR = "ddr"
    REPORT = "report"

    @property
    def objective(self) -> Optional[Objective]:
        return None if self is RunObjective.REPORT else Objective(self.value)


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class InputSpec(BaseModel):
    path: Path
    kind: SeriesKind = SeriesKind.RETURN
    value_column: str = "value"
    timestamp_column: Optional[str] = None
    positions_column: Optional[str] = None
    delimiter: str = Field(default=",", min_length=1, max_length=1)
    header: bool = True


class RunConfig(BaseModel):
    objective: RunObjective = RunObjective.STERLING
    max_trades: Optional[int] = Field(default=None, ge=0)
    transition_cost: Optional[float] = Field(default=None, ge=0.0, allow_inf_nan=False)
    spread: Optional[float] = Field(default=None, ge=0.0, allow_inf_nan=False)
    tolerance: float = Field(default_factory=lambda: get_settings().tolerance, gt=0.0)
    output_format: OutputFormat = OutputFormat.JSON

    @model_validator(mode="after")
    def _one_cost_parameter(self) -> "RunConfig":
        if self.transition_cost is not None and self.spread is not None:
            raise ValueError("give either a transition cost or a spread, not both")
        if self.transition_cost is None and self.spread is None:
            self.spread = get_settings().default_spread
        return self

    @property
    def cost(self) -> CostModel:
        if self.transition_cost is not None:
            return CostModel(self.transition_cost)
        return CostModel.from_spread(self.spread)

    def echo(self) -> dict:
        """Config as it appears in the output document, with both cost forms resolved."""
        cost = self.cost
        return {
            "objective": self.objective.value,
            "max_trades": self.max_trades,
            "transition_cost": cost.transition_cost,
            "spread": cost.spread,
            "tolerance": self.tolerance,
            "format": self.output_format.value,
        }
