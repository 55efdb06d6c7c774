from __future__ import annotations

from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from pathloc.evaluator import AlgebraKind


class Command(StrEnum):
    VALIDATE = "validate"
    EVAL = "eval"
    INVERT = "invert"
    MONOID_EQ = "monoid-eq"
    DECOMPOSE = "decompose"
    VERIFY = "verify"


class RunConfig(BaseModel):
    """One CLI invocation. A fixed seed makes the whole run deterministic."""

    model_config = ConfigDict(frozen=True)

    graph: Path
    command: Command
    arguments: tuple[str, ...] = ()
    degree: int = Field(default=8, ge=1)
    bound: int = Field(default=12, ge=1)
    max_visited: int = Field(default=100_000, ge=1)
    json_output: bool = False
    seed: int = 1
    trials: float = Field(default=1.0, gt=0)
    suite: str = "all"
    algebra: AlgebraKind = AlgebraKind.PATH

    def samples(self, base: int) -> int:
        "A suite's sample count scaled by `trials`, at least one."
        return max(1, round(base * self.trials))
