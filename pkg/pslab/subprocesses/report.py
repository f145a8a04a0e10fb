"""Run configuration and the JSON report document."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator

from pslab import config
from pslab.subprocesses.commutative.cgroebner import GroebnerLimits

Command = Literal["hilbert", "ud", "tau", "bseries", "points", "normalize-formula"]


class RunConfig(BaseModel):
    """Validated command-line arguments of one run."""

    command: Command
    alg: Path | None = None
    min_deg: int | None = None
    max_deg: int = Field(default=3, ge=0, le=config.MAX_DEGREE)
    order: Literal["degrevlex", "deglex"] = "degrevlex"
    nc_order: str | None = None
    cech_k: int = Field(default=config.DEFAULT_CECH_K, ge=0)
    cech_m: int = Field(default=config.DEFAULT_CECH_M, ge=0)
    seed: int = config.DEFAULT_SEED
    trials: int = Field(default=config.DEFAULT_TRIALS, ge=0)
    jobs: int = Field(default=1, ge=1)
    cache_dir: Path | None = None
    no_cache: bool = False
    json_out: Path | None = None
    cover: list[str] = Field(default_factory=list)
    families: Path | None = None
    h0_method: Literal["presentation", "ambient"] = "presentation"
    timing: bool = False
    verbose: bool = False
    config_path: Path | None = None
    max_basis: int = Field(default=config.MAX_BASIS_SIZE, ge=1)
    max_pairs: int = Field(default=config.MAX_PAIRS, ge=1)

    @model_validator(mode="after")
    def _check_ranges(self):
        lowest = 0 if self.command == "hilbert" else 1
        if self.min_deg is None:
            self.min_deg = lowest if self.command == "hilbert" else min(2, self.max_deg)
        if self.min_deg < lowest:
            raise ValueError(f"{self.command} needs degrees of at least {lowest}")
        if self.min_deg > self.max_deg:
            raise ValueError("min degree exceeds max degree")
        if self.command == "normalize-formula":
            if self.config_path is None:
                raise ValueError("normalize-formula needs --config")
        elif self.alg is None:
            raise ValueError(f"{self.command} needs --alg")
        if self.cover and self.min_deg != self.max_deg:
            raise ValueError("--cover elements have one degree; use --min-deg equal to --max-deg")
        return self

    @property
    def degrees(self) -> list[int]:
        return list(range(self.min_deg, self.max_deg + 1))

    @property
    def limits(self) -> GroebnerLimits:
        return GroebnerLimits(self.max_basis, self.max_pairs)

    def resolved_cache_dir(self) -> Path | None:
        """Flag first, then the environment variable, then the local default."""
        if self.no_cache:
            return None
        if self.cache_dir is not None:
            return self.cache_dir
        return Path(os.environ.get(config.CACHE_ENV_VAR) or config.DEFAULT_CACHE_DIR)

    def recorded(self) -> dict[str, Any]:
        """The parameters that determine the numbers in a report."""
        return {
            "command": self.command,
            "degrees": self.degrees,
            "order": self.order,
            "nc_order": self.nc_order,
            "cech_k": self.cech_k,
            "cech_m": self.cech_m,
            "seed": self.seed,
            "trials": self.trials,
            "cover": self.cover,
            "h0_method": self.h0_method,
        }


class DegreeEntry(BaseModel):
    """Outcome of one degree task."""

    degree: int | None
    status: Literal["ok", "failed"]
    result: dict[str, Any] | None = None
    error: dict[str, Any] | None = None
    seconds: float | None = None


class ReportDocument(BaseModel):
    """One JSON document per run; identical inputs, flags and seed give identical bytes."""

    tool_version: str = config.TOOL_VERSION
    algebra: str | None = None
    input_hash: str | None = None
    config: dict[str, Any]
    degrees: list[DegreeEntry]
    summary: dict[str, Any] = Field(default_factory=dict)
    exit_code: int = config.EXIT_OK

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=True) + "\n"
