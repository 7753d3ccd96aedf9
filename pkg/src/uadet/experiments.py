"""Experiment descriptions and result rows.

An ExperimentSpec is what a config file, a CLI invocation, and a service
request all reduce to; a ResultRow is one sweep point's aggregated
outcome, shared by the file writers and the service responses.
"""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .csa import DEFAULT_DISTRIBUTION, DegreeDistribution
from .errors import ConfigError
from .model import CS, CSA

SCHEMA_VERSION = 1


class ChannelSpec(BaseModel):
    """snr_bit_db=None means noiseless; otherwise AWGN with unit noise
    variance and the transmit amplitude set from the per-bit SNR."""

    model_config = ConfigDict(extra="forbid")

    snr_bit_db: float | None = None


class ExperimentSpec(BaseModel):
    """One sweep of a single framework at fixed (N, k, channel).

    sweep lists frame lengths m for the unslotted framework and slot
    counts M for the slotted one. degree_distribution (slotted only) maps
    replica counts to probabilities; it defaults to the optimized
    0.25 x^2 + 0.6 x^3 + 0.15 x^8 profile.
    """

    model_config = ConfigDict(extra="forbid")

    schema_version: int = SCHEMA_VERSION
    framework: str
    N: int = Field(ge=1)
    k: int = Field(ge=0)
    sweep: list[int]
    trials: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0)
    channel: ChannelSpec = ChannelSpec()
    degree_distribution: dict[int, float] | None = None

    @field_validator("schema_version")
    @classmethod
    def _known_schema(cls, v):
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v}, this build reads {SCHEMA_VERSION}")
        return v

    @field_validator("framework")
    @classmethod
    def _known_framework(cls, v):
        if v not in (CS, CSA):
            raise ValueError(f"framework must be {CS!r} or {CSA!r}, got {v!r}")
        return v

    @field_validator("sweep")
    @classmethod
    def _sweep_shape(cls, v):
        if not v:
            raise ValueError("sweep must list at least one point")
        if any(p < 1 for p in v):
            raise ValueError("sweep points must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("sweep points must be strictly increasing")
        return v

    @model_validator(mode="after")
    def _cross_checks(self):
        if self.k > self.N:
            raise ValueError(f"k={self.k} exceeds N={self.N}")
        if self.degree_distribution is not None:
            if self.framework != CSA:
                raise ValueError("degree_distribution only applies to the csa framework")
            self.distribution()  # surface bad terms at validation time
        return self

    def distribution(self) -> DegreeDistribution:
        if self.degree_distribution is None:
            return DEFAULT_DISTRIBUTION
        try:
            return DegreeDistribution.from_mapping(self.degree_distribution)
        except ConfigError as e:
            raise ValueError(str(e)) from None


class ResultRow(BaseModel):
    """Aggregated outcome of one sweep point.

    m is always the total frame symbols (M * slot symbols for the slotted
    framework, with M=1 for the unslotted one). energy_per_user counts
    transmitted symbols per active user, the transmission-cost figure the
    two frameworks are compared on. infeasible marks sweep points that
    cannot run (replica degree exceeding M); their rate fields are NaN.
    wall_time_s is in-memory only and never serialized to files.
    """

    framework: str
    N: int
    k: int
    M: int
    m: int
    snr_bit_db: float | None
    trials: int
    mdr: float
    mdr_ci: float
    far: float
    far_ci: float
    plr: float
    flr: float
    energy_per_user: float
    seed: int
    infeasible: bool = False
    wall_time_s: float = Field(default=0.0, exclude=True)


def spec_from_dict(raw: dict, source: str = "<dict>") -> ExperimentSpec:
    try:
        return ExperimentSpec.model_validate(raw)
    except ValidationError as e:
        lines = [f"{source}: invalid experiment config"]
        for err in e.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"  {loc}: {err['msg']}")
        raise ConfigError("\n".join(lines)) from None


def load_config(path: str | Path) -> ExperimentSpec:
    """Read and validate a JSON experiment config, mapping parse and
    validation problems to ConfigError with file/line context."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{p}: top level must be a JSON object")
    return spec_from_dict(raw, source=str(p))
