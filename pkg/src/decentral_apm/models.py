from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from decentral_apm.errors import ConfigError

ProblemKind = Literal["least_squares", "lasso", "hinge"]
Algorithm = Literal["apm-c", "apm", "extra", "dngd"]
ScheduleName = Literal["sc", "nsc", "thm3", "cor1"]

APMC_SCHEDULES = {"sc", "nsc"}
APM_SCHEDULES = {"thm3", "cor1"}
SMOOTH_ONLY = {"apm-c", "extra", "dngd"}


class ExperimentConfig(BaseModel):
    """One end-to-end run: problem data, graph, algorithm and its schedule."""

    problem: ProblemKind = "least_squares"
    N: int = Field(200, ge=1)
    n: int = Field(30, ge=1)
    m: int = Field(20, ge=1)
    mu: float = Field(1e-2, ge=0)
    lam: float = Field(1e-3, gt=0)

    p: float = Field(0.5, ge=0, le=1)
    seed: int = 0
    max_retries: int = Field(100, ge=0)

    algorithm: Algorithm = "apm-c"
    schedule: Optional[ScheduleName] = None
    K: int = Field(300, ge=1)

    beta0: Optional[float] = Field(None, gt=0)
    inner_divisor: Optional[float] = Field(None, gt=0)
    theory_mode: bool = False

    # APM: tuned experimental constants (beta0_scale / eta_scale) or the theoretical ones
    tuned: bool = True
    beta0_scale: Optional[float] = Field(None, gt=0)
    eta_scale: Optional[float] = Field(None, gt=0)
    prefer_prox: bool = True

    # baselines: stepsize = step_scale / L
    step_scale: Optional[float] = Field(None, gt=0)

    metric_every: Optional[int] = Field(None, ge=1)
    reference_iters: Optional[int] = Field(None, ge=1)
    record_wall_time: bool = True
    out: Optional[str] = None

    @field_validator("out")
    @classmethod
    def out_not_blank(cls, v: Optional[str]) -> Optional[str]:
        if v is None:
            return v
        v2 = v.strip()
        if not v2:
            raise ValueError("out must not be blank")
        return v2

    @model_validator(mode="after")
    def check_combination(self) -> "ExperimentConfig":
        if self.N % self.m:
            raise ValueError(f"m={self.m} must divide N={self.N}")

        if self.algorithm in SMOOTH_ONLY and self.problem != "least_squares":
            raise ValueError(f"{self.algorithm} runs on the least_squares problem only")

        if self.algorithm == "apm-c":
            if self.schedule is None:
                self.schedule = "sc" if self.mu > 0 else "nsc"
            if self.schedule not in APMC_SCHEDULES:
                raise ValueError(f"apm-c takes schedule sc or nsc, got {self.schedule}")
            if self.schedule == "sc" and self.mu <= 0:
                raise ValueError("schedule sc needs mu > 0")
        elif self.algorithm == "apm":
            if self.schedule is None:
                self.schedule = "thm3"
            if self.schedule not in APM_SCHEDULES:
                raise ValueError(f"apm takes schedule thm3 or cor1, got {self.schedule}")
        elif self.schedule is not None:
            raise ValueError(f"{self.algorithm} takes no schedule")
        return self


def parse_config(data: Union[ExperimentConfig, dict[str, Any], str]) -> ExperimentConfig:
    """Validate a dict / JSON string into an ExperimentConfig, field errors as ConfigError."""
    if isinstance(data, ExperimentConfig):
        return data
    try:
        if isinstance(data, str):
            return ExperimentConfig.model_validate_json(data)
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        messages = []
        for err in e.errors():
            loc = ".".join(str(part) for part in err["loc"]) or "config"
            messages.append(f"{loc}: {err['msg']}")
        raise ConfigError(messages) from e


class ReferenceDocument(BaseModel):
    x_star: list[float]
    f_star: float
    method: str = ""


class NetworkDocument(BaseModel):
    """Agent count, edge list and optionally the dense mixing matrix."""

    m: int = Field(..., ge=1)
    edges: list[tuple[int, int]] = Field(default_factory=list)
    seed: Optional[int] = None
    weights: Optional[list[list[float]]] = None


class ProblemDocument(BaseModel):
    kind: ProblemKind
    provenance: dict[str, Any] = Field(default_factory=dict)
    L: float
    mu: float
    M: float
    lam: Optional[float] = None
    # per-agent blocks: A[i] is n x N/m, targets[i] holds b_i (or the labels)
    A: list[list[list[float]]]
    targets: list[list[float]]
    planted: Optional[list[float]] = None
    reference: Optional[ReferenceDocument] = None
