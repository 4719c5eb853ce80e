"""Pydantic request/response models for the service endpoints."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

ConfigName = Literal["a3", "b3-small", "b3-large"]


class BuildRequest(BaseModel):
    config: ConfigName
    q: int = Field(ge=2)
    out_tri: str
    out_edge: Optional[str] = None
    allow_long: bool = False
    realization: Literal["auto", "matrix"] = "auto"


class RankRequest(BaseModel):
    path: str
    p: int = Field(default=2, ge=2)
    dense_threshold: float = Field(default=0.03, gt=0, lt=1)
    mem_budget_mb: Optional[int] = Field(default=None, ge=1)


class CheckHomologyRequest(BaseModel):
    config: ConfigName
    q: int = Field(ge=2)
    p: int = Field(default=2, ge=2)
    allow_long: bool = False
    dense_threshold: float = Field(default=0.03, gt=0, lt=1)


class SteinbergRequest(BaseModel):
    system: Literal["a3", "b3"]
    q: int = Field(ge=2)


class LiftRequest(BaseModel):
    config: ConfigName
    p: int = Field(default=5, ge=3)
    k: int = Field(default=1, ge=1)
    specs: int = Field(default=10, ge=1)
    pairs: int = Field(default=500, ge=1)
    seed: int = 0
    homogeneous: Optional[bool] = None    # None = alternate


class RelationsRequest(BaseModel):
    config: ConfigName
    q: int = Field(default=5, ge=3)       # base coefficient field order
    exhaustive_limit: int = Field(default=1_000_000, ge=1)
    samples: int = Field(default=10_000, ge=1)
    seed: int = 20240501
    jobs: int = Field(default=1, ge=1)


class FillingA3Request(BaseModel):
    q: int = Field(ge=3)


class NormalFormRequest(BaseModel):
    config: ConfigName
    q: int = Field(ge=2)
    allow_long: bool = False


class ConeRadiusRequest(BaseModel):
    config: ConfigName
    q: int = Field(ge=2)
    apex: int = Field(default=0, ge=0)
    allow_long: bool = False


class ReportResponse(BaseModel):
    passed: Optional[bool] = None
    report: dict


class ErrorResponse(BaseModel):
    error: str
    error_type: str
