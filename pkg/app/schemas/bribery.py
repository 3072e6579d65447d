from pydantic import BaseModel, validator
from typing import Optional

from app.models.scenario import Outcome
from app.schemas.scenario import ScenarioIn


class FlipCostRequest(BaseModel):
    utility: float
    desired: Outcome = Outcome.TRUE
    epsilon: float = 0.0

    @validator('epsilon')
    def validate_epsilon(cls, v):
        if v < 0:
            raise ValueError('Epsilon cannot be negative')
        return v

    class Config:
        extra = "forbid"


class PivotalRequest(BaseModel):
    n: int
    utility: float
    epsilon: float
    acceptance: Optional[list[bool]] = None

    @validator('n')
    def validate_n(cls, v):
        if v < 1 or v % 2 == 0:
            raise ValueError('n must be a positive odd number')
        return v

    class Config:
        extra = "forbid"


class ScaleRequest(BaseModel):
    scenario: ScenarioIn

    class Config:
        extra = "forbid"


class QVRequest(BaseModel):
    scenario: ScenarioIn
    desired: Outcome = Outcome.TRUE

    class Config:
        extra = "forbid"


class SybilAmplificationRequest(BaseModel):
    whale_tokens: float
    accounts: int

    class Config:
        extra = "forbid"
