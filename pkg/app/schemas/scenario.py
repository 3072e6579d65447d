from pydantic import BaseModel, Field, validator
from typing import Optional
import math

from app.config import settings
from app.models.metrics import ClusteringKind, ClusteringSpec, EntropyKind, EntropySpec
from app.models.scenario import Scenario


class PlayerIn(BaseModel):
    id: str
    tokens: float

    @validator('id')
    def validate_id(cls, v):
        if len(v.strip()) < 1:
            raise ValueError('Player id cannot be empty')
        return v.strip()

    class Config:
        extra = "forbid"


class ScenarioIn(BaseModel):
    """Scenario document: players with balances, elections and utilities of outcome true"""
    players: list[PlayerIn]
    elections: list[str]
    utilities: dict[str, dict[str, float]]
    epsilon: float = Field(default_factory=lambda: settings.default_epsilon)
    q: float = Field(default_factory=lambda: settings.default_q)

    @validator('players')
    def validate_players(cls, v):
        if not v:
            raise ValueError('Scenario needs at least one player')
        ids = [p.id for p in v]
        if len(set(ids)) != len(ids):
            raise ValueError('Player ids must be unique')
        return v

    @validator('elections')
    def validate_elections(cls, v):
        if len(set(v)) != len(v):
            raise ValueError('Election ids must be unique')
        return v

    @validator('epsilon')
    def validate_epsilon(cls, v):
        if not math.isfinite(v) or v < 0:
            raise ValueError('Epsilon must be a finite non-negative number')
        return v

    @validator('q')
    def validate_q(cls, v):
        if not 0 < v < 1:
            raise ValueError('q must lie strictly between 0 and 1')
        return v

    def to_scenario(self) -> Scenario:
        return Scenario(
            players=tuple(p.id for p in self.players),
            tokens={p.id: p.tokens for p in self.players},
            elections=tuple(self.elections),
            utilities=self.utilities,
            epsilon=self.epsilon,
            q=self.q,
        )

    class Config:
        extra = "forbid"


class RunConfig(BaseModel):
    """Settings a report was produced with"""
    seed: int = Field(default_factory=lambda: settings.default_seed)
    epsilon: Optional[float] = None
    q: Optional[float] = None
    entropy: EntropyKind = EntropyKind.MIN
    clustering: ClusteringKind = ClusteringKind.EPSILON_TOC
    output: Optional[str] = None

    def clustering_spec(self) -> ClusteringSpec:
        return ClusteringSpec(kind=self.clustering, epsilon=self.epsilon)

    def entropy_spec(self) -> EntropySpec:
        return EntropySpec(kind=self.entropy)

    class Config:
        extra = "forbid"


class VBERequest(BaseModel):
    scenario: ScenarioIn
    entropy: EntropyKind = EntropyKind.MIN
    clustering: ClusteringKind = ClusteringKind.EPSILON_TOC
    epsilon: Optional[float] = None

    class Config:
        extra = "forbid"
