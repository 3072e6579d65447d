from pydantic import BaseModel, Field, TypeAdapter, validator
from typing import Annotated, Literal, Optional, Union

from app.models.scenario import Outcome
from app.models.transforms import Apathy, BribeFlip, Delegation, Herding, Slates, Sybil
from app.schemas.scenario import ScenarioIn


class SybilIn(BaseModel):
    kind: Literal["sybil"]
    player: str
    shares: list[float]
    new_ids: Optional[list[str]] = None

    @validator('shares')
    def validate_shares(cls, v):
        if not v:
            raise ValueError('Sybil split needs at least one share')
        if any(x < 0 for x in v):
            raise ValueError('Shares cannot be negative')
        return v

    def to_transformation(self) -> Sybil:
        return Sybil(
            player=self.player,
            shares=tuple(self.shares),
            new_ids=tuple(self.new_ids) if self.new_ids is not None else None,
        )

    class Config:
        extra = "forbid"


class ApathyIn(BaseModel):
    kind: Literal["apathy"]
    players: list[str]

    def to_transformation(self) -> Apathy:
        return Apathy(players=frozenset(self.players))

    class Config:
        extra = "forbid"


class DelegationIn(BaseModel):
    kind: Literal["delegation"]
    assignment: dict[str, str]  # delegator -> delegate

    def to_transformation(self) -> Delegation:
        return Delegation(assignment=dict(self.assignment))

    class Config:
        extra = "forbid"


class HerdingIn(BaseModel):
    kind: Literal["herding"]
    players: list[str]
    direction: Outcome = Outcome.TRUE
    epsilon: Optional[float] = None

    def to_transformation(self) -> Herding:
        return Herding(players=frozenset(self.players), direction=self.direction, epsilon=self.epsilon)

    class Config:
        extra = "forbid"


class SlatesIn(BaseModel):
    kind: Literal["slates"]
    slates: dict[str, list[str]]

    def to_transformation(self) -> Slates:
        return Slates(slates={sid: tuple(es) for sid, es in self.slates.items()})

    class Config:
        extra = "forbid"


class BribeFlipIn(BaseModel):
    kind: Literal["bribe_flip"]
    players: list[str]
    elections: Optional[list[str]] = None
    desired: Outcome = Outcome.TRUE
    epsilon: Optional[float] = None

    def to_transformation(self) -> BribeFlip:
        return BribeFlip(
            players=frozenset(self.players),
            elections=tuple(self.elections) if self.elections is not None else None,
            desired=self.desired,
            epsilon=self.epsilon,
        )

    class Config:
        extra = "forbid"


TransformIn = Annotated[
    Union[SybilIn, ApathyIn, DelegationIn, HerdingIn, SlatesIn, BribeFlipIn],
    Field(discriminator="kind"),
]

transform_adapter = TypeAdapter(TransformIn)


class TransformRequest(BaseModel):
    scenario: ScenarioIn
    transform: TransformIn

    class Config:
        extra = "forbid"


class TheoremCheckRequest(TransformRequest):
    theorem: str
