import enum
from dataclasses import dataclass, field
from typing import Mapping

from app.models.scenario import Outcome, Scenario


class TheoremId(str, enum.Enum):
    MASTER = "1"
    SYBIL = "2"
    APATHY = "3"
    DELEGATION = "4"
    DELEGATION_COROLLARY = "4c"
    HERDING = "5"
    SLATES = "6"
    BRIBERY = "7"

    @classmethod
    def parse(cls, value) -> "TheoremId":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Sybil:
    player: str
    shares: tuple
    new_ids: tuple | None = None


@dataclass(frozen=True)
class Apathy:
    players: frozenset


@dataclass(frozen=True)
class Delegation:
    assignment: Mapping[str, str]  # delegator -> delegate

    @property
    def delegators(self) -> frozenset:
        return frozenset(self.assignment)

    @property
    def delegates(self) -> frozenset:
        return frozenset(self.assignment.values())


@dataclass(frozen=True)
class Herding:
    players: frozenset
    direction: Outcome = Outcome.TRUE
    epsilon: float | None = None


@dataclass(frozen=True)
class Slates:
    slates: Mapping[str, tuple]  # slate id -> member elections


@dataclass(frozen=True)
class BribeFlip:
    players: frozenset
    elections: tuple | None = None  # None: every election
    desired: Outcome = Outcome.TRUE
    epsilon: float | None = None


Transformation = Sybil | Apathy | Delegation | Herding | Slates | BribeFlip


@dataclass(frozen=True)
class Applied:
    scenario: Scenario
    cost: float = 0.0


@dataclass(frozen=True)
class TheoremVerdict:
    theorem: TheoremId
    precondition_held: bool
    claim_held: bool | None
    vbe_before: float
    vbe_after: float
    largest_before: float
    largest_after: float
    strict_held: bool | None = None
    master_consistent: bool = True
    witness: Mapping[str, object] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.precondition_held and self.claim_held is False
