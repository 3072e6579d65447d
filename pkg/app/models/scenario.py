import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping


class Vote(str, enum.Enum):
    TRUE = "true"
    FALSE = "false"
    ABSTAIN = "abstain"

    def negate(self) -> "Vote":
        if self is Vote.TRUE:
            return Vote.FALSE
        if self is Vote.FALSE:
            return Vote.TRUE
        return Vote.ABSTAIN


class Outcome(str, enum.Enum):
    TRUE = "true"
    FALSE = "false"

    @property
    def opposite(self) -> "Outcome":
        return Outcome.FALSE if self is Outcome.TRUE else Outcome.TRUE

    @classmethod
    def of(cls, value) -> "Outcome":
        if isinstance(value, Outcome):
            return value
        if isinstance(value, bool):
            return cls.TRUE if value else cls.FALSE
        return cls(str(value).lower())


@dataclass(frozen=True)
class Scenario:
    """Players, token balances, binary elections and monetary utilities of outcome true.

    util(e, false) is never stored; it is -util(e, true).
    """
    players: tuple
    tokens: Mapping[str, float]
    elections: tuple
    utilities: Mapping[str, Mapping[str, float]]
    epsilon: float = 0.0
    q: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "elections", tuple(self.elections))
        object.__setattr__(self, "tokens", MappingProxyType(dict(self.tokens)))
        object.__setattr__(
            self,
            "utilities",
            MappingProxyType({p: MappingProxyType(dict(row)) for p, row in self.utilities.items()}),
        )

    def util(self, player: str, election: str) -> float:
        return self.utilities[player][election]

    def row(self, player: str) -> tuple:
        """Utility row of a player, in election order"""
        return tuple(self.utilities[player][e] for e in self.elections)

    def replace(self, **changes) -> "Scenario":
        values = {
            "players": self.players,
            "tokens": self.tokens,
            "elections": self.elections,
            "utilities": self.utilities,
            "epsilon": self.epsilon,
            "q": self.q,
        }
        values.update(changes)
        return Scenario(**values)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str


@dataclass(frozen=True)
class TallyResult:
    election: str
    yes: float
    no: float
    abstain: float
    winner: Outcome | None = None
    votes: Mapping[str, Vote] = field(default_factory=dict)
