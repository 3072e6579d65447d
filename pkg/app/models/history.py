from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from app.models.scenario import Vote


@dataclass(frozen=True)
class VoteRecord:
    voter: str
    election: str
    vote: Vote


@dataclass(frozen=True)
class VoteHistory:
    """Observed votes plus the balance of every voter; one record per (voter, election)"""
    records: tuple
    balances: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "balances", MappingProxyType(dict(self.balances)))

    @property
    def voters(self) -> tuple:
        return tuple(sorted(self.balances))

    @property
    def elections(self) -> tuple:
        return tuple(sorted({r.election for r in self.records}))


@dataclass(frozen=True)
class OrdinalUtilityMatrix:
    voters: tuple
    elections: tuple
    entries: Mapping[tuple, int]  # (voter, election) -> +1 / -1 / 0

    def row(self, voter: str) -> tuple:
        return tuple(self.entries[(voter, e)] for e in self.elections)
