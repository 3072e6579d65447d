import enum
from dataclasses import dataclass


class ClusteringKind(str, enum.Enum):
    EPSILON_TOC = "epsilon_toc"
    SOLO = "solo"


class EntropyKind(str, enum.Enum):
    MIN = "min"
    SHANNON = "shannon"
    MAX = "max"
    NEG_SUM_SQ = "neg_sum_sq"


@dataclass(frozen=True)
class ClusteringSpec:
    kind: ClusteringKind = ClusteringKind.EPSILON_TOC
    epsilon: float | None = None  # None: use the scenario's epsilon

    @classmethod
    def solo(cls) -> "ClusteringSpec":
        return cls(kind=ClusteringKind.SOLO)

    @classmethod
    def epsilon_toc(cls, epsilon: float | None = None) -> "ClusteringSpec":
        return cls(kind=ClusteringKind.EPSILON_TOC, epsilon=epsilon)


@dataclass(frozen=True)
class EntropySpec:
    kind: EntropyKind = EntropyKind.MIN

    @classmethod
    def of(cls, value) -> "EntropySpec":
        if isinstance(value, EntropySpec):
            return value
        return cls(kind=EntropyKind(value))


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocs covering every player exactly once.

    Blocs are ordered by their smallest member id; `utilities` is only
    carried for neg_sum_sq entropy.
    """
    blocs: tuple
    apathy_bloc: frozenset | None = None
    solo: bool = False
    utilities: tuple | None = None

    def __post_init__(self):
        blocs = tuple(sorted((frozenset(b) for b in self.blocs), key=lambda b: min(b)))
        object.__setattr__(self, "blocs", blocs)
        if self.apathy_bloc is not None:
            object.__setattr__(self, "apathy_bloc", frozenset(self.apathy_bloc))

    def bloc_of(self, player: str) -> frozenset:
        for bloc in self.blocs:
            if player in bloc:
                return bloc
        raise KeyError(player)

    def members(self) -> frozenset:
        return frozenset().union(*self.blocs) if self.blocs else frozenset()

    def as_lists(self) -> list:
        return [sorted(b) for b in self.blocs]


@dataclass(frozen=True)
class MasterTheoremVerdict:
    largest_before: float
    largest_after: float
    vbe_before: float
    vbe_after: float
    holds: bool
