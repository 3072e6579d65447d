import enum
from dataclasses import dataclass, field

from app.core.security import digest
from app.models.ledger import Transaction


@dataclass(frozen=True)
class Message:
    """Signable message; `anchor` is the creation time of what it refers to, if known"""
    kind: str
    proposal: str | None = None
    body: str = ""
    anchor: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "proposal": self.proposal, "body": self.body, "anchor": self.anchor}

    @property
    def digest(self) -> str:
        return digest(self.to_dict())


@dataclass(frozen=True)
class Restriction:
    """Restricted message set as a predicate over message kind and proposal"""
    kinds: frozenset
    proposals: frozenset | None = None  # None: every proposal

    def contains(self, m: Message) -> bool:
        if m.kind not in self.kinds:
            return False
        return self.proposals is None or m.proposal in self.proposals

    def to_dict(self) -> dict:
        return {
            "kinds": sorted(self.kinds),
            "proposals": sorted(self.proposals) if self.proposals is not None else None,
        }


@dataclass
class EncumberedAccount:
    pk: str
    sk: str
    party: str
    enrollment_time: int
    bribe_id: str | None = None
    signed: dict = field(default_factory=dict)  # digest -> Message


@dataclass
class BribeOffer:
    bribe_id: str
    briber: str
    amount: float
    restriction: Restriction
    pool: float
    paid: float = 0.0


class SelectionPolicy(str, enum.Enum):
    FIFO = "fifo"
    LIFO = "lifo"


@dataclass(frozen=True)
class MintAuthorization:
    recipient: str
    amount: float
    nonce: str
    signature: str

    def message(self) -> dict:
        # amounts sign as floats so 6 and 6.0 produce the same message
        return {"amount": float(self.amount), "nonce": self.nonce, "recipient": self.recipient}

    def to_dict(self) -> dict:
        return {**self.message(), "signature": self.signature}


@dataclass
class DepositAccount:
    address: str
    balance: float
    height: int
    sequence: int
    nonce: int = 0
    minted: bool = False
    recipient: str | None = None


@dataclass
class WithdrawalPart:
    address: str
    amount: float
    nonce: int
    tx_id: str
    confirmed: bool = False


@dataclass
class WithdrawalRequest:
    request_id: str
    recipient: str
    amount: float
    parts: list
    transactions: list  # per part: list of transactions submitted as one unit
    revenue_share: float = 0.0
    revenue_payment: Transaction | None = None

    @property
    def completed(self) -> bool:
        return all(p.confirmed for p in self.parts)


@dataclass
class Auction:
    auction_id: str
    proposal: str
    end: int
    expiry: int
    bids: list = field(default_factory=list)  # (bidder, amount, escrowed) in arrival order
    refunds: list = field(default_factory=list)  # refund transaction ids
    settled: bool = False
    winner: str | None = None
    price: float = 0.0


@dataclass(frozen=True)
class EnumerationReport:
    policy: SelectionPolicy
    budget: int
    victims: int
    lockup: int
    window: int
    victim_addresses: tuple
    identified: tuple

    @property
    def fraction(self) -> float:
        return len(self.identified) / len(self.victim_addresses) if self.victim_addresses else 0.0

    def to_dict(self) -> dict:
        return {
            "policy": self.policy.value,
            "budget": self.budget,
            "victims": self.victims,
            "lockup": self.lockup,
            "window": self.window,
            "identified": list(self.identified),
            "identified_count": len(self.identified),
            "fraction": self.fraction,
        }
