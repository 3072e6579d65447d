import enum
from dataclasses import dataclass, field
from typing import Mapping


class TxStatus(str, enum.Enum):
    PENDING = "pending"
    INCLUDED = "included"
    INVALIDATED = "invalidated"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Transfer:
    asset: str
    to: str
    amount: float

    def to_dict(self) -> dict:
        return {"kind": "transfer", "asset": self.asset, "to": self.to, "amount": self.amount}


@dataclass(frozen=True)
class ContractCall:
    contract: str
    method: str
    args: Mapping[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": "call", "contract": self.contract, "method": self.method, "args": dict(self.args)}


Payload = Transfer | ContractCall


@dataclass(frozen=True)
class Transaction:
    sender: str
    nonce: int
    payload: Payload
    signature: str

    def signing_body(self) -> dict:
        return {"sender": self.sender, "nonce": self.nonce, "payload": self.payload.to_dict()}

    def to_dict(self) -> dict:
        return {**self.signing_body(), "signature": self.signature}


@dataclass
class Account:
    address: str
    nonce: int = 0
    balances: dict = field(default_factory=dict)

    def balance(self, asset: str) -> float:
        return self.balances.get(asset, 0.0)


@dataclass(frozen=True)
class InclusionProof:
    height: int
    tx_id: str

    def to_dict(self) -> dict:
        return {"height": self.height, "tx_id": self.tx_id}


@dataclass(frozen=True)
class Block:
    height: int
    parent_hash: str
    tx_ids: tuple
    events: tuple
    hash: str
    invalidated: tuple = ()
    rejected: Mapping[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "parent_hash": self.parent_hash,
            "tx_ids": list(self.tx_ids),
            "events": list(self.events),
            "hash": self.hash,
        }
