"""Deterministic in-memory account ledger.

Transactions wait in a pending pool until a block is produced with an
explicit ordering. Per sender only the transaction carrying the current
nonce can be included; once a nonce is used every competitor carrying it
is invalidated without cost.
"""

import copy
import logging
import math
from typing import Iterable, Protocol

from app.config import settings
from app.core.security import SignatureScheme, canonical_json, digest
from app.models.ledger import (
    Account,
    Block,
    ContractCall,
    InclusionProof,
    Payload,
    Transaction,
    Transfer,
    TxStatus,
)
from app.utils.exceptions import (
    InsufficientBalanceError,
    InvalidSignatureError,
    LedgerException,
    UnknownTransactionError,
    VBELabException,
)

logger = logging.getLogger(__name__)

GENESIS_HASH = "0" * 64
FEE_SINK = "coinbase"


class Contract(Protocol):
    name: str

    def execute(self, ledger: "Ledger", sender: str, method: str, args: dict) -> list[dict]:
        ...


def tx_id(tx: Transaction) -> str:
    return digest(tx.to_dict())


def sign_transaction(scheme: SignatureScheme, sk: str, sender: str, nonce: int, payload: Payload) -> Transaction:
    unsigned = Transaction(sender=sender, nonce=nonce, payload=payload, signature="")
    return Transaction(sender, nonce, payload, scheme.sign(sk, unsigned.signing_body()))


class Ledger:
    def __init__(
        self,
        scheme: SignatureScheme,
        fee: float | None = None,
        native_asset: str | None = None,
    ):
        self.scheme = scheme
        self.fee = settings.ledger_fee if fee is None else fee
        self.native_asset = native_asset or settings.native_asset
        self._accounts: dict[str, Account] = {}
        self._contracts: dict[str, Contract] = {}
        self._pending: dict[str, list[Transaction]] = {}
        self._status: dict[str, TxStatus] = {}
        self._reasons: dict[str, str] = {}
        self._included: dict[str, tuple[int, Transaction]] = {}
        self._blocks: list[Block] = []
        self._supply: dict[str, float] = {}
        self._mint_events: list[dict] = []

    # State

    @property
    def height(self) -> int:
        """Height of the last produced block; -1 before the first block"""
        return len(self._blocks) - 1

    @property
    def blocks(self) -> tuple:
        return tuple(self._blocks)

    def account(self, address: str) -> Account:
        return self._accounts.setdefault(address, Account(address))

    def balance(self, address: str, asset: str) -> float:
        account = self._accounts.get(address)
        return account.balance(asset) if account else 0.0

    def nonce(self, address: str) -> int:
        account = self._accounts.get(address)
        return account.nonce if account else 0

    def supply(self, asset: str) -> float:
        return self._supply.get(asset, 0.0)

    def total_held(self, asset: str) -> float:
        return math.fsum(a.balance(asset) for a in self._accounts.values())

    def register_contract(self, contract: Contract) -> None:
        if contract.name in self._contracts:
            raise LedgerException(f"contract {contract.name} already registered")
        self._contracts[contract.name] = contract

    def contract(self, name: str) -> Contract:
        if name not in self._contracts:
            raise LedgerException(f"unknown contract {name}")
        return self._contracts[name]

    def mint(self, address: str, asset: str, amount: float) -> None:
        """Out-of-band issuance, recorded as an explicit mint event"""
        if amount < 0:
            raise LedgerException("mint amount must be non-negative")
        account = self.account(address)
        account.balances[asset] = account.balance(asset) + amount
        self._supply[asset] = self.supply(asset) + amount
        self._mint_events.append({"type": "mint", "asset": asset, "to": address, "amount": amount})

    def adjust_supply(self, asset: str, delta: float) -> None:
        """Contracts issuing their own asset report mints and burns here"""
        self._supply[asset] = self.supply(asset) + delta

    # Submission

    def _check_signature(self, tx: Transaction) -> None:
        if not self.scheme.verify(tx.sender, tx.signing_body(), tx.signature):
            raise InvalidSignatureError(f"signature from {tx.sender} does not verify")

    def submit(self, tx: Transaction) -> str:
        self._check_signature(tx)
        tid = tx_id(tx)
        if self._status.get(tid) in (TxStatus.PENDING, TxStatus.INCLUDED, TxStatus.INVALIDATED):
            return tid
        # a rejected transaction may be retried once state has changed
        self._reasons.pop(tid, None)
        self._pending[tid] = [tx]
        self._status[tid] = TxStatus.PENDING
        logger.debug(f"Submitted {tid[:12]} from {tx.sender} nonce {tx.nonce}")
        return tid

    def submit_bundle(self, txs: Iterable[Transaction]) -> str:
        """Atomic group of transfers: included together in order or not at all"""
        txs = list(txs)
        if not txs:
            raise LedgerException("bundle must not be empty")
        for tx in txs:
            if not isinstance(tx.payload, Transfer):
                raise LedgerException("bundles may only contain transfers")
            self._check_signature(tx)
        ids = [tx_id(tx) for tx in txs]
        bundle_id = digest({"bundle": ids})
        if bundle_id not in self._pending:
            self._pending[bundle_id] = txs
            for tid in ids:
                self._status[tid] = TxStatus.PENDING
        return bundle_id

    def status(self, tid: str) -> TxStatus:
        if tid not in self._status:
            raise UnknownTransactionError(f"unknown transaction {tid}")
        return self._status[tid]

    def rejection_reason(self, tid: str) -> str | None:
        return self._reasons.get(tid)

    def pending_ids(self) -> list[str]:
        return list(self._pending)

    # Blocks

    def produce_block(self, ordering: Iterable[str] | None = None) -> Block:
        """Include pending units in the given order; units not named stay pending"""
        order = list(self._pending) if ordering is None else list(ordering)
        height = self.height + 1
        included: list[str] = []
        events: list[dict] = list(self._mint_events)
        self._mint_events = []
        invalidated: list[str] = []
        rejected: dict[str, str] = {}

        for uid in order:
            unit = self._pending.get(uid)
            if unit is None:
                continue
            if any(tx.nonce < self.nonce(tx.sender) for tx in unit):
                self._drop(uid, TxStatus.INVALIDATED, "stale-nonce")
                invalidated.append(uid)
                continue
            if unit[0].nonce > self.nonce(unit[0].sender):
                continue

            snapshot = self._snapshot()
            try:
                unit_events = []
                for tx in unit:
                    unit_events.extend(self._apply(tx, height))
            except VBELabException as e:
                self._restore(snapshot)
                self._drop(uid, TxStatus.REJECTED, e.code)
                rejected[uid] = e.code
                logger.info(f"Rejected {uid[:12]}: {e.code} {e.message}")
                continue

            del self._pending[uid]
            for tx in unit:
                tid = tx_id(tx)
                self._status[tid] = TxStatus.INCLUDED
                self._included[tid] = (height, tx)
                included.append(tid)
            events.extend(unit_events)

        for uid, unit in list(self._pending.items()):
            if any(tx.nonce < self.nonce(tx.sender) for tx in unit):
                self._drop(uid, TxStatus.INVALIDATED, "stale-nonce")
                invalidated.append(uid)

        if invalidated:
            logger.info(f"Block {height}: invalidated {len(invalidated)} competing transactions")

        parent = self._blocks[-1].hash if self._blocks else GENESIS_HASH
        body = {"height": height, "parent_hash": parent, "tx_ids": included, "events": events}
        block = Block(
            height=height,
            parent_hash=parent,
            tx_ids=tuple(included),
            events=tuple(events),
            hash=digest(body),
            invalidated=tuple(invalidated),
            rejected=rejected,
        )
        self._blocks.append(block)
        logger.debug(f"Produced block {height} with {len(included)} transactions")
        return block

    def advance(self, blocks: int = 1) -> None:
        """Produce empty blocks"""
        for _ in range(blocks):
            self.produce_block([])

    def _drop(self, uid: str, status: TxStatus, reason: str) -> None:
        for tx in self._pending.pop(uid, []):
            tid = tx_id(tx)
            self._status[tid] = status
            self._reasons[tid] = reason
        self._status[uid] = status
        self._reasons[uid] = reason

    def _snapshot(self):
        return copy.deepcopy(self._accounts), dict(self._supply)

    def _restore(self, snapshot) -> None:
        self._accounts, self._supply = snapshot

    def _charge(self, account: Account, asset: str, amount: float) -> None:
        if account.balance(asset) < amount - settings.tolerance:
            raise InsufficientBalanceError(
                f"{account.address} holds {account.balance(asset)} {asset}, needs {amount}"
            )
        account.balances[asset] = account.balance(asset) - amount

    def _credit(self, address: str, asset: str, amount: float) -> None:
        account = self.account(address)
        account.balances[asset] = account.balance(asset) + amount

    def _apply(self, tx: Transaction, height: int) -> list[dict]:
        sender = self.account(tx.sender)
        if tx.nonce != sender.nonce:
            raise LedgerException(f"nonce {tx.nonce} out of order for {tx.sender}")
        tid = tx_id(tx)
        events = []
        if self.fee > 0:
            self._charge(sender, self.native_asset, self.fee)
            self._credit(FEE_SINK, self.native_asset, self.fee)

        if isinstance(tx.payload, Transfer):
            payload = tx.payload
            if payload.amount < 0:
                raise LedgerException("transfer amount must be non-negative")
            self._charge(sender, payload.asset, payload.amount)
            self._credit(payload.to, payload.asset, payload.amount)
            events.append({
                "type": "transfer",
                "asset": payload.asset,
                "from": tx.sender,
                "to": payload.to,
                "amount": payload.amount,
                "tx": tid,
            })
        elif isinstance(tx.payload, ContractCall):
            contract = self.contract(tx.payload.contract)
            for event in contract.execute(self, tx.sender, tx.payload.method, dict(tx.payload.args)):
                events.append({"type": "contract", "contract": contract.name, **event, "tx": tid})
        else:
            raise LedgerException(f"unsupported payload {type(tx.payload).__name__}")

        sender.nonce += 1
        return events

    # Proofs

    def inclusion_proof(self, tid: str) -> InclusionProof:
        if tid not in self._included:
            raise UnknownTransactionError(f"transaction {tid} is not included")
        return InclusionProof(height=self._included[tid][0], tx_id=tid)

    def verify_inclusion(self, proof: InclusionProof) -> bool:
        if not 0 <= proof.height <= self.height:
            return False
        return proof.tx_id in self._blocks[proof.height].tx_ids

    def get_transaction(self, tid: str) -> Transaction:
        if tid not in self._included:
            raise UnknownTransactionError(f"transaction {tid} is not included")
        return self._included[tid][1]

    def events(self) -> list[dict]:
        return [dict(e, height=b.height) for b in self._blocks for e in b.events]

    def export_events(self) -> list[str]:
        """One canonical JSON line per event"""
        return [canonical_json(e) for e in self.events()]


class Wallet:
    """Key holder that signs with the sender's current ledger nonce"""

    def __init__(self, ledger: Ledger, sk: str, address: str | None = None):
        self.ledger = ledger
        self.sk = sk
        self.address = address or ledger.scheme.public_key(sk)

    @classmethod
    def create(cls, ledger: Ledger, rng) -> "Wallet":
        sk, pk = ledger.scheme.keygen(rng)
        return cls(ledger, sk, pk)

    def sign(self, payload: Payload, nonce: int | None = None) -> Transaction:
        nonce = self.ledger.nonce(self.address) if nonce is None else nonce
        return sign_transaction(self.ledger.scheme, self.sk, self.address, nonce, payload)

    def transfer(self, asset: str, to: str, amount: float) -> str:
        return self.ledger.submit(self.sign(Transfer(asset=asset, to=to, amount=amount)))

    def call(self, contract: str, method: str, **args) -> str:
        return self.ledger.submit(self.sign(ContractCall(contract=contract, method=method, args=args)))

    def balance(self, asset: str) -> float:
        return self.ledger.balance(self.address, asset)
