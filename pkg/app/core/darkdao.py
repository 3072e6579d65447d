"""Key-encumbrance Dark DAO.

Accounts are generated inside the enclave so their owners never see the
secret key. Once an owner takes a bribe, messages in the bribe's
restricted set can only be signed by the briber.
"""

import logging
import math

from app.config import settings
from app.core.security import SignatureScheme
from app.models.darkdao import BribeOffer, EncumberedAccount, Message, Restriction
from app.utils.exceptions import (
    AlreadyEnrolledError,
    MessageOutsideScopeError,
    MessageRestrictedError,
    NotEnrolledError,
    PoolExhaustedError,
    PriorSignatureError,
    UnknownAccountError,
    UnknownBribeError,
    ValidationException,
    WrongBriberError,
    WrongPartyError,
)
from app.utils.rng import DeterministicRNG

logger = logging.getLogger(__name__)


def policy_restricts(m: Message, enrollment_time: int) -> bool:
    """Only messages anchored after enrollment can be restricted; unanchored ones never are"""
    if m.anchor is None:
        logger.warning(f"Message {m.digest[:12]} has no anchor; treating it as unrestricted")
        return False
    return m.anchor > enrollment_time


class EventLog:
    """Public and confidential event streams of one protocol instance"""

    def __init__(self):
        self.public: list[dict] = []
        self.confidential: list[dict] = []

    def emit(self, event: dict, confidential: bool = False) -> None:
        (self.confidential if confidential else self.public).append(event)


class DarkDao:
    def __init__(self, scheme: SignatureScheme | None = None, rng: DeterministicRNG | None = None):
        self.scheme = scheme or SignatureScheme()
        self.rng = rng or DeterministicRNG(settings.default_seed)
        self.clock = 0
        self.log = EventLog()
        self._accounts: dict[str, EncumberedAccount] = {}
        self._bribes: dict[str, BribeOffer] = {}
        self.payments: dict[str, float] = {}

    def tick(self, steps: int = 1) -> int:
        if steps < 0:
            raise ValidationException("clock cannot move backwards")
        self.clock += steps
        return self.clock

    def _account(self, pk: str) -> EncumberedAccount:
        account = self._accounts.get(pk)
        if account is None:
            raise UnknownAccountError(f"no encumbered account {pk}")
        return account

    def _bribe(self, bribe_id: str) -> BribeOffer:
        bribe = self._bribes.get(bribe_id)
        if bribe is None:
            raise UnknownBribeError(f"no bribe {bribe_id}")
        return bribe

    def account_view(self, pk: str) -> dict:
        """Owner-visible account state; never includes the secret key"""
        account = self._account(pk)
        return {
            "pk": account.pk,
            "party": account.party,
            "bribe_id": account.bribe_id,
            "enrollment_time": account.enrollment_time,
            "signed": sorted(account.signed),
        }

    def bribe_view(self, bribe_id: str) -> dict:
        bribe = self._bribe(bribe_id)
        return {
            "bribe_id": bribe.bribe_id,
            "amount": bribe.amount,
            "pool": bribe.pool,
            "paid": bribe.paid,
            "restriction": bribe.restriction.to_dict(),
        }

    def is_restricted(self, account: EncumberedAccount, m: Message, bribe: BribeOffer) -> bool:
        return bribe.restriction.contains(m) and policy_restricts(m, account.enrollment_time)

    def keygen(self, party: str) -> str:
        sk, pk = self.scheme.keygen(self.rng)
        self._accounts[pk] = EncumberedAccount(pk=pk, sk=sk, party=party, enrollment_time=self.clock)
        self.log.emit({"type": "keygen", "pk": pk, "time": self.clock})
        self.log.emit({"type": "account", "pk": pk, "party": party}, confidential=True)
        return pk

    def sign(self, party: str, pk: str, m: Message) -> str:
        account = self._account(pk)
        if account.party != party:
            raise WrongPartyError(f"{party} does not own {pk}")
        if account.bribe_id is not None and self.is_restricted(account, m, self._bribe(account.bribe_id)):
            raise MessageRestrictedError(f"message {m.digest[:12]} is restricted for {pk}")
        signature = self.scheme.sign(account.sk, m.to_dict())
        account.signed[m.digest] = m
        self.log.emit({"type": "sign", "pk": pk, "message": m.digest}, confidential=True)
        return signature

    def register_bribe(self, briber: str, amount: float, restriction: Restriction, deposit: float) -> str:
        if amount <= 0 or deposit < 0 or not math.isfinite(deposit):
            raise ValidationException("bribe amount must be positive and the deposit non-negative")
        bribe_id = f"bribe-{len(self._bribes) + 1}"
        self._bribes[bribe_id] = BribeOffer(
            bribe_id=bribe_id,
            briber=briber,
            amount=amount,
            restriction=restriction,
            pool=deposit,
        )
        self.log.emit({
            "type": "bribe-registered",
            "bribe_id": bribe_id,
            "amount": amount,
            "pool": deposit,
            "restriction": restriction.to_dict(),
        })
        self.log.emit({"type": "briber", "bribe_id": bribe_id, "briber": briber}, confidential=True)
        return bribe_id

    def take_bribe(self, party: str, pk: str, bribe_id: str) -> float:
        account = self._account(pk)
        if account.party != party:
            raise WrongPartyError(f"{party} does not own {pk}")
        bribe = self._bribe(bribe_id)
        if account.bribe_id is not None:
            raise AlreadyEnrolledError(f"{pk} already took bribe {account.bribe_id}")
        prior = [d for d, m in account.signed.items() if self.is_restricted(account, m, bribe)]
        if prior:
            raise PriorSignatureError(f"{pk} already signed restricted message {prior[0][:12]}")
        if bribe.pool < bribe.amount - settings.tolerance:
            raise PoolExhaustedError(f"bribe {bribe_id} pool holds {bribe.pool}, needs {bribe.amount}")

        account.bribe_id = bribe_id
        bribe.pool -= bribe.amount
        bribe.paid += bribe.amount
        self.payments[party] = self.payments.get(party, 0.0) + bribe.amount
        logger.debug(
            f"Paid {bribe.amount} from {bribe_id}, pool now {bribe.pool}"
        )
        self.log.emit({"type": "payment", "to": party, "amount": bribe.amount})
        self.log.emit({"type": "enrolled", "pk": pk, "bribe_id": bribe_id}, confidential=True)
        return bribe.amount

    def sign_via_encumbered_key(self, briber: str, pk: str, m: Message, bribe_id: str) -> str:
        account = self._account(pk)
        bribe = self._bribe(bribe_id)
        if account.bribe_id != bribe_id:
            raise NotEnrolledError(f"{pk} is not enrolled in {bribe_id}")
        if bribe.briber != briber:
            raise WrongBriberError(f"{briber} did not register {bribe_id}")
        if not bribe.restriction.contains(m):
            raise MessageOutsideScopeError(f"message {m.digest[:12]} is outside the bribe's scope")
        signature = self.scheme.sign(account.sk, m.to_dict())
        self.log.emit(
            {"type": "briber-sign", "pk": pk, "bribe_id": bribe_id, "message": m.digest},
            confidential=True,
        )
        return signature

    def verify(self, pk: str, m: Message, signature: str) -> bool:
        return self.scheme.verify(pk, m.to_dict(), signature)
