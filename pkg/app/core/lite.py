"""Tokenized Dark DAO: DD token contract, enclave-side Lite contract, vote auctions.

Deposits are plain transfers to freshly generated addresses whose keys
only the Lite contract can unwrap. Each verified deposit earns a signed
mint authorization for DD tokens; burning DD earns signed withdrawal
transfers from the deposit accounts.
"""

import hashlib
import logging
import math

from app.config import settings
from app.core.darkdao import EventLog
from app.core.ledger import Ledger, Wallet, sign_transaction, tx_id
from app.core.security import SignatureScheme, new_wrapping_key, unwrap_key, wrap_key
from app.models.darkdao import (
    Auction,
    DepositAccount,
    EnumerationReport,
    Message,
    MintAuthorization,
    SelectionPolicy,
    WithdrawalPart,
    WithdrawalRequest,
)
from app.models.ledger import ContractCall, InclusionProof, Transaction, Transfer, TxStatus
from app.utils.exceptions import (
    AuctionTimingError,
    BadAuthorizationError,
    InsufficientDDBalanceError,
    LedgerException,
    LockupActiveError,
    NotAuctionWinnerError,
    NotFoundException,
    ReplayedNonceError,
    ReplayedProofError,
    UnfundedBidError,
    UnknownTransactionError,
    UnverifiableProofError,
    ValidationException,
    WithdrawalExceedsBalanceError,
)
from app.utils.rng import DeterministicRNG

logger = logging.getLogger(__name__)


class DDToken:
    """Public-chain token minted only against authorizations signed by the Lite key"""

    def __init__(self, dd_pk: str, scheme, asset: str | None = None):
        self.dd_pk = dd_pk
        self.scheme = scheme
        self.asset = asset or settings.dd_asset
        self.name = self.asset
        self.supply = 0.0
        self.balances: dict[str, float] = {}
        self.auth_nonces: dict[str, set] = {}

    def balance(self, party: str) -> float:
        return self.balances.get(party, 0.0)

    def mint(self, party: str, authorization: MintAuthorization) -> dict:
        if authorization.recipient != party:
            raise BadAuthorizationError(f"authorization is for {authorization.recipient}, not {party}")
        if authorization.nonce in self.auth_nonces.get(party, set()):
            raise ReplayedNonceError(f"nonce {authorization.nonce[:12]} already used by {party}")
        if authorization.amount <= 0 or not self.scheme.verify(
            self.dd_pk, authorization.message(), authorization.signature
        ):
            raise BadAuthorizationError("mint authorization does not verify")
        self.auth_nonces.setdefault(party, set()).add(authorization.nonce)
        self.balances[party] = self.balance(party) + authorization.amount
        self.supply += authorization.amount
        return {"event": "mint", "to": party, "amount": authorization.amount}

    def burn(self, party: str, amount: float) -> dict:
        if amount <= 0:
            raise ValidationException("burn amount must be positive")
        if self.balance(party) < amount - settings.tolerance:
            raise InsufficientDDBalanceError(f"{party} holds {self.balance(party)} DD, burning {amount}")
        self.balances[party] = self.balance(party) - amount
        self.supply -= amount
        return {"event": "burn", "from": party, "amount": amount}

    def transfer(self, party: str, to: str, amount: float) -> dict:
        if amount <= 0:
            raise ValidationException("transfer amount must be positive")
        if self.balance(party) < amount - settings.tolerance:
            raise InsufficientDDBalanceError(f"{party} holds {self.balance(party)} DD, sending {amount}")
        self.balances[party] = self.balance(party) - amount
        self.balances[to] = self.balance(to) + amount
        return {"event": "dd-transfer", "from": party, "to": to, "amount": amount}

    def execute(self, ledger: Ledger, sender: str, method: str, args: dict) -> list[dict]:
        if method == "mint":
            auth = args.get("authorization") or {}
            try:
                authorization = MintAuthorization(
                    recipient=auth["recipient"],
                    amount=float(auth["amount"]),
                    nonce=auth["nonce"],
                    signature=auth["signature"],
                )
            except (KeyError, TypeError, ValueError) as e:
                raise BadAuthorizationError(f"malformed authorization: {e}") from e
            event = self.mint(sender, authorization)
            ledger.adjust_supply(self.asset, authorization.amount)
        elif method == "burn":
            amount = float(args.get("amount", 0))
            event = self.burn(sender, amount)
            ledger.adjust_supply(self.asset, -amount)
        elif method == "transfer":
            event = self.transfer(sender, args.get("to"), float(args.get("amount", 0)))
        else:
            raise LedgerException(f"{self.name} has no method {method}")
        return [event]


class LiteContract:
    def __init__(
        self,
        ledger: Ledger,
        rng: DeterministicRNG | None = None,
        lockup: int | None = None,
        policy: SelectionPolicy = SelectionPolicy.FIFO,
        dao_asset: str | None = None,
        dd_asset: str | None = None,
    ):
        self.ledger = ledger
        self.scheme = ledger.scheme
        self.rng = rng or DeterministicRNG(settings.default_seed)
        self.lockup = settings.lite_lockup_blocks if lockup is None else lockup
        if self.lockup < 0:
            raise ValidationException("lockup must be >= 0")
        self.policy = SelectionPolicy(policy)
        self.dao_asset = dao_asset or settings.dao_asset
        self.log = EventLog()

        self._dd_sk, self.dd_pk = self.scheme.keygen(self.rng)
        self.token = DDToken(self.dd_pk, self.scheme, dd_asset)
        ledger.register_contract(self.token)
        self._gas_sk, self.gas_address = self.scheme.keygen(self.rng)
        self._escrow_sk, self.escrow_address = self.scheme.keygen(self.rng.fork("escrow"))
        self.bid_asset = ledger.native_asset
        self._escrow_nonce = 0
        self._wrapping_key = new_wrapping_key(self.rng)

        self._keys: dict[str, str] = {}
        self.deposits: dict[str, DepositAccount] = {}
        self.registered_proofs: set[str] = set()
        self._unminted: dict[str, tuple[str, float, int]] = {}
        self.requests: dict[str, WithdrawalRequest] = {}
        self.auctions: dict[str, Auction] = {}
        self.revenue = 0.0
        self.revenue_paid: dict[str, float] = {}

    # Deposits

    def get_deposit_address(self) -> tuple[str, str]:
        sk, pk = self.scheme.keygen(self.rng)
        self.log.emit({"type": "deposit-address", "pk": pk}, confidential=True)
        return pk, wrap_key(sk, self._wrapping_key)

    def _lockup_elapsed(self, height: int) -> bool:
        return self.ledger.height >= height + self.lockup

    def tracked_balance(self) -> float:
        return math.fsum(d.balance for d in self.deposits.values())

    def deposit_and_mint(self, proof: InclusionProof, encrypted_key: str, recipient: str) -> MintAuthorization | None:
        """Register a deposit; returns the mint authorization once the lockup has passed"""
        if proof.tx_id in self.registered_proofs:
            raise ReplayedProofError(f"deposit proof {proof.tx_id[:12]} already registered")
        if not self.ledger.verify_inclusion(proof):
            raise UnverifiableProofError(f"deposit proof {proof.tx_id[:12]} does not verify")
        sk = unwrap_key(encrypted_key, self._wrapping_key)
        if sk is None:
            raise UnverifiableProofError("encrypted key was not issued by this contract")
        pk = self.scheme.public_key(sk)
        tx = self.ledger.get_transaction(proof.tx_id)
        payload = tx.payload
        if not (
            isinstance(payload, Transfer)
            and payload.asset == self.dao_asset
            and payload.to == pk
            and payload.amount > 0
        ):
            raise UnverifiableProofError(f"transaction {proof.tx_id[:12]} is not a deposit to {pk}")

        self.registered_proofs.add(proof.tx_id)
        self._keys[pk] = sk
        account = self.deposits.get(pk)
        if account is None:
            self.deposits[pk] = DepositAccount(
                address=pk,
                balance=payload.amount,
                height=proof.height,
                sequence=len(self.deposits),
                nonce=self.ledger.nonce(pk),
                recipient=recipient,
            )
        else:
            account.balance += payload.amount
        self._unminted[proof.tx_id] = (recipient, payload.amount, proof.height)
        self.log.emit(
            {"type": "deposit", "pk": pk, "amount": payload.amount, "recipient": recipient},
            confidential=True,
        )

        if not self._lockup_elapsed(proof.height):
            logger.info(f"Deposit {proof.tx_id[:12]} locked until height {proof.height + self.lockup}")
            return None
        return self._authorize(proof.tx_id)

    def claim_mint_authorization(self, deposit_tx: str) -> MintAuthorization:
        if deposit_tx not in self._unminted:
            raise NotFoundException(f"no unminted deposit {deposit_tx[:12]}")
        _, _, height = self._unminted[deposit_tx]
        if not self._lockup_elapsed(height):
            raise LockupActiveError(f"deposit is locked until height {height + self.lockup}")
        return self._authorize(deposit_tx)

    def _authorize(self, deposit_tx: str) -> MintAuthorization:
        recipient, amount, _ = self._unminted.pop(deposit_tx)
        amount = float(amount)
        nonce = hashlib.sha256(f"mint:{deposit_tx}".encode()).hexdigest()
        unsigned = MintAuthorization(recipient=recipient, amount=amount, nonce=nonce, signature="")
        authorization = MintAuthorization(
            recipient=recipient,
            amount=amount,
            nonce=nonce,
            signature=self.scheme.sign(self._dd_sk, unsigned.message()),
        )
        self.log.emit({"type": "mint-authorized", "recipient": recipient, "amount": amount}, confidential=True)
        return authorization

    # Withdrawals

    def eligible_accounts(self) -> list[DepositAccount]:
        accounts = [
            d for d in self.deposits.values()
            if d.balance > settings.tolerance and self._lockup_elapsed(d.height)
        ]
        return sorted(accounts, key=lambda d: d.sequence, reverse=self.policy is SelectionPolicy.LIFO)

    def withdrawable(self) -> float:
        return math.fsum(d.balance for d in self.eligible_accounts())

    def _select(self, amount: float) -> list[tuple[DepositAccount, float]]:
        """Pick accounts in policy order, the last one possibly partially"""
        if amount > self.withdrawable() + settings.tolerance:
            raise WithdrawalExceedsBalanceError(
                f"withdrawal of {amount} exceeds withdrawable balance {self.withdrawable()}"
            )
        remaining = amount
        selection = []
        for account in self.eligible_accounts():
            if remaining <= settings.tolerance:
                break
            take = min(account.balance, remaining)
            selection.append((account, take))
            remaining -= take
        return selection

    def _reserved_gas_nonces(self) -> set[int]:
        """Gas nonces held by funding transfers that may still be included"""
        reserved = set()
        for request in self.requests.values():
            for part, unit in zip(request.parts, request.transactions):
                if part.confirmed or len(unit) == 1:
                    continue
                try:
                    status = self.ledger.status(part.tx_id)
                except UnknownTransactionError:
                    status = TxStatus.PENDING
                if status is TxStatus.PENDING:
                    reserved.add(unit[0].nonce)
        return reserved

    def _gas_nonces(self, count: int) -> list[int]:
        """Lowest free gas nonces, filling gaps left by dropped funding transfers"""
        reserved = self._reserved_gas_nonces()
        nonces, candidate = [], self.ledger.nonce(self.gas_address)
        while len(nonces) < count:
            if candidate not in reserved:
                nonces.append(candidate)
            candidate += 1
        return nonces

    def _build_parts(self, recipient: str, amount: float) -> tuple[list, list]:
        selection = self._select(amount)
        gas_nonces = self._gas_nonces(len(selection)) if self.ledger.fee > 0 else []
        parts, units = [], []
        for i, (account, take) in enumerate(selection):
            withdrawal = sign_transaction(
                self.scheme,
                self._keys[account.address],
                account.address,
                account.nonce,
                Transfer(asset=self.dao_asset, to=recipient, amount=take),
            )
            unit = [withdrawal]
            if gas_nonces:
                funding = sign_transaction(
                    self.scheme,
                    self._gas_sk,
                    self.gas_address,
                    gas_nonces[i],
                    Transfer(asset=self.ledger.native_asset, to=account.address, amount=self.ledger.fee),
                )
                unit = [funding, withdrawal]
            parts.append(WithdrawalPart(account.address, take, account.nonce, tx_id(withdrawal)))
            units.append(unit)
        return parts, units

    def redeem_and_withdraw(self, burn_proof: InclusionProof, recipient: str) -> WithdrawalRequest:
        key = f"burn:{burn_proof.tx_id}"
        if key in self.registered_proofs:
            raise ReplayedProofError(f"burn proof {burn_proof.tx_id[:12]} already redeemed")
        if not self.ledger.verify_inclusion(burn_proof):
            raise UnverifiableProofError(f"burn proof {burn_proof.tx_id[:12]} does not verify")
        payload = self.ledger.get_transaction(burn_proof.tx_id).payload
        if not (isinstance(payload, ContractCall) and payload.contract == self.token.name and payload.method == "burn"):
            raise UnverifiableProofError(f"transaction {burn_proof.tx_id[:12]} is not a DD burn")
        amount = float(payload.args["amount"])

        parts, units = self._build_parts(recipient, amount)
        self.registered_proofs.add(key)

        outstanding = self.token.supply + amount
        share = self.revenue * amount / outstanding if outstanding > 0 else 0.0
        self.revenue -= share
        self.revenue_paid[recipient] = self.revenue_paid.get(recipient, 0.0) + share
        payment = self._escrow_payment(recipient, share) if share > 0 else None
        if payment is not None:
            self.ledger.submit(payment)

        request = WithdrawalRequest(
            request_id=f"withdrawal-{len(self.requests) + 1}",
            recipient=recipient,
            amount=amount,
            parts=parts,
            transactions=units,
            revenue_share=share,
            revenue_payment=payment,
        )
        self.requests[request.request_id] = request
        self.log.emit(
            {"type": "withdrawal", "request": request.request_id, "accounts": [p.address for p in parts]},
            confidential=True,
        )
        return request

    def submit_request(self, request: WithdrawalRequest) -> list[str]:
        """Hand the request's signed units to the ledger; returns the pending unit ids"""
        unit_ids = []
        for part, unit in zip(request.parts, request.transactions):
            if part.confirmed:
                continue
            if len(unit) == 1:
                unit_ids.append(self.ledger.submit(unit[0]))
            else:
                unit_ids.append(self.ledger.submit_bundle(unit))
        if request.revenue_payment is not None:
            unit_ids.append(self.ledger.submit(request.revenue_payment))
        return unit_ids

    def confirm_withdrawal(self, proof: InclusionProof) -> WithdrawalRequest:
        if not self.ledger.verify_inclusion(proof):
            raise UnverifiableProofError(f"withdrawal proof {proof.tx_id[:12]} does not verify")
        for request in self.requests.values():
            for part in request.parts:
                if part.tx_id != proof.tx_id:
                    continue
                if part.confirmed:
                    raise ReplayedProofError(f"withdrawal {proof.tx_id[:12]} already confirmed")
                account = self.deposits[part.address]
                part.confirmed = True
                account.balance -= part.amount
                account.nonce = part.nonce + 1
                self.log.emit({"type": "withdrawal-confirmed", "request": request.request_id}, confidential=True)
                return request
        raise UnverifiableProofError(f"transaction {proof.tx_id[:12]} is not an issued withdrawal")

    def reissue_withdrawal(self, request_id: str) -> WithdrawalRequest:
        """Replace parts that lost a nonce race or were rejected"""
        request = self.requests.get(request_id)
        if request is None:
            raise NotFoundException(f"no withdrawal request {request_id}")

        kept_parts, kept_units, lost = [], [], 0.0
        for part, unit in zip(request.parts, request.transactions):
            status = self.ledger.status(part.tx_id) if not part.confirmed else TxStatus.INCLUDED
            if status is TxStatus.INCLUDED and not part.confirmed:
                self.confirm_withdrawal(self.ledger.inclusion_proof(part.tx_id))
            if status in (TxStatus.INVALIDATED, TxStatus.REJECTED):
                lost += part.amount
            else:
                kept_parts.append(part)
                kept_units.append(unit)

        if lost > settings.tolerance:
            parts, units = self._build_parts(request.recipient, lost)
            kept_parts.extend(parts)
            kept_units.extend(units)
            logger.info(f"Reissued {lost} of {request_id} across {len(parts)} accounts")
        request.parts = kept_parts
        request.transactions = kept_units
        return request

    # Auctions

    def auction_create(self, proposal: str, end: int, expiry: int) -> str:
        if not self.ledger.height < end < expiry:
            raise AuctionTimingError(
                f"auction must end after height {self.ledger.height} and before expiry {expiry}"
            )
        auction_id = f"auction-{len(self.auctions) + 1}"
        self.auctions[auction_id] = Auction(auction_id, proposal, end, expiry)
        self.log.emit({"type": "auction", "auction": auction_id, "proposal": proposal, "end": end})
        return auction_id

    def _auction(self, auction_id: str) -> Auction:
        if auction_id not in self.auctions:
            raise NotFoundException(f"no auction {auction_id}")
        return self.auctions[auction_id]

    def _escrow_payment(self, to: str, amount: float) -> Transaction | None:
        """Signed escrow transfer of `amount`, the ledger fee included; None for dust"""
        net = amount - self.ledger.fee
        if net <= settings.tolerance:
            return None
        nonce = max(self._escrow_nonce, self.ledger.nonce(self.escrow_address))
        self._escrow_nonce = nonce + 1
        return sign_transaction(
            self.scheme,
            self._escrow_sk,
            self.escrow_address,
            nonce,
            Transfer(asset=self.bid_asset, to=to, amount=net),
        )

    def accepts_bids(self, auction_id: str, height: int | None = None) -> bool:
        """Whether a bid paid at `height` (default: the current height) still counts"""
        auction = self._auction(auction_id)
        height = self.ledger.height if height is None else height
        return not auction.settled and height < auction.end

    def auction_bid(self, auction_id: str, bidder: str, amount: float, payment: InclusionProof) -> None:
        """Accept a bid escrowed by an included transfer from the bidder to the escrow address"""
        auction = self._auction(auction_id)
        if amount <= 0:
            raise ValidationException("bid must be positive")
        key = f"bid:{payment.tx_id}"
        if key in self.registered_proofs:
            raise ReplayedProofError(f"bid payment {payment.tx_id[:12]} already used")
        if not self.ledger.verify_inclusion(payment):
            raise UnverifiableProofError(f"bid payment {payment.tx_id[:12]} does not verify")
        if not self.accepts_bids(auction_id, payment.height):
            raise AuctionTimingError(f"auction {auction_id} closed at height {auction.end}")
        tx = self.ledger.get_transaction(payment.tx_id)
        payload = tx.payload
        if not (
            isinstance(payload, Transfer)
            and tx.sender == bidder
            and payload.asset == self.bid_asset
            and payload.to == self.escrow_address
        ):
            raise UnfundedBidError(f"transaction {payment.tx_id[:12]} is not an escrow payment from {bidder}")
        if payload.amount < amount - settings.tolerance:
            raise UnfundedBidError(f"{bidder} escrowed {payload.amount}, bidding {amount}")
        self.registered_proofs.add(key)
        auction.bids.append((bidder, amount, payload.amount))
        self.log.emit({"type": "bid", "auction": auction_id, "bidder": bidder, "amount": amount}, confidential=True)

    def auction_settle(self, auction_id: str) -> str | None:
        """First-price: highest bid wins and pays its bid; ties go to the earliest bid.

        The winning bid stays in escrow as revenue; every other escrowed
        amount goes back to its bidder.
        """
        auction = self._auction(auction_id)
        if self.ledger.height < auction.end:
            raise AuctionTimingError(f"auction {auction_id} runs until height {auction.end}")
        if auction.settled:
            raise AuctionTimingError(f"auction {auction_id} already settled")
        auction.settled = True
        winning = None
        if auction.bids:
            winning = max(range(len(auction.bids)), key=lambda i: auction.bids[i][1])
            winner, price, _ = auction.bids[winning]
            auction.winner, auction.price = winner, price
            self.revenue += price
        for i, (bidder, amount, escrowed) in enumerate(auction.bids):
            refund = escrowed - amount if i == winning else escrowed
            tx = self._escrow_payment(bidder, refund)
            if tx is not None:
                auction.refunds.append(self.ledger.submit(tx))
        self.log.emit({"type": "auction-settled", "auction": auction_id, "price": auction.price})
        return auction.winner

    def sign_votes_for_winner(self, auction_id: str, party: str, vote: str) -> dict[str, str]:
        auction = self._auction(auction_id)
        if not auction.settled or auction.winner != party:
            raise NotAuctionWinnerError(f"{party} did not win {auction_id}")
        if self.ledger.height >= auction.expiry:
            raise AuctionTimingError(f"proposal {auction.proposal} expired at height {auction.expiry}")
        signatures = {}
        for pk, account in sorted(self.deposits.items()):
            if account.balance <= settings.tolerance:
                continue
            message = Message(kind="vote", proposal=auction.proposal, body=vote)
            signatures[pk] = self.scheme.sign(self._keys[pk], message.to_dict())
        self.log.emit({"type": "votes-signed", "auction": auction_id, "count": len(signatures)}, confidential=True)
        return signatures


def deposit(lite: LiteContract, wallet: Wallet, amount: float, recipient: str | None = None):
    """Transfer to a fresh deposit address and register it; returns (address, proof, authorization)"""
    ledger = lite.ledger
    address, encrypted = lite.get_deposit_address()
    tid = wallet.transfer(lite.dao_asset, address, amount)
    ledger.produce_block([tid])
    proof = ledger.inclusion_proof(tid)
    authorization = lite.deposit_and_mint(proof, encrypted, recipient or wallet.address)
    return address, proof, authorization


def mint_dd(lite: LiteContract, wallet: Wallet, authorization: MintAuthorization) -> str:
    tid = wallet.call(lite.token.name, "mint", authorization=authorization.to_dict())
    lite.ledger.produce_block([tid])
    return tid


def burn_and_withdraw(lite: LiteContract, wallet: Wallet, amount: float) -> WithdrawalRequest:
    """Burn DD, redeem the burn, and get the withdrawal included and confirmed"""
    ledger = lite.ledger
    tid = wallet.call(lite.token.name, "burn", amount=amount)
    ledger.produce_block([tid])
    request = lite.redeem_and_withdraw(ledger.inclusion_proof(tid), wallet.address)
    ledger.produce_block(lite.submit_request(request))
    for part in request.parts:
        lite.confirm_withdrawal(ledger.inclusion_proof(part.tx_id))
    return request


def place_bid(lite: LiteContract, wallet: Wallet, auction_id: str, amount: float) -> InclusionProof:
    """Escrow `amount` with the Lite contract and register the bid"""
    ledger = lite.ledger
    if not lite.accepts_bids(auction_id, ledger.height + 1):
        raise AuctionTimingError(f"auction {auction_id} no longer accepts bids")
    tid = wallet.transfer(lite.bid_asset, lite.escrow_address, amount)
    ledger.produce_block([tid])
    if ledger.status(tid) is not TxStatus.INCLUDED:
        raise UnfundedBidError(f"bid payment from {wallet.address} failed: {ledger.rejection_reason(tid)}")
    proof = ledger.inclusion_proof(tid)
    lite.auction_bid(auction_id, wallet.address, amount, proof)
    return proof


def enumeration_attack(
    policy: SelectionPolicy,
    budget: int,
    victims: int,
    lockup: int = 0,
    seed: int = 0,
) -> EnumerationReport:
    """Link deposit addresses by redeeming one DD right after every victim deposit.

    The adversary learns each withdrawal's sender address; any sender it did
    not create itself is a Dark DAO deposit address.
    """
    if budget < 0 or victims < 0:
        raise ValidationException("budget and victims must be >= 0")
    rng = DeterministicRNG(seed)
    ledger = Ledger(SignatureScheme(), fee=0.0)
    lite = LiteContract(ledger, rng.fork("lite"), lockup=lockup, policy=policy)
    adversary = Wallet.create(ledger, rng.fork("adversary"))
    crowd = [Wallet.create(ledger, rng.fork(f"victim-{i}")) for i in range(victims)]
    ledger.mint(adversary.address, lite.dao_asset, float(budget))
    for wallet in crowd:
        ledger.mint(wallet.address, lite.dao_asset, 1.0)
    ledger.produce_block([])

    own, locked = set(), []
    for _ in range(budget):
        address, proof, authorization = deposit(lite, adversary, 1.0)
        own.add(address)
        if authorization is None:
            locked.append(proof.tx_id)
        else:
            mint_dd(lite, adversary, authorization)
    ledger.advance(lockup)
    for deposit_tx in locked:
        mint_dd(lite, adversary, lite.claim_mint_authorization(deposit_tx))
    locked = []

    start = ledger.height
    victim_addresses, identified = [], []
    for wallet in crowd:
        address, _, _ = deposit(lite, wallet, 1.0)
        victim_addresses.append(address)

        if lite.token.balance(adversary.address) < 1 - settings.tolerance or lite.withdrawable() < 1 - settings.tolerance:
            continue
        request = burn_and_withdraw(lite, adversary, 1.0)
        for part in request.parts:
            if part.address not in own:
                identified.append(part.address)

        address, proof, authorization = deposit(lite, adversary, 1.0)
        own.add(address)
        if authorization is not None:
            mint_dd(lite, adversary, authorization)
        else:
            locked.append(proof.tx_id)
        for deposit_tx in list(locked):
            try:
                mint_dd(lite, adversary, lite.claim_mint_authorization(deposit_tx))
                locked.remove(deposit_tx)
            except LockupActiveError:
                pass

    report = EnumerationReport(
        policy=SelectionPolicy(policy),
        budget=budget,
        victims=victims,
        lockup=lockup,
        window=ledger.height - start,
        victim_addresses=tuple(victim_addresses),
        identified=tuple(a for a in identified if a in set(victim_addresses)),
    )
    logger.info(
        f"Enumeration attack ({report.policy.value}, lockup {lockup}): "
        f"linked {len(report.identified)}/{victims} deposit addresses"
    )
    return report
