import pytest
from hypothesis import settings as hyp_settings, strategies as st
from hypothesis.stateful import RuleBasedStateMachine, invariant, precondition, rule

from app.core.ledger import Ledger, Wallet, tx_id
from app.core.lite import LiteContract, burn_and_withdraw, deposit, enumeration_attack, mint_dd, place_bid
from app.core.security import SignatureScheme
from app.models.darkdao import SelectionPolicy
from app.models.ledger import InclusionProof, TxStatus
from app.utils.exceptions import (
    AuctionTimingError,
    InsufficientDDBalanceError,
    LockupActiveError,
    NotAuctionWinnerError,
    ReplayedNonceError,
    ReplayedProofError,
    UnfundedBidError,
    UnverifiableProofError,
    WithdrawalExceedsBalanceError,
)
from app.utils.rng import DeterministicRNG


def _setup(lockup: int = 0, fee: float = 0.0, policy=SelectionPolicy.FIFO, seed: int = 1):
    rng = DeterministicRNG(seed)
    ledger = Ledger(SignatureScheme(), fee=fee)
    lite = LiteContract(ledger, rng.fork("lite"), lockup=lockup, policy=policy)
    return ledger, lite, rng


def _funded(ledger, lite, rng, name: str, amount: float = 100.0) -> Wallet:
    wallet = Wallet.create(ledger, rng.fork(name))
    ledger.mint(wallet.address, lite.dao_asset, amount)
    ledger.mint(wallet.address, ledger.native_asset, 10.0)
    return wallet


@pytest.fixture
def world():
    ledger, lite, rng = _setup()
    alice = _funded(ledger, lite, rng, "alice")
    return ledger, lite, rng, alice


def test_deposit_and_mint(world):
    ledger, lite, _, alice = world
    address, _, authorization = deposit(lite, alice, 10.0)
    mint_dd(lite, alice, authorization)
    assert lite.token.supply == 10.0
    assert lite.token.balance(alice.address) == 10.0
    assert ledger.supply(lite.token.asset) == 10.0
    assert lite.tracked_balance() == 10.0
    assert ledger.balance(address, lite.dao_asset) == 10.0


def test_deposit_looks_like_a_plain_transfer(world):
    ledger, lite, _, alice = world
    address, proof, _ = deposit(lite, alice, 10.0)
    event = [e for e in ledger.events() if e.get("tx") == proof.tx_id][0]
    assert set(event) == {"type", "asset", "from", "to", "amount", "tx", "height"}
    assert event["type"] == "transfer" and event["to"] == address
    assert all(e["type"] != "deposit" for e in lite.log.public)


def test_replayed_mint_authorization_rejected(world):
    ledger, lite, _, alice = world
    _, _, authorization = deposit(lite, alice, 10.0)
    mint_dd(lite, alice, authorization)
    replay = mint_dd(lite, alice, authorization)
    assert ledger.status(replay) is TxStatus.REJECTED
    assert ledger.rejection_reason(replay) == "replayed-nonce"
    with pytest.raises(ReplayedNonceError):
        lite.token.mint(alice.address, authorization)
    assert lite.token.supply == 10.0


def test_replayed_deposit_proof_rejected(world):
    _, lite, _, alice = world
    address, proof, _ = deposit(lite, alice, 10.0)
    _, encrypted = lite.get_deposit_address()
    with pytest.raises(ReplayedProofError):
        lite.deposit_and_mint(proof, encrypted, alice.address)


def test_unverifiable_deposit_proof_rejected(world):
    _, lite, _, alice = world
    _, encrypted = lite.get_deposit_address()
    with pytest.raises(UnverifiableProofError):
        lite.deposit_and_mint(InclusionProof(height=5, tx_id="f" * 64), encrypted, alice.address)


def test_deposit_to_someone_else_is_not_a_deposit(world):
    ledger, lite, _, alice = world
    _, encrypted = lite.get_deposit_address()
    tid = alice.transfer(lite.dao_asset, "0xelsewhere", 5.0)
    ledger.produce_block([tid])
    with pytest.raises(UnverifiableProofError):
        lite.deposit_and_mint(ledger.inclusion_proof(tid), encrypted, alice.address)


def test_lockup_delays_mint_authorization():
    ledger, lite, rng = _setup(lockup=3)
    alice = _funded(ledger, lite, rng, "alice")
    _, proof, authorization = deposit(lite, alice, 5.0)
    assert authorization is None
    with pytest.raises(LockupActiveError):
        lite.claim_mint_authorization(proof.tx_id)
    assert lite.withdrawable() == 0.0
    ledger.advance(3)
    mint_dd(lite, alice, lite.claim_mint_authorization(proof.tx_id))
    assert lite.token.balance(alice.address) == 5.0
    assert lite.withdrawable() == 5.0


def test_burn_receipt_and_balance_check(world):
    ledger, lite, _, alice = world
    _, _, authorization = deposit(lite, alice, 10.0)
    mint_dd(lite, alice, authorization)
    tid = alice.call(lite.token.name, "burn", amount=4.0)
    block = ledger.produce_block([tid])
    assert any(e.get("event") == "burn" and e["amount"] == 4.0 for e in block.events)
    assert lite.token.supply == 6.0
    with pytest.raises(InsufficientDDBalanceError):
        lite.token.burn(alice.address, 7.0)


def test_withdrawal_spans_two_accounts(world):
    ledger, lite, _, alice = world
    for amount in (6.0, 4.0):
        _, _, authorization = deposit(lite, alice, amount)
        mint_dd(lite, alice, authorization)
    before = alice.balance(lite.dao_asset)
    request = burn_and_withdraw(lite, alice, 10.0)
    assert [p.amount for p in request.parts] == [6.0, 4.0]
    assert request.completed
    assert alice.balance(lite.dao_asset) == before + 10.0
    assert lite.tracked_balance() == 0.0


def test_withdrawal_with_fee_is_funded_by_the_gas_account():
    ledger, lite, rng = _setup(fee=0.1)
    alice = _funded(ledger, lite, rng, "alice")
    ledger.mint(lite.gas_address, ledger.native_asset, 5.0)
    _, _, authorization = deposit(lite, alice, 3.0)
    mint_dd(lite, alice, authorization)
    request = burn_and_withdraw(lite, alice, 3.0)
    assert request.completed
    assert lite.tracked_balance() == 0.0


def test_fee_withdrawal_across_accounts_uses_consecutive_gas_nonces():
    ledger, lite, rng = _setup(fee=0.1)
    alice = _funded(ledger, lite, rng, "alice")
    ledger.mint(lite.gas_address, ledger.native_asset, 5.0)
    for amount in (6.0, 4.0):
        _, _, authorization = deposit(lite, alice, amount)
        mint_dd(lite, alice, authorization)
    before = alice.balance(lite.dao_asset)
    request = burn_and_withdraw(lite, alice, 10.0)
    assert [unit[0].nonce for unit in request.transactions] == [0, 1]
    assert all(ledger.status(p.tx_id) is TxStatus.INCLUDED for p in request.parts)
    assert request.completed
    assert ledger.nonce(lite.gas_address) == 2
    assert alice.balance(lite.dao_asset) == pytest.approx(before + 10.0)
    assert lite.tracked_balance() == 0.0


def test_reissue_after_a_lost_race_refills_the_gas_nonce():
    ledger, lite, rng = _setup(fee=0.1)
    alice = _funded(ledger, lite, rng, "alice")
    bob = _funded(ledger, lite, rng, "bob")
    ledger.mint(lite.gas_address, ledger.native_asset, 5.0)
    for wallet, amount in ((alice, 6.0), (bob, 4.0)):
        _, _, authorization = deposit(lite, wallet, amount)
        mint_dd(lite, wallet, authorization)
    burns = [alice.call(lite.token.name, "burn", amount=6.0), bob.call(lite.token.name, "burn", amount=4.0)]
    ledger.produce_block(burns)
    first = lite.redeem_and_withdraw(ledger.inclusion_proof(burns[0]), alice.address)
    second = lite.redeem_and_withdraw(ledger.inclusion_proof(burns[1]), bob.address)
    assert (first.transactions[0][0].nonce, second.transactions[0][0].nonce) == (0, 1)

    ledger.produce_block(lite.submit_request(first) + lite.submit_request(second))
    assert ledger.status(second.parts[0].tx_id) is TxStatus.INVALIDATED
    lite.confirm_withdrawal(ledger.inclusion_proof(first.parts[0].tx_id))

    reissued = lite.reissue_withdrawal(second.request_id)
    assert reissued.transactions[0][0].nonce == ledger.nonce(lite.gas_address) == 1
    ledger.produce_block(lite.submit_request(reissued))
    lite.confirm_withdrawal(ledger.inclusion_proof(reissued.parts[0].tx_id))
    assert reissued.completed
    assert bob.balance(lite.dao_asset) == pytest.approx(100.0)


def test_integer_amounts_mint_like_floats(world):
    ledger, lite, _, alice = world
    _, _, authorization = deposit(lite, alice, 6)
    assert authorization.message()["amount"] == 6.0
    tid = mint_dd(lite, alice, authorization)
    assert ledger.status(tid) is TxStatus.INCLUDED
    assert lite.token.balance(alice.address) == 6.0


def test_withdrawal_exceeding_tracked_balance(world):
    ledger, lite, _, alice = world
    _, _, authorization = deposit(lite, alice, 2.0)
    mint_dd(lite, alice, authorization)
    with pytest.raises(WithdrawalExceedsBalanceError):
        lite._select(5.0)


def test_burn_proof_cannot_be_redeemed_twice(world):
    ledger, lite, _, alice = world
    _, _, authorization = deposit(lite, alice, 2.0)
    mint_dd(lite, alice, authorization)
    tid = alice.call(lite.token.name, "burn", amount=2.0)
    ledger.produce_block([tid])
    lite.redeem_and_withdraw(ledger.inclusion_proof(tid), alice.address)
    with pytest.raises(ReplayedProofError):
        lite.redeem_and_withdraw(ledger.inclusion_proof(tid), alice.address)


def test_competing_redeemers_share_a_nonce(world):
    ledger, lite, rng, alice = world
    bob = _funded(ledger, lite, rng, "bob")
    _, _, auth_a = deposit(lite, alice, 6.0)
    mint_dd(lite, alice, auth_a)
    _, _, auth_b = deposit(lite, bob, 4.0)
    mint_dd(lite, bob, auth_b)

    burns = [alice.call(lite.token.name, "burn", amount=6.0), bob.call(lite.token.name, "burn", amount=4.0)]
    ledger.produce_block(burns)
    first = lite.redeem_and_withdraw(ledger.inclusion_proof(burns[0]), alice.address)
    second = lite.redeem_and_withdraw(ledger.inclusion_proof(burns[1]), bob.address)
    assert (first.parts[0].address, first.parts[0].nonce) == (second.parts[0].address, second.parts[0].nonce)

    ids = lite.submit_request(first) + lite.submit_request(second)
    ledger.produce_block(ids)
    assert ledger.status(first.parts[0].tx_id) is TxStatus.INCLUDED
    assert ledger.status(second.parts[0].tx_id) is TxStatus.INVALIDATED

    lite.confirm_withdrawal(ledger.inclusion_proof(first.parts[0].tx_id))
    reissued = lite.reissue_withdrawal(second.request_id)
    assert reissued.parts[0].nonce == 0
    assert reissued.parts[0].address != first.parts[0].address
    ledger.produce_block(lite.submit_request(reissued))
    lite.confirm_withdrawal(ledger.inclusion_proof(reissued.parts[0].tx_id))
    assert reissued.completed
    assert bob.balance(lite.dao_asset) == 100.0


def test_queue_advances_only_on_inclusion_proof(world):
    ledger, lite, _, alice = world
    _, _, authorization = deposit(lite, alice, 3.0)
    mint_dd(lite, alice, authorization)
    tid = alice.call(lite.token.name, "burn", amount=3.0)
    ledger.produce_block([tid])
    request = lite.redeem_and_withdraw(ledger.inclusion_proof(tid), alice.address)
    account = lite.deposits[request.parts[0].address]
    assert account.nonce == 0 and account.balance == 3.0
    with pytest.raises(UnverifiableProofError):
        lite.confirm_withdrawal(InclusionProof(height=ledger.height, tx_id=request.parts[0].tx_id))
    assert account.nonce == 0


def _bidders(ledger, lite, rng, *names):
    return [_funded(ledger, lite, rng, name) for name in names]


def test_first_price_auction(world):
    ledger, lite, rng, alice = world
    for amount in (3.0, 2.0):
        deposit(lite, alice, amount)
    b1, b2, b3 = _bidders(ledger, lite, rng, "b1", "b2", "b3")
    auction = lite.auction_create("p1", end=ledger.height + 5, expiry=ledger.height + 10)
    for bidder, amount in ((b1, 5.0), (b2, 9.0), (b3, 7.0)):
        place_bid(lite, bidder, auction, amount)
    assert ledger.balance(lite.escrow_address, lite.bid_asset) == 21.0
    with pytest.raises(AuctionTimingError):
        lite.auction_settle(auction)
    ledger.advance(lite.auctions[auction].end - ledger.height)
    late = _funded(ledger, lite, rng, "late")
    with pytest.raises(AuctionTimingError):
        place_bid(lite, late, auction, 8.0)
    assert late.balance(lite.bid_asset) == 10.0

    assert lite.auction_settle(auction) == b2.address
    assert lite.auctions[auction].price == 9.0
    assert lite.revenue == 9.0
    ledger.produce_block(lite.auctions[auction].refunds)
    assert [w.balance(lite.bid_asset) for w in (b1, b2, b3)] == [10.0, 1.0, 10.0]
    assert ledger.balance(lite.escrow_address, lite.bid_asset) == 9.0

    signatures = lite.sign_votes_for_winner(auction, b2.address, "yes")
    assert len(signatures) == 2
    with pytest.raises(NotAuctionWinnerError):
        lite.sign_votes_for_winner(auction, b1.address, "yes")


def test_unfunded_bid_is_rejected(world):
    ledger, lite, rng, _ = world
    (poor,) = _bidders(ledger, lite, rng, "poor")
    auction = lite.auction_create("p1", end=ledger.height + 5, expiry=ledger.height + 10)
    with pytest.raises(UnfundedBidError):
        place_bid(lite, poor, auction, 50.0)
    assert lite.auctions[auction].bids == []
    assert ledger.balance(lite.escrow_address, lite.bid_asset) == 0.0


def test_bid_above_its_escrowed_amount_is_rejected(world):
    ledger, lite, rng, _ = world
    (bidder,) = _bidders(ledger, lite, rng, "bidder")
    auction = lite.auction_create("p1", end=ledger.height + 5, expiry=ledger.height + 10)
    tid = bidder.transfer(lite.bid_asset, lite.escrow_address, 2.0)
    ledger.produce_block([tid])
    proof = ledger.inclusion_proof(tid)
    with pytest.raises(UnfundedBidError):
        lite.auction_bid(auction, bidder.address, 5.0, proof)
    with pytest.raises(UnfundedBidError):
        lite.auction_bid(auction, "someone-else", 2.0, proof)
    lite.auction_bid(auction, bidder.address, 2.0, proof)
    with pytest.raises(ReplayedProofError):
        lite.auction_bid(auction, bidder.address, 2.0, proof)


def test_auction_must_end_before_expiry(world):
    ledger, lite, _, _ = world
    with pytest.raises(AuctionTimingError):
        lite.auction_create("p1", end=ledger.height + 5, expiry=ledger.height + 5)


def test_auction_ties_go_to_earliest_bid(world):
    ledger, lite, rng, _ = world
    first, second = _bidders(ledger, lite, rng, "first", "second")
    auction = lite.auction_create("p1", end=ledger.height + 3, expiry=ledger.height + 6)
    place_bid(lite, first, auction, 4.0)
    place_bid(lite, second, auction, 4.0)
    ledger.advance(1)
    assert lite.auction_settle(auction) == first.address


def test_auction_revenue_shared_on_redemption(world):
    ledger, lite, rng, alice = world
    _, _, authorization = deposit(lite, alice, 10.0)
    mint_dd(lite, alice, authorization)
    (b1,) = _bidders(ledger, lite, rng, "b1")
    auction = lite.auction_create("p1", end=ledger.height + 2, expiry=ledger.height + 5)
    place_bid(lite, b1, auction, 8.0)
    ledger.advance(1)
    lite.auction_settle(auction)
    before = alice.balance(lite.bid_asset)
    request = burn_and_withdraw(lite, alice, 5.0)
    assert request.revenue_share == pytest.approx(4.0)
    assert ledger.status(tx_id(request.revenue_payment)) is TxStatus.INCLUDED
    assert alice.balance(lite.bid_asset) == pytest.approx(before + 4.0)
    assert lite.revenue == pytest.approx(4.0)
    assert ledger.balance(lite.escrow_address, lite.bid_asset) == pytest.approx(4.0)


def test_lifo_enumeration_links_every_victim():
    report = enumeration_attack(SelectionPolicy.LIFO, budget=3, victims=6, lockup=0, seed=2)
    assert len(report.identified) == 6
    assert report.fraction == 1.0


def test_fifo_with_long_lockup_links_nobody():
    report = enumeration_attack(SelectionPolicy.FIFO, budget=3, victims=4, lockup=20, seed=2)
    assert report.identified == ()


def test_enumeration_without_budget_links_nobody():
    report = enumeration_attack(SelectionPolicy.LIFO, budget=0, victims=3)
    assert report.fraction == 0.0
    assert report.to_dict()["identified_count"] == 0


class DDTokenMachine(RuleBasedStateMachine):
    """Random mints, redemptions, transfers and replays; supply must equal mints minus burns"""

    def __init__(self):
        super().__init__()
        self.ledger, self.lite, rng = _setup(seed=9)
        self.wallets = [_funded(self.ledger, self.lite, rng, f"w{i}", 1000.0) for i in range(3)]
        self.used = []
        self.minted = 0.0
        self.burned = 0.0

    @rule(who=st.integers(0, 2), amount=st.integers(1, 20))
    def mint(self, who, amount):
        wallet = self.wallets[who]
        _, _, authorization = deposit(self.lite, wallet, float(amount))
        tid = mint_dd(self.lite, wallet, authorization)
        assert self.ledger.status(tid) is TxStatus.INCLUDED
        self.used.append((wallet, authorization))
        self.minted += amount

    @precondition(lambda self: self.used)
    @rule(pick=st.integers(0, 100))
    def replay(self, pick):
        wallet, authorization = self.used[pick % len(self.used)]
        tid = mint_dd(self.lite, wallet, authorization)
        assert self.ledger.status(tid) is TxStatus.REJECTED

    @rule(who=st.integers(0, 2), amount=st.integers(1, 20))
    def burn(self, who, amount):
        wallet = self.wallets[who]
        if self.lite.token.balance(wallet.address) >= amount:
            request = burn_and_withdraw(self.lite, wallet, float(amount))
            assert request.completed
            self.burned += amount
        else:
            tid = wallet.call(self.lite.token.name, "burn", amount=float(amount))
            self.ledger.produce_block([tid])
            assert self.ledger.rejection_reason(tid) == "insufficient-dd-balance"

    @rule(src=st.integers(0, 2), dst=st.integers(0, 2), amount=st.integers(1, 20))
    def transfer(self, src, dst, amount):
        wallet = self.wallets[src]
        tid = wallet.call(self.lite.token.name, "transfer", to=self.wallets[dst].address, amount=float(amount))
        self.ledger.produce_block([tid])

    @invariant()
    def supply_matches_history(self):
        token = self.lite.token
        assert token.supply == pytest.approx(self.minted - self.burned)
        assert self.ledger.supply(token.asset) == pytest.approx(token.supply)
        assert sum(token.balances.values()) == pytest.approx(token.supply)

    @invariant()
    def supply_is_backed_by_deposits(self):
        assert self.lite.token.supply <= self.lite.tracked_balance() + 1e-9
        held = sum(self.ledger.balance(a, self.lite.dao_asset) for a in self.lite.deposits)
        assert held == pytest.approx(self.lite.tracked_balance())


DDTokenMachine.TestCase.settings = hyp_settings(max_examples=20, stateful_step_count=50, deadline=None)
TestDDToken = DDTokenMachine.TestCase
