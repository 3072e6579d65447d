import logging

import pytest

from app.core.darkdao import DarkDao, policy_restricts
from app.models.darkdao import Message, Restriction
from app.utils.exceptions import (
    AlreadyEnrolledError,
    DarkDaoException,
    MessageOutsideScopeError,
    MessageRestrictedError,
    NotEnrolledError,
    PoolExhaustedError,
    PriorSignatureError,
    UnknownBribeError,
    WrongBriberError,
    WrongPartyError,
)
from app.utils.rng import DeterministicRNG

VOTES_ON_P1 = Restriction(kinds=frozenset({"vote"}), proposals=frozenset({"p1"}))


@pytest.fixture
def dao() -> DarkDao:
    return DarkDao(rng=DeterministicRNG(3))


@pytest.fixture
def enrolled(dao):
    """Alice's key is enrolled in a 5-token bribe from Bob with room for two takers"""
    pk = dao.keygen("alice")
    bribe_id = dao.register_bribe("bob", 5.0, VOTES_ON_P1, 10.0)
    dao.tick()
    assert dao.take_bribe("alice", pk, bribe_id) == 5.0
    return pk, bribe_id


def _vote(proposal: str = "p1", body: str = "yes", anchor: int | None = 1) -> Message:
    return Message(kind="vote", proposal=proposal, body=body, anchor=anchor)


def test_fair_exchange(dao, enrolled):
    pk, bribe_id = enrolled
    assert dao.payments["alice"] == 5.0
    with pytest.raises(MessageRestrictedError):
        dao.sign("alice", pk, _vote())
    signature = dao.sign_via_encumbered_key("bob", pk, _vote(body="no"), bribe_id)
    assert dao.verify(pk, _vote(body="no"), signature)


def test_bounded_scope(dao, enrolled):
    pk, _ = enrolled
    for m in (_vote(proposal="p2"), Message(kind="post", body="gm", anchor=5)):
        assert dao.verify(pk, m, dao.sign("alice", pk, m))


def test_pool_decremented_once(dao, enrolled):
    _, bribe_id = enrolled
    view = dao.bribe_view(bribe_id)
    assert view["pool"] == 5.0
    assert view["paid"] == 5.0


def test_account_view_hides_secret(dao, enrolled):
    pk, bribe_id = enrolled
    view = dao.account_view(pk)
    assert view["bribe_id"] == bribe_id
    assert "sk" not in view


def test_confidential_state_stays_off_public_log(dao, enrolled):
    pk, bribe_id = enrolled
    dao.sign_via_encumbered_key("bob", pk, _vote(), bribe_id)
    public = str(dao.log.public)
    assert "bob" not in public
    assert "enrolled" not in public
    assert any(e["type"] == "briber-sign" for e in dao.log.confidential)


def test_wrong_party(dao):
    pk = dao.keygen("alice")
    with pytest.raises(WrongPartyError):
        dao.sign("mallory", pk, _vote())


def test_already_enrolled(dao, enrolled):
    pk, bribe_id = enrolled
    with pytest.raises(AlreadyEnrolledError):
        dao.take_bribe("alice", pk, bribe_id)


def test_prior_restricted_signature_blocks_enrollment(dao):
    pk = dao.keygen("alice")
    bribe_id = dao.register_bribe("bob", 5.0, VOTES_ON_P1, 10.0)
    dao.sign("alice", pk, _vote())
    with pytest.raises(PriorSignatureError):
        dao.take_bribe("alice", pk, bribe_id)


def test_pool_exhausted(dao):
    bribe_id = dao.register_bribe("bob", 5.0, VOTES_ON_P1, 7.0)
    first, second = dao.keygen("alice"), dao.keygen("carol")
    dao.take_bribe("alice", first, bribe_id)
    with pytest.raises(PoolExhaustedError):
        dao.take_bribe("carol", second, bribe_id)


def test_briber_identity_checked(dao, enrolled):
    pk, bribe_id = enrolled
    with pytest.raises(WrongBriberError):
        dao.sign_via_encumbered_key("mallory", pk, _vote(), bribe_id)


def test_briber_limited_to_restricted_set(dao, enrolled):
    pk, bribe_id = enrolled
    with pytest.raises(MessageOutsideScopeError):
        dao.sign_via_encumbered_key("bob", pk, _vote(proposal="p2"), bribe_id)


def test_unknown_bribe(dao):
    pk = dao.keygen("alice")
    with pytest.raises(UnknownBribeError):
        dao.take_bribe("alice", pk, "bribe-99")


def test_signing_needs_enrollment_in_that_bribe(dao, enrolled):
    _, bribe_id = enrolled
    stranger = dao.keygen("carol")
    with pytest.raises(NotEnrolledError) as exc:
        dao.sign_via_encumbered_key("bob", stranger, _vote(), bribe_id)
    assert exc.value.code == "not-enrolled"
    with pytest.raises(UnknownBribeError):
        dao.sign_via_encumbered_key("bob", stranger, _vote(), "bribe-99")


def test_error_codes_are_distinct():
    errors = [
        WrongPartyError, AlreadyEnrolledError, PriorSignatureError, PoolExhaustedError,
        MessageRestrictedError, MessageOutsideScopeError, UnknownBribeError, WrongBriberError, NotEnrolledError,
    ]
    codes = {e.code for e in errors}
    assert len(codes) == len(errors)
    assert DarkDaoException.code not in codes


def test_policy_restricts_by_anchor():
    assert policy_restricts(_vote(anchor=11), enrollment_time=10)
    assert not policy_restricts(_vote(anchor=9), enrollment_time=10)
    assert not policy_restricts(_vote(anchor=10), enrollment_time=10)


def test_unanchored_message_is_unrestricted_with_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="app.core.darkdao"):
        assert not policy_restricts(_vote(anchor=None), enrollment_time=10)
    assert "no anchor" in caplog.text


def test_presigned_messages_before_enrollment_stay_signable():
    enrollment = 50
    dao = DarkDao(rng=DeterministicRNG(0))
    dao.tick(enrollment)
    pk = dao.keygen("alice")
    bribe_id = dao.register_bribe("bob", 1.0, Restriction(kinds=frozenset({"vote"})), 1.0)
    dao.take_bribe("alice", pk, bribe_id)

    for anchor in range(100):
        m = _vote(proposal=f"p{anchor}", anchor=anchor)
        if anchor <= enrollment:
            assert dao.verify(pk, m, dao.sign("alice", pk, m))
        else:
            with pytest.raises(MessageRestrictedError):
                dao.sign("alice", pk, m)
