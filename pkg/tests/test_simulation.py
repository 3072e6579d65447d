import pytest

from app.core.simulation import run_script
from app.schemas.darkdao import DarkDaoScript
from app.utils.exceptions import ValidationException

VOTE = {"kind": "vote", "proposal": "p1", "body": "yes", "anchor": 5}
OTHER = {"kind": "post", "body": "hello", "anchor": 5}


def basic_script() -> dict:
    return {
        "protocol": "basic",
        "steps": [
            {"op": "keygen", "args": {"party": "alice"}, "as": "pk"},
            {"op": "register_bribe", "as": "bribe", "args": {
                "briber": "bob", "amount": 5, "deposit": 5,
                "restriction": {"kinds": ["vote"], "proposals": ["p1"]},
            }},
            {"op": "tick", "args": {"steps": 2}},
            {"op": "take_bribe", "args": {"party": "alice", "pk": "$pk", "bribe": "$bribe"}, "as": "paid"},
            {"op": "check", "args": {"value": "$paid", "equals": 5.0}},
            {"op": "sign", "args": {"party": "alice", "pk": "$pk", "message": VOTE}, "expect": "message-restricted"},
            {"op": "sign", "args": {"party": "alice", "pk": "$pk", "message": OTHER}, "as": "own"},
            {"op": "verify", "args": {"pk": "$pk", "message": OTHER, "signature": "$own"}, "as": "own_ok"},
            {"op": "check", "args": {"value": "$own_ok", "equals": True}},
            {"op": "sign_via_encumbered_key", "as": "sig", "args": {
                "briber": "bob", "pk": "$pk", "message": VOTE, "bribe": "$bribe",
            }},
            {"op": "verify", "args": {"pk": "$pk", "message": VOTE, "signature": "$sig"}, "as": "ok"},
            {"op": "check", "args": {"value": "$ok", "equals": True}},
            {"op": "sign_via_encumbered_key", "expect": "wrong-briber", "args": {
                "briber": "eve", "pk": "$pk", "message": VOTE, "bribe": "$bribe",
            }},
            {"op": "sign_via_encumbered_key", "expect": "message-outside-scope", "args": {
                "briber": "bob", "pk": "$pk", "message": OTHER, "bribe": "$bribe",
            }},
            {"op": "take_bribe", "args": {"party": "alice", "pk": "$pk", "bribe": "$bribe"},
             "expect": "already-enrolled"},
            {"op": "keygen", "args": {"party": "carol"}, "as": "carol_pk"},
            {"op": "take_bribe", "args": {"party": "carol", "pk": "$carol_pk", "bribe": "$bribe"},
             "expect": "pool-exhausted"},
            {"op": "sign", "args": {"party": "mallory", "pk": "$pk", "message": OTHER}, "expect": "wrong-party"},
        ],
    }


def lite_script() -> dict:
    return {
        "protocol": "lite",
        "balances": {"alice": {"DAO": 20}, "bob": {"DAO": 20}},
        "steps": [
            {"op": "deposit", "args": {"wallet": "alice", "amount": 6}, "as": "d1"},
            {"op": "mint", "args": {"wallet": "alice", "authorization": "$d1.authorization"}},
            {"op": "mint", "args": {"wallet": "alice", "authorization": "$d1.authorization"},
             "expect": "replayed-nonce"},
            {"op": "deposit", "args": {"wallet": "bob", "amount": 4}, "as": "d2"},
            {"op": "mint", "args": {"wallet": "bob", "authorization": "$d2.authorization"}},
            {"op": "burn", "args": {"wallet": "alice", "amount": 6}, "as": "burn_a"},
            {"op": "burn", "args": {"wallet": "bob", "amount": 4}, "as": "burn_b"},
            {"op": "redeem", "args": {"burn": "$burn_a.tx", "recipient": "alice"}, "as": "wa"},
            {"op": "redeem", "args": {"burn": "$burn_b.tx", "recipient": "bob"}, "as": "wb"},
            {"op": "submit", "args": {"request": "$wa.request"}, "as": "ua"},
            {"op": "submit", "args": {"request": "$wb.request"}, "as": "ub"},
            {"op": "produce_block", "args": {}},
            {"op": "confirm", "args": {"tx": "$wa.parts.0.tx"}},
            {"op": "reissue", "args": {"request": "$wb.request"}, "as": "wb2"},
            {"op": "check", "args": {"value": "$wb2.parts.0.nonce", "equals": 0}},
            {"op": "submit", "args": {"request": "$wb.request"}},
            {"op": "produce_block", "args": {}},
            {"op": "reissue", "args": {"request": "$wb.request"}, "as": "wb3"},
            {"op": "check", "args": {"value": "$wb3.completed", "equals": True}},
            {"op": "balance", "args": {"wallet": "bob"}, "as": "bob_dao"},
            {"op": "check", "args": {"value": "$bob_dao", "equals": 20.0}},
            {"op": "auction_create", "args": {"proposal": "p9", "end": 100, "expiry": 120}, "as": "auction"},
            {"op": "auction_settle", "args": {"auction": "$auction"}, "expect": "auction-timing"},
        ],
    }


def test_basic_script_exercises_every_operation():
    report, public, confidential = run_script(DarkDaoScript(**basic_script()), seed=7)
    assert report["passed"], report["failure"]
    assert report["seed"] == 7
    assert any(e["type"] == "payment" for e in public)
    assert any(e["type"] == "briber-sign" for e in confidential)


def test_lite_script_race_and_reissue():
    report, public, _ = run_script(DarkDaoScript(**lite_script()), seed=1)
    assert report["passed"], report["failure"]
    assert any(e.get("event") == "burn" for e in public)


def test_mismatched_expectation_stops_the_script():
    script = basic_script()
    script["steps"][5]["expect"] = "wrong-party"
    report, _, _ = run_script(DarkDaoScript(**script))
    assert not report["passed"]
    assert report["failure"]["step"] == 5
    assert report["failure"]["code"] == "message-restricted"
    assert len(report["steps"]) == 6


def test_failed_check_fails_the_script():
    script = basic_script()
    script["steps"][4]["args"]["equals"] = 4.0
    report, _, _ = run_script(DarkDaoScript(**script))
    assert report["failure"]["code"] == "script-expectation"


def test_unknown_op_is_an_input_error():
    script = {"protocol": "basic", "steps": [{"op": "deposit", "args": {"wallet": "a", "amount": 1}}]}
    with pytest.raises(ValidationException):
        run_script(DarkDaoScript(**script))


def test_unbound_variable_is_an_input_error():
    script = {"protocol": "basic", "steps": [{"op": "take_bribe", "args": {"party": "a", "pk": "$nope", "bribe": "x"}}]}
    with pytest.raises(ValidationException):
        run_script(DarkDaoScript(**script))


def test_same_seed_same_logs():
    first = run_script(DarkDaoScript(**lite_script()), seed=3)
    second = run_script(DarkDaoScript(**lite_script()), seed=3)
    assert first == second


def test_lite_script_auction_escrows_bids():
    script = {
        "protocol": "lite",
        "balances": {"carol": {"ETH": 10}, "dave": {"ETH": 10}, "erin": {"ETH": 1}},
        "steps": [
            {"op": "auction_create", "args": {"proposal": "p9", "end": 5, "expiry": 10}, "as": "auction"},
            {"op": "auction_bid", "args": {"auction": "$auction", "bidder": "carol", "amount": 6}},
            {"op": "auction_bid", "args": {"auction": "$auction", "bidder": "dave", "amount": 3}},
            {"op": "auction_bid", "args": {"auction": "$auction", "bidder": "erin", "amount": 5},
             "expect": "unfunded-bid"},
            {"op": "advance", "args": {"blocks": 1}},
            {"op": "auction_settle", "args": {"auction": "$auction"}, "as": "winner"},
            {"op": "check", "args": {"value": "$winner", "equals": "carol"}},
            {"op": "produce_block", "args": {}},
            {"op": "balance", "args": {"wallet": "dave", "asset": "ETH"}, "as": "dave_eth"},
            {"op": "check", "args": {"value": "$dave_eth", "equals": 10.0}},
            {"op": "balance", "args": {"wallet": "carol", "asset": "ETH"}, "as": "carol_eth"},
            {"op": "check", "args": {"value": "$carol_eth", "equals": 4.0}},
        ],
    }
    report, _, _ = run_script(DarkDaoScript(**script), seed=4)
    assert report["passed"], report["failure"]
