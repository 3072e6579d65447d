import pytest

from app.core.governance import (
    example_whale_scenario,
    outcome_ensured,
    rational_vote,
    tally,
    total_tokens,
    validate_scenario,
)
from app.models.scenario import Outcome, Scenario, Vote


def _scenario(tokens: dict, utilities: dict | None = None, q: float = 0.5) -> Scenario:
    players = tuple(tokens)
    return Scenario(
        players=players,
        tokens=tokens,
        elections=("e1",),
        utilities=utilities or {p: {"e1": 1.0} for p in players},
        q=q,
    )


def test_valid_scenario_has_no_violations():
    s = _scenario({"A": 1.0, "B": 2.0})
    assert validate_scenario(s) == []


def test_missing_utility_reported():
    s = _scenario({"A": 1.0, "B": 2.0}, utilities={"A": {"e1": 1.0}, "B": {}})
    kinds = [v.kind for v in validate_scenario(s)]
    assert kinds == ["missing-utility"]


def test_negative_balance_reported():
    s = _scenario({"A": -1.0, "B": 2.0})
    assert "negative-balance" in [v.kind for v in validate_scenario(s)]


def test_q_out_of_range_reported():
    s = _scenario({"A": 1.0}, q=1.0)
    assert "q-out-of-range" in [v.kind for v in validate_scenario(s)]


@pytest.mark.parametrize("tokens, expected", [
    ({"A": 3.0, "B": 1.0}, 4.0),
    ({"A": 1.0}, 1.0),
    ({"A": 0.5, "B": 0.5, "C": 7.0}, 8.0),
])
def test_total_tokens(tokens, expected):
    assert total_tokens(_scenario(tokens)) == expected


def test_outcome_ensured_strict_threshold():
    s = _scenario({"A": 60.0, "B": 40.0})
    assert outcome_ensured(s, "e1", {"A": Vote.TRUE, "B": Vote.ABSTAIN}, Outcome.TRUE)

    tied = _scenario({"A": 50.0, "B": 50.0})
    assert not outcome_ensured(tied, "e1", {"A": Vote.TRUE, "B": Vote.ABSTAIN}, Outcome.TRUE)


def test_both_outcomes_never_ensured():
    s = _scenario({"A": 30.0, "B": 30.0, "C": 40.0})
    votes = {"A": Vote.TRUE, "B": Vote.FALSE, "C": Vote.TRUE}
    assert outcome_ensured(s, "e1", votes, True)
    assert not outcome_ensured(s, "e1", votes, False)


@pytest.mark.parametrize("u, expected", [
    (5.0, Vote.TRUE),
    (-5.0, Vote.FALSE),
    (0.05, Vote.ABSTAIN),
    (0.1, Vote.ABSTAIN),
])
def test_rational_vote(u, expected):
    assert rational_vote(u, 0.1) is expected


def test_rational_vote_antisymmetric():
    for u in (0.2, 1.0, 7.5):
        assert rational_vote(-u, 0.1) is rational_vote(u, 0.1).negate()


def test_whale_with_12_6_percent_blocks_proposal():
    s, votes = example_whale_scenario(0.126)
    result = tally(s, "proposal", votes)
    assert round(result.no, 2) == 25.07
    assert round(result.yes, 2) == 24.93
    assert result.abstain == pytest.approx(50.0)
    assert result.winner is Outcome.FALSE


def test_whale_with_12_4_percent_lets_proposal_pass():
    s, votes = example_whale_scenario(0.124)
    result = tally(s, "proposal", votes)
    assert result.yes > result.no
    assert result.winner is Outcome.TRUE
