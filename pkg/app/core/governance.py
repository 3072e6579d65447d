"""Token-weighted binary elections: validation, thresholds, tallies."""

import logging
import math
from typing import Mapping

from app.config import settings
from app.models.scenario import Outcome, Scenario, TallyResult, Violation, Vote

logger = logging.getLogger(__name__)


def validate_scenario(s: Scenario) -> list[Violation]:
    """Return every invariant violation; empty means the scenario is usable"""
    violations: list[Violation] = []

    if len(set(s.players)) != len(s.players):
        violations.append(Violation("duplicate-player", "player ids must be unique"))
    if len(set(s.elections)) != len(s.elections):
        violations.append(Violation("duplicate-election", "election ids must be unique"))

    players = set(s.players)
    for player in s.players:
        if player not in s.tokens:
            violations.append(Violation("missing-balance", f"no balance for player {player}"))
    for player, balance in s.tokens.items():
        if player not in players:
            violations.append(Violation("unknown-balance", f"balance for unknown player {player}"))
        elif not math.isfinite(balance) or balance < 0:
            violations.append(Violation("negative-balance", f"balance of {player} is {balance}"))

    if s.tokens and math.fsum(v for v in s.tokens.values() if math.isfinite(v)) <= 0:
        violations.append(Violation("zero-supply", "total token supply must be positive"))

    for player in s.players:
        row = s.utilities.get(player)
        if row is None:
            violations.append(Violation("missing-utility", f"no utility row for player {player}"))
            continue
        for election in s.elections:
            if election not in row:
                violations.append(
                    Violation("missing-utility", f"no utility for ({player}, {election})")
                )
            elif not math.isfinite(row[election]):
                violations.append(
                    Violation("non-finite-utility", f"utility for ({player}, {election}) is not finite")
                )
        for election in row:
            if election not in s.elections:
                violations.append(
                    Violation("unknown-election", f"utility for unknown election ({player}, {election})")
                )
    for player in s.utilities:
        if player not in players:
            violations.append(Violation("unknown-utility", f"utility row for unknown player {player}"))

    if s.epsilon < 0:
        violations.append(Violation("negative-epsilon", "epsilon must be >= 0"))
    if not 0 < s.q < 1:
        violations.append(Violation("q-out-of-range", "q must lie in (0, 1)"))

    return violations


def total_tokens(s: Scenario) -> float:
    return math.fsum(s.tokens.values())


def tokens_of(s: Scenario, players) -> float:
    """Token holdings of a set of players"""
    return math.fsum(s.tokens[p] for p in players)


def outcome_ensured(
    s: Scenario,
    election: str,
    votes: Mapping[str, Vote],
    desired,
) -> bool:
    """True iff the votes for `desired` strictly exceed q of all tokens.

    Ensuring ignores the opposing tally; abstentions still count in the total.
    """
    desired_vote = Vote(Outcome.of(desired).value)
    backing = math.fsum(s.tokens[p] for p, v in votes.items() if Vote(v) is desired_vote)
    threshold = s.q * total_tokens(s)
    return backing > threshold + settings.tolerance


def rational_vote(u: float, epsilon: float) -> Vote:
    """Vote of a rational player with utility u for outcome true; |u| <= epsilon abstains"""
    if u > epsilon:
        return Vote.TRUE
    if u < -epsilon:
        return Vote.FALSE
    return Vote.ABSTAIN


def rational_votes(s: Scenario, election: str) -> dict[str, Vote]:
    return {p: rational_vote(s.util(p, election), s.epsilon) for p in s.players}


def tally(s: Scenario, election: str, votes: Mapping[str, Vote] | None = None) -> TallyResult:
    """Token-weighted tally with the simple-majority winner among cast votes"""
    if votes is None:
        votes = rational_votes(s, election)

    yes = math.fsum(s.tokens[p] for p, v in votes.items() if Vote(v) is Vote.TRUE)
    no = math.fsum(s.tokens[p] for p, v in votes.items() if Vote(v) is Vote.FALSE)
    cast = {p for p in votes if Vote(votes[p]) is not Vote.ABSTAIN}
    abstain = total_tokens(s) - math.fsum(s.tokens[p] for p in cast)

    winner = None
    if yes > no + settings.tolerance:
        winner = Outcome.TRUE
    elif no > yes + settings.tolerance:
        winner = Outcome.FALSE

    logger.debug(f"Tally {election}: yes={yes} no={no} abstain={abstain} winner={winner}")
    return TallyResult(election=election, yes=yes, no=no, abstain=abstain, winner=winner, votes=dict(votes))


def example_whale_scenario(whale_share: float, total: float = 100.0) -> tuple[Scenario, dict[str, Vote]]:
    """Half the supply abstains, a whale votes false, the rest splits 2:1 for true"""
    abstaining = total / 2
    whale = total * whale_share
    rest = abstaining - whale
    balances = {
        "inactive": abstaining,
        "whale": whale,
        "supporters": rest * 2 / 3,
        "opponents": rest / 3,
    }
    utilities = {
        "inactive": {"proposal": 0.0},
        "whale": {"proposal": -1.0},
        "supporters": {"proposal": 1.0},
        "opponents": {"proposal": -1.0},
    }
    scenario = Scenario(
        players=tuple(balances),
        tokens=balances,
        elections=("proposal",),
        utilities=utilities,
        epsilon=0.0,
        q=0.5,
    )
    return scenario, rational_votes(scenario, "proposal")
