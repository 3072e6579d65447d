"""Bribery economics: flip costs, bribery scale, quadratic voting, pivotal bribes."""

import itertools
import logging
import math
from typing import Iterable, Mapping, Sequence

from app.config import settings
from app.core.metrics import cluster, largest_bloc
from app.models.bribery import (
    BriberyScale,
    EnsureBudget,
    PivotalBribeGame,
    PivotalOutcome,
    QVCorollaryVerdict,
    QVTheoremVerdict,
    WeightingMode,
)
from app.models.scenario import Outcome, Scenario
from app.utils.exceptions import ValidationException

logger = logging.getLogger(__name__)

MAX_BRUTE_FORCE_PLAYERS = 20


def flip_cost(u_true: float, desired, epsilon: float) -> float:
    """Payment that makes a player strictly prefer `desired`; 0 when it already does"""
    if epsilon < 0:
        raise ValidationException("epsilon must be >= 0")
    # util(opposite) is -u_true when desired is true
    opposite = -u_true if Outcome.of(desired) is Outcome.TRUE else u_true
    return max(2 * opposite + epsilon, 0.0)


def bribery_scale(s: Scenario, c=None) -> BriberyScale:
    _, t_b = largest_bloc(cluster(s, c), s.tokens)
    supply = math.fsum(s.tokens.values())
    threshold = s.q * supply
    raw = threshold - t_b
    players = threshold / t_b
    return BriberyScale(
        largest_bloc_tokens=t_b,
        tokens_needed_raw=raw,
        tokens_needed=max(raw, 0.0),
        players_needed=players,
        players_needed_ceil=math.ceil(players - settings.tolerance),
    )


def voting_weight(balance: float, mode) -> float:
    mode = WeightingMode(mode)
    return math.sqrt(balance) if mode is WeightingMode.QUADRATIC else balance


def qv_benefit(p: str, tokens: Mapping[str, float]) -> bool:
    balance = tokens.get(p)
    if balance is None:
        raise ValidationException(f"no balance for player {p}")
    if balance <= 0:
        raise ValidationException(f"qv_benefit needs a positive balance, {p} holds {balance}")
    linear_share = balance / math.fsum(tokens.values())
    quadratic_share = math.sqrt(balance) / math.fsum(math.sqrt(v) for v in tokens.values())
    return linear_share < quadratic_share - settings.tolerance


def qv_beneficiaries(tokens: Mapping[str, float]) -> frozenset:
    return frozenset(p for p, v in tokens.items() if v > 0 and qv_benefit(p, tokens))


def weight_fraction(tokens: Mapping[str, float], target: Iterable[str], mode) -> float:
    weights = {p: voting_weight(v, mode) for p, v in tokens.items()}
    total = math.fsum(weights.values())
    if total <= 0:
        raise ValidationException("total voting weight must be positive")
    return math.fsum(weights[p] for p in target) / total


def target_cost(s: Scenario, target: Iterable[str], desired) -> float:
    return math.fsum(
        flip_cost(s.util(p, e), desired, s.epsilon) for p in target for e in s.elections
    )


def bribe_set_fraction(s: Scenario, target, desired, mode) -> tuple[float, float]:
    """Cost of flipping `target` on every election, and the vote fraction it controls"""
    target = frozenset(target)
    unknown = sorted(target - set(s.players))
    if unknown:
        raise ValidationException(f"unknown players: {', '.join(unknown)}")
    if not target:
        return 0.0, 0.0
    return target_cost(s, target, desired), weight_fraction(s.tokens, target, mode)


def _subsets(players: Sequence[str]):
    for size in range(1, len(players) + 1):
        yield from itertools.combinations(players, size)


def _check_brute_force_size(players: Sequence[str]) -> None:
    if len(players) > MAX_BRUTE_FORCE_PLAYERS:
        raise ValidationException(
            f"brute force is limited to {MAX_BRUTE_FORCE_PLAYERS} players, got {len(players)}"
        )


def check_qv_theorem(s: Scenario) -> QVTheoremVerdict:
    """Quadratic weighting controls a larger fraction for the same target set exactly when
    the target contains qv-beneficiaries; checked on every nonempty subset.
    """
    players = sorted(p for p in s.players if s.tokens[p] > 0)
    _check_brute_force_size(players)
    positive = {p: s.tokens[p] for p in players}
    beneficiaries = qv_beneficiaries(positive)

    counterexamples = []
    checked = 0
    for subset in _subsets(players):
        checked += 1
        f_lin = weight_fraction(positive, subset, WeightingMode.LINEAR)
        f_quad = weight_fraction(positive, subset, WeightingMode.QUADRATIC)
        gains = f_quad > f_lin + settings.tolerance
        all_beneficiaries = all(p in beneficiaries for p in subset)
        any_beneficiary = any(p in beneficiaries for p in subset)
        if (all_beneficiaries and not gains) or (gains and not any_beneficiary):
            counterexamples.append(
                {"subset": list(subset), "linear": f_lin, "quadratic": f_quad}
            )

    if counterexamples:
        logger.error(f"Quadratic voting biconditional failed on {len(counterexamples)} subsets")
    return QVTheoremVerdict(
        subsets_checked=checked,
        holds=not counterexamples,
        counterexamples=tuple(counterexamples),
    )


def budget_to_ensure(
    s: Scenario,
    desired=Outcome.TRUE,
    mode=WeightingMode.LINEAR,
    candidates: Iterable[str] | None = None,
) -> EnsureBudget | None:
    """Cheapest target set whose voting weight strictly exceeds q; None if no set does"""
    players = sorted(s.players if candidates is None else set(candidates))
    _check_brute_force_size(players)

    best = None
    for subset in _subsets(players):
        fraction = weight_fraction(s.tokens, subset, mode)
        if fraction <= s.q + settings.tolerance:
            continue
        cost = target_cost(s, subset, desired)
        if best is None or cost < best.cost - settings.tolerance or (
            abs(cost - best.cost) <= settings.tolerance and len(subset) < len(best.targets)
        ):
            best = EnsureBudget(cost=cost, targets=frozenset(subset), fraction=fraction)
    return best


def check_qv_corollary(s: Scenario, desired=Outcome.TRUE) -> QVCorollaryVerdict:
    """Compare the budgets needed to ensure `desired` with and without quadratic weighting,
    bribing only qv-beneficiaries.
    """
    positive = {p: v for p, v in s.tokens.items() if v > 0}
    beneficiaries = qv_beneficiaries(positive)
    held = math.fsum(s.tokens[p] for p in beneficiaries)
    threshold = s.q * math.fsum(s.tokens.values())
    precondition = held > threshold + settings.tolerance
    witness = {"beneficiary_tokens": held, "threshold": threshold}

    if not precondition:
        return QVCorollaryVerdict(
            beneficiaries=beneficiaries,
            precondition_held=False,
            linear=None,
            quadratic=None,
            weak_held=None,
            strict_held=None,
            witness=witness,
        )

    linear = budget_to_ensure(s, desired, WeightingMode.LINEAR, beneficiaries)
    quadratic = budget_to_ensure(s, desired, WeightingMode.QUADRATIC, beneficiaries)
    weak = quadratic.cost <= linear.cost + settings.tolerance
    strict = quadratic.cost < linear.cost - settings.tolerance
    if not weak:
        logger.error(f"Quadratic budget {quadratic.cost} exceeds linear budget {linear.cost}")
    return QVCorollaryVerdict(
        beneficiaries=beneficiaries,
        precondition_held=True,
        linear=linear,
        quadratic=quadratic,
        weak_held=weak,
        strict_held=strict,
        witness=witness,
    )


def quadratic_sybil_amplification(whale_tokens: float, n_accounts: int) -> float:
    """Factor by which splitting across n accounts raises quadratic voting weight"""
    if n_accounts < 1:
        raise ValidationException("n_accounts must be >= 1")
    if whale_tokens <= 0:
        raise ValidationException("whale_tokens must be positive")
    split = math.sqrt(whale_tokens / n_accounts) * n_accounts
    return split / math.sqrt(whale_tokens)


def _validate_game(g: PivotalBribeGame) -> None:
    if g.n < 1 or g.n % 2 == 0:
        raise ValidationException("n must be a positive odd number")
    if g.U <= 0:
        raise ValidationException("U must be positive")
    if g.epsilon <= 0:
        raise ValidationException("epsilon must be positive")


def pivotal_bribe_evaluate(g: PivotalBribeGame, acceptance: Sequence[bool]) -> PivotalOutcome:
    """Accepting voters vote no; a no-voter is pivotal when no wins by exactly one vote"""
    _validate_game(g)
    if len(acceptance) != g.n:
        raise ValidationException(f"expected {g.n} acceptance flags, got {len(acceptance)}")

    no_votes = sum(1 for a in acceptance if a)
    majority = (g.n + 1) // 2
    outcome_yes = no_votes < majority
    pivotal = tuple(bool(a) and no_votes == majority for a in acceptance)

    payments = tuple(
        (2 * g.U + g.epsilon if is_pivotal else g.epsilon) if accepted else 0.0
        for accepted, is_pivotal in zip(acceptance, pivotal)
    )
    base = g.U if outcome_yes else -g.U
    return PivotalOutcome(
        outcome_yes=outcome_yes,
        payments=payments,
        payoffs=tuple(base + pay for pay in payments),
        pivotal=pivotal,
        briber_cost=math.fsum(payments),
    )


def pivotal_dominance(g: PivotalBribeGame) -> dict:
    """Check for every voter and every profile of the others that accepting gains at least epsilon"""
    _validate_game(g)
    if g.n > 15:
        raise ValidationException("pivotal dominance enumeration is limited to n <= 15")

    profiles = 0
    min_gain = math.inf
    for others in itertools.product((False, True), repeat=g.n - 1):
        profiles += 1
        for voter in range(g.n):
            rejected = list(others[:voter]) + [False] + list(others[voter:])
            accepted = list(rejected)
            accepted[voter] = True
            gain = (
                pivotal_bribe_evaluate(g, accepted).payoffs[voter]
                - pivotal_bribe_evaluate(g, rejected).payoffs[voter]
            )
            min_gain = min(min_gain, gain)

    dominant = min_gain >= g.epsilon - settings.tolerance
    if not dominant:
        logger.error(f"Pivotal bribe acceptance not dominant: min gain {min_gain}")
    return {"profiles": profiles, "min_gain": min_gain, "dominant": dominant}
