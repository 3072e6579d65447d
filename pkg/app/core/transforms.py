"""System transformations as scenario rewrites, plus per-theorem verdicts.

Every transformation preserves the total token supply. Verdicts are
computed for min-entropy VBE under epsilon-threshold ordinal clustering.
"""

import logging
import math

from app.config import settings
from app.core.bribery import flip_cost
from app.core.governance import tokens_of, total_tokens, validate_scenario
from app.core.metrics import (
    bloc_tokens,
    check_master_theorem,
    cluster,
    largest_bloc,
    sign_vector,
    vbe,
)
from app.models.metrics import ClusteringSpec, EntropyKind, EntropySpec
from app.models.scenario import Outcome, Scenario
from app.models.transforms import (
    Applied,
    Apathy,
    BribeFlip,
    Delegation,
    Herding,
    Slates,
    Sybil,
    TheoremId,
    TheoremVerdict,
    Transformation,
)
from app.utils.exceptions import TheoremMismatchException, TransformationException

logger = logging.getLogger(__name__)

MIN_ENTROPY = EntropySpec(EntropyKind.MIN)
EPSILON_TOC = ClusteringSpec()

THEOREM_KINDS = {
    TheoremId.SYBIL: Sybil,
    TheoremId.APATHY: Apathy,
    TheoremId.DELEGATION: Delegation,
    TheoremId.DELEGATION_COROLLARY: Delegation,
    TheoremId.HERDING: Herding,
    TheoremId.SLATES: Slates,
    TheoremId.BRIBERY: BribeFlip,
}


def apply(s: Scenario, t: Transformation) -> Applied:
    if isinstance(t, Sybil):
        return Applied(_apply_sybil(s, t))
    if isinstance(t, Apathy):
        return Applied(_apply_apathy(s, t))
    if isinstance(t, Delegation):
        return Applied(_apply_delegation(s, t))
    if isinstance(t, Herding):
        scenario, _ = _rewrite_toward(s, t.players, s.elections, t.direction, _eps(s, t.epsilon))
        return Applied(scenario)
    if isinstance(t, Slates):
        return Applied(_apply_slates(s, t))
    if isinstance(t, BribeFlip):
        elections = s.elections if t.elections is None else tuple(t.elections)
        scenario, cost = _rewrite_toward(s, t.players, elections, t.desired, _eps(s, t.epsilon))
        return Applied(scenario, cost)
    raise TransformationException(f"unsupported transformation {type(t).__name__}")


def _eps(s: Scenario, epsilon: float | None) -> float:
    return s.epsilon if epsilon is None else epsilon


def _require_players(s: Scenario, players) -> None:
    unknown = sorted(set(players) - set(s.players))
    if unknown:
        raise TransformationException(f"unknown players: {', '.join(unknown)}")


def _apply_sybil(s: Scenario, t: Sybil) -> Scenario:
    _require_players(s, [t.player])
    if not t.shares or any(x < 0 for x in t.shares):
        raise TransformationException("sybil shares must be a nonempty list of non-negative amounts")
    source = s.tokens[t.player]
    if abs(math.fsum(t.shares) - source) > settings.tolerance * max(1.0, source):
        raise TransformationException(
            f"sybil shares sum to {math.fsum(t.shares)}, expected {source}"
        )
    new_ids = t.new_ids or tuple(f"{t.player}#{i + 1}" for i in range(len(t.shares)))
    if len(new_ids) != len(t.shares):
        raise TransformationException("one new account id is needed per share")
    clash = set(new_ids) & set(s.players)
    if clash or len(set(new_ids)) != len(new_ids):
        raise TransformationException("new account ids must be fresh and distinct")

    tokens = dict(s.tokens)
    tokens[t.player] = 0.0
    utilities = {p: dict(row) for p, row in s.utilities.items()}
    for account, share in zip(new_ids, t.shares):
        tokens[account] = share
        utilities[account] = dict(s.utilities[t.player])
    return s.replace(players=s.players + tuple(new_ids), tokens=tokens, utilities=utilities)


def _apply_apathy(s: Scenario, t: Apathy) -> Scenario:
    _require_players(s, t.players)
    utilities = {p: dict(row) for p, row in s.utilities.items()}
    for player in t.players:
        utilities[player] = {e: 0.0 for e in s.elections}
    return s.replace(utilities=utilities)


def _apply_delegation(s: Scenario, t: Delegation) -> Scenario:
    _require_players(s, set(t.assignment) | set(t.assignment.values()))
    if t.delegators & t.delegates:
        raise TransformationException("delegates must be disjoint from delegators")
    tokens = dict(s.tokens)
    for delegator, delegate in sorted(t.assignment.items()):
        tokens[delegate] += s.tokens[delegator]
        tokens[delegator] = 0.0
    return s.replace(tokens=tokens)


def _aligned_value(u: float, desired: Outcome, epsilon: float) -> float:
    """Utility of outcome true after a player is pushed to strictly prefer `desired`"""
    directed = u if desired is Outcome.TRUE else -u
    if directed > epsilon:
        return u
    # |util(e, opposite)| + epsilon; a zero utility needs a strictly positive margin
    magnitude = abs(u) + epsilon if abs(u) > 0 else epsilon + max(epsilon, settings.tolerance)
    return magnitude if desired is Outcome.TRUE else -magnitude


def _rewrite_toward(s: Scenario, players, elections, desired, epsilon: float) -> tuple[Scenario, float]:
    _require_players(s, players)
    unknown = sorted(set(elections) - set(s.elections))
    if unknown:
        raise TransformationException(f"unknown elections: {', '.join(unknown)}")
    desired = Outcome.of(desired)

    utilities = {p: dict(row) for p, row in s.utilities.items()}
    costs = []
    for player in sorted(players):
        for election in elections:
            u = s.util(player, election)
            costs.append(flip_cost(u, desired, epsilon))
            utilities[player][election] = _aligned_value(u, desired, epsilon)
    return s.replace(utilities=utilities), math.fsum(costs)


def _apply_slates(s: Scenario, t: Slates) -> Scenario:
    members = [e for slate in t.slates.values() for e in slate]
    if sorted(members) != sorted(s.elections) or len(set(members)) != len(members):
        raise TransformationException("slates must partition the elections exactly")
    if any(len(slate) == 0 for slate in t.slates.values()):
        raise TransformationException("slates must be nonempty")

    slate_ids = tuple(t.slates)
    utilities = {
        p: {sid: math.fsum(s.util(p, e) for e in t.slates[sid]) for sid in slate_ids}
        for p in s.players
    }
    return s.replace(elections=slate_ids, utilities=utilities)


def check_theorem(s: Scenario, t: Transformation, theorem) -> TheoremVerdict:
    """Evaluate the theorem's precondition, apply t, and compare VBE before and after"""
    theorem = TheoremId.parse(theorem)
    expected = THEOREM_KINDS.get(theorem)
    if theorem is not TheoremId.MASTER and (expected is None or not isinstance(t, expected)):
        raise TheoremMismatchException(
            f"theorem {theorem.value} does not apply to {type(t).__name__}"
        )
    violations = validate_scenario(s)
    if violations:
        raise TransformationException(f"invalid scenario: {violations[0].message}")

    applied = apply(s, t)
    after = applied.scenario
    before_partition = cluster(s, EPSILON_TOC)
    after_partition = cluster(after, EPSILON_TOC)
    _, t_before = largest_bloc(before_partition, s.tokens)
    _, t_after = largest_bloc(after_partition, after.tokens)
    vbe_before = vbe(s, EPSILON_TOC, MIN_ENTROPY)
    vbe_after = vbe(after, EPSILON_TOC, MIN_ENTROPY)
    tol = settings.tolerance

    total_before, total_after = total_tokens(s), total_tokens(after)
    witness: dict = {"total_before": total_before, "total_after": total_after}
    strict = None
    # the master biconditional only compares scenarios with equal token totals
    master_holds = (
        check_master_theorem(s, after).holds
        if abs(total_before - total_after) <= tol * max(1.0, total_before)
        else None
    )

    if theorem is TheoremId.MASTER:
        precondition = master_holds is not None
        claim = master_holds
    elif theorem is TheoremId.SYBIL:
        precondition = True
        claim = abs(vbe_before - vbe_after) <= tol
    elif theorem is TheoremId.APATHY:
        precondition = _apathy_precondition(s, after, t, witness)
        claim = vbe_before >= vbe_after - tol
    elif theorem is TheoremId.DELEGATION:
        precondition = _delegation_precondition(s, after, t, witness)
        claim = vbe_after >= vbe_before - tol
    elif theorem is TheoremId.DELEGATION_COROLLARY:
        precondition = _delegation_corollary_precondition(s, after, t, witness)
        claim = vbe_after <= vbe_before + tol
    elif theorem is TheoremId.HERDING:
        precondition = _alignment_precondition(s, after, t.players, t_before, witness)
        claim = vbe_before >= vbe_after - tol
    elif theorem is TheoremId.SLATES:
        precondition = _slates_precondition(s, t, witness)
        claim = vbe_before >= vbe_after - tol
    else:
        precondition = _alignment_precondition(s, after, t.players, t_before, witness)
        claim = vbe_before >= vbe_after - tol
        strict = vbe_before > vbe_after + tol
        witness["cost"] = applied.cost
        witness["strictly_dominant"] = witness["target_bloc_tokens"] > t_before + tol

    verdict = TheoremVerdict(
        theorem=theorem,
        precondition_held=precondition,
        claim_held=claim if precondition else None,
        vbe_before=vbe_before,
        vbe_after=vbe_after,
        largest_before=t_before,
        largest_after=t_after,
        strict_held=strict,
        master_consistent=master_holds is not False,
        witness=witness,
    )
    if verdict.failed:
        logger.error(f"Theorem {theorem.value} claim failed under its precondition: {witness}")
    return verdict


def _apathy_bloc_tokens(s: Scenario) -> float:
    partition = cluster(s, EPSILON_TOC)
    return bloc_tokens(partition.apathy_bloc, s.tokens) if partition.apathy_bloc else 0.0


def _apathy_precondition(s: Scenario, after: Scenario, t: Apathy, witness: dict) -> bool:
    # Apathy bloc measured after the transformation, [P] before it
    apathy_after = _apathy_bloc_tokens(after)
    before = cluster(s, EPSILON_TOC)
    bloc_sizes = {p: bloc_tokens(before.bloc_of(p), s.tokens) for p in sorted(t.players)}
    witness["apathy_bloc_after"] = apathy_after
    witness["target_bloc_tokens_before"] = bloc_sizes
    return all(apathy_after >= size - settings.tolerance for size in bloc_sizes.values())


def _delegation_precondition(s: Scenario, after: Scenario, t: Delegation, witness: dict) -> bool:
    epsilon = s.epsilon
    apathetic = all(not any(sign_vector(s.row(p), epsilon)) for p in t.delegators)
    apathy_before = _apathy_bloc_tokens(s)
    after_partition = cluster(after, EPSILON_TOC)
    delegate_blocs = {
        d: bloc_tokens(after_partition.bloc_of(d), after.tokens) for d in sorted(t.delegates)
    }
    witness["delegators_apathetic"] = apathetic
    witness["apathy_bloc_before"] = apathy_before
    witness["delegate_bloc_tokens_after"] = delegate_blocs
    return apathetic and all(apathy_before >= size - settings.tolerance for size in delegate_blocs.values())


def _delegation_corollary_precondition(s: Scenario, after: Scenario, t: Delegation, witness: dict) -> bool:
    before = cluster(s, EPSILON_TOC)
    delegated = tokens_of(s, t.delegators)
    after_partition = cluster(after, EPSILON_TOC)
    delegate_blocs = {
        d: bloc_tokens(after_partition.bloc_of(d), after.tokens) for d in sorted(t.delegates)
    }
    whole_whale = before.apathy_bloc is not None and t.delegators == before.apathy_bloc
    witness["delegated_tokens"] = delegated
    witness["delegate_bloc_tokens_after"] = delegate_blocs
    witness["delegators_are_whole_apathy_bloc"] = whole_whale
    dominant = any(size >= delegated - settings.tolerance for size in delegate_blocs.values())
    return whole_whale and dominant


def _alignment_precondition(s: Scenario, after: Scenario, players, t_before: float, witness: dict) -> bool:
    """Targets end in one bloc that is either built from whole prior blocs or outweighs the prior largest"""
    before = cluster(s, EPSILON_TOC)
    after_partition = cluster(after, EPSILON_TOC)
    targets = frozenset(players)
    target_blocs = {after_partition.bloc_of(p) for p in targets}
    unified = len(target_blocs) == 1
    target_bloc_tokens = bloc_tokens(next(iter(target_blocs)), after.tokens) if unified else 0.0

    touched = {before.bloc_of(p) for p in targets}
    whole_blocs = all(bloc <= targets for bloc in touched)
    dominant = target_bloc_tokens >= t_before - settings.tolerance

    witness["targets_unified"] = unified
    witness["targets_are_whole_blocs"] = whole_blocs
    witness["target_bloc_tokens"] = target_bloc_tokens
    return bool(targets) and unified and (whole_blocs or dominant)


def _slates_precondition(s: Scenario, t: Slates, witness: dict) -> bool:
    """Bloc-mates must agree on every slate sum, dead zone included"""
    before = cluster(s, EPSILON_TOC)
    disagreeing = []
    for bloc in before.blocs:
        signatures = {
            sign_vector(
                [math.fsum(s.util(p, e) for e in t.slates[sid]) for sid in t.slates],
                s.epsilon,
            )
            for p in bloc
        }
        if len(signatures) > 1:
            disagreeing.append(sorted(bloc))
    witness["disagreeing_blocs"] = disagreeing
    return not disagreeing
