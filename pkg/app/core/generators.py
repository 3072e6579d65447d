"""Seeded random scenarios and transformations for property sweeps.

Balances are small integers and utilities come from a coarse grid so
that blocs collide often and float sums stay exact.
"""

import logging

from app.core.bribery import bribery_scale
from app.core.estimation import build_history, estimate_vbe
from app.core.governance import rational_votes
from app.core.metrics import check_master_theorem, cluster, vbe
from app.core.transforms import check_theorem
from app.models.metrics import ClusteringSpec, EntropyKind, EntropySpec
from app.models.scenario import Outcome, Scenario, Vote
from app.models.transforms import (
    Apathy,
    BribeFlip,
    Delegation,
    Herding,
    Slates,
    Sybil,
    TheoremId,
)
from app.schemas.history import VoteRow
from app.utils.exceptions import ValidationException
from app.utils.rng import DeterministicRNG

logger = logging.getLogger(__name__)

UTILITY_GRID = (-3.0, -2.0, -1.0, -0.5, 0.0, 0.0, 0.5, 1.0, 2.0, 3.0)
EPSILON_GRID = (0.0, 0.0, 0.5, 1.0)


def _compose(rng: DeterministicRNG, total: int, parts: int) -> list[int]:
    """Random split of an integer total into `parts` non-negative integers"""
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def random_scenario(
    rng: DeterministicRNG,
    max_players: int = 8,
    max_elections: int = 4,
    total: int | None = None,
) -> Scenario:
    n = rng.randint(1, max_players)
    m = rng.randint(1, max_elections)
    players = tuple(f"P{i + 1:02d}" for i in range(n))
    elections = tuple(f"e{j + 1}" for j in range(m))
    if total is None:
        balances = [rng.randint(0, 20) for _ in players]
        if sum(balances) == 0:
            balances[rng.randbelow(n)] = rng.randint(1, 20)
    else:
        balances = _compose(rng, total, n)
    return Scenario(
        players=players,
        tokens={p: float(b) for p, b in zip(players, balances)},
        elections=elections,
        utilities={p: {e: rng.choice(UTILITY_GRID) for e in elections} for p in players},
        epsilon=rng.choice(EPSILON_GRID),
        q=0.5,
    )


def random_pair(rng: DeterministicRNG, max_players: int = 12, max_elections: int = 6) -> tuple[Scenario, Scenario]:
    """Independent scenarios sharing one token total"""
    total = rng.randint(1, 200)
    return (
        random_scenario(rng, max_players, max_elections, total),
        random_scenario(rng, max_players, max_elections, total),
    )


def _subset(rng: DeterministicRNG, items, min_size: int = 1) -> frozenset:
    items = sorted(items)
    if not items:
        return frozenset()
    k = rng.randint(min(min_size, len(items)), len(items))
    return frozenset(rng.sample(items, k))


def random_sybil(rng: DeterministicRNG, s: Scenario) -> Sybil:
    player = rng.choice(sorted(s.players))
    shares = _compose(rng, int(s.tokens[player]), rng.randint(1, 4))
    return Sybil(player=player, shares=tuple(float(x) for x in shares))


def random_apathy(rng: DeterministicRNG, s: Scenario) -> Apathy:
    return Apathy(players=_subset(rng, s.players))


def random_delegation(rng: DeterministicRNG, s: Scenario, whole_apathy_bloc: bool = False) -> Delegation:
    partition = cluster(s, ClusteringSpec())
    apathetic = sorted(partition.apathy_bloc or ())
    if whole_apathy_bloc:
        delegators = apathetic
    else:
        delegators = sorted(_subset(rng, apathetic)) if apathetic else []
    candidates = sorted(set(s.players) - set(delegators))
    if not delegators or not candidates:
        return Delegation(assignment={})
    if whole_apathy_bloc:
        delegate = rng.choice(candidates)
        return Delegation(assignment={d: delegate for d in delegators})
    return Delegation(assignment={d: rng.choice(candidates) for d in delegators})


def random_herding(rng: DeterministicRNG, s: Scenario) -> Herding:
    return Herding(players=_subset(rng, s.players), direction=rng.choice([Outcome.TRUE, Outcome.FALSE]))


def random_slates(rng: DeterministicRNG, s: Scenario) -> Slates:
    elections = list(s.elections)
    rng.shuffle(elections)
    k = rng.randint(1, len(elections))
    slates: dict[str, list] = {f"slate{i + 1}": [] for i in range(k)}
    for i, e in enumerate(elections):
        slates[f"slate{i + 1}" if i < k else rng.choice(sorted(slates))].append(e)
    return Slates(slates={sid: tuple(es) for sid, es in slates.items()})


def random_bribe_flip(rng: DeterministicRNG, s: Scenario) -> BribeFlip:
    partition = cluster(s, ClusteringSpec())
    if rng.random() < 0.5:
        # Whole blocs satisfy the alignment precondition by construction
        blocs = list(partition.blocs)
        chosen = rng.sample(blocs, rng.randint(1, len(blocs)))
        players = frozenset().union(*chosen)
    else:
        players = _subset(rng, s.players)
    return BribeFlip(players=players, desired=rng.choice([Outcome.TRUE, Outcome.FALSE]))


GENERATORS = {
    TheoremId.SYBIL: random_sybil,
    TheoremId.APATHY: random_apathy,
    TheoremId.DELEGATION: random_delegation,
    TheoremId.DELEGATION_COROLLARY: lambda rng, s: random_delegation(rng, s, whole_apathy_bloc=True),
    TheoremId.HERDING: random_herding,
    TheoremId.SLATES: random_slates,
    TheoremId.BRIBERY: random_bribe_flip,
}


def random_transformation(rng: DeterministicRNG, s: Scenario, theorem):
    theorem = TheoremId.parse(theorem)
    if theorem not in GENERATORS:
        raise ValidationException(f"no transformation generator for theorem {theorem.value}")
    return GENERATORS[theorem](rng, s)


def sweep_theorem(theorem, count: int, seed: int = 0) -> dict:
    """Check a theorem on `count` generated instances whose precondition holds"""
    theorem = TheoremId.parse(theorem)
    if count < 1:
        raise ValidationException("count must be >= 1")
    rng = DeterministicRNG(seed)

    if theorem is TheoremId.MASTER:
        failures = []
        for i in range(count):
            before, after = random_pair(rng)
            if not check_master_theorem(before, after).holds:
                failures.append(i)
        return _sweep_report(theorem, count, count, failures, seed)

    held, attempts, failures, inconsistent = 0, 0, [], 0
    while held < count and attempts < 50 * count:
        attempts += 1
        s = random_scenario(rng)
        verdict = check_theorem(s, random_transformation(rng, s, theorem), theorem)
        if not verdict.master_consistent:
            inconsistent += 1
        if not verdict.precondition_held:
            continue
        held += 1
        if verdict.failed:
            failures.append(attempts)
    report = _sweep_report(theorem, attempts, held, failures, seed)
    report["master_inconsistent"] = inconsistent
    report["passed"] = report["passed"] and inconsistent == 0
    return report


def _sweep_report(theorem: TheoremId, attempts: int, held: int, failures: list, seed: int) -> dict:
    if failures:
        logger.error(f"Theorem {theorem.value}: {len(failures)} counterexamples in {held} instances")
    return {
        "theorem": theorem.value,
        "seed": seed,
        "instances": attempts,
        "precondition_held": held,
        "failures": len(failures),
        "counterexample_instances": failures[:10],
        "pass_rate": (held - len(failures)) / held if held else 0.0,
        "passed": not failures and held > 0,
    }


def sweep_lemma(count: int, seed: int = 0) -> int:
    """Count scenarios where solo clustering has less entropy than epsilon-TOC"""
    rng = DeterministicRNG(seed)
    violations = 0
    for _ in range(count):
        s = random_scenario(rng)
        for kind in (EntropyKind.MIN, EntropyKind.SHANNON):
            f = EntropySpec(kind)
            if vbe(s, ClusteringSpec.solo(), f) < vbe(s, ClusteringSpec(), f) - 1e-9:
                violations += 1
    return violations


def sweep_bribery_scale(count: int, seed: int = 0) -> int:
    """Count pairs where a larger bribery requirement does not match a larger VBE"""
    rng = DeterministicRNG(seed)
    mismatches = 0
    for _ in range(count):
        first, second = random_pair(rng)
        a, b = bribery_scale(first), bribery_scale(second)
        vbe_gap = vbe(first) - vbe(second)
        more_entropy = vbe_gap > 1e-9
        if (a.tokens_needed_raw > b.tokens_needed_raw + 1e-9) != more_entropy:
            mismatches += 1
        if (a.players_needed > b.players_needed + 1e-9) != more_entropy:
            mismatches += 1
    return mismatches


def synthetic_history(rng: DeterministicRNG, s: Scenario, drop_abstentions: bool = True):
    """Vote history of rational players; abstentions are sometimes left out"""
    rows = []
    for e in s.elections:
        for p, vote in rational_votes(s, e).items():
            if vote is Vote.ABSTAIN and drop_abstentions and rng.random() < 0.5:
                continue
            rows.append(VoteRow(voter=p, election=e, vote=vote))
    rng.shuffle(rows)
    return build_history(rows, dict(s.tokens))


def sweep_estimation(count: int, seed: int = 0) -> int:
    """Count synthetic scenarios whose estimated partition or VBE differs from the truth"""
    rng = DeterministicRNG(seed)
    mismatches = 0
    for _ in range(count):
        s = random_scenario(rng)
        bits, partition = estimate_vbe(synthetic_history(rng, s))
        truth = cluster(s, ClusteringSpec())
        if partition.as_lists() != truth.as_lists() or bits != vbe(s):
            mismatches += 1
    return mismatches
