"""Voting-bloc clustering, entropy functions and decentralization baselines.

All entropies are in bits. Shares are computed with math.fsum so bloc
totals do not depend on member order.
"""

import itertools
import logging
import math
from typing import Mapping, Sequence

from app.config import settings
from app.core.governance import total_tokens
from app.models.metrics import (
    ClusteringKind,
    ClusteringSpec,
    EntropyKind,
    EntropySpec,
    MasterTheoremVerdict,
    Partition,
)
from app.models.scenario import Scenario
from app.utils.exceptions import (
    EntropyClusteringMismatchException,
    TokenTotalMismatchException,
    ValidationException,
)

logger = logging.getLogger(__name__)


def sign_vector(u: Sequence[float], epsilon: float) -> tuple:
    """Per-election preferred outcome: +1, -1, or 0 inside the dead zone |u| <= epsilon"""
    return tuple(0 if abs(x) <= epsilon else (1 if x > 0 else -1) for x in u)


def pairwise_aligned(u_i: Sequence[float], u_j: Sequence[float], epsilon: float) -> bool:
    """Literal pairwise alignment: per election, same sign or both within epsilon.

    Not transitive; cluster() uses sign-vector equality instead.
    """
    if len(u_i) != len(u_j):
        raise ValidationException("utility rows must have equal length")
    for a, b in zip(u_i, u_j):
        same_sign = (a > 0) == (b > 0) and (a < 0) == (b < 0)
        both_apathetic = abs(a) <= epsilon and abs(b) <= epsilon
        if not (same_sign or both_apathetic):
            return False
    return True


def _effective_epsilon(s: Scenario, spec: ClusteringSpec) -> float:
    return s.epsilon if spec.epsilon is None else spec.epsilon


def cluster(s: Scenario, spec: ClusteringSpec | None = None) -> Partition:
    spec = spec or ClusteringSpec()
    rows = tuple((p, s.row(p)) for p in sorted(s.players))

    if spec.kind is ClusteringKind.SOLO:
        return Partition(
            blocs=tuple(frozenset([p]) for p in s.players),
            apathy_bloc=None,
            solo=True,
            utilities=rows,
        )

    epsilon = _effective_epsilon(s, spec)
    if epsilon < 0:
        raise ValidationException("epsilon must be >= 0")

    groups: dict[tuple, set] = {}
    for player, row in rows:
        groups.setdefault(sign_vector(row, epsilon), set()).add(player)

    apathetic = tuple(0 for _ in s.elections)
    apathy = groups.get(apathetic)
    return Partition(
        blocs=tuple(frozenset(g) for g in groups.values()),
        apathy_bloc=frozenset(apathy) if apathy else None,
        utilities=rows,
    )


def bloc_tokens(bloc, tokens: Mapping[str, float]) -> float:
    return math.fsum(tokens[p] for p in bloc)


def largest_bloc(partition: Partition, tokens: Mapping[str, float]) -> tuple[frozenset, float]:
    """Bloc with maximal holdings; ties go to the bloc with the smallest member id"""
    if not partition.blocs:
        raise ValidationException("partition has no blocs")
    best, best_tokens = None, -math.inf
    for bloc in partition.blocs:
        amount = bloc_tokens(bloc, tokens)
        if best is not None and math.isclose(amount, best_tokens, rel_tol=0.0, abs_tol=settings.tolerance):
            if min(bloc) < min(best):
                best, best_tokens = bloc, amount
        elif amount > best_tokens:
            best, best_tokens = bloc, amount
    return best, best_tokens


def _shares(partition: Partition, tokens: Mapping[str, float]) -> list[float]:
    total = math.fsum(tokens[p] for p in partition.members())
    if total <= 0:
        raise ValidationException("partition holds no tokens")
    return [bloc_tokens(b, tokens) / total for b in partition.blocs]


def entropy(partition: Partition, tokens: Mapping[str, float], spec: EntropySpec | None = None) -> float:
    spec = spec or EntropySpec()

    if spec.kind is EntropyKind.NEG_SUM_SQ:
        if not partition.solo:
            raise EntropyClusteringMismatchException()
        return _neg_sum_sq(partition)

    shares = _shares(partition, tokens)
    if spec.kind is EntropyKind.MIN:
        return _clean(-math.log2(max(shares)))
    if spec.kind is EntropyKind.SHANNON:
        return _clean(-math.fsum(x * math.log2(x) for x in shares if x > 0))
    if spec.kind is EntropyKind.MAX:
        return _clean(math.log2(sum(1 for x in shares if x > 0)))
    raise ValidationException(f"unknown entropy kind {spec.kind}")


def _clean(bits: float) -> float:
    # -log2(1.0) is -0.0
    return 0.0 if bits == 0 else bits


def _neg_sum_sq(partition: Partition) -> float:
    """Negative sum of squared Euclidean distances between all pairs of utility rows"""
    rows = [row for _, row in (partition.utilities or ())]
    total = math.fsum(
        math.fsum((a - b) ** 2 for a, b in zip(r1, r2))
        for r1, r2 in itertools.combinations(rows, 2)
    )
    return _clean(-total)


def vbe(s: Scenario, c: ClusteringSpec | None = None, f: EntropySpec | None = None) -> float:
    """Voting-bloc entropy of a scenario"""
    return entropy(cluster(s, c), s.tokens, f)


def check_master_theorem(
    before: Scenario,
    after: Scenario,
    c: ClusteringSpec | None = None,
    f: EntropySpec | None = None,
) -> MasterTheoremVerdict:
    """Largest bloc grows (weakly) iff min-entropy VBE falls (weakly)"""
    if abs(total_tokens(before) - total_tokens(after)) > settings.tolerance * max(1.0, total_tokens(before)):
        raise TokenTotalMismatchException(
            f"token totals differ: {total_tokens(before)} vs {total_tokens(after)}"
        )
    f = f or EntropySpec(EntropyKind.MIN)
    c = c or ClusteringSpec()

    partition_before = cluster(before, c)
    partition_after = cluster(after, c)
    _, t_before = largest_bloc(partition_before, before.tokens)
    _, t_after = largest_bloc(partition_after, after.tokens)
    vbe_before = entropy(partition_before, before.tokens, f)
    vbe_after = entropy(partition_after, after.tokens, f)

    grew = t_after >= t_before - settings.tolerance
    fell = vbe_before >= vbe_after - settings.tolerance
    holds = grew == fell
    if not holds:
        logger.error(
            f"Master theorem biconditional failed: t(B)={t_before} t'(B')={t_after} "
            f"vbe={vbe_before}->{vbe_after}"
        )
    return MasterTheoremVerdict(
        largest_before=t_before,
        largest_after=t_after,
        vbe_before=vbe_before,
        vbe_after=vbe_after,
        holds=holds,
    )


def gini(tokens: Mapping[str, float]) -> float:
    """Gini coefficient of balances: 0 is perfect equality"""
    values = sorted(tokens.values())
    n = len(values)
    if n == 0:
        raise ValidationException("gini needs at least one balance")
    total = math.fsum(values)
    if n == 1 or total == 0:
        return 0.0
    cumulative = math.fsum((2 * (i + 1) - n - 1) * v for i, v in enumerate(values))
    return max(0.0, cumulative / (n * total))


def nakamoto(tokens: Mapping[str, float], q: float = 0.5) -> int:
    """Fewest largest holders whose combined share strictly exceeds q"""
    if not tokens:
        raise ValidationException("nakamoto needs at least one balance")
    total = math.fsum(tokens.values())
    held = 0.0
    for count, value in enumerate(sorted(tokens.values(), reverse=True), start=1):
        held += value
        if held / total > q + settings.tolerance:
            return count
    return len(tokens)


def shannon_over_accounts(tokens: Mapping[str, float]) -> float:
    """Shannon entropy of raw account balances, ignoring bloc structure"""
    total = math.fsum(tokens.values())
    shares = [v / total for v in tokens.values() if v > 0]
    return _clean(-math.fsum(x * math.log2(x) for x in shares))


def decentralization_report(
    s: Scenario,
    c: ClusteringSpec | None = None,
    f: EntropySpec | None = None,
) -> dict:
    c = c or ClusteringSpec()
    f = f or EntropySpec()
    partition = cluster(s, c)
    bloc, amount = largest_bloc(partition, s.tokens)
    return {
        "bits": entropy(partition, s.tokens, f),
        "partition": partition_to_dict(partition),
        "largest_bloc": {"id": min(bloc), "members": sorted(bloc), "tokens": amount},
        "baselines": {
            "gini": gini(s.tokens),
            "nakamoto": nakamoto(s.tokens, s.q),
            "shannon_over_accounts": shannon_over_accounts(s.tokens),
        },
    }


def partition_to_dict(partition: Partition) -> dict:
    return {
        "blocs": partition.as_lists(),
        "apathy_bloc": sorted(partition.apathy_bloc) if partition.apathy_bloc else None,
    }
