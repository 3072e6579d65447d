"""JSON-ready report documents shared by the CLI and the HTTP API."""

import dataclasses
import enum
import math
from typing import Any, Mapping

from app.core import bribery
from app.core.estimation import estimate_vbe
from app.core.governance import example_whale_scenario, tally, validate_scenario
from app.core.metrics import decentralization_report, partition_to_dict
from app.core.transforms import apply, check_theorem
from app.models.bribery import PivotalBribeGame
from app.models.history import VoteHistory
from app.models.metrics import ClusteringSpec, EntropySpec
from app.models.scenario import Outcome, Scenario
from app.utils.exceptions import ValidationException


def jsonable(obj: Any) -> Any:
    """Recursively convert dataclasses, enums, sets and mappings into JSON types"""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(x) for x in obj)
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def require_valid(s: Scenario) -> Scenario:
    violations = validate_scenario(s)
    if violations:
        raise ValidationException("; ".join(f"{v.kind}: {v.message}" for v in violations))
    return s


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "players": [{"id": p, "tokens": s.tokens[p]} for p in s.players],
        "elections": list(s.elections),
        "utilities": {p: dict(row) for p, row in s.utilities.items()},
        "epsilon": s.epsilon,
        "q": s.q,
    }


def vbe_report(s: Scenario, c: ClusteringSpec, f: EntropySpec) -> dict:
    require_valid(s)
    return jsonable(decentralization_report(s, c, f))


def estimate_report(history: VoteHistory, f: EntropySpec) -> dict:
    bits, partition = estimate_vbe(history, f)
    return {
        "bits": bits,
        "partition": partition_to_dict(partition),
        "voters": len(history.voters),
        "elections": list(history.elections),
    }


def transform_report(s: Scenario, t) -> dict:
    require_valid(s)
    applied = apply(s, t)
    return {"scenario": scenario_to_dict(applied.scenario), "cost": applied.cost}


def theorem_report(s: Scenario, t, theorem) -> tuple[dict, bool]:
    """Verdict document and whether the claim failed under its precondition"""
    verdict = check_theorem(s, t, theorem)
    return jsonable(verdict), verdict.failed


def scale_report(s: Scenario) -> dict:
    require_valid(s)
    return jsonable(bribery.bribery_scale(s))


def flip_cost_report(utility: float, desired, epsilon: float) -> dict:
    return {
        "utility": utility,
        "desired": Outcome.of(desired).value,
        "epsilon": epsilon,
        "cost": bribery.flip_cost(utility, desired, epsilon),
    }


def pivotal_report(n: int, utility: float, epsilon: float, acceptance=None) -> dict:
    game = PivotalBribeGame(n=n, U=utility, epsilon=epsilon)
    profile = [True] * n if acceptance is None else list(acceptance)
    outcome = bribery.pivotal_bribe_evaluate(game, profile)
    report = {"game": jsonable(game), "acceptance": profile, "outcome": jsonable(outcome)}
    if n <= 15:
        report["dominance"] = bribery.pivotal_dominance(game)
    return report


def qv_report(s: Scenario, desired=Outcome.TRUE) -> dict:
    require_valid(s)
    positive = {p: v for p, v in s.tokens.items() if v > 0}
    return {
        "benefits": {p: bribery.qv_benefit(p, positive) for p in sorted(positive)},
        "theorem": jsonable(bribery.check_qv_theorem(s)),
        "corollary": jsonable(bribery.check_qv_corollary(s, desired)),
    }


def sybil_amplification_report(whale_tokens: float, accounts: int) -> dict:
    return {
        "whale_tokens": whale_tokens,
        "accounts": accounts,
        "factor": bribery.quadratic_sybil_amplification(whale_tokens, accounts),
    }


def whale_report(whale_share: float) -> dict:
    s, votes = example_whale_scenario(whale_share)
    result = tally(s, "proposal", votes)
    return {
        "whale_share": whale_share,
        "tally": jsonable(result),
        "passed": result.winner is Outcome.TRUE,
    }
