from typing import Optional
from fastapi import Query

from app.config import settings
from app.models.metrics import ClusteringKind, EntropyKind
from app.schemas.scenario import RunConfig


def get_run_config(
    seed: Optional[int] = Query(default=None, description="Seed for generated instances"),
    entropy: EntropyKind = Query(default=EntropyKind.MIN),
    clustering: ClusteringKind = Query(default=ClusteringKind.EPSILON_TOC),
    epsilon: Optional[float] = Query(default=None, ge=0),
) -> RunConfig:
    """Run settings taken from the query string"""
    return RunConfig(
        seed=settings.default_seed if seed is None else seed,
        entropy=entropy,
        clustering=clustering,
        epsilon=epsilon,
    )
