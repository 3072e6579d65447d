from fastapi import APIRouter, Depends

from app.core import reports
from app.core.deps import get_run_config
from app.core.estimation import build_history
from app.models.metrics import ClusteringSpec, EntropySpec
from app.schemas.history import VoteHistoryIn
from app.schemas.scenario import RunConfig, VBERequest

router = APIRouter()


@router.post("/compute")
async def compute_vbe(request: VBERequest):
    """Voting-bloc entropy and the other decentralization metrics of a scenario"""
    s = request.scenario.to_scenario()
    c = ClusteringSpec(kind=request.clustering, epsilon=request.epsilon)
    return reports.vbe_report(s, c, EntropySpec(kind=request.entropy))


@router.post("/estimate")
async def estimate_vbe(history: VoteHistoryIn, config: RunConfig = Depends(get_run_config)):
    """Lower-bound VBE estimate from observed votes"""
    h = build_history(history.votes, history.balances)
    return reports.estimate_report(h, config.entropy_spec())


@router.get("/example/whale")
async def whale_example(whale_share: float = 0.126):
    return reports.whale_report(whale_share)
