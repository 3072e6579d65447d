from fastapi import APIRouter

from app.core import reports
from app.schemas.bribery import (
    FlipCostRequest,
    PivotalRequest,
    QVRequest,
    ScaleRequest,
    SybilAmplificationRequest,
)

router = APIRouter()


@router.post("/scale")
async def bribery_scale(request: ScaleRequest):
    return reports.scale_report(request.scenario.to_scenario())


@router.post("/flip-cost")
async def flip_cost(request: FlipCostRequest):
    """Minimum payment that moves a voter to the desired outcome"""
    return reports.flip_cost_report(request.utility, request.desired, request.epsilon)


@router.post("/pivotal")
async def pivotal(request: PivotalRequest):
    """Pivotal-bribe outcome, and the dominance check for small electorates"""
    return reports.pivotal_report(request.n, request.utility, request.epsilon, request.acceptance)


@router.post("/qv")
async def quadratic_voting(request: QVRequest):
    return reports.qv_report(request.scenario.to_scenario(), request.desired)


@router.post("/sybil-amplification")
async def sybil_amplification(request: SybilAmplificationRequest):
    return reports.sybil_amplification_report(request.whale_tokens, request.accounts)
