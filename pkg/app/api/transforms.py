from fastapi import APIRouter

from app.core import reports
from app.core.generators import sweep_theorem
from app.schemas.transform import TheoremCheckRequest, TransformRequest

router = APIRouter()


@router.post("/apply")
async def apply_transformation(request: TransformRequest):
    """Apply one transformation and return the new scenario with its cost"""
    return reports.transform_report(request.scenario.to_scenario(), request.transform.to_transformation())


@router.post("/check")
async def check_theorem(request: TheoremCheckRequest):
    """Evaluate a theorem's precondition and claim on one instance"""
    report, failed = reports.theorem_report(
        request.scenario.to_scenario(), request.transform.to_transformation(), request.theorem
    )
    # A counterexample is still a well-formed answer
    return {**report, "counterexample": failed}


@router.get("/sweep/{theorem}")
async def sweep(theorem: str, count: int = 100, seed: int = 0):
    """Check a theorem over generated instances"""
    return sweep_theorem(theorem, min(count, 2000), seed)
