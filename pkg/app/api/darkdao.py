from typing import Optional
from fastapi import APIRouter, Query

from app.core import reports
from app.core.lite import enumeration_attack
from app.core.simulation import run_script
from app.models.darkdao import SelectionPolicy
from app.schemas.darkdao import DarkDaoScript

router = APIRouter()


@router.post("/run")
async def run(script: DarkDaoScript, seed: Optional[int] = None):
    """Execute a Dark DAO script and return its report with both event logs"""
    report, public, confidential = run_script(script, seed)
    return {
        "report": reports.jsonable(report),
        "public": reports.jsonable(public),
        "confidential": reports.jsonable(confidential),
    }


@router.get("/enumerate")
async def enumerate_deposits(
    policy: SelectionPolicy = SelectionPolicy.LIFO,
    budget: int = Query(ge=0),
    victims: int = Query(ge=0, le=200),
    lockup: int = Query(default=0, ge=0),
    seed: int = 0,
):
    """Deposit-linking attack against withdrawal selection"""
    return enumeration_attack(policy, budget, victims, lockup, seed=seed).to_dict()
