from pydantic import BaseModel, Field, validator
from typing import Any, Literal, Optional

from app.models.darkdao import SelectionPolicy


class ScriptStep(BaseModel):
    op: str
    args: dict[str, Any] = {}
    bind: Optional[str] = Field(default=None, alias="as")
    expect: Optional[str] = None

    @validator('op')
    def validate_op(cls, v):
        if len(v.strip()) < 1:
            raise ValueError('Step op cannot be empty')
        return v.strip()

    class Config:
        extra = "forbid"
        populate_by_name = True


class DarkDaoScript(BaseModel):
    """Ordered protocol calls for one simulation run"""
    protocol: Literal["basic", "lite"] = "basic"
    seed: Optional[int] = None
    lockup: int = 0
    policy: SelectionPolicy = SelectionPolicy.FIFO
    fee: float = 0.0
    balances: dict[str, dict[str, float]] = {}
    steps: list[ScriptStep]

    @validator('lockup')
    def validate_lockup(cls, v):
        if v < 0:
            raise ValueError('Lockup cannot be negative')
        return v

    @validator('fee')
    def validate_fee(cls, v):
        if v < 0:
            raise ValueError('Fee cannot be negative')
        return v

    class Config:
        extra = "forbid"


class MessageIn(BaseModel):
    kind: str
    proposal: Optional[str] = None
    body: str = ""
    anchor: Optional[int] = None

    class Config:
        extra = "forbid"


class RestrictionIn(BaseModel):
    kinds: list[str]
    proposals: Optional[list[str]] = None

    @validator('kinds')
    def validate_kinds(cls, v):
        if not v:
            raise ValueError('Restriction needs at least one message kind')
        return v

    class Config:
        extra = "forbid"
