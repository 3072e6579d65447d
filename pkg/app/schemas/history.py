from pydantic import BaseModel, validator
import math

from app.models.scenario import Vote


class VoteRow(BaseModel):
    voter: str
    election: str
    vote: Vote

    @validator('voter', 'election')
    def validate_id(cls, v):
        if len(v.strip()) < 1:
            raise ValueError('Identifiers cannot be empty')
        return v.strip()

    @validator('vote', pre=True)
    def validate_vote(cls, v):
        if isinstance(v, Vote):
            return v
        if isinstance(v, str):
            v = v.strip().lower()
        if v not in {vote.value for vote in Vote}:
            raise ValueError('Vote must be one of true, false, abstain')
        return v

    class Config:
        extra = "forbid"


class BalanceRow(BaseModel):
    voter: str
    tokens: float

    @validator('voter')
    def validate_voter(cls, v):
        if len(v.strip()) < 1:
            raise ValueError('Voter cannot be empty')
        return v.strip()

    @validator('tokens')
    def validate_tokens(cls, v):
        if not math.isfinite(v) or v < 0:
            raise ValueError('Tokens must be a finite non-negative amount')
        return v

    class Config:
        extra = "forbid"


class VoteHistoryIn(BaseModel):
    """JSON form of a vote history for the HTTP API"""
    votes: list[VoteRow]
    balances: dict[str, float]

    class Config:
        extra = "forbid"
