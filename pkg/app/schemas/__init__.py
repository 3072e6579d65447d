from .scenario import PlayerIn, RunConfig, ScenarioIn, VBERequest
from .history import BalanceRow, VoteHistoryIn, VoteRow
from .transform import TheoremCheckRequest, TransformIn, TransformRequest, transform_adapter
from .bribery import FlipCostRequest, PivotalRequest, QVRequest, ScaleRequest, SybilAmplificationRequest
from .darkdao import DarkDaoScript, MessageIn, RestrictionIn, ScriptStep

__all__ = [
    "PlayerIn", "RunConfig", "ScenarioIn", "VBERequest",
    "BalanceRow", "VoteHistoryIn", "VoteRow",
    "TheoremCheckRequest", "TransformIn", "TransformRequest", "transform_adapter",
    "FlipCostRequest", "PivotalRequest", "QVRequest", "ScaleRequest", "SybilAmplificationRequest",
    "DarkDaoScript", "MessageIn", "RestrictionIn", "ScriptStep",
]
