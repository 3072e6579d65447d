from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Model defaults, overridable per scenario / per run
    default_epsilon: float = 0.0
    default_q: float = 0.5

    # Single comparison tolerance for all real-valued checks
    tolerance: float = 1e-9

    # Logging - VBE_LOG takes precedence over LOG_LEVEL
    log_level: str = Field(
        default="WARNING",
        validation_alias=AliasChoices("VBE_LOG", "LOG_LEVEL"),
    )

    # Determinism
    default_seed: int = 0

    # Ledger simulation
    ledger_fee: float = 0.0
    native_asset: str = "ETH"
    dao_asset: str = "DAO"
    dd_asset: str = "DD"

    # Dark DAO Lite
    lite_lockup_blocks: int = 0

    # HTTP surface
    debug: bool = False
    cors_origins: list = ["*"]

    class Config:
        env_file = ".env"
        case_sensitive = False


settings = Settings()
