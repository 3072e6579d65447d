from fastapi import Request, status
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
from fastapi.encoders import jsonable_encoder
import logging

logger = logging.getLogger(__name__)


class VBELabException(Exception):
    """Base exception for the governance lab"""
    code = "error"

    def __init__(self, message: str, status_code: int = 500, code: str | None = None):
        self.message = message
        self.status_code = status_code
        if code is not None:
            self.code = code
        super().__init__(self.message)


class ValidationException(VBELabException):
    """Malformed or inconsistent input"""
    code = "invalid-input"

    def __init__(self, message: str = "Validation error"):
        super().__init__(message, status.HTTP_422_UNPROCESSABLE_ENTITY)


class NotFoundException(VBELabException):
    """Referenced object does not exist"""
    code = "not-found"

    def __init__(self, message: str = "Resource not found"):
        super().__init__(message, status.HTTP_404_NOT_FOUND)


class TransformationException(VBELabException):
    """Transformation parameters invalid for the scenario"""
    code = "invalid-transformation"

    def __init__(self, message: str = "Invalid transformation"):
        super().__init__(message, status.HTTP_422_UNPROCESSABLE_ENTITY)


class TheoremMismatchException(VBELabException):
    """Theorem id does not match the transformation kind"""
    code = "theorem-mismatch"

    def __init__(self, message: str = "Theorem does not apply to this transformation"):
        super().__init__(message, status.HTTP_422_UNPROCESSABLE_ENTITY)


class TokenTotalMismatchException(VBELabException):
    """Master theorem requires equal token totals"""
    code = "token-total-mismatch"

    def __init__(self, message: str = "Token totals differ"):
        super().__init__(message, status.HTTP_422_UNPROCESSABLE_ENTITY)


class EntropyClusteringMismatchException(VBELabException):
    """neg_sum_sq entropy requested on a non-solo partition"""
    code = "entropy-requires-solo"

    def __init__(self, message: str = "neg_sum_sq entropy is only defined for solo clustering"):
        super().__init__(message, status.HTTP_422_UNPROCESSABLE_ENTITY)


class HistoryParseException(ValidationException):
    """Vote history CSV could not be parsed"""
    code = "history-parse"


class DuplicateVoteException(HistoryParseException):
    """More than one record for a (voter, election) pair"""
    code = "duplicate-vote"


# Ledger

class LedgerException(VBELabException):
    """Transaction rejected by the simulated ledger"""
    code = "ledger-error"

    def __init__(self, message: str = "Ledger error"):
        super().__init__(message, status.HTTP_400_BAD_REQUEST)


class InvalidSignatureError(LedgerException):
    code = "invalid-signature"


class InsufficientBalanceError(LedgerException):
    code = "insufficient-balance"


class UnknownTransactionError(LedgerException):
    code = "unknown-transaction"


# Basic Dark DAO, one class per failed assertion

class DarkDaoException(VBELabException):
    """Dark DAO assertion failed"""
    code = "darkdao-error"

    def __init__(self, message: str = "Dark DAO assertion failed"):
        super().__init__(message, status.HTTP_403_FORBIDDEN)


class UnknownAccountError(DarkDaoException):
    code = "unknown-account"


class WrongPartyError(DarkDaoException):
    code = "wrong-party"


class AlreadyEnrolledError(DarkDaoException):
    code = "already-enrolled"


class PriorSignatureError(DarkDaoException):
    code = "prior-restricted-signature"


class PoolExhaustedError(DarkDaoException):
    code = "pool-exhausted"


class MessageRestrictedError(DarkDaoException):
    code = "message-restricted"


class MessageOutsideScopeError(DarkDaoException):
    code = "message-outside-scope"


class UnknownBribeError(DarkDaoException):
    code = "unknown-bribe"


class NotEnrolledError(DarkDaoException):
    code = "not-enrolled"


class WrongBriberError(DarkDaoException):
    code = "wrong-briber"


# Dark DAO Lite

class ReplayedProofError(DarkDaoException):
    code = "replayed-proof"


class UnverifiableProofError(DarkDaoException):
    code = "unverifiable-proof"


class ReplayedNonceError(DarkDaoException):
    code = "replayed-nonce"


class BadAuthorizationError(DarkDaoException):
    code = "bad-authorization"


class InsufficientDDBalanceError(DarkDaoException):
    code = "insufficient-dd-balance"


class WithdrawalExceedsBalanceError(DarkDaoException):
    code = "withdrawal-exceeds-balance"


class LockupActiveError(DarkDaoException):
    code = "lockup-active"


class AuctionTimingError(DarkDaoException):
    code = "auction-timing"


class NotAuctionWinnerError(DarkDaoException):
    code = "not-auction-winner"


class UnfundedBidError(DarkDaoException):
    code = "unfunded-bid"


class ScriptExpectationError(VBELabException):
    """A simulation step did not end the way the script asserted"""
    code = "script-expectation"

    def __init__(self, message: str = "Script expectation failed"):
        super().__init__(message, status.HTTP_409_CONFLICT)


async def vbe_lab_exception_handler(request: Request, exc: VBELabException):
    """Handle lab exceptions"""
    logger.error(f"VBELab exception [{exc.code}]: {exc.message}")
    return JSONResponse(
        status_code=exc.status_code,
        content={"detail": exc.message, "code": exc.code}
    )


async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """Handle request validation exceptions"""
    logger.error(f"Validation exception: {exc.errors()}")
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={
            "detail": "Validation error",
            "code": ValidationException.code,
            "errors": jsonable_encoder(exc.errors())
        }
    )


async def general_exception_handler(request: Request, exc: Exception):
    """Handle general exceptions"""
    logger.error(f"Unexpected exception: {str(exc)}", exc_info=True)
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={"detail": "Internal server error", "code": "internal"}
    )
