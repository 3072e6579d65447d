"""Simulated signatures and key wrapping on top of python-jose.

Signatures are HS256 JWS tokens keyed by the account secret; the scheme
keeps a pk -> sk registry so verification needs only the public address.
Secret keys are wrapped for holders with direct A256GCM JWE.
"""

import hashlib
import json
import logging
from typing import Any

from jose import jwe, jws
from jose.exceptions import JOSEError

from app.utils.rng import DeterministicRNG

logger = logging.getLogger(__name__)


def canonical_json(obj: Any) -> str:
    """Stable JSON text used for hashing and signing"""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def _default(obj):
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def derive_address(sk: str) -> str:
    return "0x" + hashlib.sha256(f"pk:{sk}".encode()).hexdigest()[:40]


class SignatureScheme:
    """keygen / sign / verify contract used by the ledger and both Dark DAO variants"""

    algorithm = "HS256"

    def __init__(self):
        self._secrets: dict[str, str] = {}

    def keygen(self, rng: DeterministicRNG) -> tuple[str, str]:
        sk = rng.token_hex(32)
        return sk, self.public_key(sk)

    def public_key(self, sk: str) -> str:
        pk = derive_address(sk)
        self._secrets.setdefault(pk, sk)
        return pk

    def sign(self, sk: str, message: Any) -> str:
        return jws.sign(canonical_json(message).encode(), sk, algorithm=self.algorithm)

    def verify(self, pk: str, message: Any, signature: str) -> bool:
        sk = self._secrets.get(pk)
        if sk is None or not isinstance(signature, str):
            return False
        try:
            payload = jws.verify(signature, sk, algorithms=[self.algorithm])
        except JOSEError:
            return False
        return payload == canonical_json(message).encode()


def new_wrapping_key(rng: DeterministicRNG) -> bytes:
    return rng.token_bytes(32)


def wrap_key(sk: str, key: bytes) -> str:
    token = jwe.encrypt(sk.encode(), key, algorithm="dir", encryption="A256GCM")
    return token.decode() if isinstance(token, bytes) else token


def unwrap_key(token: str, key: bytes) -> str | None:
    """Recover a wrapped secret key; None if the token was not produced under `key`"""
    try:
        return jwe.decrypt(token, key).decode()
    except (JOSEError, ValueError, AttributeError) as e:
        logger.warning(f"Key unwrap failed: {e}")
        return None
