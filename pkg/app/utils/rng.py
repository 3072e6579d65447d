"""Seeded randomness for reproducible simulations and sweeps."""

import hashlib
import random as _random


class DeterministicRNG:
    """Seeded PRNG wrapper; every simulation owns one instance."""

    def __init__(self, seed: int):
        self._seed = seed
        self._rng = _random.Random(seed)

    @property
    def seed(self) -> int:
        return self._seed

    def randbelow(self, n: int) -> int:
        return self._rng.randrange(n)

    def randint(self, a: int, b: int) -> int:
        return self._rng.randint(a, b)

    def uniform(self, a: float, b: float) -> float:
        return self._rng.uniform(a, b)

    def random(self) -> float:
        return self._rng.random()

    def choice(self, seq):
        return self._rng.choice(seq)

    def sample(self, seq, k: int):
        return self._rng.sample(list(seq), k)

    def shuffle(self, seq: list) -> None:
        self._rng.shuffle(seq)

    def token_bytes(self, n: int = 32) -> bytes:
        return self._rng.getrandbits(8 * n).to_bytes(n, "big")

    def token_hex(self, n: int = 32) -> str:
        return self.token_bytes(n).hex()

    def fork(self, label: str) -> "DeterministicRNG":
        """Independent child stream, stable for a given (seed, label)"""
        digest = hashlib.sha256(f"{self._seed}:{label}".encode()).digest()
        return DeterministicRNG(int.from_bytes(digest[:8], "big"))
