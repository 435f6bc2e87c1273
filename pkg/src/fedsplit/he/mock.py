"""Plaintext-internal stand-in backend with exact arithmetic.

Satisfies the same operation contracts as the lattice backend with zero
decode error; the federated runtime charges it simulated time through
``params.simulated_cost`` so the efficiency metric stays reproducible and
free of wall-clock crypto noise.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DimensionError, EncodingOverflowError
from ..seeds import as_rng
from .base import Ciphertext, HeBackend, KeyPair, chunk_bounds

__all__ = ["MockBackend", "MockPayload"]


class MockPayload:
    """Held plaintext plus a nonce so repeated encryptions differ as payloads."""

    __slots__ = ("values", "nonce")

    def __init__(self, values: np.ndarray, nonce: int):
        self.values = values
        self.nonce = nonce


class MockBackend(HeBackend):
    name = "mock"

    def keygen(self, seed) -> KeyPair:
        rng = as_rng(seed)
        key_id = int(rng.integers(0, 2**63, dtype=np.int64))
        return KeyPair(public_key=key_id, secret_key=key_id,
                       params=self.params, backend=self.name)

    def encrypt(self, pk: KeyPair, x: np.ndarray, seed) -> list[Ciphertext]:
        if pk.backend != self.name or pk.params != self.params:
            raise DimensionError("public key params/backend mismatch")
        x = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise ValueError("plaintext contains non-finite values")
        worst = float(np.max(np.abs(x))) if x.size else 0.0
        if worst > self.params.max_encodable:
            raise EncodingOverflowError(
                f"value magnitude {worst:g} exceeds fixed-point headroom "
                f"{self.params.max_encodable:g}"
            )
        rng = as_rng(seed)
        out = []
        for start, stop in chunk_bounds(x.size, self.params.slot_count):
            nonce = int(rng.integers(0, 2**63, dtype=np.int64))
            out.append(Ciphertext(
                payload=MockPayload(values=x[start:stop].copy(), nonce=nonce),
                slots_used=stop - start, add_count=0,
                params=self.params, backend=self.name,
            ))
        return out

    def hom_add(self, a: Ciphertext, b: Ciphertext) -> Ciphertext:
        add_count = self._check_addable(a, b)
        payload = MockPayload(
            values=a.payload.values + b.payload.values,
            nonce=a.payload.nonce ^ b.payload.nonce,
        )
        return Ciphertext(payload=payload, slots_used=a.slots_used,
                          add_count=add_count, params=self.params, backend=self.name)

    def decrypt(self, sk: KeyPair, cts: Sequence[Ciphertext], original_len: int) -> np.ndarray:
        if sk.backend != self.name or sk.params != self.params:
            raise DimensionError("secret key params/backend mismatch")
        self._check_chunks(cts, original_len)
        out = np.empty(original_len, dtype=np.float64)
        pos = 0
        for ct in cts:
            if pos >= original_len:
                break
            take = min(ct.slots_used, original_len - pos)
            out[pos: pos + take] = ct.payload.values[:take]
            pos += take
        return out
