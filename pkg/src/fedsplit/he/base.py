"""Shared ciphertext/key containers and the backend contract.

Both backends (the lattice scheme in ``ckks.py`` and the cost-modeled mock
in ``mock.py``) satisfy the same operation contracts: vectors are chunked
into at most ``slot_count`` values per ciphertext, homomorphic addition is
slot-aligned, and decryption truncates to the caller's original length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DimensionError
from .params import HeParams

__all__ = ["Ciphertext", "KeyPair", "HeBackend", "chunk_bounds"]


@dataclass
class Ciphertext:
    """One encrypted chunk of a vector.

    ``add_count`` counts the homomorphic additions folded into this
    ciphertext; backends reject additions past ``params.max_additions``.
    """

    payload: object
    slots_used: int
    add_count: int
    params: HeParams
    backend: str


@dataclass
class KeyPair:
    public_key: object
    secret_key: object
    params: HeParams
    backend: str


def chunk_bounds(length: int, slot_count: int) -> list[tuple[int, int]]:
    """(start, stop) pairs covering [0, length) in slot_count-sized chunks."""
    return [(s, min(s + slot_count, length)) for s in range(0, length, slot_count)]


class HeBackend:
    """Operation contract both backends implement.

    decrypt with a mismatched secret key yields garbage without detection;
    only structural mismatches (params, chunk layout) raise.
    """

    name = "abstract"

    def __init__(self, params: HeParams):
        self.params = params

    def keygen(self, seed) -> KeyPair:
        raise NotImplementedError

    def encrypt(self, pk: KeyPair, x: np.ndarray, seed) -> list[Ciphertext]:
        raise NotImplementedError

    def hom_add(self, a: Ciphertext, b: Ciphertext) -> Ciphertext:
        raise NotImplementedError

    def decrypt(self, sk: KeyPair, cts: Sequence[Ciphertext], original_len: int) -> np.ndarray:
        raise NotImplementedError

    # -- shared validation helpers --------------------------------------------

    def _check_addable(self, a: Ciphertext, b: Ciphertext) -> int:
        if a.backend != self.name or b.backend != self.name:
            raise DimensionError(
                f"ciphertext backend mismatch: {a.backend!r} + {b.backend!r} "
                f"under {self.name!r}"
            )
        if a.params != b.params or a.params != self.params:
            raise DimensionError("ciphertext params mismatch in hom_add")
        if a.slots_used != b.slots_used:
            raise DimensionError(
                f"slot mismatch in hom_add: {a.slots_used} vs {b.slots_used}"
            )
        add_count = a.add_count + b.add_count + 1
        if add_count > self.params.max_additions:
            raise ValueError(
                f"additive depth exhausted: {add_count} > "
                f"max_additions={self.params.max_additions}"
            )
        return add_count

    def _check_chunks(self, cts: Sequence[Ciphertext], original_len: int) -> None:
        if original_len < 0:
            raise ValueError("original_len must be nonnegative")
        total = 0
        for i, ct in enumerate(cts):
            if ct.backend != self.name or ct.params != self.params:
                raise DimensionError(f"ciphertext {i} params/backend mismatch")
            if i < len(cts) - 1 and ct.slots_used != self.params.slot_count:
                raise DimensionError(
                    f"non-final chunk {i} uses {ct.slots_used} slots, expected "
                    f"{self.params.slot_count}"
                )
            total += ct.slots_used
        if total < original_len:
            raise DimensionError(
                f"ciphertexts cover {total} values, need {original_len}"
            )
