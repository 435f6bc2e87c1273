"""Addition-only RLWE scheme over real vectors ("ckks-lite").

Encode: fixed-point scaling by 2^scale_bits, coefficient packing (one value
per ring coefficient).  Encrypt: standard RLWE with ternary ephemeral u and
centered-binomial errors; ciphertexts are kept in NTT (evaluation) form so
homomorphic addition is a vectorized modular add.  Decrypt: c0 + c1*s,
inverse transform, centered lift, unscale.

No multiplication, relinearization, rescaling, or bootstrapping: the
aggregation workload only adds.  Parameters are toy-sized; this backend
demonstrates the protocol, it is not a hardened cryptosystem.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DimensionError, EncodingOverflowError
from ..seeds import as_rng
from .base import Ciphertext, HeBackend, KeyPair, chunk_bounds
from .params import HeParams
from .ring import NegacyclicRing

__all__ = ["CkksBackend", "CkksPublicKey", "CkksSecretKey"]


class CkksPublicKey:
    """(b, a) = (-a*s + e, a), both stored in evaluation form."""

    __slots__ = ("a_eval", "b_eval")

    def __init__(self, a_eval: np.ndarray, b_eval: np.ndarray):
        self.a_eval = a_eval
        self.b_eval = b_eval


class CkksSecretKey:
    __slots__ = ("s_eval",)

    def __init__(self, s_eval: np.ndarray):
        self.s_eval = s_eval


class CkksBackend(HeBackend):
    name = "ckks"

    def __init__(self, params: HeParams):
        super().__init__(params)
        self.ring = NegacyclicRing(params.ring_degree, params.modulus_bits)

    def keygen(self, seed) -> KeyPair:
        rng = as_rng(seed)
        ring = self.ring
        s_eval = ring.to_eval(ring.ternary(rng))
        a_eval = ring.to_eval(ring.uniform(rng))
        e_eval = ring.to_eval(ring.cbd_error(rng))
        b_eval = ring.addmod(ring.negmod(ring.mulmod(a_eval, s_eval)), e_eval)
        return KeyPair(
            public_key=CkksPublicKey(a_eval=a_eval, b_eval=b_eval),
            secret_key=CkksSecretKey(s_eval=s_eval),
            params=self.params,
            backend=self.name,
        )

    def _encode_chunk(self, x_chunk: np.ndarray) -> np.ndarray:
        worst = float(np.max(np.abs(x_chunk))) if x_chunk.size else 0.0
        if worst > self.params.max_encodable:
            raise EncodingOverflowError(
                f"value magnitude {worst:g} exceeds fixed-point headroom "
                f"{self.params.max_encodable:g} "
                f"(modulus_bits={self.params.modulus_bits}, "
                f"scale_bits={self.params.scale_bits}, "
                f"max_additions={self.params.max_additions})"
            )
        m = np.zeros(self.params.ring_degree, dtype=np.int64)
        m[: x_chunk.size] = np.rint(x_chunk * self.params.scale).astype(np.int64)
        return self.ring.from_signed(m)

    def encrypt(self, pk: KeyPair, x: np.ndarray, seed) -> list[Ciphertext]:
        if pk.backend != self.name or pk.params != self.params:
            raise DimensionError("public key params/backend mismatch")
        x = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise ValueError("plaintext contains non-finite values")
        rng = as_rng(seed)
        ring = self.ring
        key: CkksPublicKey = pk.public_key
        out = []
        for start, stop in chunk_bounds(x.size, self.params.slot_count):
            m_res = self._encode_chunk(x[start:stop])
            u_eval = ring.to_eval(ring.ternary(rng))
            e1_plus_m = ring.addmod(ring.cbd_error(rng), m_res)
            c0 = ring.addmod(ring.mulmod(key.b_eval, u_eval), ring.to_eval(e1_plus_m))
            c1 = ring.addmod(ring.mulmod(key.a_eval, u_eval),
                             ring.to_eval(ring.cbd_error(rng)))
            out.append(Ciphertext(payload=(c0, c1), slots_used=stop - start,
                                  add_count=0, params=self.params, backend=self.name))
        return out

    def hom_add(self, a: Ciphertext, b: Ciphertext) -> Ciphertext:
        add_count = self._check_addable(a, b)
        a0, a1 = a.payload
        b0, b1 = b.payload
        ring = self.ring
        return Ciphertext(
            payload=(ring.addmod(a0, b0), ring.addmod(a1, b1)),
            slots_used=a.slots_used,
            add_count=add_count,
            params=self.params,
            backend=self.name,
        )

    def decrypt(self, sk: KeyPair, cts: Sequence[Ciphertext], original_len: int) -> np.ndarray:
        if sk.backend != self.name or sk.params != self.params:
            raise DimensionError("secret key params/backend mismatch")
        self._check_chunks(cts, original_len)
        ring = self.ring
        s_eval = sk.secret_key.s_eval
        out = np.empty(original_len, dtype=np.float64)
        pos = 0
        for ct in cts:
            if pos >= original_len:
                break
            c0, c1 = ct.payload
            m_res = ring.from_eval(ring.addmod(c0, ring.mulmod(c1, s_eval)))
            values = ring.to_signed(m_res).astype(np.float64) / self.params.scale
            take = min(ct.slots_used, original_len - pos)
            out[pos: pos + take] = values[:take]
            pos += take
        return out
