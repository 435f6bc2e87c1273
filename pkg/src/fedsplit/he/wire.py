"""Length-prefixed binary container for ciphertexts and keys.

Layout: magic b"PAHE", version byte, kind byte, then two length-prefixed
blocks (u32 little-endian lengths): the params block and the payload block.
Deserializing a serialized ciphertext decrypts bit-identically.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import ProtocolError
from .base import Ciphertext, KeyPair
from .ckks import CkksPublicKey, CkksSecretKey
from .mock import MockPayload
from .params import HeParams

__all__ = ["serialize", "deserialize"]

MAGIC = b"PAHE"
VERSION = 1

_KIND_CIPHERTEXT = 1
_KIND_PUBLIC_KEY = 2
_KIND_SECRET_KEY = 3

_BACKEND_CODES = {"ckks": 1, "mock": 2}
_BACKEND_NAMES = {v: k for k, v in _BACKEND_CODES.items()}

_PARAMS_FMT = "<IHHIB"  # ring_degree, scale_bits, modulus_bits, max_additions, backend


def _pack_params(params: HeParams, backend: str) -> bytes:
    return struct.pack(_PARAMS_FMT, params.ring_degree, params.scale_bits,
                       params.modulus_bits, params.max_additions,
                       _BACKEND_CODES[backend])


def _unpack_params(blob: bytes) -> tuple[HeParams, str]:
    ring_degree, scale_bits, modulus_bits, max_additions, code = struct.unpack(
        _PARAMS_FMT, blob)
    params = HeParams(ring_degree=ring_degree, scale_bits=scale_bits,
                      modulus_bits=modulus_bits, max_additions=max_additions)
    return params, _BACKEND_NAMES[code]


def _poly_bytes(a: np.ndarray) -> bytes:
    return np.ascontiguousarray(a, dtype="<u8").tobytes()


def _poly_from(blob: bytes, n: int) -> np.ndarray:
    return np.frombuffer(blob, dtype="<u8", count=n).astype(np.uint64)


def _container(kind: int, params_block: bytes, payload: bytes) -> bytes:
    return (MAGIC + bytes([VERSION, kind])
            + struct.pack("<I", len(params_block)) + params_block
            + struct.pack("<I", len(payload)) + payload)


def serialize(obj) -> bytes:
    """Serialize a Ciphertext or KeyPair key half to the PAHE container."""
    if isinstance(obj, Ciphertext):
        head = struct.pack("<II", obj.slots_used, obj.add_count)
        if obj.backend == "ckks":
            c0, c1 = obj.payload
            payload = head + _poly_bytes(c0) + _poly_bytes(c1)
        elif obj.backend == "mock":
            payload = (head + struct.pack("<q", obj.payload.nonce)
                       + np.ascontiguousarray(obj.payload.values, dtype="<f8").tobytes())
        else:
            raise ProtocolError(f"unknown backend {obj.backend!r}")
        return _container(_KIND_CIPHERTEXT, _pack_params(obj.params, obj.backend), payload)

    if isinstance(obj, KeyPair):
        params_block = _pack_params(obj.params, obj.backend)
        if obj.backend == "ckks":
            pub = obj.public_key
            payload = _poly_bytes(pub.a_eval) + _poly_bytes(pub.b_eval)
        else:
            payload = struct.pack("<q", obj.public_key)
        return _container(_KIND_PUBLIC_KEY, params_block, payload)

    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize_secret(kp: KeyPair) -> bytes:
    params_block = _pack_params(kp.params, kp.backend)
    if kp.backend == "ckks":
        payload = _poly_bytes(kp.secret_key.s_eval)
    else:
        payload = struct.pack("<q", kp.secret_key)
    return _container(_KIND_SECRET_KEY, params_block, payload)


def _read_block(blob: bytes, offset: int) -> tuple[bytes, int]:
    (length,) = struct.unpack_from("<I", blob, offset)
    start = offset + 4
    return blob[start: start + length], start + length


def deserialize(blob: bytes):
    """Parse a PAHE container back into a Ciphertext or key material.

    Returns a Ciphertext for ciphertext containers, otherwise a
    (kind, params, backend, payload_object) tuple for keys.
    """
    if blob[:4] != MAGIC:
        raise ProtocolError("bad magic bytes")
    version, kind = blob[4], blob[5]
    if version != VERSION:
        raise ProtocolError(f"unsupported container version {version}")
    params_block, offset = _read_block(blob, 6)
    payload, _ = _read_block(blob, offset)
    params, backend = _unpack_params(params_block)
    n = params.ring_degree

    if kind == _KIND_CIPHERTEXT:
        slots_used, add_count = struct.unpack_from("<II", payload, 0)
        body = payload[8:]
        if backend == "ckks":
            c0 = _poly_from(body[: 8 * n], n)
            c1 = _poly_from(body[8 * n: 16 * n], n)
            inner = (c0, c1)
        else:
            (nonce,) = struct.unpack_from("<q", body, 0)
            values = np.frombuffer(body[8:], dtype="<f8").astype(np.float64)
            inner = MockPayload(values=values, nonce=nonce)
        return Ciphertext(payload=inner, slots_used=slots_used,
                          add_count=add_count, params=params, backend=backend)

    if kind == _KIND_PUBLIC_KEY:
        if backend == "ckks":
            key = CkksPublicKey(a_eval=_poly_from(payload[: 8 * n], n),
                                b_eval=_poly_from(payload[8 * n: 16 * n], n))
        else:
            (key,) = struct.unpack_from("<q", payload, 0)
        return (kind, params, backend, key)

    if kind == _KIND_SECRET_KEY:
        if backend == "ckks":
            key = CkksSecretKey(s_eval=_poly_from(payload[: 8 * n], n))
        else:
            (key,) = struct.unpack_from("<q", payload, 0)
        return (kind, params, backend, key)

    raise ProtocolError(f"unknown container kind {kind}")
