"""Addition-only homomorphic encryption backends for real-valued vectors."""

from .base import Ciphertext, HeBackend, KeyPair
from .ckks import CkksBackend
from .mock import MockBackend
from .params import (HeCostModel, HeParams, decode_tolerance, default_params,
                     simulated_cost, simulated_round_cost)

__all__ = [
    "Ciphertext", "KeyPair", "HeBackend", "CkksBackend", "MockBackend",
    "HeParams", "HeCostModel", "default_params", "decode_tolerance",
    "simulated_cost", "simulated_round_cost", "make_backend",
]

_BACKENDS = {"ckks": CkksBackend, "mock": MockBackend}


def make_backend(name: str, params: HeParams | None = None) -> HeBackend:
    """Instantiate a backend by name ("ckks" or "mock")."""
    if name not in _BACKENDS:
        raise ValueError(f"unknown HE backend {name!r}; choose from {sorted(_BACKENDS)}")
    return _BACKENDS[name](params or default_params())
