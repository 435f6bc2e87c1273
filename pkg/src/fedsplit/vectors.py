"""Flat parameter-vector arithmetic and partition masks.

A model update is always handled as one flat float64 vector; layer structure
is an ingestion-time concern only.  A :class:`PartitionMask` names the
coordinates that receive encrypted (exact) protection, and ``split``/``merge``
move between the full vector and its two disjoint parts.  ``merge`` is the
exact inverse of ``split``: the round trip is bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

__all__ = [
    "as_param_vector",
    "PartitionMask",
    "UpdateSplit",
    "split",
    "merge",
    "l2_norm",
    "add_scaled",
]


def as_param_vector(values, *, name: str = "vector") -> np.ndarray:
    """Validate and return a 1-D float64 copy of ``values``.

    Raises ValueError on non-finite entries and DimensionError on empty or
    non-1-D input.
    """
    u = np.asarray(values, dtype=np.float64)
    if u.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError(f"{name} contains non-finite values")
    return u.copy()


@dataclass(frozen=True)
class PartitionMask:
    """Strictly increasing index set of encrypted coordinates over ``[0, dim)``."""

    he_indices: np.ndarray
    dim: int

    def __post_init__(self):
        idx = np.asarray(self.he_indices, dtype=np.int64)
        if idx.ndim != 1:
            raise DimensionError("he_indices must be 1-D")
        if self.dim < 1:
            raise DimensionError(f"dim must be positive, got {self.dim}")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise DimensionError(
                    f"indices must lie in [0, {self.dim}), got range "
                    f"[{idx.min()}, {idx.max()}]"
                )
            if np.any(np.diff(idx) <= 0):
                raise ValueError("he_indices must be strictly increasing")
        object.__setattr__(self, "he_indices", idx)

    @classmethod
    def from_indices(cls, indices, dim: int) -> "PartitionMask":
        """Build a mask from an unordered, possibly unsorted index collection."""
        idx = np.unique(np.asarray(sorted(indices), dtype=np.int64))
        return cls(he_indices=idx, dim=dim)

    @property
    def size(self) -> int:
        return int(self.he_indices.size)

    def complement(self) -> np.ndarray:
        """Ascending indices of the noise-protected (non-encrypted) part."""
        keep = np.ones(self.dim, dtype=bool)
        keep[self.he_indices] = False
        return np.nonzero(keep)[0].astype(np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartitionMask):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.he_indices, other.he_indices)

    def __hash__(self):
        return hash((self.dim, self.he_indices.tobytes()))


@dataclass(frozen=True)
class UpdateSplit:
    """Disjoint halves of an update: noise-protected part and encrypted part."""

    dp_part: np.ndarray
    he_part: np.ndarray
    mask: PartitionMask = field(repr=False)


def split(u: np.ndarray, mask: PartitionMask) -> UpdateSplit:
    """Divide ``u`` into its encrypted and noise-protected coordinates.

    Both parts preserve ascending original-index order, so ``merge`` can
    reconstruct ``u`` exactly.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.size != mask.dim:
        raise DimensionError(
            f"vector length {u.size if u.ndim == 1 else u.shape} does not match "
            f"mask dim {mask.dim}"
        )
    he_part = u[mask.he_indices].copy()
    dp_part = u[mask.complement()].copy()
    return UpdateSplit(dp_part=dp_part, he_part=he_part, mask=mask)


def merge(dp_part: np.ndarray, he_part: np.ndarray, mask: PartitionMask) -> np.ndarray:
    """Reassemble the full vector from its two parts; exact inverse of ``split``."""
    dp_part = np.asarray(dp_part, dtype=np.float64)
    he_part = np.asarray(he_part, dtype=np.float64)
    if he_part.size != mask.size:
        raise DimensionError(
            f"he_part length {he_part.size} does not match mask size {mask.size}"
        )
    if dp_part.size != mask.dim - mask.size:
        raise DimensionError(
            f"dp_part length {dp_part.size} does not match {mask.dim - mask.size} "
            f"non-encrypted coordinates"
        )
    out = np.empty(mask.dim, dtype=np.float64)
    out[mask.he_indices] = he_part
    out[mask.complement()] = dp_part
    return out


def l2_norm(u: np.ndarray) -> float:
    """Euclidean norm of a flat update."""
    return float(np.linalg.norm(np.asarray(u, dtype=np.float64)))


def add_scaled(a: np.ndarray, b: np.ndarray, s: float) -> np.ndarray:
    """Elementwise ``a + s * b`` (the model step ``w + u``)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a + s * b
