"""Canonical serialization of precision-rounded unitaries and the digest
used as the identity-database key.

The canonical form renders every matrix entry as a fixed-point decimal
with exactly dp fractional digits, rounded half-away-from-zero, negative
zero normalized, in "dim;re,im;re,im;..." row-major order. The fingerprint
is the 128-bit MD5 digest of those bytes; the algorithm identifier below
is frozen into the database format version.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .matrices import ComplexMatrix

DIGEST_ALGORITHM = "md5-128"


@dataclass(frozen=True)
class Fingerprint:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != 16:
            raise ValueError("fingerprint must be 16 bytes")

    @property
    def hex(self) -> str:
        return self.digest.hex()

    @classmethod
    def from_hex(cls, s: str) -> "Fingerprint":
        return cls(bytes.fromhex(s))

    def __repr__(self):
        return f"Fingerprint({self.hex})"


def _rounded_components(m: ComplexMatrix, dp: int) -> np.ndarray:
    """Interleaved (re, im) components scaled to integers at dp decimals.

    Rounding is half-away-from-zero; exact binary midpoints (dyadic values
    like 0.125 at dp=2) round deterministically away from zero.
    """
    if not (1 <= dp <= 15):
        raise ValueError(f"dp must be in [1, 15], got {dp}")
    flat = np.asarray(m, dtype=np.complex128).reshape(-1)
    comps = np.empty(2 * flat.size, dtype=np.float64)
    comps[0::2] = flat.real
    comps[1::2] = flat.imag
    if not np.all(np.isfinite(comps)):
        raise ValueError("cannot canonicalize a matrix with non-finite entries")
    scale = 10.0**dp
    mags = np.floor(np.abs(comps) * scale + 0.5)
    if np.any(mags >= 2.0**62):
        raise ValueError("matrix entries too large to canonicalize")
    return np.where(comps < 0, -mags, mags).astype(np.int64)


# matrix entries cluster on few distinct values, so rendered components
# are cached by their scaled-integer form
_COMPONENT_CACHE: dict[tuple[int, int], str] = {}


def _component_str(v: int, dp: int) -> str:
    key = (v, dp)
    s = _COMPONENT_CACHE.get(key)
    if s is None:
        sign = "-" if v < 0 else ""
        a = abs(v)
        scale = 10**dp
        s = f"{sign}{a // scale}.{a % scale:0{dp}d}"
        _COMPONENT_CACHE[key] = s
    return s


def canonicalize(m: ComplexMatrix, dp: int) -> str:
    """Byte-deterministic fixed-point rendering of m at dp decimals."""
    dim = m.shape[0]
    scaled = _rounded_components(m, dp).tolist()
    parts = [str(dim)]
    for i in range(0, len(scaled), 2):
        parts.append(
            _component_str(scaled[i], dp) + "," + _component_str(scaled[i + 1], dp)
        )
    return ";".join(parts)


def rounded_matrix(m: ComplexMatrix, dp: int) -> ComplexMatrix:
    """The matrix whose entries are m's rounded to dp decimals."""
    dim = m.shape[0]
    scaled = _rounded_components(m, dp).astype(np.float64) / 10**dp
    out = scaled[0::2] + 1j * scaled[1::2]
    return out.reshape(dim, dim)


def fingerprint(m: ComplexMatrix, dp: int) -> Fingerprint:
    """128-bit digest of the canonical form; the database key."""
    return Fingerprint(hashlib.md5(canonicalize(m, dp).encode("ascii")).digest())
