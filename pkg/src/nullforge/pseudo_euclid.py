"""Vectors in E^4_2 (signature ++--) and E^3_1 (signature ++-)."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import SignatureError


class Signature(enum.Enum):
    E42 = (1.0, 1.0, -1.0, -1.0)
    E31 = (1.0, 1.0, -1.0)

    @property
    def eps(self) -> np.ndarray:
        return np.array(self.value)

    @property
    def dim(self) -> int:
        return len(self.value)

    @classmethod
    def parse(cls, name) -> Signature:
        if isinstance(name, Signature):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise SignatureError("unknown signature %r (use e42 or e31)" % (name,)) from None

    @classmethod
    def for_dim(cls, dim: int) -> Signature:
        for sig in cls:
            if sig.dim == dim:
                return sig
        raise SignatureError("no supported signature has dimension %d" % dim)


@dataclass(frozen=True)
class PEVector:
    coords: tuple
    signature: Signature

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != self.signature.dim:
            raise SignatureError(
                "%s vectors have %d coordinates, got %d"
                % (self.signature.name, self.signature.dim, len(coords)))
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, coords, signature=None) -> PEVector:
        coords = tuple(np.asarray(coords, dtype=float).ravel())
        sig = Signature.for_dim(len(coords)) if signature is None else Signature.parse(signature)
        return cls(coords, sig)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype)

    def _check(self, other):
        if not isinstance(other, PEVector) or other.signature is not self.signature:
            raise SignatureError("cannot combine %r with %r" % (self, other))

    def __add__(self, other):
        self._check(other)
        return PEVector(tuple(a + b for a, b in zip(self, other)), self.signature)

    def __sub__(self, other):
        self._check(other)
        return PEVector(tuple(a - b for a, b in zip(self, other)), self.signature)

    def __mul__(self, k):
        return PEVector(tuple(k * a for a in self), self.signature)

    __rmul__ = __mul__

    def norm_sq(self) -> float:
        return inner_product(self, self)


def inner_product(u: PEVector, v: PEVector) -> float:
    u._check(v)
    return float(sum(e * a * b for e, a, b in zip(u.signature.value, u, v)))


def quadratic_form(vectors, signature: Signature, other=None) -> np.ndarray:
    """Batched inner product over the last axis of coordinate arrays."""
    a = np.asarray(vectors, dtype=float)
    b = a if other is None else np.asarray(other, dtype=float)
    eps = signature.eps
    if a.shape[-1] != eps.size or b.shape[-1] != eps.size:
        raise SignatureError("last axis must have length %d" % eps.size)
    return np.sum(eps * a * b, axis=-1)


def is_null(v: PEVector, tol: float = 1e-12) -> bool:
    """True when |<v,v>| <= tol * max(1, sum of squared coordinates)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = max(1.0, sum(c * c for c in v))
    return abs(inner_product(v, v)) <= tol * scale
