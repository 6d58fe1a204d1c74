"""Hankel lifting of array snapshots and its left inverse.

A length-``n`` vector ``x`` is lifted to the ``d x (n - d + 1)`` matrix
``M[i, j] = x[i + j - 1]`` (1-based), i.e. element ``k`` sits on the
``k``-th anti-diagonal. Internally all arrays are 0-based numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import DimensionError

__all__ = [
    "HankelShape",
    "default_pencil",
    "anti_diagonal_counts",
    "hankelize",
    "hankel_adjoint",
    "dehankelize",
]


def default_pencil(n: int) -> int:
    """Row count giving the squarest Hankel lifting of a length-``n`` vector.

    ``(n + 1) // 2`` for odd ``n`` (square) and ``n // 2`` for even ``n``
    (one more column than rows).
    """
    n = int(n)
    if n < 3:
        raise DimensionError(f"need n >= 3, got {n}")
    return (n + 1) // 2 if n % 2 else n // 2


@dataclass(frozen=True)
class HankelShape:
    """Pencil geometry tying length-``n`` vectors to ``d x cols`` matrices."""

    n: int
    d: int

    def __post_init__(self):
        if not 2 <= self.d <= self.n - 1:
            raise DimensionError(
                f"pencil d={self.d} must satisfy 2 <= d <= n-1 (n={self.n})"
            )

    @classmethod
    def square(cls, n: int) -> "HankelShape":
        return cls(int(n), default_pencil(n))

    @property
    def cols(self) -> int:
        return self.n - self.d + 1

    @property
    def matrix_shape(self) -> tuple[int, int]:
        return (self.d, self.cols)

    @property
    def rank_budget(self) -> int:
        return min(self.d, self.cols)

    @cached_property
    def index(self) -> np.ndarray:
        """0-based vector index held by each matrix position."""
        return np.add.outer(np.arange(self.d), np.arange(self.cols))

    @cached_property
    def counts(self) -> np.ndarray:
        return anti_diagonal_counts(self)


def anti_diagonal_counts(shape: HankelShape) -> np.ndarray:
    """Number of matrix entries on each anti-diagonal, ``min(k, d, cols, n-k+1)``."""
    k = np.arange(1, shape.n + 1)
    return np.minimum.reduce([k, np.full_like(k, shape.d),
                              np.full_like(k, shape.cols), shape.n - k + 1])


def _check_vector(x, shape: HankelShape) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != shape.n:
        raise DimensionError(f"expected a vector of length {shape.n}, got shape {x.shape}")
    return x


def _check_matrix(M, shape: HankelShape) -> np.ndarray:
    M = np.asarray(M)
    if M.shape != shape.matrix_shape:
        raise DimensionError(f"expected a {shape.matrix_shape} matrix, got {M.shape}")
    return M


def hankelize(x, shape: HankelShape) -> np.ndarray:
    """Lift ``x`` to its ``d x cols`` Hankel matrix."""
    x = _check_vector(x, shape)
    return x[shape.index]


def hankel_adjoint(M, shape: HankelShape) -> np.ndarray:
    """Adjoint of :func:`hankelize`: sums along each anti-diagonal."""
    M = _check_matrix(M, shape)
    idx = shape.index.ravel()
    flat = M.ravel()
    out = np.bincount(idx, weights=flat.real, minlength=shape.n)
    if np.iscomplexobj(flat):
        out = out + 1j * np.bincount(idx, weights=flat.imag, minlength=shape.n)
    return out


def dehankelize(M, shape: HankelShape) -> np.ndarray:
    """Average each anti-diagonal; exact left inverse of :func:`hankelize`."""
    return hankel_adjoint(M, shape) / shape.counts
