"""Maximally entangled (generalized Bell) basis of ``C^N (x) C^N``.

Basis element ``j = N*j0 + j1`` is

    |Phi_j> = N^{-1/2} sum_k exp(2 pi i j0 k / N) |k>|k + j1 mod N>

and its matrix notation ``Phi_j`` is ``N^{-1/2}`` times a Weyl
(clock-and-shift) unitary. For qubits the unitaries are I, X, Z, iY.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError
from .linalg import vec_to_matrix


@dataclass(frozen=True, eq=False)
class WeylBasis:
    dim: int
    vectors: np.ndarray  # (N^2, N^2); row j is |Phi_j>
    matrices: np.ndarray  # (N^2, N, N); matrix notation of each vector

    def __len__(self):
        return self.dim * self.dim

    def unitary(self, j: int) -> np.ndarray:
        return np.sqrt(self.dim) * self.matrices[j]


def weyl_unitary(n: int, j0: int, j1: int) -> np.ndarray:
    """Weyl unitary with entry ``omega**(j0*k)`` at ``(k, k + j1 mod n)``."""
    if not (0 <= j0 < n and 0 <= j1 < n):
        raise IndexError(f"indices ({j0}, {j1}) out of range for n={n}")
    w = np.zeros((n, n), dtype=complex)
    k = np.arange(n)
    w[k, (k + j1) % n] = np.exp(2j * np.pi * j0 * k / n)
    return w


@lru_cache(maxsize=16)
def _weyl_basis(n: int) -> WeylBasis:
    vectors = np.zeros((n * n, n * n), dtype=complex)
    for j0 in range(n):
        for j1 in range(n):
            j = n * j0 + j1
            for k in range(n):
                vectors[j, k * n + (k + j1) % n] = np.exp(2j * np.pi * j0 * k / n) / np.sqrt(n)
    matrices = np.stack([vec_to_matrix(v, n) for v in vectors])
    vectors.setflags(write=False)
    matrices.setflags(write=False)
    return WeylBasis(n, vectors, matrices)


def weyl_basis(n: int) -> WeylBasis:
    if n < 2:
        raise DimensionError(f"basis dimension must be at least 2, got {n}")
    return _weyl_basis(int(n))
