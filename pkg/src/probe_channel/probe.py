"""Probe states: full-rank pure bipartite states ``|P> = sum_ij P_ij |ij>``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParamError, RankError
from .linalg import DensityMatrix, as_matrix, matrix_to_vec

RANK_THRESHOLD = 1e-8
MAX_RESAMPLES = 1000


@dataclass(frozen=True, eq=False)
class ProbeState:
    """Normalized probe with cached inverse and condition ratio.

    Build through :func:`probe_from_matrix`; the constructor assumes the
    matrix is already normalized and full rank.
    """

    p_matrix: np.ndarray
    p_inverse: np.ndarray
    dim: int = field(init=False)
    cond: float = field(init=False)  # sigma_min / sigma_max

    def __post_init__(self):
        for name in ("p_matrix", "p_inverse"):
            arr = as_matrix(getattr(self, name)).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        s = np.linalg.svd(self.p_matrix, compute_uv=False)
        object.__setattr__(self, "dim", self.p_matrix.shape[0])
        object.__setattr__(self, "cond", float(s[-1] / s[0]))

    def vector(self) -> np.ndarray:
        return probe_vector(self)

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix.from_ket(self.vector())

    def __repr__(self):
        return f"ProbeState(dim={self.dim}, cond={self.cond:.4g})"


def probe_from_matrix(p, rank_threshold: float = RANK_THRESHOLD, normalize: bool = True) -> ProbeState:
    """Validate ``p`` as a probe matrix and cache its inverse.

    With ``normalize=False`` the matrix must already satisfy
    ``Tr(P^dag P) = 1`` within 1e-12 and is kept bit-for-bit.
    """
    p = as_matrix(p)
    if p.shape[0] != p.shape[1]:
        raise DimensionError(f"probe matrix must be square, got {p.shape}")
    norm = np.linalg.norm(p)
    if norm == 0:
        raise RankError("probe matrix is zero", ratio=0.0)
    if normalize:
        p = p / norm
    elif abs(norm**2 - 1) > 1e-12:
        raise ParamError(f"probe matrix is not normalized (Tr P^dag P = {norm**2:.15g})")
    s = np.linalg.svd(p, compute_uv=False)
    ratio = float(s[-1] / s[0])
    if ratio < rank_threshold:
        raise RankError(
            f"probe matrix is rank deficient: sigma_min/sigma_max = {ratio:.3g} < {rank_threshold:g}",
            ratio=ratio,
        )
    return ProbeState(p, np.linalg.inv(p))


def maximally_entangled_probe(n: int) -> ProbeState:
    if n < 2:
        raise DimensionError(f"probe dimension must be at least 2, got {n}")
    return probe_from_matrix(np.eye(n))


def random_probe(n: int, seed: int, min_cond: float = 0.1) -> ProbeState:
    """Complex Gaussian probe, redrawn until ``sigma_min/sigma_max >= min_cond``."""
    if n < 2:
        raise DimensionError(f"probe dimension must be at least 2, got {n}")
    if not 0 < min_cond <= 0.99:
        raise ParamError(f"min_cond must lie in (0, 0.99], got {min_cond}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RESAMPLES):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        s = np.linalg.svd(g, compute_uv=False)
        if s[-1] / s[0] >= min_cond:
            return probe_from_matrix(g)
    raise RankError(f"no draw reached condition ratio {min_cond} in {MAX_RESAMPLES} attempts")


def probe_vector(ps: ProbeState) -> np.ndarray:
    return matrix_to_vec(ps.p_matrix)
