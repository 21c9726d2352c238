"""Simulated state tomography: finite-shot sampling and linear inversion.

Observables are global on the measured system: the Hermitian and
anti-Hermitian parts of the nontrivial Weyl unitaries, deduplicated to a
basis of the traceless Hermitian operators. Each setting draws from its
own generator seeded with ``(seed, setting_index)``, so estimates do not
depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bases import weyl_unitary
from .errors import DimensionError, IncompleteSettingsError, ParamError
from .linalg import DensityMatrix, as_matrix, clip_to_psd, hermitize


@dataclass(frozen=True, eq=False)
class TomographyEstimate:
    estimate: DensityMatrix
    dim: int
    shots_per_setting: int | None  # None means exact expectations
    seed: int | None
    negative_mass: float
    settings_count: int

    @property
    def exact(self) -> bool:
        return self.shots_per_setting is None


def _canonical_sign(h: np.ndarray) -> np.ndarray:
    # first nonzero entry of the lower triangle (row-major) made positive
    rows, cols = np.tril_indices(h.shape[0])
    for z in h[rows, cols]:
        if abs(z) > 1e-12:
            lead = z.real if abs(z.real) > 1e-12 else z.imag
            return h if lead > 0 else -h
    return h


@lru_cache(maxsize=16)
def _settings(dim: int) -> tuple[np.ndarray, ...]:
    kept = [np.eye(dim, dtype=complex).reshape(-1)]
    out = []
    for j0 in range(dim):
        for j1 in range(dim):
            if (j0, j1) == (0, 0):
                continue
            w = weyl_unitary(dim, j0, j1)
            for h in (0.5 * (w + w.conj().T), 0.5j * (w - w.conj().T)):
                if np.abs(h).max() < 1e-12:
                    continue
                trial = np.array(kept + [h.reshape(-1)])
                if np.linalg.matrix_rank(trial, tol=1e-9) == len(kept) + 1:
                    kept.append(h.reshape(-1))
                    h = _canonical_sign(h)
                    h.setflags(write=False)
                    out.append(h)
    return tuple(out)


def measurement_settings(dim: int) -> list[np.ndarray]:
    """``dim**2 - 1`` Hermitian observables; with the identity they span all Hermitian matrices."""
    if dim < 2:
        raise DimensionError(f"dim must be at least 2, got {dim}")
    return list(_settings(int(dim)))


def exact_expectations(rho, settings) -> np.ndarray:
    rho = as_matrix(rho)
    return np.array([np.trace(rho @ o).real for o in settings])


def sample_expectations(rho, settings, shots: int, seed: int) -> np.ndarray:
    """Empirical mean eigenvalue of each observable over ``shots`` Born-rule draws."""
    if shots < 1:
        raise ParamError(f"shots must be positive, got {shots}")
    rho = as_matrix(rho)
    est = np.empty(len(settings))
    for k, o in enumerate(settings):
        lam, vecs = np.linalg.eigh(o)
        probs = np.einsum("ai,ab,bi->i", vecs.conj(), rho, vecs).real
        probs = np.clip(probs, 0, None)
        probs /= probs.sum()
        counts = np.random.default_rng([seed, k]).multinomial(shots, probs)
        est[k] = counts @ lam / shots
    return est


def linear_inversion(estimates, settings, dim: int) -> np.ndarray:
    """Least-squares state with ``Tr(rho O_k) = estimate_k`` and unit trace.

    The result is Hermitian with trace one, but not necessarily PSD.
    """
    estimates = np.asarray(estimates, dtype=float)
    if len(estimates) != len(settings):
        raise DimensionError(f"{len(estimates)} estimates for {len(settings)} settings")
    # Tr(rho O) = vec(O^T) . vec(rho)
    rows = [np.eye(dim).reshape(-1)] + [as_matrix(o).T.reshape(-1) for o in settings]
    a = np.array(rows, dtype=complex)
    if np.linalg.matrix_rank(a, tol=1e-9) < dim * dim:
        raise IncompleteSettingsError(f"settings span less than the {dim * dim}-dimensional operator space")
    b = np.concatenate([[1.0], estimates]).astype(complex)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return hermitize(x.reshape(dim, dim))


def tomograph(rho_true, shots: int | None, seed: int | None = None) -> TomographyEstimate:
    """Simulate tomography of ``rho_true``; ``shots=None`` uses exact expectations."""
    rho = as_matrix(rho_true)
    dim = rho.shape[0]
    settings = measurement_settings(dim)
    if shots is None:
        est = exact_expectations(rho, settings)
    else:
        if seed is None:
            raise ParamError("sampled tomography needs a seed")
        est = sample_expectations(rho, settings, shots, seed)
    m = linear_inversion(est, settings, dim)
    repaired, negative_mass = clip_to_psd(m)
    return TomographyEstimate(
        estimate=DensityMatrix(repaired),
        dim=dim,
        shots_per_setting=shots,
        seed=seed,
        negative_mass=negative_mass,
        settings_count=len(settings),
    )
