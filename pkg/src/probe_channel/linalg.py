"""Dense complex matrix kernel.

All composite-space operations use the convention that the first (left)
tensor factor is the slow index: basis index ``i * d_second + j``.
Matrices are plain ``numpy`` complex arrays; :class:`DensityMatrix` wraps
one and enforces the physical-state invariants.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field

import numpy as np

from .errors import DegenerateEstimateError, DimensionError, HermiticityError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a 2-D complex128 array (accepts DensityMatrix)."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive semidefinite matrix.

    ``validate=False`` skips the checks; it is used only for deliberately
    unrepaired estimates (raw reconstructions from noisy data).
    """

    matrix: np.ndarray
    validate: InitVar[bool] = True
    dim: int = field(init=False)

    def __post_init__(self, validate: bool):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        if validate:
            herm_err = np.abs(m - m.conj().T).max()
            if herm_err > HERMITIAN_TOL:
                raise HermiticityError(f"matrix is not Hermitian (max deviation {herm_err:.3g})")
            tr = np.trace(m)
            if abs(tr - 1) > TRACE_TOL:
                raise ValueError(f"trace is {tr:.15g}, expected 1")
            lam_min = np.linalg.eigvalsh(m)[0]
            if lam_min < -EIGEN_TOL:
                raise ValueError(f"matrix is not positive semidefinite (eigenvalue {lam_min:.3g})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", m.shape[0])

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    @classmethod
    def from_unnormalized(cls, m, validate: bool = True) -> "DensityMatrix":
        """Hermitize and divide by the trace."""
        m = hermitize(as_matrix(m))
        tr = np.trace(m).real
        if tr <= 0:
            raise DegenerateEstimateError(f"non-positive trace {tr:.3g}")
        return cls(m / tr, validate=validate)

    @classmethod
    def from_ket(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def tensor(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, which: str, dims: tuple[int, int]) -> np.ndarray:
    """Trace out the ``"first"`` or ``"second"`` factor of an ``N*M`` operator."""
    m = as_matrix(m)
    n1, n2 = dims
    if m.shape != (n1 * n2, n1 * n2):
        raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
    t = m.reshape(n1, n2, n1, n2)
    if which == "first":
        return np.einsum("ijik->jk", t)
    if which == "second":
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"which must be 'first' or 'second', got {which!r}")


def swap_operator(n: int) -> np.ndarray:
    """Permutation matrix with ``S |j>|k> = |k>|j>`` on ``C^n (x) C^n``."""
    if n < 1:
        raise DimensionError("n must be positive")
    s = np.zeros((n * n, n * n), dtype=complex)
    for j in range(n):
        for k in range(n):
            s[k * n + j, j * n + k] = 1
    return s


def vec_to_matrix(v, n: int) -> np.ndarray:
    """Matrix notation of a bipartite ket: entry ``(i, j)`` is ``v[i*n + j]``."""
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != n * n:
        raise DimensionError(f"vector of length {v.size} is not {n}^2")
    return v.reshape(n, n).copy()


def matrix_to_vec(m) -> np.ndarray:
    return as_matrix(m).reshape(-1).copy()


def trace_distance(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = hermitize(a - b)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def clip_to_psd(m, herm_tol: float = 1e-9) -> tuple[np.ndarray, float]:
    """Clip negative eigenvalues and renormalize.

    Returns the repaired matrix and the clipped negative mass, measured
    relative to the input's trace.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    herm_err = np.abs(m - m.conj().T).max()
    if herm_err > herm_tol:
        raise HermiticityError(f"matrix is not Hermitian (max deviation {herm_err:.3g})")
    tr = np.trace(m).real
    if tr <= 0:
        raise DegenerateEstimateError(f"non-positive trace {tr:.3g}")
    m = hermitize(m) / tr
    lam, vecs = np.linalg.eigh(m)
    if lam[0] >= 0:
        return m, 0.0
    negative_mass = float(np.clip(-lam, 0, None).sum())
    lam = np.clip(lam, 0, None)
    total = lam.sum()
    if total <= 0:
        raise DegenerateEstimateError("no positive spectrum left after clipping")
    out = (vecs * (lam / total)) @ vecs.conj().T
    return hermitize(out), negative_mass


def project_psd(m) -> DensityMatrix:
    return DensityMatrix(clip_to_psd(m)[0])


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed random state of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return DensityMatrix.from_unnormalized(g @ g.conj().T)


def random_pure_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    return random_density_matrix(dim, rng, rank=1)


# Shared JSON matrix format: nested rows of [re, im] pairs.

def matrix_to_json(m) -> list:
    m = as_matrix(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise DimensionError(f"matrix JSON must be rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]
