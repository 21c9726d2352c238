"""Kraus-form quantum channels and their direct application.

Direct Kraus application is the ground truth every reconstruction is
checked against. Channels may be trace-non-increasing; the trace of the
unnormalized output is the success probability of the process.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bases import weyl_unitary
from .errors import DimensionError, ParamError, UnitarityError, ZeroProbabilityError
from .linalg import DensityMatrix, as_matrix, hermitize

CP_TOL = 1e-10
ZERO_PROB = 1e-14

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

FAMILIES = ("identity", "depolarizing", "amplitude_damping", "phase_damping", "unitary", "projector")


@dataclass(frozen=True, eq=False)
class KrausChannel:
    dim: int
    kraus: np.ndarray  # (r, N, N)
    label: str = ""
    trace_preserving: bool = field(init=False)

    def __post_init__(self):
        ks = np.asarray(self.kraus, dtype=complex)
        if ks.ndim == 2:
            ks = ks[None]
        if ks.ndim != 3 or ks.shape[0] == 0 or ks.shape[1:] != (self.dim, self.dim):
            raise DimensionError(f"Kraus operators must be {self.dim}x{self.dim}, got array of shape {ks.shape}")
        if not np.all(np.isfinite(ks)):
            raise ParamError("Kraus operators have non-finite entries")
        effect = np.einsum("kji,kjl->il", ks.conj(), ks)
        lam = np.linalg.eigvalsh(hermitize(effect))
        if lam[-1] > 1 + CP_TOL:
            raise ParamError(f"sum K^dag K exceeds identity (largest eigenvalue {lam[-1]:.12g})")
        ks = ks.copy()
        ks.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        tp = bool(np.abs(effect - np.eye(self.dim)).max() <= CP_TOL)
        object.__setattr__(self, "trace_preserving", tp)

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    def effect(self) -> np.ndarray:
        """Return ``sum_i K_i^dag K_i``."""
        return np.einsum("kji,kjl->il", self.kraus.conj(), self.kraus)

    def __call__(self, rho) -> np.ndarray:
        """Unnormalized output ``sum_i K_i rho K_i^dag``."""
        rho = as_matrix(rho)
        return np.einsum("kij,jl,kml->im", self.kraus, rho, self.kraus.conj())

    def choi(self) -> np.ndarray:
        """Unnormalized Choi matrix ``sum_ij $(|i><j|) (x) |i><j|``."""
        n = self.dim
        omega = np.eye(n, dtype=complex).reshape(-1)
        return apply_unnormalized_one_sided(self, np.outer(omega, omega), "first", (n, n))

    def __repr__(self):
        return f"KrausChannel(label={self.label!r}, dim={self.dim}, rank={self.rank})"


def _normalize(out: np.ndarray) -> tuple[DensityMatrix, float]:
    out = hermitize(out)
    p = float(np.trace(out).real)
    if p <= ZERO_PROB:
        raise ZeroProbabilityError(f"channel output has probability {p:.3g}")
    return DensityMatrix(out / p), p


def _lift(ch: KrausChannel, side: str, dims: tuple[int, int]) -> np.ndarray:
    n1, n2 = dims
    if side == "first":
        if ch.dim != n1:
            raise DimensionError(f"channel dim {ch.dim} does not match first factor {n1}")
        return np.stack([np.kron(k, np.eye(n2)) for k in ch.kraus])
    if side == "second":
        if ch.dim != n2:
            raise DimensionError(f"channel dim {ch.dim} does not match second factor {n2}")
        return np.stack([np.kron(np.eye(n1), k) for k in ch.kraus])
    raise ValueError(f"side must be 'first' or 'second', got {side!r}")


def apply_unnormalized_one_sided(ch: KrausChannel, rho, side: str, dims: tuple[int, int]) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (dims[0] * dims[1],) * 2:
        raise DimensionError(f"state shape {rho.shape} does not match dims {dims}")
    ks = _lift(ch, side, dims)
    return np.einsum("kij,jl,kml->im", ks, rho, ks.conj())


def apply(ch: KrausChannel, rho) -> tuple[DensityMatrix, float]:
    """Apply ``ch`` and renormalize; also return the success probability."""
    rho = as_matrix(rho)
    if rho.shape != (ch.dim, ch.dim):
        raise DimensionError(f"state shape {rho.shape} does not match channel dim {ch.dim}")
    return _normalize(ch(rho))


def apply_one_sided(ch: KrausChannel, rho, side: str, dims: tuple[int, int]) -> tuple[DensityMatrix, float]:
    return _normalize(apply_unnormalized_one_sided(ch, rho, side, dims))


def apply_two_sided(ch1: KrausChannel, ch2: KrausChannel, rho) -> tuple[DensityMatrix, float]:
    dims = (ch1.dim, ch2.dim)
    out = apply_unnormalized_one_sided(ch1, rho, "first", dims)
    out = apply_unnormalized_one_sided(ch2, out, "second", dims)
    return _normalize(out)


def _probability(params, name: str) -> float:
    p = float(np.ravel(params)[0]) if params is not None else None
    if p is None or not 0 <= p <= 1:
        raise ParamError(f"{name} needs a probability in [0, 1], got {params!r}")
    return p


def _require_qubit(dim: int, name: str):
    if dim != 2:
        raise ParamError(f"{name} is defined for dim 2 only, got {dim}")


def standard_channel(name: str, dim: int, params=None) -> KrausChannel:
    """Build a channel from a named family.

    ``params`` is a probability for the noise families, a unitary matrix
    for ``unitary``, and a ket or orthogonal projector for ``projector``.
    """
    if dim < 1:
        raise ParamError(f"dim must be positive, got {dim}")
    eye = np.eye(dim, dtype=complex)
    if name == "identity":
        return KrausChannel(dim, eye[None], "identity")
    if name == "depolarizing":
        p = _probability(params, name)
        if dim == 2:
            ops = [PAULI_X, PAULI_Y, PAULI_Z]
        else:
            ops = [weyl_unitary(dim, j0, j1) for j0 in range(dim) for j1 in range(dim) if (j0, j1) != (0, 0)]
        d2 = dim * dim
        kraus = [np.sqrt(1 - p * (d2 - 1) / d2) * eye] + [np.sqrt(p / d2) * w for w in ops]
        return KrausChannel(dim, np.stack(kraus), f"depolarizing({p:g})")
    if name == "amplitude_damping":
        _require_qubit(dim, name)
        g = _probability(params, name)
        kraus = [[[1, 0], [0, np.sqrt(1 - g)]], [[0, np.sqrt(g)], [0, 0]]]
        return KrausChannel(2, np.array(kraus, dtype=complex), f"amplitude_damping({g:g})")
    if name == "phase_damping":
        _require_qubit(dim, name)
        g = _probability(params, name)
        kraus = [[[1, 0], [0, np.sqrt(1 - g)]], [[0, 0], [0, np.sqrt(g)]]]
        return KrausChannel(2, np.array(kraus, dtype=complex), f"phase_damping({g:g})")
    if name == "unitary":
        if params is None:
            raise ParamError("unitary family needs a matrix")
        u = np.asarray(params, dtype=complex)
        if u.shape != (dim, dim):
            raise ParamError(f"unitary must be {dim}x{dim}, got {u.shape}")
        if np.abs(u.conj().T @ u - eye).max() > CP_TOL:
            raise UnitarityError("matrix is not unitary")
        return KrausChannel(dim, u[None], "unitary")
    if name == "projector":
        if params is None:
            raise ParamError("projector family needs a ket or a projector matrix")
        m = np.asarray(params, dtype=complex)
        if m.ndim == 1:
            if m.shape != (dim,) or np.linalg.norm(m) == 0:
                raise ParamError(f"projector ket must be a nonzero length-{dim} vector")
            m = m / np.linalg.norm(m)
            m = np.outer(m, m.conj())
        if m.shape != (dim, dim):
            raise ParamError(f"projector must be {dim}x{dim}, got {m.shape}")
        if np.abs(m - m.conj().T).max() > CP_TOL or np.abs(m @ m - m).max() > CP_TOL:
            raise ParamError("matrix is not an orthogonal projector")
        return KrausChannel(dim, m[None], "projector")
    raise ParamError(f"unknown channel family {name!r}; expected one of {FAMILIES}")


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry from QR of a complex Ginibre matrix (phase-fixed)."""
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_channel(dim: int, env_dim: int, seed: int) -> KrausChannel:
    """Trace-preserving channel with ``env_dim`` Kraus operators.

    Uses ``numpy.random.default_rng(seed)`` (PCG64): a single
    ``(env_dim*dim, dim)`` complex Gaussian block, real parts drawn before
    imaginary parts, orthonormalized by QR. Kraus operator ``i`` is row
    block ``i`` of the isometry.
    """
    if dim < 2 or env_dim < 1:
        raise ParamError(f"need dim >= 2 and env_dim >= 1, got {dim}, {env_dim}")
    v = haar_isometry(env_dim * dim, dim, np.random.default_rng(seed))
    return KrausChannel(dim, v.reshape(env_dim, dim, dim), f"random(dim={dim}, env={env_dim}, seed={seed})")


def random_subchannel(dim: int, env_dim: int, seed: int) -> KrausChannel:
    """Trace-decreasing channel: a random channel with one Kraus branch discarded.

    Models post-selection on an environment outcome.
    """
    full = random_channel(dim, env_dim + 1, seed)
    return KrausChannel(dim, full.kraus[:-1], f"random_sub(dim={dim}, env={env_dim}, seed={seed})")
