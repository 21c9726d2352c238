"""Predict a channel's output on arbitrary inputs from one probe output.

A channel ``$`` acting on one half of a probe ``|P>`` yields
``R = ($ (x) 1)|P><P| / p``. Because ``(A (x) B)|M> = |A M B^T>`` in matrix
notation, every maximally entangled basis vector satisfies
``|Phi_m> = (Phi_m P^-1 (x) 1)|P>``, and so ``R`` fixes the action of
``$`` on any state:

    out  ~  sum_mn <Phi_m|R|Phi_n> Phi_m P^-1 rho0 (P^-1)^dag Phi_n^dag

Two routes are offered and cross-checked: the double sums above (single
system) and the two-channel analogue (:func:`eq4_literal`), and an
extracted Choi matrix applied by partial trace. Absolute probabilities
are not observable from unit-trace probe data, so every reconstruction
is returned with unit trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bases import weyl_basis
from .channels import KrausChannel, ZERO_PROB, apply_unnormalized_one_sided
from .errors import DimensionError, ZeroProbabilityError
from .linalg import DensityMatrix, as_matrix, clip_to_psd, hermitize, swap_operator
from .probe import ProbeState

SIDES = ("first", "second")


@dataclass(frozen=True)
class Source:
    kind: str = "exact"  # "exact" | "tomography"
    shots: int | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        if self.kind == "exact":
            return {"kind": "exact"}
        return {"kind": self.kind, "shots": self.shots, "seed": self.seed}

    @classmethod
    def from_json(cls, data: dict) -> "Source":
        return cls(data.get("kind", "exact"), data.get("shots"), data.get("seed"))


@dataclass(frozen=True, eq=False)
class ProbeOutput:
    """Normalized output of a probe after a channel acted on one of its halves."""

    probe: ProbeState
    rho_out: DensityMatrix
    side: str = "first"
    source: Source = field(default_factory=Source)

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be 'first' or 'second', got {self.side!r}")
        n = self.probe.dim
        if self.rho_out.dim != n * n:
            raise DimensionError(f"probe output has dim {self.rho_out.dim}, expected {n * n}")

    @property
    def dim(self) -> int:
        return self.probe.dim


@dataclass(frozen=True)
class NormalizationReport:
    """Success probabilities of the underlying processes (oracle mode only)."""

    p: float | None = None
    p_I: float | None = None
    p_II: float | None = None
    p_III: float | None = None
    p_s: float | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def exact_probe_output(ch: KrausChannel, probe: ProbeState, side: str = "first") -> tuple[ProbeOutput, float]:
    """Send ``probe`` through ``ch`` on ``side``; return the output and its probability."""
    n = probe.dim
    proj = probe.density_matrix()
    out = apply_unnormalized_one_sided(ch, proj, side, (n, n))
    out = hermitize(out)
    p = float(np.trace(out).real)
    if p <= ZERO_PROB:
        raise ZeroProbabilityError(f"channel annihilates the probe (p = {p:.3g})")
    return ProbeOutput(probe, DensityMatrix(out / p), side), p


def _matrix_choi_to_probe_choi(po: ProbeOutput, rho_out: np.ndarray) -> np.ndarray:
    n = po.dim
    pinv = po.probe.p_inverse
    if po.side == "first":
        # |P> = (1 (x) P^T)|Omega>
        a = np.kron(np.eye(n), pinv.T)
        return a @ rho_out @ a.conj().T
    # |P> = (P (x) 1)|Omega>; swap so the channel sits on the first factor
    a = np.kron(pinv, np.eye(n))
    s = swap_operator(n)
    return s @ (a @ rho_out @ a.conj().T) @ s


def _project_choi(j: np.ndarray) -> np.ndarray:
    tr = np.trace(j).real
    return clip_to_psd(j)[0] * tr


def choi_from_probe_output(po: ProbeOutput, raw: bool = False) -> np.ndarray:
    """Undo the probe to get the Choi matrix ``($ (x) 1)|Omega><Omega|`` (up to scale).

    The channel is always placed on the first factor, whichever side it
    acted on in the probe. With exact outputs of a trace-preserving channel
    the trace is ``N``; in general it is ``Tr(J_true) / p``. Tomographed
    outputs are projected to PSD (trace kept) unless ``raw`` is set.
    """
    j = hermitize(_matrix_choi_to_probe_choi(po, np.asarray(po.rho_out)))
    if po.source.kind == "tomography" and not raw:
        j = _project_choi(j)
    return j


def _effective_rho_out(po: ProbeOutput, raw: bool) -> np.ndarray:
    """Probe output to feed the double sums; PSD-repaired through its Choi matrix for tomography data."""
    rho = np.asarray(po.rho_out)
    if po.source.kind != "tomography" or raw:
        return rho
    j = choi_from_probe_output(po)
    n = po.dim
    p = po.probe.p_matrix
    if po.side == "first":
        a = np.kron(np.eye(n), p.T)
    else:
        s = swap_operator(n)
        j = s @ j @ s
        a = np.kron(p, np.eye(n))
    return hermitize(a @ j @ a.conj().T)


def _apply_choi_unnormalized(j: np.ndarray, rho: np.ndarray) -> np.ndarray:
    n = rho.shape[0]
    if j.shape != (n * n, n * n):
        raise DimensionError(f"Choi matrix of shape {j.shape} does not act on dim {n}")
    # out = Tr_2[J (1 (x) rho^T)]
    t = j.reshape(n, n, n, n)
    return np.einsum("aibj,ij->ab", t, rho)


def _finish(out: np.ndarray, validate: bool) -> tuple[DensityMatrix, float]:
    out = hermitize(out)
    scale = float(np.trace(out).real)
    if scale <= ZERO_PROB:
        raise ZeroProbabilityError(f"reconstructed output has trace {scale:.3g}")
    return DensityMatrix(out / scale, validate=validate), scale


def apply_choi(j, rho) -> tuple[DensityMatrix, float]:
    """Apply a Choi matrix (channel on the first factor) to ``rho``."""
    j = as_matrix(j)
    herm_err = np.abs(j - j.conj().T).max()
    if herm_err > 1e-9:
        raise ValueError(f"Choi matrix is not Hermitian (deviation {herm_err:.3g})")
    lam_min = np.linalg.eigvalsh(hermitize(j))[0]
    if lam_min < -1e-9:
        raise ValueError(f"Choi matrix is not PSD (eigenvalue {lam_min:.3g})")
    return _finish(_apply_choi_unnormalized(j, as_matrix(rho)), True)


def _check_single(rho0, po: ProbeOutput) -> np.ndarray:
    rho0 = as_matrix(rho0)
    if rho0.shape != (po.dim, po.dim):
        raise DimensionError(f"input of shape {rho0.shape} does not match probe dim {po.dim}")
    return rho0


def reconstruct_single(rho0, po: ProbeOutput, raw: bool = False) -> DensityMatrix:
    """Output of the probed channel on ``rho0`` via the basis double sum."""
    rho0 = _check_single(rho0, po)
    basis = weyl_basis(po.dim)
    r = _effective_rho_out(po, raw)
    v = basis.vectors
    coef = v.conj() @ r @ v.T  # <Phi_m| R |Phi_n>
    t = basis.matrices @ po.probe.p_inverse  # Phi_m P^-1
    out = np.einsum("mn,mij,jk,nlk->il", coef, t, rho0, t.conj(), optimize=True)
    return _finish(out, not raw)[0]


def reconstruct_single_max_entangled(rho0, rho_out) -> DensityMatrix:
    """Shortcut for the maximally entangled probe, where ``P`` drops out entirely."""
    rho_out = as_matrix(rho_out)
    n = as_matrix(rho0).shape[0]
    if rho_out.shape != (n * n, n * n):
        raise DimensionError(f"probe output shape {rho_out.shape} does not match input dim {n}")
    basis = weyl_basis(n)
    v = basis.vectors
    coef = v.conj() @ rho_out @ v.T
    f = basis.matrices
    out = np.einsum("mn,mij,jk,nlk->il", coef, f, as_matrix(rho0), f.conj(), optimize=True)
    return _finish(out, True)[0]


def reconstruct_single_choi(rho0, po: ProbeOutput, raw: bool = False) -> DensityMatrix:
    """Same prediction as :func:`reconstruct_single`, through the Choi matrix."""
    rho0 = _check_single(rho0, po)
    j = choi_from_probe_output(po, raw=raw)
    return _finish(_apply_choi_unnormalized(j, rho0), not raw)[0]


def _check_bipartite(rho0, po1: ProbeOutput, po2: ProbeOutput) -> np.ndarray:
    if po1.side != "first" or po2.side != "second":
        raise ValueError("bipartite reconstruction needs a side-'first' and a side-'second' probe output")
    n1, n2 = po1.dim, po2.dim
    rho0 = as_matrix(rho0)
    if rho0.shape != (n1 * n2, n1 * n2):
        raise DimensionError(f"input of shape {rho0.shape} does not match dims ({n1}, {n2})")
    return rho0


def reconstruct_bipartite(rho0, po1: ProbeOutput, po2: ProbeOutput, raw: bool = False) -> DensityMatrix:
    """Output of ``$1 (x) $2`` on ``rho0`` from one probe output per channel.

    The probes may differ. ``po1`` must come from ``$1`` on the first half
    of its probe and ``po2`` from ``$2`` on the second half.
    """
    rho0 = _check_bipartite(rho0, po1, po2)
    n1, n2 = po1.dim, po2.dim
    j1 = choi_from_probe_output(po1, raw=raw).reshape(n1, n1, n1, n1)
    j2 = choi_from_probe_output(po2, raw=raw).reshape(n2, n2, n2, n2)
    r = rho0.reshape(n1, n2, n1, n2)
    # $(X)_ab = sum_ij J[a,i,b,j] X_ij on each factor
    out = np.einsum("aibj,ckdl,ikjl->acbd", j1, j2, r, optimize=True)
    return _finish(out.reshape(n1 * n2, n1 * n2), not raw)[0]


def eq4_literal(rho0, po1: ProbeOutput, po2: ProbeOutput, raw: bool = False) -> DensityMatrix:
    """Two-channel double sum, written term by term.

        out ~ sum_mn Tr{ S (P2^-1 (x) Phi_m^*) R2 ((P2^dag)^-1 (x) Phi_n^T) S rho0^* }
                      (1 (x) Phi_m^T (P1^T)^-1) R1 (1 (x) (P1^*)^-1 Phi_n^*)

    Reading used: the trace closes after ``S rho0^*``, and the braces pair
    as written. Then ``S (P2^-1 (x) Phi_m^*)(1 (x) L)|P2> = |Phi_m^* L>`` for
    each Kraus operator ``L`` of ``$2``, so the trace equals
    ``<Phi_m|(1 (x) $2)(rho0)|Phi_n>``, while the trailing factors equal
    ``($1 (x) 1)(|Phi_m><Phi_n|)``. This restores the basis expansion of
    ``($1 (x) $2) rho0`` with no reordering needed. ``P1``/``P2`` are the
    probes of ``po1``/``po2``.
    """
    rho0 = _check_bipartite(rho0, po1, po2)
    n = po1.dim
    if po2.dim != n:
        raise DimensionError("the two-channel double sum needs equal local dimensions")
    basis = weyl_basis(n)
    phi = basis.matrices
    eye = np.eye(n)
    s = swap_operator(n)
    r1 = _effective_rho_out(po1, raw)
    r2 = _effective_rho_out(po2, raw)
    p1inv = po1.probe.p_inverse
    p2inv = po2.probe.p_inverse

    a = np.stack([s @ np.kron(p2inv, f.conj()) for f in phi])  # S (P2^-1 (x) Phi_m^*)
    # ((P2^dag)^-1 (x) Phi_n^T) S is a[n]^dag
    coef = np.einsum("mab,bc,ndc,da->mn", a, r2, a.conj(), rho0.conj(), optimize=True)
    o = np.stack([np.kron(eye, f.T @ p1inv.T) for f in phi])  # 1 (x) Phi_m^T (P1^T)^-1
    out = np.einsum("mn,mab,bc,ndc->ad", coef, o, r1, o.conj(), optimize=True)
    return _finish(out, not raw)[0]


def reconstruct_composite(rho0, po: ProbeOutput, dims: tuple[int, int]) -> DensityMatrix:
    """Channel acting jointly on an ``N1 (x) N2`` system, handled as one system of dim ``N1*N2``."""
    n1, n2 = dims
    if po.dim != n1 * n2:
        raise DimensionError(f"probe dim {po.dim} does not equal {n1}*{n2}")
    return reconstruct_single(rho0, po)


def normalization_single(ch: KrausChannel, probe: ProbeState, rho0) -> NormalizationReport:
    """Oracle-mode probabilities for a single-system reconstruction."""
    _, p_iii = exact_probe_output(ch, probe, "first")
    p_s = float(np.trace(ch(as_matrix(rho0))).real)
    return NormalizationReport(p_III=p_iii, p_s=p_s)


def normalization_bipartite(
    ch1: KrausChannel, ch2: KrausChannel, probe1: ProbeState, probe2: ProbeState, rho0
) -> NormalizationReport:
    _, p_i = exact_probe_output(ch1, probe1, "first")
    _, p_ii = exact_probe_output(ch2, probe2, "second")
    dims = (ch1.dim, ch2.dim)
    out = apply_unnormalized_one_sided(ch1, rho0, "first", dims)
    out = apply_unnormalized_one_sided(ch2, out, "second", dims)
    return NormalizationReport(p=float(np.trace(out).real), p_I=p_i, p_II=p_ii)
