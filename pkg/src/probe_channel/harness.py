"""Seeded verification and noise-scaling studies.

Each trial draws its inputs from ``SeedSequence(seed, spawn_key=(label, key, trial))``
so any trial can be reproduced in isolation and results do not depend on
the order trials are run in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import KrausChannel, apply, apply_two_sided, random_channel, random_subchannel, standard_channel
from .linalg import random_density_matrix, trace_distance
from .probe import ProbeState, probe_from_matrix, random_probe
from .reconstruct import (
    ProbeOutput,
    Source,
    eq4_literal,
    exact_probe_output,
    reconstruct_bipartite,
    reconstruct_single,
    reconstruct_single_choi,
    reconstruct_single_max_entangled,
)
from .tomography import tomograph

# fixed substream labels
SINGLE, BIPARTITE, SCALING, SCALING_PROBE, SCALING_TOMO = 1, 2, 3, 4, 5

SINGLE_PATHS = ("single_vs_oracle", "single_choi_vs_oracle", "single_sum_vs_choi", "probe_invariance", "max_entangled_shortcut")
BIPARTITE_PATHS = ("bipartite_vs_oracle", "eq4_literal_vs_oracle", "eq4_literal_vs_choi")


def trial_seeds(seed: int, label: int, key: int, trial: int, count: int = 8) -> list[int]:
    ss = np.random.SeedSequence(seed, spawn_key=(label, key, trial))
    return [int(s) for s in ss.generate_state(count)]


def random_trial_channel(dim: int, seed: int, trace_preserving: bool) -> KrausChannel:
    env_dim = int(np.random.default_rng(seed).integers(1, dim * dim + 1))
    if trace_preserving:
        return random_channel(dim, env_dim, seed)
    return random_subchannel(dim, env_dim, seed)


def random_trial_state(dim: int, seed: int):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, dim + 1))
    return random_density_matrix(dim, rng, rank)


def single_trial(dim: int, seed: int, trial: int) -> dict[str, float]:
    """Trace distances for every single-system path on one random instance."""
    s = trial_seeds(seed, SINGLE, dim, trial)
    ch = random_trial_channel(dim, s[0], trace_preserving=trial % 2 == 0)
    rho0 = random_trial_state(dim, s[1])
    po_a, _ = exact_probe_output(ch, random_probe(dim, s[2]))
    po_b, _ = exact_probe_output(ch, random_probe(dim, s[3]))
    oracle, _ = apply(ch, rho0)
    out_a = reconstruct_single(rho0, po_a)
    out_choi = reconstruct_single_choi(rho0, po_a)
    out_b = reconstruct_single(rho0, po_b)
    po_me, _ = exact_probe_output(ch, probe_from_matrix(np.eye(dim)))
    shortcut = reconstruct_single_max_entangled(rho0, po_me.rho_out)
    return {
        "single_vs_oracle": trace_distance(out_a, oracle),
        "single_choi_vs_oracle": trace_distance(out_choi, oracle),
        "single_sum_vs_choi": trace_distance(out_a, out_choi),
        "probe_invariance": trace_distance(out_a, out_b),
        "max_entangled_shortcut": trace_distance(shortcut, reconstruct_single(rho0, po_me)),
    }


def bipartite_trial(dim: int, seed: int, trial: int) -> dict[str, float]:
    s = trial_seeds(seed, BIPARTITE, dim, trial)
    ch1 = random_trial_channel(dim, s[0], trace_preserving=trial % 2 == 0)
    ch2 = random_trial_channel(dim, s[1], trace_preserving=trial % 3 != 0)
    rho0 = random_trial_state(dim * dim, s[2])
    po1, _ = exact_probe_output(ch1, random_probe(dim, s[3]), "first")
    po2, _ = exact_probe_output(ch2, random_probe(dim, s[4]), "second")
    oracle, _ = apply_two_sided(ch1, ch2, rho0)
    via_choi = reconstruct_bipartite(rho0, po1, po2)
    literal = eq4_literal(rho0, po1, po2)
    return {
        "bipartite_vs_oracle": trace_distance(via_choi, oracle),
        "eq4_literal_vs_oracle": trace_distance(literal, oracle),
        "eq4_literal_vs_choi": trace_distance(literal, via_choi),
    }


@dataclass
class VerifyResult:
    metrics: dict[str, float]
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify(n_trials: int, dims, seed: int, tolerance: float, max_failures: int = 50) -> VerifyResult:
    """Run every reconstruction path on seeded random trials.

    Metrics are ``<path>.max`` / ``<path>.median`` for each dim, plus the
    overall ``max_distance``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    metrics: dict[str, float] = {}
    failures: list[dict] = []
    worst = 0.0
    for dim in dims:
        for trial_fn, paths in ((single_trial, SINGLE_PATHS), (bipartite_trial, BIPARTITE_PATHS)):
            rows = [trial_fn(dim, seed, t) for t in range(n_trials)]
            for path in paths:
                vals = np.array([r[path] for r in rows])
                metrics[f"dim{dim}.{path}.max"] = float(vals.max())
                metrics[f"dim{dim}.{path}.median"] = float(np.median(vals))
                worst = max(worst, float(vals.max()))
                for t in np.flatnonzero(vals > tolerance):
                    if len(failures) < max_failures:
                        failures.append({"dim": dim, "path": path, "trial": int(t), "distance": float(vals[t])})
    metrics["max_distance"] = worst
    return VerifyResult(metrics, failures)


@dataclass
class ScalingRow:
    shots: int | None
    tomo_err_median: float
    recon_err_median: float
    probe_cond: float

    @property
    def error_ratio(self) -> float:
        """End-to-end error per unit of tomography error (noise amplification)."""
        return self.recon_err_median / self.tomo_err_median


def scaling_study(
    shots_list,
    trials: int,
    seed: int,
    channel: KrausChannel | None = None,
    probe: ProbeState | None = None,
    min_cond: float = 0.5,
) -> list[ScalingRow]:
    """Median tomography and end-to-end errors versus shots per setting.

    ``None`` in ``shots_list`` is the exact-expectation row. The probe is
    fixed for the whole study; every (shots, trial) pair gets its own
    tomography substream and the input state depends only on the trial.
    """
    channel = channel or standard_channel("depolarizing", 2, 0.3)
    dim = channel.dim
    if probe is None:
        probe = random_probe(dim, trial_seeds(seed, SCALING_PROBE, dim, 0)[0], min_cond)
    po, _ = exact_probe_output(channel, probe)
    rows = []
    for k, shots in enumerate(shots_list):
        tomo, recon = [], []
        for t in range(trials):
            s = trial_seeds(seed, SCALING, dim, t)
            rho0 = random_trial_state(dim, s[0])
            oracle, _ = apply(channel, rho0)
            tomo_seed = trial_seeds(seed, SCALING_TOMO, k, t)[0]
            est = tomograph(po.rho_out, shots, tomo_seed)
            tomo.append(trace_distance(est.estimate, po.rho_out))
            src = Source("exact") if shots is None else Source("tomography", shots, tomo_seed)
            po_est = ProbeOutput(probe, est.estimate, po.side, src)
            recon.append(trace_distance(reconstruct_single(rho0, po_est), oracle))
        rows.append(ScalingRow(shots, float(np.median(tomo)), float(np.median(recon)), probe.cond))
    return rows


def loglog_slope(rows: list[ScalingRow]) -> float:
    """Least-squares slope of log(median tomography error) against log(shots)."""
    pts = [(r.shots, r.tomo_err_median) for r in rows if r.shots is not None]
    x = np.log10([p[0] for p in pts])
    y = np.log10([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])
