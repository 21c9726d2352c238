"""JSON file schemas shared by the library and the CLI.

Every matrix is stored as rows of ``[re, im]`` pairs. Python's float repr
round-trips exactly, so reading back a written file is lossless.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import KrausChannel
from .errors import DimensionError
from .linalg import DensityMatrix, matrix_from_json, matrix_to_json
from .probe import ProbeState, probe_from_matrix
from .reconstruct import ProbeOutput, Source
from .tomography import TomographyEstimate


def channel_to_json(ch: KrausChannel) -> dict:
    return {"label": ch.label, "dim": ch.dim, "kraus": [matrix_to_json(k) for k in ch.kraus]}


def channel_from_json(data: dict) -> KrausChannel:
    kraus = np.stack([matrix_from_json(k) for k in data["kraus"]])
    return KrausChannel(int(data["dim"]), kraus, data.get("label", ""))


def probe_to_json(ps: ProbeState) -> dict:
    return {"dim": ps.dim, "p_matrix": matrix_to_json(ps.p_matrix)}


def probe_from_json(data: dict) -> ProbeState:
    ps = probe_from_matrix(matrix_from_json(data["p_matrix"]), normalize=False)
    if ps.dim != int(data["dim"]):
        raise DimensionError(f"probe declares dim {data['dim']} but matrix is {ps.dim}x{ps.dim}")
    return ps


def state_to_json(rho: DensityMatrix) -> dict:
    return {"dim": rho.dim, "matrix": matrix_to_json(rho.matrix)}


def state_from_json(data: dict) -> DensityMatrix:
    rho = DensityMatrix(matrix_from_json(data["matrix"]))
    if rho.dim != int(data["dim"]):
        raise DimensionError(f"state declares dim {data['dim']} but matrix is {rho.dim}x{rho.dim}")
    return rho


def probe_output_to_json(po: ProbeOutput) -> dict:
    return {
        "probe": probe_to_json(po.probe),
        "side": po.side,
        "source": po.source.to_json(),
        "rho_out": matrix_to_json(po.rho_out.matrix),
    }


def probe_output_from_json(data: dict) -> ProbeOutput:
    return ProbeOutput(
        probe=probe_from_json(data["probe"]),
        rho_out=DensityMatrix(matrix_from_json(data["rho_out"])),
        side=data["side"],
        source=Source.from_json(data.get("source", {})),
    )


def tomography_to_json(te: TomographyEstimate) -> dict:
    return {
        "estimate": matrix_to_json(te.estimate.matrix),
        "dim": te.dim,
        "shots": te.shots_per_setting,
        "seed": te.seed,
        "negative_mass": te.negative_mass,
        "settings_count": te.settings_count,
    }


def tomography_from_json(data: dict) -> TomographyEstimate:
    return TomographyEstimate(
        estimate=DensityMatrix(matrix_from_json(data["estimate"])),
        dim=int(data["dim"]),
        shots_per_setting=data["shots"],
        seed=data["seed"],
        negative_mass=float(data["negative_mass"]),
        settings_count=int(data["settings_count"]),
    )


def write_json(path, data: dict):
    Path(path).write_text(json.dumps(data, indent=1) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())
