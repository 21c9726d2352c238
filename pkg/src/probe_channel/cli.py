"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter
error, 3 zero-probability (the channel annihilates the state).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .channels import FAMILIES, apply, apply_two_sided, random_channel, random_subchannel, standard_channel
from .errors import ProbeChannelError, ZeroProbabilityError
from .harness import loglog_slope, scaling_study, verify
from .linalg import DensityMatrix, matrix_from_json, random_density_matrix, trace_distance
from .probe import maximally_entangled_probe, random_probe
from .reconstruct import (
    ProbeOutput,
    Source,
    exact_probe_output,
    reconstruct_bipartite,
    reconstruct_composite,
    reconstruct_single,
)
from .tomography import tomograph

SEED_ENV = "PROBE_CHANNEL_SEED"
CSV_HEADER = ("shots", "tomo_err_median", "recon_err_median", "probe_cond")

GATES = {
    "hadamard": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
    "x": np.array([[0, 1], [1, 0]]),
    "z": np.array([[1, 0], [0, -1]]),
    "cnot": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
}

QUBIT_KETS = {
    "0": np.array([1, 0]),
    "1": np.array([0, 1]),
    "+": np.array([1, 1]) / np.sqrt(2),
    "-": np.array([1, -1]) / np.sqrt(2),
}
NAMED_KETS = {"zero": "0", "one": "1", "plus": "+", "minus": "-"}


class UsageError(ProbeChannelError):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict
    seed: int | None
    metrics: dict[str, float] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    diagnostics: list[dict] = field(default_factory=list)

    def __post_init__(self):
        for k, v in self.metrics.items():
            if not math.isfinite(v):
                raise ValueError(f"metric {k} is not finite: {v}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunReport":
        return cls(**data)


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _shots(text: str) -> int | None:
    if text == "exact":
        return None
    try:
        value = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"shots must be an integer or 'exact', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("shots must be positive")
    return value


def _shots_list(text: str) -> list[int | None]:
    return [_shots(x.strip()) for x in text.split(",") if x.strip()]


def _ket(text: str) -> np.ndarray:
    return np.array([complex(x.strip().replace("i", "j")) for x in text.split(",")])


def _pure_state(name: str, dim: int) -> DensityMatrix:
    name = NAMED_KETS.get(name, name)
    if not name or any(c not in QUBIT_KETS for c in name):
        raise UsageError(f"unknown pure state {name!r}; use zero/one/plus/minus or a string over 0,1,+,-")
    if 2 ** len(name) != dim:
        raise UsageError(f"pure state {name!r} has dim {2 ** len(name)}, not {dim}")
    psi = np.array([1.0 + 0j])
    for c in name:
        psi = np.kron(psi, QUBIT_KETS[c])
    return DensityMatrix.from_ket(psi)


def _finish(args, report: RunReport) -> int:
    text = json.dumps(report.to_json(), indent=1)
    if getattr(args, "report", None):
        Path(args.report).write_text(text + "\n")
    print(text)
    return 0


def _write(args, data: dict, report: RunReport):
    io.write_json(args.output, data)
    report.artifacts.append(str(args.output))


def cmd_gen(args) -> int:
    seed = args.seed
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "report")}
    report = RunReport(f"gen {args.kind}", inputs, seed)
    if args.kind == "channel":
        fam = args.family
        if fam == "random":
            ch = random_channel(args.dim, args.env_dim, seed)
        elif fam == "random_sub":
            ch = random_subchannel(args.dim, args.env_dim, seed)
        elif fam in ("depolarizing",):
            ch = standard_channel(fam, args.dim, args.p)
        elif fam in ("amplitude_damping", "phase_damping"):
            ch = standard_channel(fam, args.dim, args.gamma if args.gamma is not None else args.p)
        elif fam == "unitary":
            if args.matrix:
                u = matrix_from_json(io.read_json(args.matrix))
            elif args.gate:
                u = GATES[args.gate]
            else:
                raise UsageError("unitary family needs --gate or --matrix")
            ch = standard_channel(fam, args.dim, u)
            ch = type(ch)(ch.dim, ch.kraus, args.gate or "unitary")
        elif fam == "projector":
            if args.ket is None:
                raise UsageError("projector family needs --ket")
            ch = standard_channel(fam, args.dim, _ket(args.ket))
        else:
            ch = standard_channel(fam, args.dim)
        report.metrics.update(kraus_count=float(ch.rank), trace_preserving=float(ch.trace_preserving))
        _write(args, io.channel_to_json(ch), report)
    elif args.kind == "probe":
        if args.max_entangled:
            ps = maximally_entangled_probe(args.dim)
        else:
            ps = random_probe(args.dim, seed, args.min_cond)
        report.metrics["probe_cond"] = ps.cond
        _write(args, io.probe_to_json(ps), report)
    else:
        if args.pure:
            rho = _pure_state(args.pure, args.dim)
        elif args.basis is not None:
            if not 0 <= args.basis < args.dim:
                raise UsageError(f"basis index {args.basis} out of range")
            rho = DensityMatrix.from_ket(np.eye(args.dim)[args.basis])
        else:
            rho = random_density_matrix(args.dim, np.random.default_rng(seed), args.rank)
        report.metrics["purity"] = rho.purity()
        _write(args, io.state_to_json(rho), report)
    return _finish(args, report)


def cmd_simulate(args) -> int:
    ch = io.channel_from_json(io.read_json(args.channel))
    ps = io.probe_from_json(io.read_json(args.probe))
    inputs = {"channel": args.channel, "probe": args.probe, "side": args.side, "shots": args.shots}
    report = RunReport("simulate", inputs, args.seed)
    t0 = time.perf_counter()
    po, p = exact_probe_output(ch, ps, args.side)
    report.metrics.update(probability=p, probe_cond=ps.cond)
    if args.shots is not None:
        est = tomograph(po.rho_out, args.shots, args.seed)
        report.metrics.update(
            negative_mass=est.negative_mass,
            tomo_err=trace_distance(est.estimate, po.rho_out),
        )
        po = ProbeOutput(ps, est.estimate, args.side, Source("tomography", args.shots, args.seed))
    report.metrics["elapsed_ms"] = 1e3 * (time.perf_counter() - t0)
    _write(args, io.probe_output_to_json(po), report)
    return _finish(args, report)


def cmd_reconstruct(args) -> int:
    pos = [io.probe_output_from_json(io.read_json(f)) for f in args.probe_output]
    rho0 = io.state_from_json(io.read_json(args.input))
    oracles = [io.channel_from_json(io.read_json(f)) for f in args.oracle or []]
    inputs = {
        "probe_output": args.probe_output,
        "input": args.input,
        "mode": args.mode,
        "oracle": args.oracle,
        "raw": args.raw,
    }
    report = RunReport("reconstruct", inputs, None)
    t0 = time.perf_counter()
    if args.mode == "bipartite":
        if len(pos) != 2:
            raise UsageError("bipartite mode needs two probe-output files (side first, then side second)")
        out = reconstruct_bipartite(rho0, pos[0], pos[1], raw=args.raw)
        oracle = apply_two_sided(*oracles, rho0)[0] if len(oracles) == 2 else None
    else:
        if len(pos) != 1:
            raise UsageError(f"{args.mode} mode needs exactly one probe-output file")
        if args.mode == "composite":
            if args.dims is None or len(args.dims) != 2:
                raise UsageError("composite mode needs --dims N1,N2")
            out = reconstruct_composite(rho0, pos[0], tuple(args.dims))
        else:
            out = reconstruct_single(rho0, pos[0], raw=args.raw)
        oracle = apply(oracles[0], rho0)[0] if len(oracles) == 1 else None
    if args.oracle and oracle is None:
        raise UsageError("wrong number of --oracle channel files for this mode")
    report.metrics["purity"] = out.purity()
    if oracle is not None:
        report.metrics["oracle_distance"] = trace_distance(out, oracle)
    report.metrics["elapsed_ms"] = 1e3 * (time.perf_counter() - t0)
    _write(args, io.state_to_json(out), report)
    return _finish(args, report)


def cmd_verify(args) -> int:
    inputs = {"trials": args.trials, "dims": args.dims, "tol": args.tol}
    t0 = time.perf_counter()
    result = verify(args.trials, args.dims, args.seed, args.tol)
    metrics = dict(result.metrics)
    metrics["elapsed_ms"] = 1e3 * (time.perf_counter() - t0)
    report = RunReport("verify", inputs, args.seed, metrics, diagnostics=result.failures)
    _finish(args, report)
    if not result.passed:
        for f in result.failures:
            print(f"FAIL dim={f['dim']} path={f['path']} trial={f['trial']} distance={f['distance']:.3e}", file=sys.stderr)
        return 1
    return 0


def cmd_scaling(args) -> int:
    counts = [s for s in args.shots if s is not None]
    if not args.shots or counts != sorted(counts):
        raise UsageError("--shots must be a nonempty ascending list")
    inputs = {"shots": args.shots, "trials": args.trials, "min_cond": args.min_cond}
    report = RunReport("scaling", inputs, args.seed)
    t0 = time.perf_counter()
    rows = scaling_study(args.shots, args.trials, args.seed, min_cond=args.min_cond)
    for r in rows:
        tag = "exact" if r.shots is None else str(r.shots)
        report.metrics[f"tomo_err_median.{tag}"] = r.tomo_err_median
        report.metrics[f"recon_err_median.{tag}"] = r.recon_err_median
        if r.shots is not None:
            report.metrics[f"error_ratio.{tag}"] = r.error_ratio
    report.metrics["probe_cond"] = rows[0].probe_cond
    if len(counts) >= 2:
        report.metrics["loglog_slope"] = loglog_slope(rows)
    report.metrics["elapsed_ms"] = 1e3 * (time.perf_counter() - t0)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow(["exact" if r.shots is None else r.shots, repr(r.tomo_err_median), repr(r.recon_err_median), repr(r.probe_cond)])
        report.artifacts.append(str(args.csv))
    return _finish(args, report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="probe-channel", description="Predict channel outputs from one tomographed probe state.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--report", help="also write the run report JSON here")
        if seed:
            p.add_argument("--seed", type=int, default=_default_seed(), help=f"RNG seed (default ${SEED_ENV} or 0)")

    g = sub.add_parser("gen", help="generate a channel, probe or state JSON file")
    g.add_argument("kind", choices=("channel", "probe", "state"))
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--family", choices=FAMILIES + ("random", "random_sub"), default="identity")
    g.add_argument("--p", type=float, help="depolarizing probability")
    g.add_argument("--gamma", type=float, help="damping strength")
    g.add_argument("--gate", choices=sorted(GATES), help="named unitary")
    g.add_argument("--matrix", help="JSON matrix file for the unitary family")
    g.add_argument("--ket", help="comma-separated amplitudes for the projector family")
    g.add_argument("--env-dim", type=int, default=2, help="Kraus count for random channels")
    g.add_argument("--min-cond", type=float, default=0.1, help="minimum sigma_min/sigma_max for random probes")
    g.add_argument("--max-entangled", action="store_true", help="maximally entangled probe")
    g.add_argument("--pure", help="zero, one, plus, minus, or a qubit string such as +0")
    g.add_argument("--basis", type=int, help="computational basis state index")
    g.add_argument("--rank", type=int, help="rank of a random mixed state")
    common(g)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("simulate", help="send a probe through a channel, optionally tomographing the output")
    s.add_argument("--channel", required=True)
    s.add_argument("--probe", required=True)
    s.add_argument("--side", choices=("first", "second"), default="first")
    s.add_argument("--shots", type=_shots, default=None, help="shots per setting, or 'exact'")
    s.add_argument("-o", "--output", required=True)
    common(s)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reconstruct", help="predict the channel output for an input state")
    r.add_argument("--probe-output", nargs="+", required=True)
    r.add_argument("--input", required=True)
    r.add_argument("--mode", choices=("single", "bipartite", "composite"), default="single")
    r.add_argument("--dims", type=_int_list, help="N1,N2 for composite mode")
    r.add_argument("--oracle", nargs="+", help="channel file(s) for a direct-application comparison")
    r.add_argument("--raw", action="store_true", help="skip PSD repair of tomographed data")
    r.add_argument("-o", "--output", required=True)
    common(r, seed=False)
    r.set_defaults(func=cmd_reconstruct)

    v = sub.add_parser("verify", help="seeded oracle-equivalence and probe-invariance trials")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--dims", type=_int_list, default=[2, 3])
    v.add_argument("--tol", type=float, default=1e-9)
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("scaling", help="tomography error versus shots")
    c.add_argument("--shots", type=_shots_list, default=[None, 1000, 10000, 100000, 1000000])
    c.add_argument("--trials", type=int, default=50)
    c.add_argument("--min-cond", type=float, default=0.5)
    c.add_argument("--csv")
    common(c)
    c.set_defaults(func=cmd_scaling)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ZeroProbabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ProbeChannelError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
