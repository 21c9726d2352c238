import numpy as np
import pytest

from probe_channel.channels import apply, apply_two_sided, random_channel, random_subchannel, standard_channel
from probe_channel.errors import DimensionError, ZeroProbabilityError
from probe_channel.linalg import DensityMatrix, random_density_matrix, trace_distance
from probe_channel.probe import maximally_entangled_probe, probe_from_matrix, random_probe
from probe_channel.reconstruct import (
    ProbeOutput,
    Source,
    apply_choi,
    choi_from_probe_output,
    eq4_literal,
    exact_probe_output,
    normalization_bipartite,
    normalization_single,
    reconstruct_bipartite,
    reconstruct_composite,
    reconstruct_single,
    reconstruct_single_choi,
    reconstruct_single_max_entangled,
)
from probe_channel.tomography import tomograph

from conftest import ket

PLUS = ket(1, 1)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def omega_projector(n):
    v = np.eye(n).reshape(-1)
    return np.outer(v, v)


def test_choi_of_identity():
    po, _ = exact_probe_output(standard_channel("identity", 2), maximally_entangled_probe(2))
    j = choi_from_probe_output(po)
    assert np.abs(j - omega_projector(2)).max() < 1e-14
    assert np.trace(j).real == pytest.approx(2)


@pytest.mark.parametrize("side", ["first", "second"])
@pytest.mark.parametrize("seed", range(5))
def test_choi_is_probe_independent(side, seed):
    po, _ = exact_probe_output(standard_channel("identity", 3), random_probe(3, seed), side)
    assert np.abs(choi_from_probe_output(po) - omega_projector(3)).max() < 1e-10


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("side", ["first", "second"])
def test_choi_of_depolarizing(dim, side):
    p = 0.35
    ch = standard_channel("depolarizing", dim, p)
    expected = (1 - p) * omega_projector(dim) + p / dim * np.eye(dim * dim)
    # cross-check the closed form against the Kraus-built Choi matrix
    assert np.abs(ch.choi() - expected).max() < 1e-14
    po, _ = exact_probe_output(ch, random_probe(dim, 4), side)
    assert np.abs(choi_from_probe_output(po) - expected).max() < 1e-10


def test_choi_of_subchannel_is_scaled_by_probe_probability():
    ch = random_subchannel(3, 2, 9)
    po, p_iii = exact_probe_output(ch, random_probe(3, 2))
    assert np.abs(choi_from_probe_output(po) - ch.choi() / p_iii).max() < 1e-10


def test_apply_choi_examples(rng):
    rho = random_density_matrix(3, rng)
    out, scale = apply_choi(standard_channel("identity", 3).choi(), rho)
    assert np.abs(out.matrix - rho.matrix).max() < 1e-14 and scale == pytest.approx(1)
    out, scale = apply_choi(standard_channel("depolarizing", 3, 1.0).choi(), rho)
    assert np.abs(out.matrix - np.eye(3) / 3).max() < 1e-14 and scale == pytest.approx(1)
    proj = standard_channel("projector", 2, [1, 0])
    out, scale = apply_choi(proj.choi(), PLUS)
    oracle, p = apply(proj, PLUS)
    assert np.abs(out.matrix - oracle.matrix).max() < 1e-15
    assert scale == pytest.approx(p) == pytest.approx(0.5)


def test_apply_choi_rejects_non_psd():
    with pytest.raises(ValueError):
        apply_choi(-omega_projector(2), np.eye(2) / 2)


@pytest.mark.parametrize("seed", range(5))
def test_identity_reproduces_input(seed):
    po, _ = exact_probe_output(standard_channel("identity", 2), random_probe(2, seed))
    out = reconstruct_single(PLUS, po)
    assert np.abs(out.matrix - PLUS.matrix).max() < 1e-12


def test_amplitude_damping_excited_state():
    po, _ = exact_probe_output(standard_channel("amplitude_damping", 2, 0.3), maximally_entangled_probe(2))
    out = reconstruct_single(ket(0, 1), po)
    assert np.abs(out.matrix - np.diag([0.3, 0.7])).max() < 1e-14


def test_random_instance_dim3():
    ch = random_channel(3, 3, 7)
    rho0 = random_density_matrix(3, np.random.default_rng(13))
    po, _ = exact_probe_output(ch, random_probe(3, 11))
    assert trace_distance(reconstruct_single(rho0, po), apply(ch, rho0)[0]) <= 1e-10


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("seed", range(8))
def test_double_sum_matches_choi_path(dim, seed):
    rng = np.random.default_rng(seed)
    ch = random_subchannel(dim, 2, seed) if seed % 2 else random_channel(dim, 3, seed)
    rho0 = random_density_matrix(dim, rng)
    po, _ = exact_probe_output(ch, random_probe(dim, seed + 100))
    a, b = reconstruct_single(rho0, po), reconstruct_single_choi(rho0, po)
    assert trace_distance(a, b) <= 1e-10
    assert trace_distance(a, apply(ch, rho0)[0]) <= 1e-10


@pytest.mark.parametrize("dim", [2, 3])
def test_probe_invariance(dim, rng):
    ch = random_subchannel(dim, 2, 21)
    rho0 = random_density_matrix(dim, rng)
    outs = [reconstruct_single(rho0, exact_probe_output(ch, random_probe(dim, s))[0]) for s in (1, 2, 3)]
    for o in outs[1:]:
        assert trace_distance(outs[0], o) <= 1e-9


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_max_entangled_shortcut(dim, rng):
    ch = random_channel(dim, 2, dim)
    rho0 = random_density_matrix(dim, rng)
    po, _ = exact_probe_output(ch, probe_from_matrix(np.eye(dim) / np.sqrt(dim)))
    a = reconstruct_single_max_entangled(rho0, po.rho_out)
    b = reconstruct_single(rho0, po)
    assert np.abs(a.matrix - b.matrix).max() < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_linearity_for_trace_preserving(seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(3, 2, seed)
    po, _ = exact_probe_output(ch, random_probe(3, seed))
    ra, rb = random_density_matrix(3, rng), random_density_matrix(3, rng)
    alpha = rng.uniform()
    mix = DensityMatrix(alpha * ra.matrix + (1 - alpha) * rb.matrix)
    lhs = reconstruct_single(mix, po).matrix
    rhs = alpha * reconstruct_single(ra, po).matrix + (1 - alpha) * reconstruct_single(rb, po).matrix
    assert np.abs(lhs - rhs).max() < 1e-10


def test_bipartite_identity(rng):
    ident = standard_channel("identity", 2)
    rho0 = random_density_matrix(4, rng)
    po1, _ = exact_probe_output(ident, random_probe(2, 1), "first")
    po2, _ = exact_probe_output(ident, random_probe(2, 2), "second")
    for f in (reconstruct_bipartite, eq4_literal):
        assert np.abs(f(rho0, po1, po2).matrix - rho0.matrix).max() < 1e-12


def test_bipartite_depolarize_first_half_of_bell_state():
    phi0 = ket(1, 0, 0, 1)
    dep, ident = standard_channel("depolarizing", 2, 1.0), standard_channel("identity", 2)
    po1, _ = exact_probe_output(dep, random_probe(2, 5), "first")
    po2, _ = exact_probe_output(ident, random_probe(2, 6), "second")
    oracle, _ = apply_two_sided(dep, ident, phi0)
    assert np.abs(oracle.matrix - np.eye(4) / 4).max() < 1e-15
    for f in (reconstruct_bipartite, eq4_literal):
        assert np.abs(f(phi0, po1, po2).matrix - np.eye(4) / 4).max() < 1e-12


def test_bipartite_random_instance():
    ch1, ch2 = random_channel(2, 2, 3), random_channel(2, 3, 5)
    rho0 = random_density_matrix(4, np.random.default_rng(23))
    po1, _ = exact_probe_output(ch1, random_probe(2, 17), "first")
    po2, _ = exact_probe_output(ch2, random_probe(2, 19), "second")
    oracle, _ = apply_two_sided(ch1, ch2, rho0)
    choi_path = reconstruct_bipartite(rho0, po1, po2)
    literal = eq4_literal(rho0, po1, po2)
    assert trace_distance(choi_path, oracle) <= 1e-10
    assert trace_distance(literal, choi_path) <= 1e-10


def test_bipartite_unequal_dims(rng):
    ch1, ch2 = random_subchannel(2, 2, 1), random_channel(3, 2, 2)
    rho0 = random_density_matrix(6, rng)
    po1, _ = exact_probe_output(ch1, random_probe(2, 3), "first")
    po2, _ = exact_probe_output(ch2, random_probe(3, 4), "second")
    assert trace_distance(reconstruct_bipartite(rho0, po1, po2), apply_two_sided(ch1, ch2, rho0)[0]) <= 1e-10
    with pytest.raises(DimensionError):
        eq4_literal(rho0, po1, po2)


def test_bipartite_side_check(rng):
    ident = standard_channel("identity", 2)
    po, _ = exact_probe_output(ident, random_probe(2, 1), "first")
    with pytest.raises(ValueError):
        reconstruct_bipartite(random_density_matrix(4, rng), po, po)


def test_composite_cnot():
    ch = standard_channel("unitary", 4, CNOT)
    po, _ = exact_probe_output(ch, maximally_entangled_probe(4))
    plus0 = DensityMatrix.from_ket(np.kron([1, 1], [1, 0]))
    out = reconstruct_composite(plus0, po, (2, 2))
    bell = ket(1, 0, 0, 1)
    assert trace_distance(out, bell) <= 1e-12


def test_composite_identity_and_random(rng):
    rho0 = random_density_matrix(4, rng)
    po, _ = exact_probe_output(standard_channel("identity", 4), random_probe(4, 1, min_cond=0.05))
    assert np.abs(reconstruct_composite(rho0, po, (2, 2)).matrix - rho0.matrix).max() < 1e-10
    ch = random_subchannel(4, 3, 9)
    po, _ = exact_probe_output(ch, random_probe(4, 2, min_cond=0.05))
    assert trace_distance(reconstruct_composite(rho0, po, (2, 2)), apply(ch, rho0)[0]) <= 1e-10
    with pytest.raises(DimensionError):
        reconstruct_composite(rho0, po, (2, 3))


def test_normalization_reports():
    proj = standard_channel("projector", 2, [1, 0])
    rep = normalization_single(proj, maximally_entangled_probe(2), PLUS)
    assert rep.p_III == pytest.approx(0.5) and rep.p_s == pytest.approx(0.5)
    ad = standard_channel("amplitude_damping", 2, 0.3)
    rep = normalization_bipartite(ad, proj, maximally_entangled_probe(2), maximally_entangled_probe(2), ket(1, 0, 0, 1))
    assert rep.p == pytest.approx(0.5) and rep.p_I == pytest.approx(1) and rep.p_II == pytest.approx(0.5)
    assert set(rep.to_json()) == {"p", "p_I", "p_II"}


def test_zero_probability():
    proj = standard_channel("projector", 2, [1, 0])
    po, _ = exact_probe_output(proj, random_probe(2, 3))
    with pytest.raises(ZeroProbabilityError):
        reconstruct_single(ket(0, 1), po)


def test_dimension_checks(rng):
    po, _ = exact_probe_output(standard_channel("identity", 2), random_probe(2, 3))
    with pytest.raises(DimensionError):
        reconstruct_single(np.eye(3) / 3, po)
    with pytest.raises(DimensionError):
        ProbeOutput(random_probe(3, 1), po.rho_out)


def test_tomography_source_is_repaired():
    ch = standard_channel("amplitude_damping", 2, 0.9)
    probe = random_probe(2, 8, min_cond=0.5)
    po, _ = exact_probe_output(ch, probe)
    rho0 = ket(0.6, 0.8)
    oracle, _ = apply(ch, rho0)
    for seed in range(20):
        est = tomograph(po.rho_out, 300, seed)
        noisy = ProbeOutput(probe, est.estimate, "first", Source("tomography", 300, seed))
        j = choi_from_probe_output(noisy)
        assert np.linalg.eigvalsh(j)[0] >= -1e-12
        out = reconstruct_single(rho0, noisy)  # validated DensityMatrix
        assert trace_distance(out, reconstruct_single_choi(rho0, noisy)) < 1e-10
        raw = reconstruct_single(rho0, noisy, raw=True)
        assert abs(np.trace(raw.matrix) - 1) < 1e-12
        assert trace_distance(out, oracle) < 0.5
