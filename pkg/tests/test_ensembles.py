import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lxeb import clifford
from lxeb.ensembles import (
    EnsembleSpec,
    block_size,
    build_brickwork,
    build_circuit,
    build_coarse_grained,
    required_depth_4design,
    required_depth_coarse,
    required_depth_tdesign,
    sample_clifford_two_qubit,
    sample_haar_orthogonal,
    sample_haar_orthogonal4,
    sample_haar_su4,
    sample_haar_unitary,
)
from lxeb.seeding import SeedPlan

N_MC = 100_000


def within_se(values, target, k=5.0):
    mean = values.mean()
    se = values.std(ddof=1) / np.sqrt(values.size)
    return abs(mean - target) <= k * se


def test_su4_is_unitary(rng):
    for _ in range(200):
        g = sample_haar_su4(rng)
        assert np.max(np.abs(g.conj().T @ g - np.eye(4))) <= 1e-12


def test_orthogonal4_is_real_orthogonal(rng):
    for _ in range(200):
        g = sample_haar_orthogonal4(rng)
        assert np.max(np.abs(g.imag)) <= 1e-12
        assert np.max(np.abs(g.T @ g - np.eye(4))) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4, 8, 16, 64])
def test_haar_unitary_any_dim_unitary(rng, d):
    g = sample_haar_unitary(d, rng)
    assert np.max(np.abs(g.conj().T @ g - np.eye(d))) <= 1e-12


@pytest.mark.parametrize("d", [1, 65])
def test_haar_dimension_range(rng, d):
    with pytest.raises(ValueError):
        sample_haar_unitary(d, rng)


def test_haar_u4_moments():
    g = sample_haar_unitary(4, np.random.default_rng(1), size=N_MC)
    p = np.abs(g[:, 0, 0]) ** 2
    assert within_se(p, 1 / 4)
    assert within_se(p**2, 1 / 10)


@pytest.mark.parametrize("d", [2, 8])
def test_haar_unitary_moments_other_dims(d):
    g = sample_haar_unitary(d, np.random.default_rng(d), size=N_MC)
    p = np.abs(g[:, 0, 0]) ** 2
    assert within_se(p, 1 / d)
    assert within_se(p**2, 2 / (d * (d + 1)))


def test_haar_orthogonal_moments():
    g = sample_haar_orthogonal(4, np.random.default_rng(2), size=N_MC).real
    p = g[:, 0, 0] ** 2
    assert within_se(p, 1 / 4)
    assert within_se(p**2, 1 / 8)


def test_single_and_batched_sampling_agree():
    a = sample_haar_unitary(4, np.random.default_rng(5))
    b = sample_haar_unitary(4, np.random.default_rng(5), size=1)[0]
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_haar_entries_mean_zero():
    # the phase fix matters: raw QR puts a positive real number on R's diagonal,
    # which biases the diagonal of Q; corrected samples have mean-zero entries
    g = sample_haar_unitary(4, np.random.default_rng(8), size=N_MC)
    for sampler_out in (g,):
        entries = sampler_out.reshape(N_MC, 16)
        mean = entries.mean(axis=0)
        se = np.sqrt(np.var(entries.real, axis=0) / N_MC + np.var(entries.imag, axis=0) / N_MC)
        assert np.all(np.abs(mean) <= 5 * se)


def test_orthogonal_isotropy():
    g = sample_haar_orthogonal(4, np.random.default_rng(9), size=N_MC).real.reshape(N_MC, 16)
    se = g.std(axis=0, ddof=1) / np.sqrt(N_MC)
    assert np.all(np.abs(g.mean(axis=0)) <= 5 * se)


def test_clifford_isotropy():
    stream = np.random.default_rng(10)
    n = 20_000
    g = np.array([clifford.clifford_from_index(i) for i in clifford.sample_clifford_index(stream, n)])
    # fix the arbitrary global phase by a random sign so the mean is well defined
    g *= stream.choice([1, -1, 1j, -1j], size=n)[:, None, None]
    entries = g.reshape(n, 16)
    se = np.sqrt(np.var(entries.real, axis=0) / n + np.var(entries.imag, axis=0) / n)
    assert np.all(np.abs(entries.mean(axis=0)) <= 5 * se)


def test_clifford_samples_are_clifford(rng):
    for _ in range(100):
        g = sample_clifford_two_qubit(rng)
        assert np.max(np.abs(g.conj().T @ g - np.eye(4))) <= 1e-12
        for label in ("IX", "XI", "ZI", "IZ"):
            hit = clifford.conjugated_pauli_phase(g, label)
            assert hit is not None
            phase, _ = hit
            assert min(abs(phase - z) for z in (1, -1, 1j, -1j)) < 1e-9


def test_clifford_decomposition_is_the_whole_group():
    keys = {clifford._key(clifford.clifford_from_index(i)) for i in range(clifford.ORDER)}
    assert len(keys) == clifford.ORDER
    gens = [np.kron(clifford._H, np.eye(2)), np.kron(np.eye(2), clifford._S), clifford._CNOT]
    stream = np.random.default_rng(3)
    for i in stream.integers(0, clifford.ORDER, 300):
        g = clifford.clifford_from_index(int(i))
        for h in gens:
            assert clifford._key(h @ g) in keys


def test_clifford_identity_frequency():
    draws = clifford.sample_clifford_index(np.random.default_rng(77), 10**7)
    assert np.allclose(clifford.clifford_from_index(clifford.IDENTITY_INDEX), np.eye(4))
    hits = np.count_nonzero(draws == clifford.IDENTITY_INDEX)
    p = 1 / clifford.ORDER
    assert abs(hits - 10**7 * p) <= 5 * math.sqrt(10**7 * p * (1 - p))


def test_non_clifford_detected():
    t = np.kron(np.diag([1, np.exp(1j * np.pi / 4)]), np.eye(2))
    assert clifford.conjugated_pauli_phase(t, "XI") is None


# -- brickwork ---------------------------------------------------------------

def test_brickwork_depth_zero():
    c = build_brickwork(EnsembleSpec(n=6, depth=0), SeedPlan(1))
    assert c.layers == []


def test_brickwork_n4_depth2():
    c = build_brickwork(EnsembleSpec(n=4, depth=2), SeedPlan(1))
    assert [[q for q, _ in layer] for layer in c.layers] == [[0, 2], [1]]


def test_brickwork_odd_n_rejected():
    with pytest.raises(ValueError):
        build_brickwork(EnsembleSpec(n=5, depth=2), SeedPlan(1))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 10).map(lambda h: 2 * h), st.integers(1, 12))
def test_brickwork_layout_property(n, depth):
    c = build_brickwork(EnsembleSpec(kind="identity", n=n, depth=depth), SeedPlan(0))
    assert c.depth == depth
    for i, layer in enumerate(c.layers):
        qs = [q for q, _ in layer]
        expected = list(range(0, n - 1, 2)) if i % 2 == 0 else list(range(1, n - 2, 2))
        assert qs == expected
    c.validate()


def test_brickwork_deterministic():
    spec = EnsembleSpec(n=8, depth=6)
    a = build_brickwork(spec, SeedPlan(42, 3))
    b = build_brickwork(spec, SeedPlan(42, 3))
    for la, lb in zip(a.layers, b.layers):
        for (qa, ga), (qb, gb) in zip(la, lb):
            assert qa == qb and np.array_equal(ga, gb)
    c = build_brickwork(spec, SeedPlan(42, 4))
    assert not np.array_equal(a.layers[0][0][1], c.layers[0][0][1])


def test_gate_counter_streams_are_position_keyed():
    # gate i of a circuit comes from stream (trial, i), whatever the circuit shape
    plan = SeedPlan(7, 1)
    c = build_brickwork(EnsembleSpec(n=6, depth=3), plan)
    gates = [g for layer in c.layers for _, g in layer]
    for i, g in enumerate(gates):
        np.testing.assert_array_equal(g, sample_haar_su4(plan.gate_stream(i)))


# -- coarse grained ------------------------------------------------------------

def test_block_size_rule():
    # 2 log2(16 * 4 * 16) = 20 -> clamped to n
    assert block_size(16, 4, 2**-4) == 16
    assert block_size(64, 1, 0.5) == 14  # 2 log2(128) = 14
    assert block_size(64, 1, 0.3) == 16  # 2 log2(213.3) = 15.47 -> 16 -> even
    assert block_size(2, 1, 0.9) == 2


@pytest.mark.parametrize("t,eps", [(0, 0.1), (2, 0.0), (2, 1.0)])
def test_block_size_errors(t, eps):
    with pytest.raises(ValueError):
        block_size(8, t, eps)


def test_coarse_zero_depth_is_identity():
    c = build_coarse_grained(12, 2, 0.25, 0, SeedPlan(1))
    assert c.num_gates() == 0


def _block_of(q, edges):
    return max(i for i, e in enumerate(edges) if e <= q)


@pytest.mark.parametrize("n,t,eps,bd", [(16, 1, 0.5, 6), (20, 1, 0.5, 4), (23, 1, 0.25, 8), (64, 1, 0.5, 10)])
def test_coarse_gates_stay_inside_blocks(n, t, eps, bd):
    xi = block_size(n, t, eps)
    c = build_coarse_grained(n, t, eps, bd, SeedPlan(3))
    c.validate()
    stage = bd // 2
    for i, layer in enumerate(c.layers):
        offset = 0 if i < stage else xi // 2
        edges = sorted({0, *range(offset, n, xi)})
        for q, _ in layer:
            assert _block_of(q, edges) == _block_of(q + 1, edges)
    assert c.depth == bd


def test_coarse_odd_block_depth_rejected():
    with pytest.raises(ValueError):
        build_coarse_grained(8, 1, 0.5, 3, SeedPlan(1))


def test_build_circuit_dispatch():
    spec = EnsembleSpec(kind="haar-unitary", architecture="coarse-grained", n=12, depth=4,
                        t=1, epsilon=0.5, block_depth=4)
    assert build_circuit(spec, SeedPlan(1)).depth == 4


# -- design depths -------------------------------------------------------------

def test_4design_depth_examples():
    assert required_depth_4design(16, 2.0**-80) == 2304 == 144 * 16
    assert required_depth_4design(8, 2.0**-40) == 1152
    with pytest.raises(ValueError):
        required_depth_4design(8, 1.0)


def test_tdesign_depth():
    n = 7
    assert required_depth_tdesign(n, 2, 2.0**-10) == 2 * n * 2 + 10
    # independent high-precision evaluation
    exact = mpmath.log(10, 2) ** 7 * (2 * 10 * 10 + 100)
    assert required_depth_tdesign(10, 10, 2.0**-100) == int(mpmath.ceil(exact)) == 1339223
    with pytest.raises(ValueError):
        required_depth_tdesign(10, 10, 0.1, constant=0)


def test_coarse_depth():
    assert required_depth_coarse(16, 2, 2.0**-4) == 2 * 9  # t log2(nt/eps) = 2 * log2(512)
    exact = mpmath.log(4, 2) ** 7 * 4 * mpmath.log(16 * 4 * 16, 2)
    assert required_depth_coarse(16, 4, 2.0**-4) == int(mpmath.ceil(exact)) == 5120
    with pytest.raises(ValueError):
        required_depth_coarse(16, 4, 0.1, constant=0)


def test_ensemble_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(kind="bogus")
    with pytest.raises(ValueError):
        EnsembleSpec(depth=-1)
    with pytest.raises(ValueError):
        EnsembleSpec(architecture="coarse-grained", n=8)
