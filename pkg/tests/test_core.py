import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lxeb.core import (
    AliasTable,
    CircuitInstance,
    Statevector,
    apply_two_qubit_gate,
    bitstring,
    full_distribution,
    new_zero_state,
    run_circuit,
    sample_outcomes,
    OutputDistribution,
)
from lxeb.ensembles import EnsembleSpec, build_brickwork, sample_haar_unitary
from lxeb.errors import CapacityError
from lxeb.seeding import SeedPlan

SWAP = np.eye(4)[[0, 2, 1, 3]].astype(complex)


def dense_two_qubit(gate, q, n):
    """Independent route: embed the gate as a full 2^n x 2^n matrix with kron."""
    high = np.eye(2 ** (n - q - 2))
    low = np.eye(2**q)
    return np.kron(np.kron(high, gate), low)


def test_zero_state():
    s = new_zero_state(1)
    assert np.array_equal(s.amplitudes, [1, 0])
    s = new_zero_state(3)
    assert s.amplitudes[0] == 1 and not s.amplitudes[1:].any()


def test_capacity_error_mentions_memory():
    with pytest.raises(CapacityError, match="bytes"):
        new_zero_state(27)
    with pytest.raises(CapacityError):
        new_zero_state(0)
    assert new_zero_state(4, max_qubits=4).n == 4


def test_statevector_length_checked():
    with pytest.raises(ValueError):
        Statevector(3, np.zeros(7, complex))


def test_identity_gate_leaves_state_bitwise(rng):
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    s = Statevector(4, v / np.linalg.norm(v))
    before = s.amplitudes.copy()
    apply_two_qubit_gate(s, np.eye(4), 1)
    assert np.array_equal(before, s.amplitudes)


def test_swap_moves_01_to_10():
    s = new_zero_state(2)
    s.amplitudes[:] = 0
    s.amplitudes[1] = 1
    apply_two_qubit_gate(s, SWAP, 0)
    assert np.array_equal(s.amplitudes, [0, 0, 1, 0])


def test_gate_index_orders_high_bit_as_upper_wire():
    # X on qubit q+1 only: kron(X, I) in the (q+1, q) ordering
    x_hi = np.kron([[0, 1], [1, 0]], np.eye(2))
    s = new_zero_state(3)
    apply_two_qubit_gate(s, x_hi, 1)
    assert np.argmax(np.abs(s.amplitudes)) == 0b100


@pytest.mark.parametrize("n,q", [(2, 0), (3, 1), (5, 0), (5, 2), (5, 3), (6, 4)])
def test_kernel_matches_dense_kron(rng, n, q):
    g = sample_haar_unitary(4, rng)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    v /= np.linalg.norm(v)
    s = Statevector(n, v.copy())
    apply_two_qubit_gate(s, g, q)
    np.testing.assert_allclose(s.amplitudes, dense_two_qubit(g, q, n) @ v, atol=1e-13)


def test_gate_errors():
    s = new_zero_state(3)
    with pytest.raises(ValueError):
        apply_two_qubit_gate(s, np.eye(4), 2)
    with pytest.raises(ValueError):
        apply_two_qubit_gate(s, np.eye(4), -1)
    with pytest.raises(ValueError):
        apply_two_qubit_gate(s, np.eye(2), 0)


def test_haar_gate_preserves_norm(rng):
    s = new_zero_state(6)
    for i in range(50):
        apply_two_qubit_gate(s, sample_haar_unitary(4, rng), i % 5)
        assert abs(s.norm() - 1) <= 1e-12


def test_run_circuit_trivial_cases():
    assert np.array_equal(run_circuit(CircuitInstance(4, [])).amplitudes, new_zero_state(4).amplitudes)
    spec = EnsembleSpec(kind="identity", n=6, depth=9)
    s = run_circuit(build_brickwork(spec, SeedPlan(1)))
    assert np.array_equal(s.amplitudes, new_zero_state(6).amplitudes)


def test_single_haar_gate_distribution_normalised():
    c = build_brickwork(EnsembleSpec(n=2, depth=1), SeedPlan(3))
    p = full_distribution(run_circuit(c)).probs
    assert abs(p.sum() - 1) <= 1e-10 and (p >= 0).all()


def test_norm_preserved_deep_circuit():
    c = build_brickwork(EnsembleSpec(n=12, depth=200), SeedPlan(9))
    assert abs(run_circuit(c).norm() - 1) <= 1e-10


def test_layer_order_within_layer_irrelevant():
    c = build_brickwork(EnsembleSpec(n=10, depth=8), SeedPlan(4))
    reversed_layers = CircuitInstance(c.n, [list(reversed(layer)) for layer in c.layers])
    a = full_distribution(run_circuit(c)).probs
    b = full_distribution(run_circuit(reversed_layers)).probs
    assert np.max(np.abs(a - b)) <= 1e-12


def test_run_circuit_deterministic():
    c = build_brickwork(EnsembleSpec(n=8, depth=10), SeedPlan(5))
    assert np.array_equal(run_circuit(c).amplitudes, run_circuit(c).amplitudes)


def test_circuit_validation():
    bad = CircuitInstance(4, [[(0, np.eye(4)), (1, np.eye(4))]])
    with pytest.raises(ValueError, match="overlap"):
        bad.validate()
    build_brickwork(EnsembleSpec(n=8, depth=5), SeedPlan(1)).validate()


def test_full_distribution_examples():
    assert np.array_equal(full_distribution(new_zero_state(3)).probs, [1, 0, 0, 0, 0, 0, 0, 0])
    n = 5
    s = Statevector(n, np.full(2**n, 2 ** (-n / 2), dtype=complex))
    np.testing.assert_allclose(full_distribution(s).probs, 1 / 2**n, rtol=1e-15)


def test_sample_basis_state():
    dist = full_distribution(new_zero_state(3))
    out = sample_outcomes(dist, 5, np.random.default_rng(0))
    assert list(out) == [0] * 5
    assert bitstring(out[0], 3) == "000"


def test_sample_requires_positive_k():
    with pytest.raises(ValueError):
        sample_outcomes(full_distribution(new_zero_state(2)), 0, np.random.default_rng(0))


def test_sample_uniform_frequencies():
    dist = OutputDistribution(4, np.full(16, 1 / 16))
    k = 10**6
    counts = np.bincount(sample_outcomes(dist, k, np.random.default_rng(7)), minlength=16)
    sigma = np.sqrt(k * (1 / 16) * (15 / 16))
    assert np.all(np.abs(counts - k / 16) <= 5 * sigma)


def test_sample_skewed_frequencies(rng):
    p = rng.exponential(size=64)
    p /= p.sum()
    k = 400_000
    counts = np.bincount(AliasTable(p).sample(k, np.random.default_rng(11)), minlength=64)
    sigma = np.sqrt(k * p * (1 - p))
    assert np.all(np.abs(counts - k * p) <= 5 * sigma + 1)


def test_sample_reproducible():
    dist = full_distribution(run_circuit(build_brickwork(EnsembleSpec(n=6, depth=6), SeedPlan(2))))
    a = sample_outcomes(dist, 100, np.random.default_rng(99))
    b = sample_outcomes(dist, 100, np.random.default_rng(99))
    assert np.array_equal(a, b)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=40).filter(lambda w: sum(w) > 0))
def test_alias_table_reconstructs_probabilities(weights):
    p = np.array(weights) / sum(weights)
    table = AliasTable(p)
    size = p.size
    recon = table.accept.copy()
    for i in range(size):
        recon[table.alias[i]] += 1 - table.accept[i]
    np.testing.assert_allclose(recon / size, p, atol=1e-12)
