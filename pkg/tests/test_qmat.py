import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from oracles import SX, SY, SZ, I, cnot as cnot_oracle
from zenosim import qmat
from zenosim.qmat import KET0, KET1, KET_PLUS, projector

angles = st.floats(-4 * np.pi, 4 * np.pi, allow_nan=False)
labels = st.sampled_from(["X", "Y", "Z", "XZ", "ZZ", "YX", "IZ", "XYZ", "ZIX"])


def test_kron_examples():
    assert_allclose(qmat.kron(qmat.I2, qmat.I2), np.eye(4))
    assert_allclose(np.diag(qmat.kron(qmat.Z, qmat.Z)), [1, -1, -1, 1])
    xz = qmat.kron(qmat.X, qmat.Z)
    assert_allclose(xz @ xz, np.eye(4))


def test_kron_overflow():
    with pytest.raises(qmat.DimensionError):
        qmat.kron(np.eye(4), np.eye(4))
    with pytest.raises(qmat.DimensionError):
        qmat.kron(np.eye(3), np.eye(2))


def test_ad_examples():
    rho = projector(KET_PLUS)
    assert_allclose(qmat.ad(np.eye(2), rho), rho)
    assert_allclose(qmat.ad(qmat.X, projector(KET0)), projector(KET1))
    u = qmat.pauli_exp("Y", np.pi / 2)
    assert_allclose(qmat.ad(u, projector(KET0)), projector(KET_PLUS), atol=1e-15)


def test_ad_dim_mismatch():
    with pytest.raises(qmat.DimensionError):
        qmat.ad(np.eye(4), np.eye(2) / 2)


def test_ptrace_examples():
    rho = qmat.kron(projector(KET_PLUS), projector(KET0))
    assert_allclose(qmat.ptrace(rho, [0]), projector(KET_PLUS))
    bell = projector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert_allclose(qmat.ptrace(bell, [0]), np.eye(2) / 2)


def test_ptrace_three_qubits(rng):
    a, b, c = (qmat.random_density(1, rng) for _ in range(3))
    abc = qmat.kron_all(a, b, c)
    assert_allclose(qmat.ptrace(abc, [0]), a, atol=1e-14)
    assert_allclose(qmat.ptrace(abc, [1]), b, atol=1e-14)
    assert_allclose(qmat.ptrace(abc, [0, 2]), np.kron(a, c), atol=1e-14)
    assert_allclose(qmat.ptrace(abc, [1, 2]), np.kron(b, c), atol=1e-14)


def test_ptrace_invalid():
    with pytest.raises(ValueError):
        qmat.ptrace(np.eye(4) / 4, [2])
    with pytest.raises(qmat.DimensionError):
        qmat.ptrace(np.eye(2) / 2, [0])


def test_ptrace_of_entangler_output():
    # XZ entangler with J tau_z = pi on |+><+| (x) I/2: S keeps x-Bloch 1
    u = qmat.pauli_exp("XZ", np.pi / 2)
    rho = qmat.ad(u, qmat.kron(projector(KET_PLUS), np.eye(2) / 2))
    assert_allclose(qmat.bloch(qmat.ptrace(rho, [0])), (1, 0, 0), atol=1e-15)


def test_pauli_exp_examples():
    assert_allclose(qmat.pauli_exp("Z", 0.0), np.eye(2))
    jt = 0.37
    phases = np.diag(qmat.pauli_exp("ZZ", jt / 2))
    e = np.exp(-1j * jt / 4)
    assert_allclose(phases, [e, e.conjugate(), e.conjugate(), e])
    assert_allclose(qmat.pauli_exp("X", np.pi), -1j * SX, atol=1e-15)


@given(labels, angles)
def test_pauli_exp_matches_expm(label, angle):
    from scipy.linalg import expm

    mats = {"I": I, "X": SX, "Y": SY, "Z": SZ}
    p = mats[label[0]]
    for c in label[1:]:
        p = np.kron(p, mats[c])
    assert_allclose(qmat.pauli_exp(label, angle), expm(-0.5j * angle * p), atol=1e-12)


@given(labels, angles, angles)
def test_pauli_exp_group_law(label, a, b):
    lhs = qmat.pauli_exp(label, a) @ qmat.pauli_exp(label, b)
    assert np.max(np.abs(lhs - qmat.pauli_exp(label, a + b))) < 1e-12


@settings(max_examples=50)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_ad_unitary_preserves_trace(n, seed):
    rng = np.random.default_rng(seed)
    rho = qmat.random_density(n, rng)
    u = qmat.random_unitary(n, rng)
    out = qmat.ad(u, rho)
    assert abs(np.trace(out) - 1) < 1e-10
    assert qmat.hermiticity_error(out) < 1e-10


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_ptrace_product(seed):
    rng = np.random.default_rng(seed)
    a = qmat.random_density(1, rng)
    b = qmat.random_density(2, rng)
    assert np.max(np.abs(qmat.ptrace(qmat.kron(a, b), [0]) - a)) < 1e-14


@given(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
)
def test_bloch_roundtrip(x, y, z):
    assert_allclose(qmat.bloch(qmat.from_bloch(x, y, z)), (x, y, z), atol=1e-12)


def test_bloch_examples():
    assert_allclose(qmat.bloch(projector(KET_PLUS)), (1, 0, 0), atol=1e-15)
    assert_allclose(qmat.bloch(projector(KET0)), (0, 0, 1))
    assert_allclose(qmat.bloch(np.eye(2) / 2), (0, 0, 0))


def test_expect_examples():
    sx0 = qmat.kron(qmat.X, qmat.I2)
    rho = qmat.kron(projector(KET_PLUS), np.eye(2) / 2)
    assert qmat.expect(sx0, rho) == pytest.approx(1)
    assert qmat.expect(qmat.Z, np.eye(2) / 2) == 0


def test_expect_after_free_evolution():
    from oracles import u_coupling

    j, t = 1.35, 0.8
    rho = qmat.kron(projector(KET_PLUS), np.eye(2) / 2)
    u = u_coupling(j, t)
    out = u @ rho @ u.conj().T
    val = qmat.expect(qmat.kron(qmat.X, qmat.I2), out)
    assert val.real == pytest.approx(np.cos(j * t / 2), abs=1e-12)


@pytest.mark.parametrize("control,target,n", [(0, 1, 2), (1, 0, 2), (2, 0, 3), (0, 2, 3), (1, 2, 3)])
def test_cnot_matches_permutation(control, target, n):
    assert_allclose(qmat.cnot(control, target, n), cnot_oracle(control, target, n))


def test_check_density():
    qmat.check_density(np.eye(4) / 4, positivity=True)
    with pytest.raises(qmat.InvalidStateError):
        qmat.check_density(np.diag([1.0, 0.0]) + 1e-6j * qmat.Y.conj())
    with pytest.raises(qmat.InvalidStateError):
        qmat.check_density(np.eye(2))
    with pytest.raises(qmat.InvalidStateError):
        qmat.check_density(np.diag([1.5, -0.5]), positivity=True)


def test_fidelity(rng):
    a = qmat.random_density(2, rng)
    assert qmat.fidelity(a, a) == pytest.approx(1, abs=1e-7)
    psi = projector(KET_PLUS)
    assert qmat.fidelity(psi, np.eye(2) / 2) == pytest.approx(0.5)
    assert qmat.fidelity(psi, projector(KET0)) == pytest.approx(0.5)
    # commuting mixed states: (sum sqrt(p q))^2
    p, q = np.diag([0.7, 0.3]), np.diag([0.2, 0.8])
    assert qmat.fidelity(p, q) == pytest.approx((np.sqrt(0.14) + np.sqrt(0.24)) ** 2)


@given(st.floats(-3, 3), st.floats(-3, 3), st.sampled_from([("XI", "ZZ"), ("IY", "ZZ"), ("XZ", "YI"), ("Z", "X")]))
def test_anticommuting_exp_matches_expm(a, b, pair):
    from scipy.linalg import expm

    p, q = pair
    gen = a * qmat.pauli(p) + b * qmat.pauli(q)
    assert_allclose(qmat.anticommuting_exp(a, p, b, q), expm(-1j * gen), atol=1e-12)


def test_anticommuting_exp_rejects_commuting():
    with pytest.raises(ValueError):
        qmat.anticommuting_exp(1.0, "ZI", 1.0, "ZZ")
