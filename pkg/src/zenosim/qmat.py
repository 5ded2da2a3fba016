"""Dense complex linear algebra for registers of one to three qubits.

Operators and density matrices are plain ``numpy`` complex arrays of shape
``(d, d)`` with ``d`` in ``{2, 4, 8}``. Qubit 0 is the leftmost tensor factor
(the system spin S), qubit 1 is the environment spin E and qubit 2, when
present, is the measurement pointer.
"""
from __future__ import annotations

from functools import lru_cache, reduce

import numpy as np

DIMS = (2, 4, 8)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)

_validate = False


class DimensionError(ValueError):
    """Operand shapes are incompatible or outside the supported register sizes."""


class InvalidStateError(ValueError):
    """A density matrix failed a Hermiticity, trace or positivity check."""


def set_validation(enabled: bool) -> None:
    """Turn per-step invariant assertions on or off (off by default)."""
    global _validate
    _validate = bool(enabled)


def validation_enabled() -> bool:
    return _validate


def _dim(a: np.ndarray) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    d = a.shape[0]
    if d not in DIMS:
        raise DimensionError(f"dimension {d} not in {DIMS}")
    return d


def n_qubits(a: np.ndarray) -> int:
    return _dim(a).bit_length() - 1


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two register operators; the result is at most 8x8."""
    da, db = _dim(a), _dim(b)
    if da * db > 8:
        raise DimensionError(f"kron of dims {da} and {db} exceeds 8")
    return np.kron(a, b)


def kron_all(*ops: np.ndarray) -> np.ndarray:
    return reduce(kron, ops)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def pauli(label: str) -> np.ndarray:
    """Matrix of a Pauli string such as ``"XZ"`` (qubit 0 first); read-only."""
    return _pauli(label.upper())


@lru_cache(maxsize=None)
def _pauli(label: str) -> np.ndarray:
    if not 1 <= len(label) <= 3 or any(c not in PAULI for c in label):
        raise ValueError(f"invalid Pauli string {label!r}")
    return _frozen(reduce(np.kron, (PAULI[c] for c in label)))


def pauli_exp(label: str, angle: float) -> np.ndarray:
    """``exp(-i angle P / 2)`` for a Pauli string ``P``.

    Uses ``P @ P = I`` so the exponential is exactly
    ``cos(angle/2) I - i sin(angle/2) P``.
    """
    p = pauli(label)
    return np.cos(angle / 2) * np.eye(p.shape[0]) - 1j * np.sin(angle / 2) * p


def anticommuting_exp(a: float, p_label: str, b: float, q_label: str) -> np.ndarray:
    """``exp(-i (a P + b Q))`` for anticommuting Pauli strings ``P`` and ``Q``.

    ``(a P + b Q)^2 = (a^2 + b^2) I``, so the exponential has the same
    cos/sin closed form as a single Pauli string.
    """
    p, q = pauli(p_label), pauli(q_label)
    if p.shape != q.shape or not np.allclose(p @ q, -q @ p):
        raise ValueError(f"{p_label} and {q_label} do not anticommute")
    r = np.hypot(a, b)
    # np.sinc(x) = sin(pi x) / (pi x), finite at r = 0
    return np.cos(r) * np.eye(p.shape[0]) - 1j * np.sinc(r / np.pi) * (a * p + b * q)


def embed(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Place a single-qubit operator on ``qubit`` of an ``n``-qubit register."""
    if not 0 <= qubit < n:
        raise DimensionError(f"qubit {qubit} out of range for {n} qubits")
    factors = [I2] * n
    factors[qubit] = op
    return reduce(np.kron, factors)


def ad(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Adjoint action ``u rho u^dagger``; ``u`` need not be unitary."""
    if _dim(u) != _dim(rho):
        raise DimensionError(f"ad: dims {u.shape} and {rho.shape} differ")
    return u @ rho @ u.conj().T


def expect(obs: np.ndarray, rho: np.ndarray) -> complex:
    if _dim(obs) != _dim(rho):
        raise DimensionError(f"expect: dims {obs.shape} and {rho.shape} differ")
    return complex(np.trace(obs @ rho))


def ptrace(rho: np.ndarray, keep) -> np.ndarray:
    """Reduced density matrix over the qubits listed in ``keep``.

    Kept qubits retain their original relative order.
    """
    n = n_qubits(rho)
    if n < 2:
        raise DimensionError("ptrace needs at least two qubits")
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"invalid qubit selection {keep} for {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    # trace out from the highest index down so axis numbers stay valid
    for q in sorted(drop, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + m)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def bloch(rho: np.ndarray) -> tuple[float, float, float]:
    if _dim(rho) != 2:
        raise DimensionError("bloch needs a single-qubit state")
    return (
        float(np.real(np.trace(X @ rho))),
        float(np.real(np.trace(Y @ rho))),
        float(np.real(np.trace(Z @ rho))),
    )


def from_bloch(x: float, y: float, z: float) -> np.ndarray:
    return (I2 + x * X + y * Y + z * Z) / 2


def projector(ket: np.ndarray) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    return np.outer(ket, ket.conj())


def maximally_mixed(n: int = 1) -> np.ndarray:
    d = 2**n
    return np.eye(d, dtype=complex) / d


@lru_cache(maxsize=None)
def cnot(control: int, target: int, n: int) -> np.ndarray:
    """CNOT on an ``n``-qubit register; read-only."""
    if control == target:
        raise ValueError("control and target must differ")
    p0 = projector(KET0)
    p1 = projector(KET1)
    factors0 = [I2] * n
    factors0[control] = p0
    factors1 = [I2] * n
    factors1[control] = p1
    factors1[target] = X
    return _frozen(reduce(np.kron, factors0) + reduce(np.kron, factors1))


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Reduces to ``<psi|sigma|psi>`` when ``rho`` is pure.
    """
    if _dim(rho) != _dim(sigma):
        raise DimensionError("fidelity: dimension mismatch")
    # pure-state shortcut avoids sqrt noise from zero eigenvalues
    for a, b in ((rho, sigma), (sigma, rho)):
        if abs(np.real(np.trace(a @ a)) - 1) < 1e-12:
            return float(np.real(np.trace(a @ b)))
    s = _psd_sqrt(rho)
    inner = _psd_sqrt(s @ sigma @ s)
    return float(np.real(np.trace(inner)) ** 2)


def hermiticity_error(rho: np.ndarray) -> float:
    return float(np.max(np.abs(rho - rho.conj().T)))


def symmetrize(rho: np.ndarray) -> np.ndarray:
    return (rho + rho.conj().T) / 2


def check_density(rho: np.ndarray, normalized: bool = True, positivity: bool = False) -> np.ndarray:
    """Raise :class:`InvalidStateError` unless ``rho`` is a valid density matrix.

    Positivity is only checked on request since it needs an eigendecomposition.
    """
    _dim(rho)
    herr = hermiticity_error(rho)
    if herr > HERMITIAN_TOL:
        raise InvalidStateError(f"not Hermitian (max |M - M^dag| = {herr:.3g})")
    tr = np.trace(rho)
    if abs(tr.imag) > TRACE_TOL or (normalized and abs(tr.real - 1) > TRACE_TOL):
        raise InvalidStateError(f"trace {tr} is not 1")
    if positivity:
        lo = float(np.min(np.linalg.eigvalsh(symmetrize(rho))))
        if lo < -POSITIVITY_TOL:
            raise InvalidStateError(f"negative eigenvalue {lo:.3g}")
    return rho


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random ``n``-qubit density matrix from a Ginibre ensemble."""
    d = 2**n
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_unitary(n: int, rng: np.random.Generator, depth: int = 6) -> np.ndarray:
    """Random unitary built as a product of Pauli-string rotations."""
    u = np.eye(2**n, dtype=complex)
    for _ in range(depth):
        label = "".join(rng.choice(list("IXYZ"), size=n))
        u = pauli_exp(label, rng.uniform(-np.pi, np.pi)) @ u
    return u
