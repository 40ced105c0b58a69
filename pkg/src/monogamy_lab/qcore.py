"""Dense simulation primitives for small qubit registers.

Conventions used throughout the package:

* Qubit 0 is the most significant bit of a basis-state label, so the basis
  index of ``|b0 b1 ... b_{n-1}>`` is ``sum(b_i << (n-1-i))``.
* ``|0>`` is spin-up (sigma_z eigenvalue +1); the all-spins-down state is the
  last computational basis state.
* All arrays are complex128; values are frozen after construction and safe
  to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jacobi import jacobi_eigh
from .errors import (
    ContractViolationError,
    DimensionMismatchError,
    DomainError,
    InvalidPartitionError,
)

NORM_TOL = 1e-12
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
EIGEN_INPUT_TOL = 1e-10
SPECTRUM_SUM_TOL = 1e-10

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over an n-qubit register."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.n_qubits < 1:
            raise DomainError("a register needs at least one qubit")
        if amps.size != 2**self.n_qubits:
            raise DimensionMismatchError(
                f"expected {2**self.n_qubits} amplitudes, got {amps.size}"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ContractViolationError(f"state norm {nrm!r} deviates from 1")
        object.__setattr__(self, "amplitudes", _freeze(amps.copy()))

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-one operator on a register."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        d = 2**self.n_qubits
        if m.shape != (d, d):
            raise DimensionMismatchError(f"expected a {d}x{d} matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ContractViolationError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ContractViolationError(f"trace {tr!r} deviates from 1")
        w, _ = jacobi_eigh(m, compute_vectors=False)
        if w[-1] < -PSD_TOL:
            raise ContractViolationError(f"negative eigenvalue {w[-1]!r}")
        object.__setattr__(self, "matrix", _freeze(m.copy()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Partition:
    """Split of a register into two disjoint, covering, non-empty subsets."""

    qubits_a: tuple[int, ...]
    qubits_b: tuple[int, ...]

    def __post_init__(self):
        qa = tuple(int(i) for i in self.qubits_a)
        qb = tuple(int(i) for i in self.qubits_b)
        if not qa or not qb:
            raise InvalidPartitionError("both sides of a partition must be non-empty")
        if len(set(qa)) != len(qa) or len(set(qb)) != len(qb) or set(qa) & set(qb):
            raise InvalidPartitionError("partition sides must be disjoint index lists")
        if min(qa + qb) < 0:
            raise InvalidPartitionError("negative qubit index")
        object.__setattr__(self, "qubits_a", qa)
        object.__setattr__(self, "qubits_b", qb)

    @property
    def n_qubits(self) -> int:
        return len(self.qubits_a) + len(self.qubits_b)

    def check_register(self, n_qubits: int) -> None:
        if set(self.qubits_a) | set(self.qubits_b) != set(range(n_qubits)):
            raise InvalidPartitionError(
                f"partition {self.qubits_a}|{self.qubits_b} does not cover a "
                f"{n_qubits}-qubit register"
            )

    def side(self, which: str) -> tuple[int, ...]:
        which = which.lower()
        if which == "a":
            return self.qubits_a
        if which == "b":
            return self.qubits_b
        raise DomainError(f"side must be 'a' or 'b', got {which!r}")


def half_partition(n_qubits: int) -> Partition:
    """First-half / second-half split of a register."""
    if n_qubits < 2:
        raise InvalidPartitionError("need at least two qubits to bipartition")
    k = n_qubits // 2
    return Partition(tuple(range(k)), tuple(range(k, n_qubits)))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a reduced density matrix, sorted in descending order."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DomainError("empty spectrum")
        arr = np.array(vals)
        if np.any(np.diff(arr) > 1e-12):
            raise DomainError("spectrum values must be non-increasing")
        if arr[-1] < -PSD_TOL or arr[0] > 1.0 + PSD_TOL:
            raise DomainError("spectrum values must lie in [0, 1]")
        if abs(arr.sum() - 1.0) > SPECTRUM_SUM_TOL:
            raise DomainError(f"spectrum sums to {arr.sum()!r}, not 1")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values) -> "Spectrum":
        """Build a spectrum from unsorted values, clipping eigensolver noise."""
        arr = np.sort(np.asarray(values, dtype=float))[::-1]
        arr[(arr < 0) & (arr >= -PSD_TOL)] = 0.0
        arr[(arr > 1) & (arr <= 1 + PSD_TOL)] = 1.0
        return cls(tuple(arr))

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


def basis_state(n_qubits: int, index: int) -> PureState:
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return PureState(n_qubits, amps)


def all_down_state(n_qubits: int) -> PureState:
    """Product state with every spin down (|1...1> in our convention)."""
    return basis_state(n_qubits, 2**n_qubits - 1)


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Compose two registers; a's qubits become the lower (leading) indices."""
    return PureState(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))


def dm_from_pure(state: PureState) -> DensityMatrix:
    amps = state.amplitudes
    return DensityMatrix(state.n_qubits, np.outer(amps, amps.conj()))


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)


def _register_size(matrix: np.ndarray) -> int:
    d = matrix.shape[0]
    n = d.bit_length() - 1
    if matrix.shape != (d, d) or 2**n != d:
        raise DimensionMismatchError(f"matrix of shape {matrix.shape} is not a qubit register")
    return n


def partial_trace_matrix(matrix: np.ndarray, n_qubits: int, keep: tuple[int, ...]) -> np.ndarray:
    """Trace out every qubit not in ``keep``; output basis follows keep's order."""
    other = tuple(i for i in range(n_qubits) if i not in keep)
    t = matrix.reshape((2,) * (2 * n_qubits))
    perm = [*keep, *other, *(n_qubits + i for i in keep), *(n_qubits + i for i in other)]
    t = t.transpose(perm)
    dk, do = 2 ** len(keep), 2 ** len(other)
    t = t.reshape(dk, do, dk, do)
    return np.einsum("ijkj->ik", t)


def reduced_state_matrix(state: PureState | np.ndarray, n_qubits: int, keep: tuple[int, ...]) -> np.ndarray:
    """Reduced density matrix of a pure state, without forming the full matrix."""
    amps = state.amplitudes if isinstance(state, PureState) else np.asarray(state)
    other = tuple(i for i in range(n_qubits) if i not in keep)
    t = amps.reshape((2,) * n_qubits).transpose([*keep, *other])
    x = t.reshape(2 ** len(keep), 2 ** len(other))
    return x @ x.conj().T


def partial_trace(rho: DensityMatrix, p: Partition, keep: str = "a") -> DensityMatrix:
    """Reduced density matrix for one side of a partition."""
    p.check_register(rho.n_qubits)
    kept = p.side(keep)
    out = partial_trace_matrix(rho.matrix, rho.n_qubits, kept)
    return DensityMatrix(len(kept), out)


def partial_transpose_matrix(matrix: np.ndarray, n_qubits: int, subset: tuple[int, ...]) -> np.ndarray:
    t = matrix.reshape((2,) * (2 * n_qubits))
    axes = list(range(2 * n_qubits))
    for i in subset:
        axes[i], axes[n_qubits + i] = axes[n_qubits + i], axes[i]
    d = 2**n_qubits
    return np.ascontiguousarray(t.transpose(axes).reshape(d, d))


def partial_transpose(rho: DensityMatrix, p: Partition, side: str = "a") -> np.ndarray:
    """Transpose the indices of one side only; Hermitian but possibly indefinite."""
    p.check_register(rho.n_qubits)
    return partial_transpose_matrix(rho.matrix, rho.n_qubits, p.side(side))


def hermitian_eigen(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix."""
    m = _as_matrix(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > EIGEN_INPUT_TOL:
        raise ContractViolationError("matrix is not Hermitian within 1e-10")
    w, v = jacobi_eigh(m, compute_vectors=True)
    return w, v


def hermitian_eigenvalues(matrix) -> np.ndarray:
    """Descending eigenvalues only (same solver, no eigenvector accumulation)."""
    m = _as_matrix(matrix)
    if np.max(np.abs(m - m.conj().T)) > EIGEN_INPUT_TOL:
        raise ContractViolationError("matrix is not Hermitian within 1e-10")
    w, _ = jacobi_eigh(m, compute_vectors=False)
    return w


def spectrum_of(rho: DensityMatrix | np.ndarray) -> Spectrum:
    """Spectrum of a density matrix, eigensolver noise clipped to zero."""
    return Spectrum.from_values(hermitian_eigenvalues(_as_matrix(rho)))


class SpectralPropagator:
    """Time evolution exp(-i H t) through one cached eigendecomposition of H."""

    def __init__(self, hamiltonian):
        m = _as_matrix(getattr(hamiltonian, "matrix", hamiltonian))
        self.eigenvalues, self.eigenvectors = hermitian_eigen(m)
        self._vh = np.ascontiguousarray(self.eigenvectors.conj().T)
        self.dim = m.shape[0]

    def apply(self, amplitudes: np.ndarray, t: float) -> np.ndarray:
        c = self._vh @ amplitudes
        return self.eigenvectors @ (np.exp(-1j * self.eigenvalues * t) * c)

    def unitary(self, t: float) -> np.ndarray:
        return (self.eigenvectors * np.exp(-1j * self.eigenvalues * t)) @ self._vh


def evolve(state: PureState, hamiltonian, t: float) -> PureState:
    """Evolve a pure state under a Hermitian generator for time t (units 1/Omega)."""
    m = _as_matrix(getattr(hamiltonian, "matrix", hamiltonian))
    if m.shape[0] != state.dim:
        raise DimensionMismatchError(
            f"Hamiltonian dimension {m.shape[0]} does not match state dimension {state.dim}"
        )
    out = SpectralPropagator(m).apply(state.amplitudes, t)
    return PureState(state.n_qubits, out)


def expectation(rho: DensityMatrix | PureState | np.ndarray, observable: np.ndarray) -> float:
    """Real expectation value of a Hermitian observable."""
    obs = np.asarray(observable, dtype=np.complex128)
    if isinstance(rho, PureState):
        if obs.shape[0] != rho.dim:
            raise DimensionMismatchError("observable does not match state dimension")
        return float(np.vdot(rho.amplitudes, obs @ rho.amplitudes).real)
    m = _as_matrix(rho)
    if obs.shape != m.shape:
        raise DimensionMismatchError("observable does not match density-matrix dimension")
    return float(np.einsum("ij,ji->", m, obs).real)


def fidelity(a: PureState, b: PureState) -> float:
    """Squared overlap |<a|b>|^2; insensitive to global phase."""
    if a.dim != b.dim:
        raise DimensionMismatchError("states live on different registers")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def embed_single_qubit_op(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Embed a one-qubit operator at the given index of an n-qubit register."""
    if not 0 <= qubit < n_qubits:
        raise DomainError(f"qubit {qubit} outside register of size {n_qubits}")
    left = np.eye(2**qubit, dtype=np.complex128)
    right = np.eye(2 ** (n_qubits - qubit - 1), dtype=np.complex128)
    return np.kron(np.kron(left, np.asarray(op, dtype=np.complex128)), right)


def pauli_product(op: np.ndarray, subset: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Product of one-qubit operators over a subset, identity elsewhere."""
    subset = set(subset)
    if subset and (min(subset) < 0 or max(subset) >= n_qubits):
        raise DomainError("subset outside register")
    out = np.array([[1.0 + 0j]])
    for i in range(n_qubits):
        out = np.kron(out, op if i in subset else PAULI_I)
    return out


def apply_local_unitary(
    amplitudes: np.ndarray, unitary: np.ndarray, n_qubits: int, subset: tuple[int, ...]
) -> np.ndarray:
    """Apply a unitary acting on a qubit subset to a full-register state vector.

    Equivalent to multiplying by U embedded with identities, computed by
    grouping the subset axes together.
    """
    subset = tuple(subset)
    other = tuple(i for i in range(n_qubits) if i not in subset)
    t = amplitudes.reshape((2,) * n_qubits).transpose([*subset, *other])
    x = t.reshape(2 ** len(subset), 2 ** len(other))
    y = unitary @ x
    t = y.reshape((2,) * n_qubits)
    inv = np.argsort([*subset, *other])
    return np.ascontiguousarray(t.transpose(inv).reshape(-1))
