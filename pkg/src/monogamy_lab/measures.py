"""Bipartite entanglement measures for pure and mixed qubit states.

Spectrum-level bounds (`max_concurrence`, `max_negativity`,
`negativity_2pn_from_spectrum`) quantify the most entanglement any state
with a given reduced spectrum can carry; the remaining functions evaluate
concrete states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import qcore
from .errors import DomainError
from .qcore import DensityMatrix, Partition, PureState, Spectrum

_CLIP = 1e-10


class MeasureKind(enum.Enum):
    TSALLIS = "tsallis"
    LINEAR_ENTROPY = "linear_entropy"
    NEGATIVITY_RAW = "negativity_raw"
    NEGATIVITY_NORMALIZED = "negativity_normalized"
    CONCURRENCE = "concurrence"
    MAX_CONCURRENCE = "max_concurrence"
    MAX_NEGATIVITY = "max_negativity"


_NORMALIZED_KINDS = {
    MeasureKind.LINEAR_ENTROPY,
    MeasureKind.NEGATIVITY_NORMALIZED,
    MeasureKind.CONCURRENCE,
    MeasureKind.MAX_CONCURRENCE,
    MeasureKind.MAX_NEGATIVITY,
}


@dataclass(frozen=True)
class MeasureValue:
    kind: MeasureKind
    value: float
    q: int | None = None

    def __post_init__(self):
        if self.value < -_CLIP:
            raise DomainError(f"{self.kind.value} cannot be negative, got {self.value}")
        if self.kind in _NORMALIZED_KINDS and self.value > 1.0 + _CLIP:
            raise DomainError(f"{self.kind.value} cannot exceed 1, got {self.value}")


def _clip01(x: float) -> float:
    return min(max(float(x), 0.0), 1.0)


def _clipped_spectrum(rho) -> np.ndarray:
    w = qcore.hermitian_eigenvalues(rho)
    w = w.copy()
    w[(w < 0) & (w >= -_CLIP)] = 0.0
    return w


def purity(rho: DensityMatrix | np.ndarray) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(np.sum(np.abs(m) ** 2))


def tsallis_entropy(rho: DensityMatrix | np.ndarray, q: int) -> float:
    """One-parameter entropy family; q=1 is von Neumann, q=2 linear entropy."""
    if isinstance(q, float):
        if not q.is_integer():
            raise DomainError(f"q must be an integer >= 1, got {q}")
        q = int(q)
    if not isinstance(q, int) or q < 1:
        raise DomainError(f"q must be an integer >= 1, got {q}")
    w = _clipped_spectrum(rho)
    if q == 1:
        pos = w[w > 0]
        return float(-np.sum(pos * np.log(pos)))
    return float((1.0 - np.sum(w**q)) / (q - 1))


def linear_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """Purity deficit rescaled by dim/(dim-1) so the maximum is 1."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    n = m.shape[0]
    if n < 2:
        raise DomainError("linear entropy needs dimension >= 2")
    return _clip01(n / (n - 1) * (1.0 - purity(m)))


def _negative_sum(eigenvalues: np.ndarray) -> float:
    w = eigenvalues.copy()
    w[(w < 0) & (w >= -_CLIP)] = 0.0
    return float(-np.sum(w[w < 0]))


def negativity_raw(rho: DensityMatrix, p: Partition, side: str = "a") -> float:
    """Sum of |negative eigenvalues| of the partially transposed matrix."""
    pt = qcore.partial_transpose(rho, p, side)
    return _negative_sum(qcore.hermitian_eigenvalues(pt))


def _normalization(p: Partition) -> float:
    d_min = 2 ** min(len(p.qubits_a), len(p.qubits_b))
    return (d_min - 1) / 2.0


def negativity_normalized(rho: DensityMatrix, p: Partition, side: str = "a") -> float:
    """Negativity divided by its maximum (d_min - 1)/2 for the given cut."""
    return _clip01(negativity_raw(rho, p, side) / _normalization(p))


# Positive eigenvalues below this floor are treated as exact zeros in the
# Schmidt route: sqrt() amplifies O(1e-15) eigensolver noise near zero into
# O(1e-8) negativity jitter otherwise.
_SCHMIDT_NOISE_CLIP = 1e-11


def schmidt_negativity_raw(reduced_rho: np.ndarray) -> float:
    """Cut negativity of a pure state from one of its reduced density matrices.

    For a pure state the partial transpose has eigenvalues {mu_i} and
    {+-sqrt(mu_i mu_j), i<j} where mu are the reduced-state eigenvalues, so
    the negativity is ((sum_i sqrt(mu_i))^2 - sum_i mu_i)/2.
    """
    w = _clipped_spectrum(reduced_rho)
    w[w < _SCHMIDT_NOISE_CLIP] = 0.0
    s = np.sum(np.sqrt(w[w > 0]))
    return float(max(0.0, (s * s - np.sum(w)) / 2.0))


def negativity_raw_pure(state: PureState, p: Partition) -> float:
    """Negativity of a pure state across a cut, via its Schmidt spectrum."""
    p.check_register(state.n_qubits)
    keep = p.qubits_a if len(p.qubits_a) <= len(p.qubits_b) else p.qubits_b
    rho_k = qcore.reduced_state_matrix(state, state.n_qubits, keep)
    return schmidt_negativity_raw(rho_k)


def negativity_normalized_pure(state: PureState, p: Partition) -> float:
    return _clip01(negativity_raw_pure(state, p) / _normalization(p))


_SPIN_FLIP = np.kron(qcore.PAULI_Y, qcore.PAULI_Y).real.astype(np.complex128)


def concurrence(rho: DensityMatrix | np.ndarray) -> float:
    """Two-qubit concurrence max(0, mu1 - mu2 - mu3 - mu4).

    The mu_j are the descending square roots of the eigenvalues of
    rho * (S rho^conj S) with S the two-qubit spin-flip sigma_y x sigma_y,
    evaluated through the Hermitian form sqrt(rho) S rho^conj S sqrt(rho).
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if m.shape != (4, 4):
        raise DomainError(f"concurrence is defined for two qubits, got shape {m.shape}")
    w, v = qcore.hermitian_eigen(m)
    w = np.where((w < 0) & (w >= -_CLIP), 0.0, w)
    if w[-1] < 0:
        raise DomainError("concurrence input must be positive semidefinite")
    sqrt_rho = (v * np.sqrt(w)) @ v.conj().T
    flipped = _SPIN_FLIP @ m.conj() @ _SPIN_FLIP
    herm = sqrt_rho @ flipped @ sqrt_rho
    mu2 = np.clip(qcore.hermitian_eigenvalues(herm), 0.0, None)
    # the product matrix is bounded by 1 for trace-one inputs, so anything
    # below 1e-13 is eigensolver noise; sqrt would blow it up to O(1e-7)
    mu2[mu2 < 1e-13] = 0.0
    mu = np.sqrt(mu2)
    return _clip01(mu[0] - mu[1] - mu[2] - mu[3])


def _spectrum4(spec) -> np.ndarray:
    """Coerce to a validated, descending length-4 spectrum array."""
    vals = spec.as_array() if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
    if vals.shape != (4,):
        raise DomainError(f"expected 4 spectrum values, got shape {vals.shape}")
    vals = np.sort(vals)[::-1].copy()
    vals[(vals < 0) & (vals >= -_CLIP)] = 0.0
    if vals[-1] < 0:
        raise DomainError("spectrum values must be non-negative")
    if abs(vals.sum() - 1.0) > qcore.SPECTRUM_SUM_TOL:
        raise DomainError(f"spectrum sums to {vals.sum()!r}, not 1")
    return vals


def max_concurrence(spec) -> float:
    """Largest concurrence reachable by unitaries at fixed two-qubit spectrum."""
    l1, l2, l3, l4 = _spectrum4(spec)
    return _clip01(l1 - l3 - 2.0 * math.sqrt(l2 * l4))


def max_negativity(spec) -> float:
    """Largest normalized negativity reachable at fixed two-qubit spectrum."""
    l1, l2, l3, l4 = _spectrum4(spec)
    return _clip01(math.hypot(l1 - l3, l2 - l4) - l2 - l4)


def negativity_2pn_from_spectrum(spec) -> float:
    """Normalized cut negativity of a 2+N pure state from its length-4 spectrum.

    Equals (1/3) sum_{i != j} sqrt(l_i l_j); the 1/3 sets the maximum
    (the flat spectrum) to one.
    """
    vals = _spectrum4(spec)
    s = np.sum(np.sqrt(vals))
    return _clip01((s * s - 1.0) / 3.0)
