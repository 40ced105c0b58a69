"""Collective spin operators and the minimal-variance squeezing parameter.

The squeezing parameter is 4 min Var(J_perp) / N over directions
perpendicular to the mean spin; the minimization is exact (smallest
eigenvalue of the projected covariance), not a grid search. A state with no
mean spin has no perpendicular plane, so the minimization then runs over the
full unit sphere and the result is flagged as degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import qcore
from .errors import DimensionMismatchError, DomainError
from .qcore import DensityMatrix, PureState

DEGENERATE_MEAN_SPIN_TOL = 1e-9


def collective_spin_matrices(subset: tuple[int, ...], n_total: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Jx, Jy, Jz) summed over a qubit subset, embedded in an n-qubit register."""
    subset = tuple(subset)
    if not subset:
        raise DomainError("subset must be non-empty")
    dim = 2**n_total
    out = []
    for pauli in (qcore.PAULI_X, qcore.PAULI_Y, qcore.PAULI_Z):
        j = np.zeros((dim, dim), dtype=np.complex128)
        for i in subset:
            j += qcore.embed_single_qubit_op(pauli, i, n_total)
        out.append(0.5 * j)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class CollectiveSpinOps:
    """Total-spin components for a set of spin-1/2 particles."""

    subset: tuple[int, ...]
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def n_spins(self) -> int:
        return len(self.subset)

    @property
    def dim(self) -> int:
        return self.jx.shape[0]

    @cached_property
    def moment_operators(self) -> tuple[np.ndarray, ...]:
        """First moments and symmetrized second moments, in the fixed order
        (Jx, Jy, Jz, Sxx, Syy, Szz, Sxy, Sxz, Syz)."""
        jx, jy, jz = self.jx, self.jy, self.jz
        sym = lambda a, b: 0.5 * (a @ b + b @ a)
        return (jx, jy, jz, jx @ jx, jy @ jy, jz @ jz, sym(jx, jy), sym(jx, jz), sym(jy, jz))


def collective_ops(n_spins: int) -> CollectiveSpinOps:
    """Collective spin operators on the local space of n spin-1/2 particles."""
    if n_spins < 1:
        raise DomainError("need at least one spin")
    jx, jy, jz = collective_spin_matrices(tuple(range(n_spins)), n_spins)
    for j in (jx, jy, jz):
        j.setflags(write=False)
    return CollectiveSpinOps(tuple(range(n_spins)), jx, jy, jz)


@dataclass(frozen=True, eq=False)
class SqueezingResult:
    xi2: float
    mean_spin: np.ndarray
    optimal_direction: np.ndarray
    degenerate_mean_spin: bool


def _moment_values(state, operators) -> np.ndarray:
    if isinstance(state, PureState):
        state = state.amplitudes
    elif isinstance(state, DensityMatrix):
        state = state.matrix
    state = np.asarray(state)
    if state.ndim == 1:
        return np.array([np.vdot(state, op @ state).real for op in operators])
    return np.array([np.vdot(state, op).real for op in operators])


def _covariance(moments: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = moments[:3]
    sxx, syy, szz, sxy, sxz, syz = moments[3:]
    second = np.array([[sxx, sxy, sxz], [sxy, syy, syz], [sxz, syz, szz]])
    return mean, second - np.outer(mean, mean)


def _perp_basis(unit: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Seed with the coordinate axis least aligned with the mean spin.
    e = np.zeros(3)
    e[int(np.argmin(np.abs(unit)))] = 1.0
    v1 = e - np.dot(e, unit) * unit
    v1 /= np.linalg.norm(v1)
    v2 = np.cross(unit, v1)
    return v1, v2


def squeezing_parameter(state, ops: CollectiveSpinOps) -> SqueezingResult:
    """Kitagawa-Ueda squeezing parameter with exact direction minimization.

    Accepts a DensityMatrix, a PureState, or the corresponding raw arrays,
    on the same register as ``ops``.
    """
    dim = state.dim if isinstance(state, (DensityMatrix, PureState)) else np.asarray(state).shape[0]
    if dim != ops.dim:
        raise DimensionMismatchError("state and spin operators live on different registers")
    moments = _moment_values(state, ops.moment_operators)
    mean, gamma = _covariance(moments)
    n = ops.n_spins
    norm = float(np.linalg.norm(mean))

    if norm < DEGENERATE_MEAN_SPIN_TOL:
        w, v = qcore.hermitian_eigen(gamma.astype(np.complex128))
        lam = max(0.0, float(w[-1]))
        direction = v[:, -1].real
        nrm = np.linalg.norm(direction)
        if nrm < 1e-12:  # eigenvector came out along the imaginary axis
            direction = np.abs(v[:, -1])
            nrm = np.linalg.norm(direction)
        direction = direction / nrm
        return SqueezingResult(4.0 * lam / n, mean, direction, True)

    unit = mean / norm
    v1, v2 = _perp_basis(unit)
    g11 = float(v1 @ gamma @ v1)
    g22 = float(v2 @ gamma @ v2)
    g12 = float(v1 @ gamma @ v2)
    half_gap = 0.5 * np.hypot(g11 - g22, 2.0 * g12)
    lam = max(0.0, 0.5 * (g11 + g22) - half_gap)
    if abs(g12) < 1e-15 and g11 <= g22:
        x, y = 1.0, 0.0
    else:
        x, y = g12, lam - g11
        if abs(x) < 1e-15 and abs(y) < 1e-15:
            x, y = 1.0, 0.0
    direction = x * v1 + y * v2
    direction = direction / np.linalg.norm(direction)
    return SqueezingResult(4.0 * lam / n, mean, direction, False)


def xi2_from_moment_arrays(moments: np.ndarray, n_spins: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized squeezing parameter from a (9, T) array of moment values.

    Row order matches ``CollectiveSpinOps.moment_operators``. Returns the
    squeezing values and a mask of time points with degenerate mean spin.
    """
    moments = np.asarray(moments, dtype=float)
    mean = moments[:3].T  # (T, 3)
    sxx, syy, szz, sxy, sxz, syz = moments[3:]
    t = mean.shape[0]
    gamma = np.empty((t, 3, 3))
    gamma[:, 0, 0], gamma[:, 1, 1], gamma[:, 2, 2] = sxx, syy, szz
    gamma[:, 0, 1] = gamma[:, 1, 0] = sxy
    gamma[:, 0, 2] = gamma[:, 2, 0] = sxz
    gamma[:, 1, 2] = gamma[:, 2, 1] = syz
    gamma -= mean[:, :, None] * mean[:, None, :]

    norm = np.linalg.norm(mean, axis=1)
    degenerate = norm < DEGENERATE_MEAN_SPIN_TOL
    safe = np.where(degenerate, 1.0, norm)
    unit = mean / safe[:, None]

    e = np.zeros((t, 3))
    e[np.arange(t), np.argmin(np.abs(unit), axis=1)] = 1.0
    v1 = e - np.sum(e * unit, axis=1)[:, None] * unit
    v1 /= np.linalg.norm(v1, axis=1)[:, None]
    v2 = np.cross(unit, v1)

    g11 = np.einsum("ti,tij,tj->t", v1, gamma, v1)
    g22 = np.einsum("ti,tij,tj->t", v2, gamma, v2)
    g12 = np.einsum("ti,tij,tj->t", v1, gamma, v2)
    lam = 0.5 * (g11 + g22) - 0.5 * np.hypot(g11 - g22, 2.0 * g12)

    for i in np.flatnonzero(degenerate):
        w = qcore.hermitian_eigenvalues(gamma[i])
        lam[i] = w[-1]

    return 4.0 * np.clip(lam, 0.0, None) / n_spins, degenerate
