"""Builders for the twisting and GHZ-generator Hamiltonians.

All builders place the interaction on a qubit subset of a register, acting
as identity elsewhere. Couplings are in units with hbar = 1; times are in
units of 1/omega.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qcore, spin
from .errors import DomainError


class HamiltonianKind(enum.Enum):
    OAT = "oat"
    TF = "tf"
    TAT = "tat"
    GHZ = "ghz"


def _as_kind(kind) -> HamiltonianKind:
    if isinstance(kind, HamiltonianKind):
        return kind
    try:
        return HamiltonianKind(str(kind).lower())
    except ValueError:
        raise DomainError(f"unknown Hamiltonian kind {kind!r}") from None


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    kind: HamiltonianKind
    omega: float
    omega_z: float | None
    subset: tuple[int, ...]
    n_total: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build(kind, omega: float = 1.0, subset=None, n_total: int | None = None, omega_z: float | None = None) -> Hamiltonian:
    """Construct a Hamiltonian of the given kind on a subset of a register.

    kinds: 'oat' -> omega Jx^2; 'tf' -> omega Jx^2 + omega_z Jz (omega_z
    defaults to omega); 'tat' -> omega (Jx Jy + Jy Jx); 'ghz' -> omega times
    the product of sigma_x over the subset. Collective operators are summed
    over the subset only.
    """
    kind = _as_kind(kind)
    if n_total is None:
        raise DomainError("n_total is required")
    if subset is None:
        subset = tuple(range(n_total))
    subset = tuple(int(i) for i in subset)
    if not subset:
        raise DomainError("Hamiltonian subset must be non-empty")
    if len(set(subset)) != len(subset) or min(subset) < 0 or max(subset) >= n_total:
        raise DomainError(f"subset {subset} invalid for a {n_total}-qubit register")

    if kind is HamiltonianKind.GHZ:
        m = omega * qcore.pauli_product(qcore.PAULI_X, subset, n_total)
        wz = None
    else:
        jx, jy, jz = spin.collective_spin_matrices(subset, n_total)
        if kind is HamiltonianKind.OAT:
            m = omega * (jx @ jx)
            wz = None
        elif kind is HamiltonianKind.TF:
            wz = omega if omega_z is None else omega_z
            m = omega * (jx @ jx) + wz * jz
        else:  # TAT
            m = omega * (jx @ jy + jy @ jx)
            wz = None
    m = np.ascontiguousarray(m)
    m.setflags(write=False)
    return Hamiltonian(kind, float(omega), wz, subset, int(n_total), m)


@dataclass(frozen=True)
class SymmetryReport:
    """Which symmetries of its qubit subset a Hamiltonian preserves.

    spin_flip: invariance under J -> -J, the antiunitary flip implemented as
    conjugation by the product of sigma_y over the subset combined with
    complex conjugation. x_rotation: [H, Jx] = 0. z_parity: invariance under
    (Jx, Jy) -> (-Jx, -Jy), the pi rotation about z.
    """

    spin_flip: bool
    x_rotation: bool
    z_parity: bool
    tolerance: float = 1e-10


def symmetry_report(h: Hamiltonian, tolerance: float = 1e-10) -> SymmetryReport:
    m = h.matrix
    n = h.n_total
    flip = qcore.pauli_product(qcore.PAULI_Y, h.subset, n)
    spin_flip = float(np.max(np.abs(flip @ m.conj() @ flip.conj().T - m))) <= tolerance

    jx, _, _ = spin.collective_spin_matrices(h.subset, n)
    x_rotation = float(np.max(np.abs(m @ jx - jx @ m))) <= tolerance

    parity = qcore.pauli_product(qcore.PAULI_Z, h.subset, n)
    z_parity = float(np.max(np.abs(parity @ m @ parity.conj().T - m))) <= tolerance

    return SymmetryReport(spin_flip, x_rotation, z_parity, tolerance)
